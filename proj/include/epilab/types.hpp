#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "epilab/error.hpp"

namespace epilab {

using Point = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Index n of a sequence member. Ladders reach 2^40, hence 64 bits.
using Index = std::int64_t;

/// Axis-aligned box [lo, hi] in R^d.
struct Box {
  Point lo;
  Point hi;

  int dimension() const { return static_cast<int>(lo.size()); }
  bool contains(const Point& x) const;
  Point clamp(const Point& x) const;
};

inline Point make_point(std::initializer_list<double> coords) {
  Point p(static_cast<Eigen::Index>(coords.size()));
  Eigen::Index i = 0;
  for (double c : coords) p(i++) = c;
  return p;
}

inline Point make_point(const std::vector<double>& coords) {
  return Eigen::Map<const Point>(coords.data(), static_cast<Eigen::Index>(coords.size()));
}

inline std::vector<double> to_vector(const Point& p) {
  return {p.data(), p.data() + p.size()};
}

inline void require_dimension(const Point& x, int d, const char* what) {
  if (x.size() != d) {
    fail(ErrorCode::DimensionMismatch,
         std::string(what) + ": expected dimension " + std::to_string(d) + ", got " +
             std::to_string(x.size()));
  }
}

/// Relative tolerance scale max(1, |v|).
inline double rel_scale(double v) { return v < 0 ? (-v > 1 ? -v : 1.0) : (v > 1 ? v : 1.0); }

}  // namespace epilab
