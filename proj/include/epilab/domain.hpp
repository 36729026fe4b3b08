#pragma once

#include <optional>
#include <random>
#include <variant>
#include <vector>

#include "epilab/pwq1d.hpp"
#include "epilab/types.hpp"

namespace epilab {

struct BoxSet {
  Point lo;
  Point hi;
};

struct BallSet {
  Point center;
  double radius = 0.0;
};

struct SegmentSet {
  Point a;
  Point b;
};

using ConvexSet = std::variant<BoxSet, BallSet, SegmentSet>;

bool contains(const ConvexSet& set, const Point& x);
Point project(const ConvexSet& set, const Point& x);
ConvexSet shifted(const ConvexSet& set, const Point& v);

/// Effective domain of a spec as an intersection of simple convex sets. An
/// empty list means the whole space. Boxes are merged on intersection, so a
/// domain holds at most one box.
class Domain {
 public:
  explicit Domain(int dim) : dim_(dim) {}
  Domain(int dim, std::vector<ConvexSet> sets);

  int dimension() const { return dim_; }
  bool is_whole() const { return sets_.empty(); }
  const std::vector<ConvexSet>& sets() const { return sets_; }

  bool contains(const Point& x) const;
  Domain intersect(const Domain& other) const;
  Domain shifted(const Point& v) const;

  /// Exact Euclidean projection; available when the domain is the whole space
  /// or a single set.
  std::optional<Point> exact_projection(const Point& x) const;
  /// Some point of the domain (alternating projections); throws EmptyDomain.
  Point feasible_point() const;
  /// Domain as an interval (d = 1 only).
  Interval as_interval() const;

  /// Points in the relative interior, drawn with rng. Supported for the whole
  /// space, a single box (degenerate coordinates are fixed), a single ball,
  /// or a single segment; nullopt otherwise.
  std::optional<std::vector<Point>> sample_relative_interior(std::mt19937_64& rng,
                                                              int count) const;

 private:
  void normalize();

  int dim_;
  std::vector<ConvexSet> sets_;
};

}  // namespace epilab
