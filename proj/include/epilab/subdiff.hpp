#pragma once

#include <variant>
#include <vector>

#include "epilab/pwq1d.hpp"
#include "epilab/types.hpp"

namespace epilab {

/// Nearest point to the origin in conv{points} (Wolfe's minimum-norm-point
/// algorithm). Runs to exact termination on small vertex sets.
Point min_norm_in_hull(const std::vector<Point>& points);

/// Per-coordinate sign constraint of a box normal cone.
enum class ConeAxis { Zero, NonNeg, NonPos, Free };

/// Exactly representable subdifferential sets.
class SubdiffSet {
 public:
  struct Empty {};
  struct Polytope {
    std::vector<Point> vertices;
  };
  struct Ball {
    Point center;
    double radius;
  };
  /// offset + K with K a product of coordinate cones.
  struct BoxCone {
    Point offset;
    std::vector<ConeAxis> axes;
  };
  /// offset + {t·direction : t ≥ 0}
  struct Ray {
    Point offset;
    Point direction;
  };
  using Variant = std::variant<Empty, Interval, Polytope, Ball, BoxCone, Ray>;

  static SubdiffSet empty(int dim);
  static SubdiffSet point(const Point& p);
  static SubdiffSet hull(std::vector<Point> vertices);
  static SubdiffSet ball(const Point& center, double radius);
  static SubdiffSet box_cone(const Point& offset, std::vector<ConeAxis> axes);
  static SubdiffSet ray(const Point& offset, const Point& direction);
  static SubdiffSet interval(const Interval& iv);

  int dimension() const { return dim_; }
  bool is_empty() const;
  const Variant& set() const { return set_; }

  /// Euclidean projection of y onto the set; throws InvalidArgument if empty.
  Point nearest(const Point& y) const;
  /// +inf when empty.
  double distance(const Point& y) const;
  bool contains(const Point& y, double tol) const;

  /// Minkowski sum. Throws NotExactClass when the result leaves the
  /// representable family (d ≥ 2 only; in d = 1 everything is an interval).
  SubdiffSet operator+(const SubdiffSet& other) const;
  SubdiffSet scaled(double alpha) const;
  SubdiffSet shifted(const Point& v) const;

 private:
  SubdiffSet(int dim, Variant v);
  bool is_singleton() const;
  Interval to_interval() const;

  int dim_;
  Variant set_;
};

}  // namespace epilab
