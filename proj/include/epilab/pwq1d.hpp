#pragma once

// Exact calculus for univariate convex piecewise-quadratic functions. This is
// the reference the generic d-dimensional paths are checked against, so it
// deliberately avoids any iterative numerics: every operation is a finite
// walk over pieces and breakpoints.

#include <json.hpp>
#include <optional>
#include <vector>

#include "epilab/extreal.hpp"

namespace epilab {

/// Closed interval [lo, hi] with possibly infinite ends, or the empty set.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool empty = false;

  static Interval make_empty() { return {0.0, 0.0, true}; }
  static Interval point(double v) { return {v, v, false}; }
  static Interval whole();

  bool contains(double v, double tol = 0.0) const {
    return !empty && v >= lo - tol && v <= hi + tol;
  }
  /// Point of the interval closest to v (interval must be nonempty).
  double nearest(double v) const;
  /// dist(v, interval); +inf when empty.
  double distance(double v) const;
  Interval operator+(const Interval& other) const;
  Interval scaled(double alpha) const;
  Interval shifted(double v) const;
};

/// a x² + b x + c on one piece; a ≥ 0.
struct QuadPiece {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  double value(double x) const { return (a * x + b) * x + c; }
  double derivative(double x) const { return 2.0 * a * x + b; }
  QuadPiece operator+(const QuadPiece& o) const { return {a + o.a, b + o.b, c + o.c}; }
};

enum class BoundPolicy {
  RequireBoundedBelow,  // default: functions unbounded below are rejected
  AllowUnbounded,       // opt-in for negative cases and conjugates
};

struct Infimum1D {
  ExtReal value;
  Interval argmin;  // empty iff not attained
  bool attained = true;
};

/// Proper convex lsc function R → R ∪ {+∞} made of quadratic pieces.
///
/// Domain is the closed interval [lo, hi] (ends may be infinite). Breakpoints
/// lie strictly inside the domain; piece i covers [t_{i-1}, t_i]. Adjacent
/// pieces with identical coefficients are merged on construction.
class PWQuad1D {
 public:
  static constexpr double kMergeTol = 1e-12;

  static PWQuad1D create(double lo, double hi, std::vector<double> breakpoints,
                         std::vector<QuadPiece> pieces,
                         BoundPolicy policy = BoundPolicy::RequireBoundedBelow);

  static PWQuad1D quadratic(double a, double b, double c,
                            BoundPolicy policy = BoundPolicy::RequireBoundedBelow);
  static PWQuad1D constant(double c);
  /// max_i (slope_i x + intercept_i)
  static PWQuad1D max_affine(const std::vector<std::pair<double, double>>& pieces,
                             BoundPolicy policy = BoundPolicy::RequireBoundedBelow);
  static PWQuad1D indicator(double lo, double hi);
  /// Huber function with parameter mu > 0 (Moreau envelope of |x|).
  static PWQuad1D huber(double mu);

  double domain_lo() const { return lo_; }
  double domain_hi() const { return hi_; }
  Interval domain() const { return {lo_, hi_, false}; }
  const std::vector<double>& breakpoints() const { return breaks_; }
  const std::vector<QuadPiece>& pieces() const { return pieces_; }

  ExtReal value(double x) const;
  /// [f'_-(x), f'_+(x)] with unbounded sides at finite domain ends; empty
  /// outside the domain.
  Interval subdifferential(double x) const;
  ExtReal slope(double x) const;
  /// Unique p with x − p ∈ λ ∂f(p).
  double prox(double lambda, double x) const;
  PWQuad1D conjugate() const;
  /// Throws UnboundedBelow when inf f = −∞.
  Infimum1D infimum() const;
  bool bounded_below() const;

  /// min of f over [a, b] (exact); +inf if [a, b] misses the domain.
  ExtReal min_over(double a, double b) const;
  /// min of the slope x ↦ dist(0, ∂f(x)) over [a, b] (exact).
  ExtReal min_slope_over(double a, double b) const;

  PWQuad1D operator+(const PWQuad1D& other) const;
  PWQuad1D scaled(double alpha) const;
  /// f(x) + v x
  PWQuad1D tilted(double v) const;
  /// f(x − z)
  PWQuad1D translated(double z) const;
  /// f + indicator of [a, b]
  PWQuad1D restricted(double a, double b) const;
  /// s ↦ f(p + q s), q ≠ 0
  PWQuad1D compose_affine(double p, double q) const;
  PWQuad1D with_policy(BoundPolicy policy) const;

  /// Same domain, same values at all breakpoints of either function and at
  /// sample points in between, within tol (relative to magnitude).
  bool approx_equal(const PWQuad1D& other, double tol) const;

  nlohmann::json to_json() const;
  static PWQuad1D from_json(const nlohmann::json& j,
                            BoundPolicy policy = BoundPolicy::RequireBoundedBelow);

 private:
  PWQuad1D() = default;

  std::size_t piece_index(double x) const;
  double left_derivative(double x) const;
  double right_derivative(double x) const;

  double lo_ = 0.0;
  double hi_ = 0.0;
  std::vector<double> breaks_;
  std::vector<QuadPiece> pieces_;
};

namespace oracle1d {

inline Interval exact_subdiff(const PWQuad1D& g, double x) { return g.subdifferential(x); }
inline ExtReal exact_slope(const PWQuad1D& g, double x) { return g.slope(x); }
inline double exact_prox(const PWQuad1D& g, double lambda, double x) { return g.prox(lambda, x); }
inline PWQuad1D exact_conjugate(const PWQuad1D& g) { return g.conjugate(); }
inline Infimum1D exact_inf(const PWQuad1D& g) { return g.infimum(); }

}  // namespace oracle1d

}  // namespace epilab
