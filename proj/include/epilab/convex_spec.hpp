#pragma once

#include <memory>
#include <json.hpp>
#include <optional>
#include <vector>

#include "epilab/domain.hpp"
#include "epilab/expr.hpp"
#include "epilab/extreal.hpp"
#include "epilab/pwq1d.hpp"
#include "epilab/subdiff.hpp"
#include "epilab/types.hpp"

namespace epilab {

/// ½ xᵀQx + bᵀx + c
struct QuadForm {
  Matrix Q;
  Point b;
  double c = 0.0;
};

/// Immutable builder tree denoting a proper convex lsc function on R^d.
///
/// Copies share the tree. Every operation is const and deterministic, so a
/// spec can be used from several threads at once.
class ConvexSpec {
 public:
  enum class Kind {
    Quadratic,
    ScaledNorm,
    MaxAffine,
    IndicatorBox,
    IndicatorBall,
    Constant,
    Piecewise,
    Sum,
    Scale,
    Tilt,
    Translate,
    RestrictSegment,
  };

  struct AffinePiece {
    Point g;
    double beta = 0.0;
  };

  static ConvexSpec quadratic(Matrix Q, Point b, double c);
  static ConvexSpec scaled_norm(int dim, double alpha);
  static ConvexSpec max_affine(std::vector<AffinePiece> pieces);
  static ConvexSpec indicator_box(Point lo, Point hi);
  static ConvexSpec indicator_ball(Point center, double radius);
  static ConvexSpec constant(int dim, double c);
  static ConvexSpec piecewise(PWQuad1D g);

  static ConvexSpec sum(std::vector<ConvexSpec> terms);
  ConvexSpec scaled(double alpha) const;
  /// f(x) + vᵀx
  ConvexSpec tilted(Point v) const;
  /// f(x − z)
  ConvexSpec translated(Point z) const;
  /// f + indicator of the segment [a, b]
  ConvexSpec restricted_to_segment(Point a, Point b) const;

  int dimension() const;
  Kind kind() const;
  const Domain& domain() const;

  ExtReal evaluate(const Point& x) const;

  /// argmin_u f(u) + ‖u − x‖²/(2λ). Throws NoProxPath when the tree has no
  /// closed form (generic Sum in d ≥ 2).
  Point prox(double lambda, const Point& x) const;
  bool has_prox_path() const;

  /// Exact ∂f(x); throws NotExactClass when the tree leaves the exact classes.
  SubdiffSet subdifferential(const Point& x) const;
  /// Same with an explicit relative active-set tolerance for MaxAffine pieces.
  SubdiffSet subdifferential_with(const Point& x, double active_tol) const;
  bool has_exact_subdifferential() const;

  /// Quadratic form when the tree is quadratic, affine or constant.
  std::optional<QuadForm> as_quadratic() const;
  /// True for trees that contain a Piecewise leaf.
  bool uses_piecewise() const;

  /// Exact piecewise-quadratic form (d = 1 only).
  PWQuad1D to_piecewise() const;
  /// s ↦ f(p + q s) as a piecewise-quadratic function, when representable.
  std::optional<PWQuad1D> restrict_to_line(const Point& p, const Point& q) const;

  nlohmann::json to_json() const;

  struct Node;
  /// Tree node; its layout is private to the library.
  const Node& node() const { return *node_; }

 private:
  explicit ConvexSpec(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

/// Parses a spec document {"schema": 1, "dimension": d, "root": {...}}.
/// Numeric fields may be strings evaluated with `vars` (e.g. n).
ConvexSpec parse_spec(const nlohmann::json& document, const ExprVars& vars = {});
/// Parses a bare node of known dimension; `path` prefixes error messages.
ConvexSpec parse_spec_node(const nlohmann::json& node, int dim, const ExprVars& vars,
                           const std::string& path = "root");
nlohmann::json spec_document(const ConvexSpec& spec);

struct ExactInfimum {
  ExtReal value;
  /// A minimizer; the one nearest the origin when argmin f is known in closed
  /// form (d = 1, quadratic forms, indicators).
  Point argmin;
};

/// inf f with a minimizer, for trees where it is available in closed form
/// (d = 1, quadratic forms, indicators, norms, scaled/shifted versions and a
/// few separable sums). nullopt when unknown; throws UnboundedBelow.
std::optional<ExactInfimum> exact_infimum(const ConvexSpec& spec);

struct ConjugateGridConfig {
  Box box;
  int resolution = 201;  // grid points per axis
};

struct ConjugateValue {
  ExtReal value;
  /// The grid sup was attained on the box boundary.
  bool boundary_attained = false;
};

/// Discrete Legendre transform over a uniform grid of config.box. Values whose
/// sup keeps growing when the box is doubled are reported as +∞.
std::vector<ConjugateValue> conjugate_grid(const ConvexSpec& spec,
                                           const std::vector<Point>& slopes,
                                           const ConjugateGridConfig& config);

/// |f(x) + f*(x*) − ⟨x*, x⟩| ≤ tol. f* is exact in d = 1 and grid-based
/// otherwise (box centred at x). Throws OutsideDomain when f(x) = +∞.
bool fenchel_subgradient_check(const ConvexSpec& spec, const Point& x, const Point& xstar,
                               double tol);

}  // namespace epilab
