#pragma once

// Painlevé–Kuratowski limits of sampled sets and epigraphical limits of
// function sequences. Everything here works on finite ladders: a sequence is
// known at indices n_1 < ... < n_N and its "tail" is the last ceil(N/3) of
// them.

#include <functional>
#include <memory>
#include <vector>

#include "epilab/convex_spec.hpp"
#include "epilab/verdict.hpp"

namespace epilab {

/// Finite sample of a set. `resolution` is the covering radius the sampler
/// guarantees inside `box`.
struct SampledSet {
  std::vector<Point> points;
  double resolution = 0.0;
  Box box;
};

struct GraphTriple {
  Point x;
  Point xstar;
  double value = 0.0;
};

/// Sample of {(x, x*, f(x)) : x* ∈ ∂f(x)}.
struct GraphSample {
  std::vector<GraphTriple> triples;
  double resolution = 0.0;
};

/// (x, x*) pairs embedded in R^{2d}.
SampledSet subdifferential_graph(const GraphSample& g);
/// (x, x*, value) triples embedded in R^{2d+1}.
SampledSet full_graph(const GraphSample& g);

/// Static k-d tree answering Euclidean nearest-distance queries.
class PointCloudIndex {
 public:
  explicit PointCloudIndex(std::vector<Point> points);

  bool empty() const { return points_.empty(); }
  /// Distance to the nearest point; +inf for an empty cloud.
  double distance(const Point& q) const;

 private:
  struct Node {
    int point = -1;
    int axis = 0;
    int left = -1;
    int right = -1;
  };

  int build(std::vector<int>& idx, int begin, int end, int depth);
  void search(int node, const Point& q, double& best) const;

  std::vector<Point> points_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

/// max over x ∈ S of the largest tail distance dist(x, S_n). A value within
/// the sampling resolution means S ⊂ Liminf S_n. Needs at least 6 members.
double pk_liminf_defect(const SampledSet& S, const std::vector<SampledSet>& seq);

/// max over cluster points y of dist(y, S); 0 when no clusters. Candidates are
/// tail points that recur within τ = 3h in at least ceil(N/3) members, with h
/// the coarsest member resolution. A small value means Limsup S_n ⊂ S.
double pk_limsup_defect(const SampledSet& S, const std::vector<SampledSet>& seq);

struct TailConfig {
  double blowup = 1e6;   // threshold above which growth is read as +∞
  double growth = 0.10;  // relative growth across the tail required for +∞
};

struct TailLimits {
  ExtReal liminf;
  ExtReal limsup;
  bool diverging = false;
};

/// Tail liminf/limsup of a sampled sequence. A tail that is nondecreasing,
/// ends above `blowup` and grows by `growth` from first to last is +∞.
TailLimits tail_limits(const std::vector<ExtReal>& values, const TailConfig& config = {});

/// Extended-real function R^d → R ∪ {+∞} seen through values and ball infima.
/// Implementations need not be convex.
class ExtendedFunction {
 public:
  virtual ~ExtendedFunction() = default;

  virtual int dimension() const = 0;
  virtual ExtReal value(const Point& x) const = 0;
  /// inf of the function over the closed ball B(x, eps). The default is a
  /// uniform grid with at least 2^d·17 points in the ball plus `hints`.
  virtual ExtReal inf_over_ball(const Point& x, double eps) const;

 protected:
  /// Extra candidate points for the default inf_over_ball.
  virtual std::vector<Point> hints(const Point& x, double eps) const;
};

/// Grid points of B(x, eps) used by the default inf_over_ball.
std::vector<Point> ball_grid(const Point& x, double eps);

std::shared_ptr<const ExtendedFunction> function_of(const ConvexSpec& spec);
/// x ↦ s_f(x), an extended-real function that is generally not convex.
std::shared_ptr<const ExtendedFunction> slope_function_of(const ConvexSpec& spec);

/// n ↦ f_n plus the candidate limit f.
struct FunctionSeq {
  int dimension = 1;
  std::function<ConvexSpec(Index)> member;
  ConvexSpec limit = ConvexSpec::constant(1, 0.0);
  std::vector<Index> ladder;
};

/// n = 2^0, ..., 2^32.
std::vector<Index> default_index_ladder();
/// ε = 2^0, ..., 2^-16.
std::vector<double> default_eps_ladder();

/// Materialized sequence of extended-real functions on a common ladder.
struct Family {
  int dimension = 1;
  std::vector<Index> indices;
  std::vector<std::shared_ptr<const ExtendedFunction>> members;
  std::shared_ptr<const ExtendedFunction> limit;
};

Family value_family(const FunctionSeq& seq);
/// The slope functions s_{f_n} with limit s_f.
Family slope_family(const FunctionSeq& seq);

struct EpiConfig {
  std::vector<double> eps_ladder = default_eps_ladder();
  TailConfig tail;
  double tol = 1e-3;
};

struct EpiRung {
  double eps = 0.0;
  std::vector<ExtReal> inner;  // inf over B(x, eps) of f_n, per index
  ExtReal lower;
  ExtReal upper;
};

struct EpiLimitEstimate {
  Point x;
  ExtReal lower;
  ExtReal upper;
  std::vector<EpiRung> rungs;
  /// The two finest rungs agree within tol.
  bool lower_stable = true;
  bool upper_stable = true;
};

/// f_l(x) and f_u(x) from the ε/n double ladder, read at the finest ε.
EpiLimitEstimate epi_limits(const Family& family, const Point& x, const EpiConfig& config = {});

EpiLimitEstimate epi_lower_limit(const FunctionSeq& seq, const Point& x,
                                 const std::vector<double>& eps_ladder,
                                 const std::vector<Index>& n_ladder);
EpiLimitEstimate epi_upper_limit(const FunctionSeq& seq, const Point& x,
                                 const std::vector<double>& eps_ladder,
                                 const std::vector<Index>& n_ladder);

struct EpiReport {
  Verdict verdict;
  std::vector<EpiLimitEstimate> estimates;
  std::vector<ExtReal> limit_values;
};

/// Compares f_l and f_u with f at each test point. Fails at a stable
/// mismatch, inconclusive at an unstable one.
EpiReport epi_report(const Family& family, const std::vector<Point>& test_points,
                     const EpiConfig& config = {});
Verdict epi_converges(const FunctionSeq& seq, const std::vector<Point>& test_points, double tol);

struct WitnessPoint {
  Index n = 1;
  Point x;
};

struct LemmaConfig {
  EpiConfig epi;
  double slope_bound = 1e4;  // certificate for "bounded slopes"
  double tol = 1e-3;
  double domain_radius = 1e-2;  // h in the domain sandwich check
};

/// Checks f_l(x̄) = liminf f_n(x_n) and f_u(x̄) = limsup f_n(x_n) for a witness
/// x_n → x̄ with bounded slopes. `witness` must follow the sequence ladder.
Verdict tightness_check(const FunctionSeq& seq, const std::vector<WitnessPoint>& witness,
                        const Point& xbar, const LemmaConfig& config = {});

/// Domain sandwich dom s_f ⊂ dom f_l ∩ dom f_u and dom f_l ∪ dom f_u ⊂ cl dom f
/// at the test points. Precondition: slope epi-convergence and a witness with
/// bounded slopes and convergent (x_n, f_n(x_n)).
Verdict domain_sandwich_check(const FunctionSeq& seq, const std::vector<WitnessPoint>& witness,
                              const Point& xbar, const std::vector<Point>& test_points,
                              const LemmaConfig& config = {});

}  // namespace epilab
