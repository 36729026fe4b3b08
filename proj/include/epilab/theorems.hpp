#pragma once

#include <vector>

#include "epilab/setconv.hpp"

namespace epilab {

struct NCTriple {
  Index n = 1;
  Point x;
  Point xstar;
  double value = 0.0;
};

/// Triples (x_n, x_n*, f_n(x_n)) in the graphs △f_n with a limit triple.
struct NCWitness {
  std::vector<NCTriple> triples;
  Point x;
  Point xstar;
  double value = 0.0;
};

/// x_n the minimizer of f_n nearest the origin, x_n* = 0, value inf f_n;
/// the limit triple is built the same way from f. Throws UnknownInfimum.
NCWitness argmin_witness(const FunctionSeq& seq);

struct TheoremConfig {
  EpiConfig epi;
  double tol = 1e-3;
  double feasibility_tol = 1e-9;
  double inf_tol = 1e-3;
  double slope_bound = 1e4;
};

/// Tail defects of the witness triples against the limit triple, and the
/// limit pair in ∂f. A triple outside △f_n throws InvalidArgument.
Verdict nc_check(const FunctionSeq& seq, const NCWitness& witness, const TheoremConfig& config = {});

/// (x_n, f_n(x_n)) → (x̄, f(x̄)) with x̄ ∈ dom ∂f and bounded slopes s_{f_n}(x_n).
Verdict nc_weak_check(const FunctionSeq& seq, const std::vector<WitnessPoint>& witness,
                      const Point& xbar, const TheoremConfig& config = {});

/// f ≥ g on the grid under inf f ≥ inf g and s_f ≥ s_g on the grid. Fails
/// only if the conclusion breaks while both hypotheses hold.
Verdict comparison_check(const ConvexSpec& f, const ConvexSpec& g, const std::vector<Point>& grid,
                         double tol = 1e-9);

struct GraphWindow {
  Box x;
  Box xstar;
  double spacing = 0.01;
};

/// Exact sample of △f inside the window: in d = 1 the polyline of gph ∂f
/// (kinks and domain ends included), in d ≥ 2 the gradient graph of a
/// quadratic. Throws NotExactClass otherwise.
GraphSample graph_sample(const ConvexSpec& f, const GraphWindow& window);

struct PkResult {
  double liminf_defect = 0.0;
  double limsup_defect = 0.0;
  double threshold = 0.0;
};

/// Both PK defects against 3h, with h the coarsest resolution.
Verdict pk_verdict(const SampledSet& limit, const std::vector<SampledSet>& seq, PkResult* out = nullptr);

struct AttouchReport {
  Verdict epi;          // (i)
  Verdict graph;        // ∂f_n → ∂f as graphs
  Verdict nc;
  Verdict subdiff_nc;   // (ii)
  Verdict full_graph;   // (iii)
  bool consistent = true;
  Verdict overall;
};

AttouchReport attouch_check(const FunctionSeq& seq, const std::vector<GraphSample>& graphs,
                            const GraphSample& limit_graph, const NCWitness& witness,
                            const std::vector<Point>& test_points, const TheoremConfig& config = {});

struct MainReport {
  Verdict epi;        // (i)
  Verdict slope_epi;
  Verdict nc;
  Verdict inf_condition;
  Verdict slope_nc;   // (ii)
  Verdict slope_inf;  // (iii)
  bool consistent = true;
  /// All three conclusive and in disagreement: contradicts the theorem.
  bool red_alert = false;
  Verdict overall;
  ExtReal inf_f;
  ExtReal inf_lower;
  ExtReal inf_upper;
  EpiReport epi_details;
  EpiReport slope_details;
};

MainReport main_theorem_check(const FunctionSeq& seq, const NCWitness& witness,
                              const std::vector<Point>& test_points,
                              const TheoremConfig& config = {});

}  // namespace epilab
