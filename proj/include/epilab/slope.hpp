#pragma once

#include <string>
#include <vector>

#include "epilab/convex_spec.hpp"

namespace epilab {

enum class SlopeMethod { ExactPolyhedral, ExactQuadratic, Oracle1D, ProxLadder };

const char* to_string(SlopeMethod method);

struct LadderStep {
  double lambda;
  double estimate;
};

struct SlopeValue {
  ExtReal value;
  SlopeMethod method = SlopeMethod::ExactPolyhedral;
  std::vector<LadderStep> trace;  // only for ProxLadder
};

struct MinNormSubgradient {
  Point vector;
  double norm = 0.0;
};

struct LadderConfig {
  double blowup = 1e6;   // smallest-λ estimate above this may signal +∞
  double growth = 0.10;  // ... when each of the last three estimates grows this much
};

/// λ_k = 2^-k, k = 0..20.
std::vector<double> default_slope_ladder();

/// dist(0, ∂f(x)) from the exact subdifferential. Throws NotExactClass
/// outside the exact classes.
SlopeValue slope_exact(const ConvexSpec& spec, const Point& x);

/// ‖x − prox_λ(x)‖/λ along a strictly decreasing ladder. The value is the
/// last estimate, or +∞ per `config`. A trace that decreases by more than
/// tol·max(1, estimate) throws BrokenProx.
SlopeValue slope_prox_estimate(const ConvexSpec& spec, const Point& x,
                               const std::vector<double>& ladder, double tol,
                               const LadderConfig& config = {});

/// Exact slope where available, prox ladder otherwise; +∞ outside dom f.
SlopeValue slope(const ConvexSpec& spec, const Point& x);

/// Projection of 0 onto ∂f(x). Throws OutsideDomain when ∂f(x) is empty.
MinNormSubgradient min_norm_subgradient(const ConvexSpec& spec, const Point& x);

/// f(p) + ‖x − p‖²/(2λ) with p = prox_λ(x).
double moreau_envelope(const ConvexSpec& spec, double lambda, const Point& x);

/// "lambda,estimate" rows of a prox-ladder trace.
std::string trace_csv(const SlopeValue& value);

}  // namespace epilab
