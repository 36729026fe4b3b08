#pragma once

#include <optional>
#include <string>
#include <vector>

#include "epilab/convex_spec.hpp"
#include "epilab/verdict.hpp"

namespace epilab {

/// Implicit Euler (minimizing movement) discretization of γ̇ ∈ −∂f(γ).
struct DescentTrajectory {
  ConvexSpec spec;
  double h = 0.0;
  std::vector<double> times;
  std::vector<Point> points;
  std::vector<ExtReal> values;
  std::vector<std::optional<ExtReal>> slopes;  // empty where not computable
  /// First k with ‖x_{k+1} − x_k‖ below the arrival threshold.
  std::optional<std::size_t> arrival;
};

constexpr double kArrivalThreshold = 1e-12;

/// ⌈T/h⌉ steps x_{k+1} = prox_{hf}(x_k). x0 is projected onto dom f when it
/// lies outside and an exact projection exists. After arrival the trajectory
/// is extended as constant.
DescentTrajectory descend(const ConvexSpec& spec, const Point& x0, double h, double T);

/// |f(x_0) − f(x_K) − Σ_k h s_f(x_k)²| with left-endpoint quadrature.
double energy_identity_defect(const DescentTrajectory& traj);

/// Σ ‖x_{k+1} − x_k‖.
double trajectory_length(const DescentTrajectory& traj);

/// Checks that g(x_k) approaches inf g along the tail, given a finite
/// discrete ∫ s_g ‖γ̇‖ and tail slopes of g reaching tol.
Verdict infimizing_check(const DescentTrajectory& traj, const ConvexSpec& g, double tol = 1e-3);

/// Final value within tol of inf f, final slope ≤ tol, and a settled tail.
Verdict flow_limit_check(const DescentTrajectory& traj, double tol = 1e-3);

/// Rows k, t, x1..xd, f, slope.
std::string trajectory_csv(const DescentTrajectory& traj);

}  // namespace epilab
