#include "epilab/flow.hpp"

#include <cmath>
#include <limits>

#include "epilab/csv.hpp"
#include "epilab/slope.hpp"

namespace epilab {

namespace {

std::optional<ExtReal> try_slope(const ConvexSpec& spec, const Point& x) {
  try {
    return slope(spec, x).value;
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::size_t tail_begin(std::size_t n) { return n - (n + 2) / 3; }

std::vector<std::pair<std::string, double>> tolerances(double tol) { return {{"tol", tol}}; }

}  // namespace

DescentTrajectory descend(const ConvexSpec& spec, const Point& x0, double h, double T) {
  if (!(h > 0.0) || !std::isfinite(h)) fail(ErrorCode::InvalidArgument, "step h must be finite and > 0");
  if (!(T > 0.0) || !std::isfinite(T)) fail(ErrorCode::InvalidArgument, "horizon T must be finite and > 0");
  require_dimension(x0, spec.dimension(), "descend");
  Point x = x0;
  if (spec.evaluate(x).is_infinite()) {
    auto p = spec.domain().exact_projection(x);
    if (!p || spec.evaluate(*p).is_infinite()) {
      fail(ErrorCode::OutsideDomain, "x0 is outside dom f and cannot be projected onto it");
    }
    x = *p;
  }
  if (!spec.has_prox_path()) fail(ErrorCode::NoProxPath, "descend: f has no prox path");

  const auto steps = static_cast<std::size_t>(std::ceil(T / h - 1e-9));
  DescentTrajectory tr{spec, h, {}, {}, {}, {}, std::nullopt};
  tr.times.reserve(steps + 1);
  tr.points.reserve(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    if (k > 0) {
      if (!tr.arrival) {
        Point next = spec.prox(h, x);
        if ((next - x).norm() < kArrivalThreshold) tr.arrival = k - 1;
        x = std::move(next);
      }
    }
    tr.times.push_back(static_cast<double>(k) * h);
    tr.points.push_back(x);
    if (tr.arrival && *tr.arrival + 1 < k) {
      tr.values.push_back(tr.values.back());
      tr.slopes.push_back(tr.slopes.back());
    } else {
      tr.values.push_back(spec.evaluate(x));
      tr.slopes.push_back(try_slope(spec, x));
    }
  }
  return tr;
}

double energy_identity_defect(const DescentTrajectory& traj) {
  if (traj.points.empty()) fail(ErrorCode::InvalidArgument, "empty trajectory");
  double integral = 0.0;
  for (std::size_t k = 0; k + 1 < traj.points.size(); ++k) {
    if (!traj.slopes[k] || traj.slopes[k]->is_infinite()) {
      fail(ErrorCode::InvalidArgument, "slope missing at step " + std::to_string(k));
    }
    const double s = traj.slopes[k]->value();
    integral += traj.h * s * s;
  }
  const double drop = traj.values.front().value() - traj.values.back().value();
  return std::abs(drop - integral);
}

double trajectory_length(const DescentTrajectory& traj) {
  double len = 0.0;
  for (std::size_t k = 0; k + 1 < traj.points.size(); ++k) {
    len += (traj.points[k + 1] - traj.points[k]).norm();
  }
  return len;
}

Verdict infimizing_check(const DescentTrajectory& traj, const ConvexSpec& g, double tol) {
  if (traj.points.size() < 2) fail(ErrorCode::InvalidArgument, "trajectory too short");
  const auto inf = exact_infimum(g);
  if (!inf) fail(ErrorCode::UnknownInfimum, "infimizing_check: inf g is not known in closed form");

  double action = 0.0;
  ExtReal tail_slope = ExtReal::infinity();
  ExtReal tail_value = ExtReal::infinity();
  const std::size_t t0 = tail_begin(traj.points.size());
  for (std::size_t k = 0; k < traj.points.size(); ++k) {
    const ExtReal s = slope(g, traj.points[k]).value;
    if (k + 1 < traj.points.size()) {
      const double step = (traj.points[k + 1] - traj.points[k]).norm();
      if (step > 0.0) {
        if (s.is_infinite()) {
          action = std::numeric_limits<double>::infinity();
        } else {
          action += s.value() * step;
        }
      }
    }
    if (k >= t0) {
      tail_slope = min(tail_slope, s);
      tail_value = min(tail_value, g.evaluate(traj.points[k]));
    }
  }
  Witness w{"tail",
            traj.points.back(),
            {{"sum s_g |dx|", action}, {"min tail s_g", tail_slope}, {"liminf g", tail_value},
             {"inf g", inf->value}}};
  if (!std::isfinite(action) || !(tail_slope <= ExtReal(tol))) {
    return make_verdict(VerdictStatus::PreconditionFailed, {std::move(w)}, tolerances(tol),
                        "slope integrability or vanishing tail slope not met");
  }
  const bool ok = matches(tail_value, inf->value, tol);
  return make_verdict(ok ? VerdictStatus::Holds : VerdictStatus::Fails, {std::move(w)},
                      tolerances(tol));
}

Verdict flow_limit_check(const DescentTrajectory& traj, double tol) {
  if (traj.points.size() < 2) fail(ErrorCode::InvalidArgument, "trajectory too short");
  const auto inf = exact_infimum(traj.spec);
  if (!inf) fail(ErrorCode::UnknownInfimum, "flow_limit_check: inf f is not known in closed form");
  const ExtReal last_slope = traj.slopes.back().value_or(ExtReal::infinity());
  double settle = 0.0;
  for (std::size_t k = tail_begin(traj.points.size()); k < traj.points.size(); ++k) {
    settle = std::max(settle, (traj.points[k] - traj.points.back()).norm());
  }
  Witness w{"final",
            traj.points.back(),
            {{"f", traj.values.back()}, {"inf f", inf->value}, {"slope", last_slope},
             {"length", trajectory_length(traj)}, {"tail spread", settle}}};
  const bool ok = matches(traj.values.back(), inf->value, tol) && last_slope <= ExtReal(tol) &&
                  settle <= tol;
  // A finite horizon cannot contradict the t → ∞ statement.
  return make_verdict(ok ? VerdictStatus::Holds : VerdictStatus::Inconclusive, {std::move(w)},
                      tolerances(tol), ok ? "" : "not settled at the horizon");
}

std::string trajectory_csv(const DescentTrajectory& traj) {
  std::vector<std::string> header = {"k", "t"};
  const int d = traj.spec.dimension();
  for (int i = 0; i < d; ++i) header.push_back("x" + std::to_string(i + 1));
  header.push_back("f");
  header.push_back("slope");
  CsvWriter w(header);
  for (std::size_t k = 0; k < traj.points.size(); ++k) {
    std::vector<std::string> row = {std::to_string(k), format_number(traj.times[k])};
    for (int i = 0; i < d; ++i) row.push_back(format_number(traj.points[k](i)));
    row.push_back(format_number(traj.values[k]));
    row.push_back(traj.slopes[k] ? format_number(*traj.slopes[k]) : "");
    w.row(row);
  }
  return w.str();
}

}  // namespace epilab
