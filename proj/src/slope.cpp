#include "epilab/slope.hpp"

#include <cmath>
#include <sstream>

#include "epilab/csv.hpp"

namespace epilab {

namespace {

SlopeMethod exact_method(const ConvexSpec& spec) {
  if (spec.as_quadratic()) return SlopeMethod::ExactQuadratic;
  if (spec.dimension() == 1 && spec.uses_piecewise()) return SlopeMethod::Oracle1D;
  return SlopeMethod::ExactPolyhedral;
}

}  // namespace

const char* to_string(SlopeMethod method) {
  switch (method) {
    case SlopeMethod::ExactPolyhedral: return "exact-polyhedral";
    case SlopeMethod::ExactQuadratic: return "exact-quadratic";
    case SlopeMethod::Oracle1D: return "oracle1d";
    case SlopeMethod::ProxLadder: return "prox-ladder";
  }
  return "?";
}

std::vector<double> default_slope_ladder() {
  std::vector<double> ladder;
  for (int k = 0; k <= 20; ++k) ladder.push_back(std::ldexp(1.0, -k));
  return ladder;
}

SlopeValue slope_exact(const ConvexSpec& spec, const Point& x) {
  const SubdiffSet s = spec.subdifferential(x);
  const ExtReal v = s.is_empty() ? ExtReal::infinity() : ExtReal(s.distance(Point::Zero(x.size())));
  return {v, exact_method(spec), {}};
}

SlopeValue slope_prox_estimate(const ConvexSpec& spec, const Point& x,
                               const std::vector<double>& ladder, double tol,
                               const LadderConfig& config) {
  if (ladder.empty()) fail(ErrorCode::InvalidArgument, "slope ladder is empty");
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (!(ladder[i] > 0) || !std::isfinite(ladder[i])) {
      fail(ErrorCode::InvalidArgument, "slope ladder entries must be finite and > 0");
    }
    if (i > 0 && !(ladder[i] < ladder[i - 1])) {
      fail(ErrorCode::InvalidArgument, "slope ladder must be strictly decreasing");
    }
  }
  SlopeValue out{0.0, SlopeMethod::ProxLadder, {}};
  for (double lambda : ladder) {
    const double e = (x - spec.prox(lambda, x)).norm() / lambda;
    if (!out.trace.empty()) {
      const double prev = out.trace.back().estimate;
      if (e < prev - tol * std::max(1.0, prev)) {
        std::ostringstream msg;
        msg << "prox ladder decreased from " << prev << " to " << e << " at lambda " << lambda;
        fail(ErrorCode::BrokenProx, msg.str());
      }
    }
    out.trace.push_back({lambda, e});
  }
  const auto& t = out.trace;
  bool blowup = t.back().estimate > config.blowup && t.size() >= 3;
  for (std::size_t i = t.size() >= 3 ? t.size() - 2 : t.size(); blowup && i < t.size(); ++i) {
    blowup = t[i].estimate >= (1.0 + config.growth) * t[i - 1].estimate;
  }
  out.value = blowup ? ExtReal::infinity() : ExtReal(t.back().estimate);
  return out;
}

SlopeValue slope(const ConvexSpec& spec, const Point& x) {
  if (spec.evaluate(x).is_infinite()) return {ExtReal::infinity(), exact_method(spec), {}};
  try {
    return slope_exact(spec, x);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotExactClass) throw;
  }
  return slope_prox_estimate(spec, x, default_slope_ladder(), 1e-9);
}

MinNormSubgradient min_norm_subgradient(const ConvexSpec& spec, const Point& x) {
  const SubdiffSet s = spec.subdifferential(x);
  if (s.is_empty()) fail(ErrorCode::OutsideDomain, "min_norm_subgradient: ∂f(x) is empty");
  Point v = s.nearest(Point::Zero(x.size()));
  const double n = v.norm();
  return {std::move(v), n};
}

double moreau_envelope(const ConvexSpec& spec, double lambda, const Point& x) {
  const Point p = spec.prox(lambda, x);
  return spec.evaluate(p).value() + (x - p).squaredNorm() / (2.0 * lambda);
}

std::string trace_csv(const SlopeValue& value) {
  CsvWriter w({"lambda", "estimate"});
  for (const auto& s : value.trace) w.row({format_number(s.lambda), format_number(s.estimate)});
  return w.str();
}

}  // namespace epilab
