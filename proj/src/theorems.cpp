#include "epilab/theorems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "epilab/slope.hpp"

namespace epilab {

namespace {

std::size_t tail_begin(std::size_t n) { return n - (n + 2) / 3; }

// Holds within tol; a tail defect still halving toward zero is unresolved at
// this ladder length; anything else fails.
VerdictStatus defect_status(const std::vector<ExtReal>& tail, double tol) {
  ExtReal worst = 0.0;
  for (const ExtReal& e : tail) worst = max(worst, e);
  if (worst <= ExtReal(tol)) return VerdictStatus::Holds;
  if (tail.size() >= 2 && tail.back().is_finite() && tail.front().is_finite() &&
      tail.back().value() <= 0.5 * tail.front().value()) {
    bool nonincreasing = true;
    for (std::size_t i = 1; i < tail.size(); ++i) nonincreasing = nonincreasing && tail[i] <= tail[i - 1];
    if (nonincreasing) return VerdictStatus::Inconclusive;
  }
  return VerdictStatus::Fails;
}

bool in_graph(const ConvexSpec& f, const Point& x, const Point& xstar, double value, double tol) {
  const ExtReal fx = f.evaluate(x);
  if (fx.is_infinite() || std::abs(fx.value() - value) > tol * rel_scale(fx.value())) return false;
  try {
    const SubdiffSet s = f.subdifferential(x);
    return !s.is_empty() && s.distance(xstar) <= tol * rel_scale(xstar.norm());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotExactClass) throw;
  }
  return fenchel_subgradient_check(f, x, xstar, std::max(tol, 1e-6));
}

std::vector<std::pair<std::string, double>> tols_of(const TheoremConfig& c) {
  return {{"tol", c.tol}, {"feasibility_tol", c.feasibility_tol}};
}

ExactInfimum infimum_or_throw(const ConvexSpec& f, const char* what) {
  auto inf = exact_infimum(f);
  if (!inf) fail(ErrorCode::UnknownInfimum, std::string(what) + ": infimum not known in closed form");
  return *inf;
}

// Samples a path p(t), t ∈ [0, 1], at m + 1 equally spaced parameters.
template <class Path>
void sample_path(std::vector<GraphTriple>& out, int m, Path path) {
  m = std::max(m, 1);
  for (int i = 0; i <= m; ++i) out.push_back(path(static_cast<double>(i) / m));
}

GraphSample graph_sample_1d(const PWQuad1D& g, const GraphWindow& w) {
  const double xlo = w.x.lo(0);
  const double xhi = w.x.hi(0);
  const double slo = w.xstar.lo(0);
  const double shi = w.xstar.hi(0);
  const double h = w.spacing;
  GraphSample out;
  out.resolution = h / 2.0;
  auto& t = out.triples;

  auto vertical = [&](double x, double s0, double s1) {
    s0 = std::max(s0, slo);
    s1 = std::min(s1, shi);
    if (!(s0 <= s1) || x < xlo || x > xhi) return;
    const double v = g.value(x).value();
    const int m = static_cast<int>(std::ceil((s1 - s0) / h));
    sample_path(t, m, [&](double u) {
      return GraphTriple{make_point({x}), make_point({s0 + (s1 - s0) * u}), v};
    });
  };

  const double lo = g.domain_lo();
  const double hi = g.domain_hi();
  if (lo == hi) {
    vertical(lo, slo, shi);
    return out;
  }
  if (std::isfinite(lo)) vertical(lo, slo, g.subdifferential(lo).hi);

  const auto& br = g.breakpoints();
  const auto& pcs = g.pieces();
  for (std::size_t i = 0; i < pcs.size(); ++i) {
    double a = std::max(i == 0 ? lo : br[i - 1], xlo);
    double b = std::min(i == br.size() ? hi : br[i], xhi);
    const QuadPiece& q = pcs[i];
    // Restrict to the part whose derivative lies in [slo, shi].
    if (q.a > 0.0) {
      a = std::max(a, (slo - q.b) / (2.0 * q.a));
      b = std::min(b, (shi - q.b) / (2.0 * q.a));
    } else if (q.b < slo || q.b > shi) {
      continue;
    }
    if (!(a <= b)) continue;
    const double dmax = std::max(std::abs(q.derivative(a)), std::abs(q.derivative(b)));
    const double speed = std::sqrt(1.0 + 4.0 * q.a * q.a + dmax * dmax);
    const int m = static_cast<int>(std::ceil((b - a) * speed / h));
    sample_path(t, m, [&](double u) {
      const double x = a + (b - a) * u;
      return GraphTriple{make_point({x}), make_point({q.derivative(x)}), q.value(x)};
    });
  }
  for (double k : br) {
    const Interval s = g.subdifferential(k);
    if (s.hi > s.lo) vertical(k, s.lo, s.hi);
  }
  if (std::isfinite(hi)) vertical(hi, g.subdifferential(hi).lo, shi);
  return out;
}

GraphSample graph_sample_quadratic(const QuadForm& q, const GraphWindow& w) {
  const int d = static_cast<int>(q.b.size());
  double grad = 0.0;
  for (int corner = 0; corner < (1 << d); ++corner) {
    Point x(d);
    for (int i = 0; i < d; ++i) x(i) = (corner >> i) & 1 ? w.x.hi(i) : w.x.lo(i);
    grad = std::max(grad, (q.Q * x + q.b).norm());
  }
  const double qnorm = q.Q.operatorNorm();
  const double delta = w.spacing / std::sqrt(1.0 + qnorm * qnorm + grad * grad);
  std::vector<int> counts(d);
  std::size_t total = 1;
  for (int i = 0; i < d; ++i) {
    counts[i] = std::max(2, static_cast<int>(std::ceil((w.x.hi(i) - w.x.lo(i)) / delta)) + 1);
    total *= static_cast<std::size_t>(counts[i]);
  }
  if (total > 2'000'000) fail(ErrorCode::InvalidArgument, "graph sample too fine for its window");
  GraphSample out;
  out.resolution = w.spacing * std::sqrt(static_cast<double>(d)) / 2.0;
  std::vector<int> k(d, 0);
  while (true) {
    Point x(d);
    for (int i = 0; i < d; ++i) {
      x(i) = w.x.lo(i) + (w.x.hi(i) - w.x.lo(i)) * k[i] / (counts[i] - 1);
    }
    const Point g = q.Q * x + q.b;
    out.triples.push_back({x, g, 0.5 * x.dot(q.Q * x) + q.b.dot(x) + q.c});
    int i = 0;
    while (i < d && ++k[i] == counts[i]) k[i++] = 0;
    if (i == d) break;
  }
  return out;
}

bool same_status(const std::vector<const Verdict*>& vs) {
  for (const Verdict* v : vs) {
    if (v->status != vs.front()->status) return false;
  }
  return true;
}

Verdict summary(const std::vector<const Verdict*>& parts, bool consistent, const char* mismatch) {
  Verdict out;
  for (const Verdict* p : parts) {
    for (const auto& w : p->witnesses) out.witnesses.push_back(w);
  }
  out.status = consistent ? parts.front()->status : VerdictStatus::Inconclusive;
  if (!consistent) out.note = mismatch;
  if (out.witnesses.empty() && out.conclusive()) out.status = VerdictStatus::Inconclusive;
  return out;
}

double min_spacing(const std::vector<Point>& pts) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double d = (pts[i] - pts[j]).norm();
      if (d > 0.0) best = std::min(best, d);
    }
  }
  return std::isfinite(best) ? best : 1.0;
}

}  // namespace

NCWitness argmin_witness(const FunctionSeq& seq) {
  NCWitness w;
  for (Index n : seq.ladder) {
    const ExactInfimum inf = infimum_or_throw(seq.member(n), "argmin_witness");
    w.triples.push_back({n, inf.argmin, Point::Zero(seq.dimension), inf.value.value()});
  }
  const ExactInfimum lim = infimum_or_throw(seq.limit, "argmin_witness");
  w.x = lim.argmin;
  w.xstar = Point::Zero(seq.dimension);
  w.value = lim.value.value();
  return w;
}

Verdict nc_check(const FunctionSeq& seq, const NCWitness& witness, const TheoremConfig& config) {
  if (witness.triples.empty()) fail(ErrorCode::InvalidArgument, "NC witness has no triples");
  for (const NCTriple& t : witness.triples) {
    if (!in_graph(seq.member(t.n), t.x, t.xstar, t.value, config.feasibility_tol)) {
      fail(ErrorCode::InvalidArgument,
           "NC witness triple for n=" + std::to_string(t.n) + " is not in the graph of f_n");
    }
  }
  double dx = 0.0;
  double dxs = 0.0;
  double dv = 0.0;
  std::vector<ExtReal> defects;
  for (std::size_t i = tail_begin(witness.triples.size()); i < witness.triples.size(); ++i) {
    const NCTriple& t = witness.triples[i];
    const double ex = (t.x - witness.x).norm();
    const double exs = (t.xstar - witness.xstar).norm();
    const double ev = std::abs(t.value - witness.value);
    dx = std::max(dx, ex);
    dxs = std::max(dxs, exs);
    dv = std::max(dv, ev);
    defects.emplace_back(std::max({ex, exs, ev}));
  }
  const bool limit_ok =
      in_graph(seq.limit, witness.x, witness.xstar, witness.value, config.feasibility_tol);
  Witness w{"limit",
            witness.x,
            {{"x defect", dx}, {"x* defect", dxs}, {"value defect", dv},
             {"limit in graph", limit_ok ? 1.0 : 0.0}}};
  const VerdictStatus status = limit_ok ? defect_status(defects, config.tol) : VerdictStatus::Fails;
  return make_verdict(status, {std::move(w)}, tols_of(config),
                      status == VerdictStatus::Inconclusive ? "witness still converging at ladder end" : "");
}

Verdict nc_weak_check(const FunctionSeq& seq, const std::vector<WitnessPoint>& witness,
                      const Point& xbar, const TheoremConfig& config) {
  if (witness.empty()) fail(ErrorCode::InvalidArgument, "weak NC witness is empty");
  const ExtReal fbar = seq.limit.evaluate(xbar);
  const ExtReal sbar = slope(seq.limit, xbar).value;
  ExtReal max_slope = 0.0;
  double dx = 0.0;
  ExtReal dv = 0.0;
  std::vector<ExtReal> defects;
  for (std::size_t i = 0; i < witness.size(); ++i) {
    const ConvexSpec f = seq.member(witness[i].n);
    max_slope = max(max_slope, slope(f, witness[i].x).value);
    if (i >= tail_begin(witness.size())) {
      const double ex = (witness[i].x - xbar).norm();
      const ExtReal v = f.evaluate(witness[i].x);
      const ExtReal ev = (v.is_infinite() || fbar.is_infinite()) ? ExtReal::infinity()
                                                                 : ExtReal(std::abs(v.value() - fbar.value()));
      dx = std::max(dx, ex);
      dv = max(dv, ev);
      defects.push_back(max(ExtReal(ex), ev));
    }
  }
  Witness w{"xbar",
            xbar,
            {{"x defect", dx}, {"value defect", dv}, {"sup slope", max_slope}, {"s_f(xbar)", sbar}}};
  const bool bounded = sbar.is_finite() && max_slope <= ExtReal(config.slope_bound);
  const VerdictStatus status = bounded ? defect_status(defects, config.tol) : VerdictStatus::Fails;
  std::vector<std::pair<std::string, double>> tols = tols_of(config);
  tols.emplace_back("slope_bound", config.slope_bound);
  return make_verdict(status, {std::move(w)}, tols,
                      status == VerdictStatus::Inconclusive ? "witness still converging at ladder end" : "");
}

Verdict comparison_check(const ConvexSpec& f, const ConvexSpec& g, const std::vector<Point>& grid,
                         double tol) {
  if (grid.empty()) fail(ErrorCode::InvalidArgument, "comparison grid is empty");
  const ExactInfimum inf_f = infimum_or_throw(f, "comparison_check");
  const ExactInfimum inf_g = infimum_or_throw(g, "comparison_check");
  const std::vector<std::pair<std::string, double>> tols = {{"tol", tol}};
  if (inf_f.value.is_infinite() || inf_g.value.is_infinite()) {
    fail(ErrorCode::InvalidArgument, "comparison_check: improper function");
  }
  if (inf_f.value.value() < inf_g.value.value() - tol) {
    return make_verdict(VerdictStatus::PreconditionFailed,
                        {{"inf", inf_f.argmin, {{"inf f", inf_f.value}, {"inf g", inf_g.value}}}},
                        tols, "inf f < inf g");
  }
  std::vector<Witness> all;
  std::vector<Witness> bad;
  for (const Point& x : grid) {
    const ExtReal sf = slope(f, x).value;
    const ExtReal sg = slope(g, x).value;
    const ExtReal fx = f.evaluate(x);
    const ExtReal gx = g.evaluate(x);
    Witness w{"point", x, {{"s_f", sf}, {"s_g", sg}, {"f", fx}, {"g", gx}}};
    const bool slope_ok = sf.is_infinite() || (sg.is_finite() && sf.value() >= sg.value() - tol);
    if (!slope_ok) {
      return make_verdict(VerdictStatus::PreconditionFailed, {std::move(w)}, tols,
                          "s_f < s_g at a grid point");
    }
    const bool ok = fx.is_infinite() || (gx.is_finite() && fx.value() >= gx.value() - tol);
    (ok ? all : bad).push_back(std::move(w));
  }
  if (!bad.empty()) {
    return make_verdict(VerdictStatus::Fails, std::move(bad), tols,
                        "f < g although both hypotheses hold");
  }
  return make_verdict(VerdictStatus::Holds, std::move(all), tols);
}

GraphSample graph_sample(const ConvexSpec& f, const GraphWindow& window) {
  if (!(window.spacing > 0.0)) fail(ErrorCode::InvalidArgument, "graph spacing must be > 0");
  const int d = f.dimension();
  if (window.x.dimension() != d || window.xstar.dimension() != d) {
    fail(ErrorCode::DimensionMismatch, "graph window dimension differs from f");
  }
  if (d == 1) return graph_sample_1d(f.to_piecewise(), window);
  if (auto q = f.as_quadratic()) return graph_sample_quadratic(*q, window);
  fail(ErrorCode::NotExactClass, "graph samples in d >= 2 are available for quadratics only");
}

Verdict pk_verdict(const SampledSet& limit, const std::vector<SampledSet>& seq, PkResult* out) {
  PkResult r;
  double h = limit.resolution;
  for (const auto& s : seq) h = std::max(h, s.resolution);
  r.threshold = 3.0 * h;
  r.liminf_defect = pk_liminf_defect(limit, seq);
  r.limsup_defect = pk_limsup_defect(limit, seq);
  if (out) *out = r;
  const double worst = std::max(r.liminf_defect, r.limsup_defect);
  const VerdictStatus st = worst <= r.threshold          ? VerdictStatus::Holds
                           : worst <= 10.0 * r.threshold ? VerdictStatus::Inconclusive
                                                         : VerdictStatus::Fails;
  Point origin = limit.points.empty() ? Point() : limit.points.front();
  return make_verdict(st,
                      {{"pk", origin, {{"liminf defect", r.liminf_defect}, {"limsup defect", r.limsup_defect}}}},
                      {{"threshold", r.threshold}});
}

AttouchReport attouch_check(const FunctionSeq& seq, const std::vector<GraphSample>& graphs,
                            const GraphSample& limit_graph, const NCWitness& witness,
                            const std::vector<Point>& test_points, const TheoremConfig& config) {
  if (graphs.size() != seq.ladder.size()) {
    fail(ErrorCode::InvalidArgument, "attouch_check needs one graph sample per ladder index");
  }
  AttouchReport rep;
  EpiConfig epi = config.epi;
  epi.tol = config.tol;
  rep.epi = epi_report(value_family(seq), test_points, epi).verdict;

  std::vector<SampledSet> sub;
  std::vector<SampledSet> full;
  for (const auto& g : graphs) {
    sub.push_back(subdifferential_graph(g));
    full.push_back(full_graph(g));
  }
  rep.graph = pk_verdict(subdifferential_graph(limit_graph), sub);
  rep.nc = nc_check(seq, witness, config);
  rep.subdiff_nc = conjunction({rep.graph, rep.nc});
  rep.full_graph = pk_verdict(full_graph(limit_graph), full);

  const std::vector<const Verdict*> three = {&rep.epi, &rep.subdiff_nc, &rep.full_graph};
  rep.consistent = same_status(three);
  rep.overall = summary(three, rep.consistent, "sub-verdicts disagree");
  return rep;
}

MainReport main_theorem_check(const FunctionSeq& seq, const NCWitness& witness,
                              const std::vector<Point>& test_points, const TheoremConfig& config) {
  if (test_points.empty()) fail(ErrorCode::InvalidArgument, "no test points");
  MainReport rep;
  std::optional<ExactInfimum> inf;
  try {
    inf = exact_infimum(seq.limit);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::UnboundedBelow) throw;
    rep.overall = make_verdict(VerdictStatus::PreconditionFailed, {}, tols_of(config), "inf f = -inf");
    rep.epi = rep.slope_epi = rep.nc = rep.inf_condition = rep.slope_nc = rep.slope_inf = rep.overall;
    return rep;
  }
  if (!inf) fail(ErrorCode::UnknownInfimum, "main_theorem_check: inf f not known in closed form");
  rep.inf_f = inf->value;

  EpiConfig epi = config.epi;
  epi.tol = config.tol;
  const Family values = value_family(seq);
  rep.epi_details = epi_report(values, test_points, epi);
  rep.slope_details = epi_report(slope_family(seq), test_points, epi);
  rep.epi = rep.epi_details.verdict;
  rep.slope_epi = rep.slope_details.verdict;
  rep.nc = nc_check(seq, witness, config);

  // inf f_l and inf f_u: test grid, refined once around the grid argmin, plus argmin f.
  std::vector<EpiLimitEstimate> est = rep.epi_details.estimates;
  std::size_t best = 0;
  for (std::size_t i = 1; i < est.size(); ++i) {
    if (min(est[i].lower, est[i].upper) < min(est[best].lower, est[best].upper)) best = i;
  }
  std::vector<Point> extra = {inf->argmin};
  const double delta = 0.5 * min_spacing(test_points);
  for (int i = 0; i < seq.dimension; ++i) {
    for (double sgn : {-1.0, 1.0}) {
      Point p = est[best].x;
      p(i) += sgn * delta;
      extra.push_back(p);
    }
  }
  for (const Point& p : extra) est.push_back(epi_limits(values, p, epi));
  rep.inf_lower = ExtReal::infinity();
  rep.inf_upper = ExtReal::infinity();
  Point at = est.front().x;
  for (const auto& e : est) {
    if (e.lower < rep.inf_lower) at = e.x;
    rep.inf_lower = min(rep.inf_lower, e.lower);
    rep.inf_upper = min(rep.inf_upper, e.upper);
  }
  const bool inf_ok = inf->value.is_finite() && matches(rep.inf_lower, inf->value, config.inf_tol) &&
                      matches(rep.inf_upper, inf->value, config.inf_tol);
  rep.inf_condition = make_verdict(
      inf_ok ? VerdictStatus::Holds : VerdictStatus::Fails,
      {{"inf", at, {{"inf f_l", rep.inf_lower}, {"inf f_u", rep.inf_upper}, {"inf f", inf->value}}}},
      {{"inf_tol", config.inf_tol}});

  rep.slope_nc = conjunction({rep.slope_epi, rep.nc});
  rep.slope_inf = conjunction({rep.slope_epi, rep.inf_condition});
  const std::vector<const Verdict*> three = {&rep.epi, &rep.slope_nc, &rep.slope_inf};
  rep.consistent = same_status(three);
  rep.red_alert = !rep.consistent && rep.epi.conclusive() && rep.slope_nc.conclusive() &&
                  rep.slope_inf.conclusive();
  rep.overall = summary(three, rep.consistent, "sub-verdicts disagree");
  return rep;
}

}  // namespace epilab
