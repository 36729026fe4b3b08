#include "epilab/setconv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_set>

#include "epilab/slope.hpp"

namespace epilab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t tail_begin(std::size_t n) { return n - (n + 2) / 3; }

Point concat(const Point& a, const Point& b) {
  Point out(a.size() + b.size());
  out << a, b;
  return out;
}

Point project_to_ball(const Point& p, const Point& x, double eps) {
  const double r = (p - x).norm();
  if (r <= eps) return p;
  return x + (p - x) * (eps / r);
}

double coarsest_resolution(const std::vector<SampledSet>& seq) {
  double h = 0.0;
  for (const auto& s : seq) h = std::max(h, s.resolution);
  return h;
}

// Largest λ on a doubling/bisection search with ‖x − prox_λ(x)‖ ≤ eps. For
// convex f that prox point minimizes f over B(x, eps) whenever argmin f misses
// the ball.
std::optional<Point> ball_minimizer_by_prox(const ConvexSpec& spec, const Point& x, double eps) {
  auto step = [&](double lambda) { return (spec.prox(lambda, x) - x).norm(); };
  double lo = 1.0;
  if (step(lo) <= eps) {
    while (lo < 1e15 && step(2.0 * lo) <= eps) lo *= 2.0;
    if (lo >= 1e15) return spec.prox(lo, x);
  } else {
    while (lo > 1e-30 && step(lo) > eps) lo *= 0.5;
    if (lo <= 1e-30) return std::nullopt;
  }
  double hi = 2.0 * lo;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (step(mid) <= eps ? lo : hi) = mid;
  }
  return spec.prox(lo, x);
}

class ConvexFunction final : public ExtendedFunction {
 public:
  explicit ConvexFunction(ConvexSpec spec) : spec_(std::move(spec)) {
    if (spec_.dimension() == 1) {
      try {
        pwq_ = spec_.to_piecewise();
      } catch (const Error&) {
      }
    }
    try {
      if (auto inf = exact_infimum(spec_)) argmin_ = inf->argmin;
    } catch (const Error&) {
    }
    prox_ = spec_.has_prox_path();
  }

  int dimension() const override { return spec_.dimension(); }
  ExtReal value(const Point& x) const override { return spec_.evaluate(x); }

  ExtReal inf_over_ball(const Point& x, double eps) const override {
    if (pwq_) return pwq_->min_over(x(0) - eps, x(0) + eps);
    return ExtendedFunction::inf_over_ball(x, eps);
  }

 protected:
  std::vector<Point> hints(const Point& x, double eps) const override {
    std::vector<Point> out;
    if (argmin_) out.push_back(project_to_ball(*argmin_, x, eps));
    if (auto p = spec_.domain().exact_projection(x)) out.push_back(project_to_ball(*p, x, eps));
    if (prox_) {
      if (auto p = ball_minimizer_by_prox(spec_, x, eps)) out.push_back(*p);
    }
    return out;
  }

 private:
  ConvexSpec spec_;
  std::optional<PWQuad1D> pwq_;
  std::optional<Point> argmin_;
  bool prox_ = false;
};

class SlopeFunction final : public ExtendedFunction {
 public:
  explicit SlopeFunction(ConvexSpec spec) : spec_(std::move(spec)) {
    if (spec_.dimension() == 1) {
      try {
        pwq_ = spec_.to_piecewise();
      } catch (const Error&) {
      }
    }
    try {
      if (auto inf = exact_infimum(spec_)) argmin_ = inf->argmin;
    } catch (const Error&) {
    }
  }

  int dimension() const override { return spec_.dimension(); }
  ExtReal value(const Point& x) const override {
    if (pwq_) return pwq_->slope(x(0));
    return slope(spec_, x).value;
  }

  ExtReal inf_over_ball(const Point& x, double eps) const override {
    if (pwq_) return pwq_->min_slope_over(x(0) - eps, x(0) + eps);
    return ExtendedFunction::inf_over_ball(x, eps);
  }

 protected:
  std::vector<Point> hints(const Point& x, double eps) const override {
    std::vector<Point> out;
    if (argmin_) out.push_back(project_to_ball(*argmin_, x, eps));
    if (auto p = spec_.domain().exact_projection(x)) out.push_back(project_to_ball(*p, x, eps));
    return out;
  }

 private:
  ConvexSpec spec_;
  std::optional<PWQuad1D> pwq_;
  std::optional<Point> argmin_;
};

void validate_eps_ladder(const std::vector<double>& eps) {
  if (eps.empty()) fail(ErrorCode::InvalidArgument, "epsilon ladder is empty");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0.0) || !std::isfinite(eps[i])) {
      fail(ErrorCode::InvalidArgument, "epsilon ladder entries must be finite and > 0");
    }
    if (i > 0 && !(eps[i] < eps[i - 1])) {
      fail(ErrorCode::InvalidArgument, "epsilon ladder must be strictly decreasing");
    }
  }
}

void validate_index_ladder(const std::vector<Index>& ladder) {
  if (ladder.empty()) fail(ErrorCode::InvalidArgument, "index ladder is empty");
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (ladder[i] < 1) fail(ErrorCode::InvalidArgument, "index ladder entries must be >= 1");
    if (i > 0 && ladder[i] <= ladder[i - 1]) {
      fail(ErrorCode::InvalidArgument, "index ladder must be strictly increasing");
    }
  }
}

template <class Make>
Family make_family(const FunctionSeq& seq, Make make) {
  validate_index_ladder(seq.ladder);
  Family fam;
  fam.dimension = seq.dimension;
  fam.indices = seq.ladder;
  for (Index n : seq.ladder) {
    ConvexSpec f = seq.member(n);
    if (f.dimension() != seq.dimension) {
      fail(ErrorCode::DimensionMismatch, "member " + std::to_string(n) + " has dimension " +
                                             std::to_string(f.dimension()));
    }
    fam.members.push_back(make(std::move(f)));
  }
  if (seq.limit.dimension() != seq.dimension) {
    fail(ErrorCode::DimensionMismatch, "limit dimension differs from the sequence");
  }
  fam.limit = make(seq.limit);
  return fam;
}

Witness limit_witness(const std::string& label, const EpiLimitEstimate& e, const ExtReal& f) {
  return {label, e.x, {{"f_l", e.lower}, {"f_u", e.upper}, {"f", f}}};
}

struct WitnessStats {
  std::vector<ExtReal> values;
  ExtReal max_slope = 0.0;
  double tail_distance = 0.0;
  std::optional<Witness> unbounded;
};

WitnessStats witness_stats(const FunctionSeq& seq, const std::vector<WitnessPoint>& witness,
                           const Point& xbar, double slope_bound) {
  if (witness.size() != seq.ladder.size()) {
    fail(ErrorCode::InvalidArgument, "witness must have one point per ladder index");
  }
  WitnessStats st;
  const std::size_t t0 = tail_begin(witness.size());
  for (std::size_t i = 0; i < witness.size(); ++i) {
    const WitnessPoint& w = witness[i];
    if (w.n != seq.ladder[i]) fail(ErrorCode::InvalidArgument, "witness indices must follow the ladder");
    const ConvexSpec f = seq.member(w.n);
    const ExtReal s = slope(f, w.x).value;
    st.values.push_back(f.evaluate(w.x));
    st.max_slope = max(st.max_slope, s);
    if (!st.unbounded && (s.is_infinite() || s.value() > slope_bound)) {
      st.unbounded = Witness{"n=" + std::to_string(w.n), w.x, {{"slope", s}}};
    }
    if (i >= t0) st.tail_distance = std::max(st.tail_distance, (w.x - xbar).norm());
  }
  return st;
}

}  // namespace

SampledSet subdifferential_graph(const GraphSample& g) {
  SampledSet s;
  s.resolution = g.resolution;
  for (const auto& t : g.triples) s.points.push_back(concat(t.x, t.xstar));
  return s;
}

SampledSet full_graph(const GraphSample& g) {
  SampledSet s;
  s.resolution = g.resolution;
  for (const auto& t : g.triples) {
    Point p(t.x.size() + t.xstar.size() + 1);
    p << t.x, t.xstar, t.value;
    s.points.push_back(std::move(p));
  }
  return s;
}

PointCloudIndex::PointCloudIndex(std::vector<Point> points) : points_(std::move(points)) {
  std::vector<int> idx(points_.size());
  std::iota(idx.begin(), idx.end(), 0);
  nodes_.reserve(points_.size());
  root_ = build(idx, 0, static_cast<int>(idx.size()), 0);
}

int PointCloudIndex::build(std::vector<int>& idx, int begin, int end, int depth) {
  if (begin >= end) return -1;
  const int axis = depth % static_cast<int>(points_[idx[begin]].size());
  const int mid = begin + (end - begin) / 2;
  std::nth_element(idx.begin() + begin, idx.begin() + mid, idx.begin() + end,
                   [&](int a, int b) { return points_[a](axis) < points_[b](axis); });
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({idx[mid], axis, -1, -1});
  const int left = build(idx, begin, mid, depth + 1);
  const int right = build(idx, mid + 1, end, depth + 1);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void PointCloudIndex::search(int node, const Point& q, double& best) const {
  if (node < 0) return;
  const Node& nd = nodes_[node];
  const Point& p = points_[nd.point];
  best = std::min(best, (p - q).squaredNorm());
  const double diff = q(nd.axis) - p(nd.axis);
  const int near = diff < 0 ? nd.left : nd.right;
  const int far = diff < 0 ? nd.right : nd.left;
  search(near, q, best);
  if (diff * diff < best) search(far, q, best);
}

double PointCloudIndex::distance(const Point& q) const {
  if (points_.empty()) return kInf;
  if (q.size() != points_.front().size()) {
    fail(ErrorCode::DimensionMismatch, "query dimension differs from the point cloud");
  }
  double best = kInf;
  search(root_, q, best);
  return std::sqrt(best);
}

double pk_liminf_defect(const SampledSet& S, const std::vector<SampledSet>& seq) {
  if (seq.size() < 6) fail(ErrorCode::InvalidArgument, "PK defects need at least 6 sequence members");
  std::vector<PointCloudIndex> tail;
  for (std::size_t i = tail_begin(seq.size()); i < seq.size(); ++i) tail.emplace_back(seq[i].points);
  double defect = 0.0;
  for (const Point& x : S.points) {
    for (const auto& idx : tail) defect = std::max(defect, idx.distance(x));
  }
  return defect;
}

double pk_limsup_defect(const SampledSet& S, const std::vector<SampledSet>& seq) {
  if (seq.size() < 6) fail(ErrorCode::InvalidArgument, "PK defects need at least 6 sequence members");
  const double h = coarsest_resolution(seq);
  const double tau = 3.0 * h;
  const std::size_t needed = (seq.size() + 2) / 3;

  std::vector<PointCloudIndex> members;
  for (const auto& s : seq) members.emplace_back(s.points);

  // Keep one tail point per grid cell of side h.
  std::vector<Point> candidates;
  std::unordered_set<std::string> cells;
  for (std::size_t i = tail_begin(seq.size()); i < seq.size(); ++i) {
    for (const Point& p : seq[i].points) {
      std::string key;
      for (Eigen::Index k = 0; k < p.size(); ++k) {
        key += std::to_string(static_cast<long long>(std::floor(p(k) / std::max(h, 1e-300))));
        key += ',';
      }
      if (cells.insert(key).second) candidates.push_back(p);
    }
  }

  const PointCloudIndex target(S.points);
  double defect = 0.0;
  for (const Point& y : candidates) {
    const double dist = target.distance(y);
    if (dist <= defect) continue;
    std::size_t hits = 0;
    for (const auto& m : members) {
      if (m.distance(y) <= tau && ++hits >= needed) break;
    }
    if (hits >= needed) defect = dist;
  }
  return defect;
}

TailLimits tail_limits(const std::vector<ExtReal>& values, const TailConfig& config) {
  if (values.empty()) fail(ErrorCode::InvalidArgument, "tail of an empty sequence");
  const std::size_t t0 = tail_begin(values.size());
  TailLimits out{ExtReal::infinity(), values[t0], false};
  bool nondecreasing = true;
  for (std::size_t i = t0; i < values.size(); ++i) {
    out.liminf = min(out.liminf, values[i]);
    out.limsup = max(out.limsup, values[i]);
    if (i > t0 && values[i] < values[i - 1]) nondecreasing = false;
  }
  const ExtReal& first = values[t0];
  const ExtReal& last = values.back();
  if (nondecreasing && last > ExtReal(config.blowup)) {
    out.diverging = last.is_infinite() || first.is_infinite() ||
                    (first.value() >= 0 ? last.value() >= (1.0 + config.growth) * first.value()
                                        : true);
  }
  if (out.diverging) {
    out.liminf = ExtReal::infinity();
    out.limsup = ExtReal::infinity();
  }
  return out;
}

std::vector<Point> ball_grid(const Point& x, double eps) {
  const int d = static_cast<int>(x.size());
  const double target = std::ldexp(17.0, d);
  int m = 1;
  while (std::pow(2.0 * m + 1.0, d) < target) ++m;
  const int side = 2 * m + 1;
  std::vector<Point> out;
  std::vector<int> k(d, 0);
  while (true) {
    Point y(d);
    for (int i = 0; i < d; ++i) y(i) = x(i) + eps * (k[i] - m) / m;
    if ((y - x).norm() <= eps * (1.0 + 1e-12)) out.push_back(std::move(y));
    int i = 0;
    while (i < d && ++k[i] == side) k[i++] = 0;
    if (i == d) break;
  }
  return out;
}

ExtReal ExtendedFunction::inf_over_ball(const Point& x, double eps) const {
  ExtReal best = ExtReal::infinity();
  for (const Point& y : ball_grid(x, eps)) best = min(best, value(y));
  for (const Point& y : hints(x, eps)) {
    if ((y - x).norm() <= eps * (1.0 + 1e-12)) best = min(best, value(y));
  }
  return best;
}

std::vector<Point> ExtendedFunction::hints(const Point&, double) const { return {}; }

std::shared_ptr<const ExtendedFunction> function_of(const ConvexSpec& spec) {
  return std::make_shared<ConvexFunction>(spec);
}

std::shared_ptr<const ExtendedFunction> slope_function_of(const ConvexSpec& spec) {
  return std::make_shared<SlopeFunction>(spec);
}

std::vector<Index> default_index_ladder() {
  std::vector<Index> out;
  for (int k = 0; k <= 32; ++k) out.push_back(Index{1} << k);
  return out;
}

std::vector<double> default_eps_ladder() {
  std::vector<double> out;
  for (int j = 0; j <= 16; ++j) out.push_back(std::ldexp(1.0, -j));
  return out;
}

Family value_family(const FunctionSeq& seq) { return make_family(seq, function_of); }

Family slope_family(const FunctionSeq& seq) { return make_family(seq, slope_function_of); }

EpiLimitEstimate epi_limits(const Family& family, const Point& x, const EpiConfig& config) {
  validate_eps_ladder(config.eps_ladder);
  if (family.members.empty()) fail(ErrorCode::InvalidArgument, "family has no members");
  require_dimension(x, family.dimension, "epi_limits");
  EpiLimitEstimate est;
  est.x = x;
  for (double eps : config.eps_ladder) {
    EpiRung rung;
    rung.eps = eps;
    for (const auto& f : family.members) rung.inner.push_back(f->inf_over_ball(x, eps));
    const TailLimits t = tail_limits(rung.inner, config.tail);
    rung.lower = t.liminf;
    rung.upper = t.limsup;
    est.rungs.push_back(std::move(rung));
  }
  est.lower = est.rungs.back().lower;
  est.upper = est.rungs.back().upper;
  if (est.rungs.size() >= 2) {
    const EpiRung& prev = est.rungs[est.rungs.size() - 2];
    est.lower_stable = matches(prev.lower, est.lower, config.tol);
    est.upper_stable = matches(prev.upper, est.upper, config.tol);
  }
  return est;
}

EpiLimitEstimate epi_lower_limit(const FunctionSeq& seq, const Point& x,
                                 const std::vector<double>& eps_ladder,
                                 const std::vector<Index>& n_ladder) {
  FunctionSeq s = seq;
  s.ladder = n_ladder;
  EpiConfig cfg;
  cfg.eps_ladder = eps_ladder;
  return epi_limits(value_family(s), x, cfg);
}

EpiLimitEstimate epi_upper_limit(const FunctionSeq& seq, const Point& x,
                                 const std::vector<double>& eps_ladder,
                                 const std::vector<Index>& n_ladder) {
  return epi_lower_limit(seq, x, eps_ladder, n_ladder);
}

EpiReport epi_report(const Family& family, const std::vector<Point>& test_points,
                     const EpiConfig& config) {
  if (test_points.empty()) fail(ErrorCode::InvalidArgument, "no test points");
  EpiReport rep;
  std::vector<Witness> all;
  std::vector<Witness> failing;
  std::vector<Witness> unstable;
  for (const Point& x : test_points) {
    EpiLimitEstimate e = epi_limits(family, x, config);
    const ExtReal f = family.limit->value(x);
    Witness w = limit_witness("point", e, f);
    const bool match = matches(e.lower, f, config.tol) && matches(e.upper, f, config.tol);
    if (!match) {
      (e.lower_stable && e.upper_stable ? failing : unstable).push_back(w);
    }
    all.push_back(std::move(w));
    rep.limit_values.push_back(f);
    rep.estimates.push_back(std::move(e));
  }
  const std::vector<std::pair<std::string, double>> tols = {
      {"tol", config.tol}, {"eps_min", config.eps_ladder.back()}, {"blowup", config.tail.blowup}};
  if (!failing.empty()) {
    rep.verdict = make_verdict(VerdictStatus::Fails, std::move(failing), tols);
  } else if (!unstable.empty()) {
    rep.verdict = make_verdict(VerdictStatus::Inconclusive, std::move(unstable), tols,
                               "epi-limit estimates not stabilized across the finest rungs");
  } else {
    rep.verdict = make_verdict(VerdictStatus::Holds, std::move(all), tols);
  }
  return rep;
}

Verdict epi_converges(const FunctionSeq& seq, const std::vector<Point>& test_points, double tol) {
  EpiConfig cfg;
  cfg.tol = tol;
  return epi_report(value_family(seq), test_points, cfg).verdict;
}

Verdict tightness_check(const FunctionSeq& seq, const std::vector<WitnessPoint>& witness,
                        const Point& xbar, const LemmaConfig& config) {
  const std::vector<std::pair<std::string, double>> tols = {{"tol", config.tol},
                                                            {"slope_bound", config.slope_bound}};
  const WitnessStats st = witness_stats(seq, witness, xbar, config.slope_bound);
  if (st.unbounded) {
    return make_verdict(VerdictStatus::PreconditionFailed, {*st.unbounded}, tols,
                        "witness slopes are not bounded");
  }
  if (st.tail_distance > config.tol) {
    return make_verdict(VerdictStatus::PreconditionFailed,
                        {{"xbar", xbar, {{"tail_distance", st.tail_distance}}}}, tols,
                        "witness does not converge to xbar");
  }
  EpiConfig epi = config.epi;
  epi.tol = config.tol;
  const EpiLimitEstimate e = epi_limits(value_family(seq), xbar, epi);
  const TailLimits t = tail_limits(st.values, epi.tail);
  Witness w{"xbar",
            xbar,
            {{"f_l", e.lower}, {"liminf f_n(x_n)", t.liminf}, {"f_u", e.upper},
             {"limsup f_n(x_n)", t.limsup}, {"max slope", st.max_slope}}};
  if (matches(e.lower, t.liminf, config.tol) && matches(e.upper, t.limsup, config.tol)) {
    return make_verdict(VerdictStatus::Holds, {std::move(w)}, tols);
  }
  const bool stable = e.lower_stable && e.upper_stable;
  return make_verdict(stable ? VerdictStatus::Fails : VerdictStatus::Inconclusive, {std::move(w)},
                      tols);
}

Verdict domain_sandwich_check(const FunctionSeq& seq, const std::vector<WitnessPoint>& witness,
                              const Point& xbar, const std::vector<Point>& test_points,
                              const LemmaConfig& config) {
  const std::vector<std::pair<std::string, double>> tols = {
      {"tol", config.tol}, {"h", config.domain_radius}, {"slope_bound", config.slope_bound}};
  EpiConfig epi = config.epi;
  epi.tol = config.tol;

  const Family slopes = slope_family(seq);
  std::vector<Point> points = test_points;
  points.push_back(xbar);
  const EpiReport slope_rep = epi_report(slopes, points, epi);
  if (!slope_rep.verdict.holds()) {
    Verdict v = slope_rep.verdict;
    v.status = VerdictStatus::PreconditionFailed;
    v.note = "slope functions do not epi-converge";
    return v;
  }
  if (slopes.limit->value(xbar).is_infinite()) {
    return make_verdict(VerdictStatus::PreconditionFailed, {{"xbar", xbar, {}}}, tols,
                        "xbar is outside dom s_f");
  }
  const WitnessStats st = witness_stats(seq, witness, xbar, config.slope_bound);
  if (st.unbounded) {
    return make_verdict(VerdictStatus::PreconditionFailed, {*st.unbounded}, tols,
                        "witness slopes are not bounded");
  }
  const TailLimits t = tail_limits(st.values, epi.tail);
  if (st.tail_distance > config.tol || t.limsup.is_infinite() ||
      !matches(t.liminf, t.limsup, config.tol)) {
    return make_verdict(VerdictStatus::PreconditionFailed,
                        {{"xbar",
                          xbar,
                          {{"tail_distance", st.tail_distance},
                           {"liminf f_n(x_n)", t.liminf},
                           {"limsup f_n(x_n)", t.limsup}}}},
                        tols, "(x_n, f_n(x_n)) does not converge");
  }

  const Family values = value_family(seq);
  std::vector<Witness> all;
  std::vector<Witness> bad;
  for (const Point& x : test_points) {
    const EpiLimitEstimate e = epi_limits(values, x, epi);
    const ExtReal s = slopes.limit->value(x);
    const ExtReal near = values.limit->inf_over_ball(x, config.domain_radius);
    Witness w{"point", x, {{"s_f", s}, {"f_l", e.lower}, {"f_u", e.upper}, {"inf f near x", near}}};
    const bool first = s.is_infinite() || (e.lower.is_finite() && e.upper.is_finite());
    const bool second = (e.lower.is_infinite() && e.upper.is_infinite()) || near.is_finite();
    if (!first || !second) bad.push_back(w);
    all.push_back(std::move(w));
  }
  if (!bad.empty()) return make_verdict(VerdictStatus::Fails, std::move(bad), tols);
  return make_verdict(VerdictStatus::Holds, std::move(all), tols);
}

}  // namespace epilab
