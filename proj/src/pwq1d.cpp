#include "epilab/pwq1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "epilab/error.hpp"

namespace epilab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Affine tails with |slope| below this are treated as flat.
constexpr double kFlatSlope = 1e-13;

double scale_of(double v) { return std::max(1.0, std::abs(v)); }

double piece_scale(const QuadPiece& p, double t) {
  return std::max({1.0, std::abs(p.a * t * t), std::abs(p.b * t), std::abs(p.c)});
}

}  // namespace

Interval Interval::whole() { return {-kInf, kInf, false}; }

double Interval::nearest(double v) const {
  if (empty) fail(ErrorCode::InvalidArgument, "nearest point of an empty interval");
  return std::clamp(v, lo, hi);
}

double Interval::distance(double v) const {
  if (empty) return kInf;
  if (v < lo) return lo - v;
  if (v > hi) return v - hi;
  return 0.0;
}

Interval Interval::operator+(const Interval& o) const {
  if (empty || o.empty) return make_empty();
  return {lo + o.lo, hi + o.hi, false};
}

Interval Interval::scaled(double alpha) const {
  if (empty) return *this;
  return {alpha * lo, alpha * hi, false};
}

Interval Interval::shifted(double v) const {
  if (empty) return *this;
  return {lo + v, hi + v, false};
}

// ---------------------------------------------------------------------------
// construction

PWQuad1D PWQuad1D::create(double lo, double hi, std::vector<double> breaks,
                          std::vector<QuadPiece> pieces, BoundPolicy policy) {
  if (std::isnan(lo) || std::isnan(hi) || lo == kInf || hi == -kInf) {
    fail(ErrorCode::InvalidArgument, "pwq1d: invalid domain bounds");
  }
  if (lo > hi) fail(ErrorCode::EmptyDomain, "pwq1d: domain lo > hi");
  if (pieces.size() != breaks.size() + 1) {
    fail(ErrorCode::InvalidArgument, "pwq1d: need exactly one more piece than breakpoints");
  }
  for (std::size_t i = 1; i < breaks.size(); ++i) {
    if (!(breaks[i] > breaks[i - 1])) {
      fail(ErrorCode::InvalidArgument, "pwq1d: breakpoints must be strictly increasing");
    }
  }
  for (auto& p : pieces) {
    if (!std::isfinite(p.a) || !std::isfinite(p.b) || !std::isfinite(p.c)) {
      fail(ErrorCode::InvalidArgument, "pwq1d: non-finite piece coefficient");
    }
    if (p.a < 0) {
      if (p.a < -kMergeTol * scale_of(p.b)) {
        fail(ErrorCode::InvalidArgument, "pwq1d: negative curvature piece (not convex)");
      }
      p.a = 0.0;
    }
  }

  PWQuad1D f;
  f.lo_ = lo;
  f.hi_ = hi;

  // Drop breakpoints on or outside the domain together with the pieces that
  // only live outside it.
  std::size_t first = 0;
  while (first < breaks.size() && breaks[first] <= lo + kMergeTol * scale_of(lo)) ++first;
  std::size_t last = breaks.size();
  while (last > first && breaks[last - 1] >= hi - kMergeTol * scale_of(hi)) --last;

  if (lo == hi) {
    // Degenerate domain: keep the value at the single point.
    const double v = pieces[first].value(lo);
    f.pieces_ = {QuadPiece{0.0, 0.0, v}};
    return f;
  }

  for (std::size_t i = first; i <= last; ++i) {
    f.pieces_.push_back(pieces[i]);
    if (i < last) f.breaks_.push_back(breaks[i]);
  }

  // Merge near-coincident breakpoints (drop the sliver piece between them).
  {
    std::vector<double> nb;
    std::vector<QuadPiece> np{f.pieces_.front()};
    for (std::size_t i = 0; i < f.breaks_.size(); ++i) {
      const double t = f.breaks_[i];
      if (!nb.empty() && t - nb.back() <= kMergeTol * scale_of(t)) {
        np.back() = f.pieces_[i + 1];
        continue;
      }
      nb.push_back(t);
      np.push_back(f.pieces_[i + 1]);
    }
    f.breaks_ = std::move(nb);
    f.pieces_ = std::move(np);
  }

  // Continuity and convexity at every interior breakpoint.
  for (std::size_t i = 0; i < f.breaks_.size(); ++i) {
    const double t = f.breaks_[i];
    const QuadPiece& l = f.pieces_[i];
    const QuadPiece& r = f.pieces_[i + 1];
    const double sc = std::max(piece_scale(l, t), piece_scale(r, t));
    if (std::abs(l.value(t) - r.value(t)) > 1e3 * kMergeTol * sc) {
      fail(ErrorCode::InvalidArgument,
           "pwq1d: discontinuity at breakpoint " + std::to_string(t));
    }
    const double dl = l.derivative(t);
    const double dr = r.derivative(t);
    if (dl > dr + 1e3 * kMergeTol * std::max({1.0, std::abs(dl), std::abs(dr)})) {
      fail(ErrorCode::InvalidArgument,
           "pwq1d: one-sided derivatives decrease at breakpoint " + std::to_string(t) +
               " (not convex)");
    }
  }

  // Merge adjacent identical pieces.
  {
    std::vector<double> nb;
    std::vector<QuadPiece> np{f.pieces_.front()};
    for (std::size_t i = 0; i < f.breaks_.size(); ++i) {
      const QuadPiece& prev = np.back();
      const QuadPiece& next = f.pieces_[i + 1];
      const bool same = std::abs(prev.a - next.a) <= kMergeTol * scale_of(prev.a) &&
                        std::abs(prev.b - next.b) <= kMergeTol * scale_of(prev.b) &&
                        std::abs(prev.c - next.c) <= kMergeTol * scale_of(prev.c);
      if (same) continue;
      nb.push_back(f.breaks_[i]);
      np.push_back(next);
    }
    f.breaks_ = std::move(nb);
    f.pieces_ = std::move(np);
  }

  if (policy == BoundPolicy::RequireBoundedBelow && !f.bounded_below()) {
    fail(ErrorCode::UnboundedBelow, "pwq1d: function is unbounded below");
  }
  return f;
}

PWQuad1D PWQuad1D::quadratic(double a, double b, double c, BoundPolicy policy) {
  return create(-kInf, kInf, {}, {QuadPiece{a, b, c}}, policy);
}

PWQuad1D PWQuad1D::constant(double c) { return quadratic(0.0, 0.0, c); }

PWQuad1D PWQuad1D::indicator(double lo, double hi) {
  return create(lo, hi, {}, {QuadPiece{0.0, 0.0, 0.0}});
}

PWQuad1D PWQuad1D::huber(double mu) {
  if (!(mu > 0)) fail(ErrorCode::InvalidArgument, "huber: mu must be > 0");
  return create(-kInf, kInf, {-mu, mu},
                {QuadPiece{0.0, -1.0, -mu / 2}, QuadPiece{1.0 / (2 * mu), 0.0, 0.0},
                 QuadPiece{0.0, 1.0, -mu / 2}});
}

PWQuad1D PWQuad1D::max_affine(const std::vector<std::pair<double, double>>& lines,
                              BoundPolicy policy) {
  if (lines.empty()) fail(ErrorCode::InvalidArgument, "max_affine: no pieces");
  auto sorted = lines;
  std::sort(sorted.begin(), sorted.end());
  // Equal slopes: keep the largest intercept (last after sorting).
  std::vector<std::pair<double, double>> uniq;
  for (const auto& l : sorted) {
    if (!uniq.empty() && uniq.back().first == l.first) {
      uniq.back() = l;
    } else {
      uniq.push_back(l);
    }
  }
  auto cross = [](const std::pair<double, double>& p, const std::pair<double, double>& q) {
    return (p.second - q.second) / (q.first - p.first);
  };
  std::vector<std::pair<double, double>> hull;
  for (const auto& l : uniq) {
    while (hull.size() >= 2 &&
           cross(hull[hull.size() - 2], l) <= cross(hull[hull.size() - 2], hull.back())) {
      hull.pop_back();
    }
    hull.push_back(l);
  }
  std::vector<double> breaks;
  std::vector<QuadPiece> pieces;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    pieces.push_back({0.0, hull[i].first, hull[i].second});
    if (i + 1 < hull.size()) breaks.push_back(cross(hull[i], hull[i + 1]));
  }
  return create(-kInf, kInf, std::move(breaks), std::move(pieces), policy);
}

PWQuad1D PWQuad1D::with_policy(BoundPolicy policy) const {
  return create(lo_, hi_, breaks_, pieces_, policy);
}

// ---------------------------------------------------------------------------
// evaluation

std::size_t PWQuad1D::piece_index(double x) const {
  return static_cast<std::size_t>(std::upper_bound(breaks_.begin(), breaks_.end(), x) -
                                  breaks_.begin());
}

double PWQuad1D::left_derivative(double x) const {
  const auto i = static_cast<std::size_t>(
      std::lower_bound(breaks_.begin(), breaks_.end(), x) - breaks_.begin());
  return pieces_[i].derivative(x);
}

double PWQuad1D::right_derivative(double x) const {
  return pieces_[piece_index(x)].derivative(x);
}

ExtReal PWQuad1D::value(double x) const {
  if (!(x >= lo_ && x <= hi_)) return ExtReal::infinity();
  return pieces_[piece_index(x)].value(x);
}

Interval PWQuad1D::subdifferential(double x) const {
  if (!(x >= lo_ && x <= hi_)) return Interval::make_empty();
  if (lo_ == hi_) return Interval::whole();
  const double l = (x == lo_) ? -kInf : left_derivative(x);
  const double r = (x == hi_) ? kInf : right_derivative(x);
  return {l, r, false};
}

ExtReal PWQuad1D::slope(double x) const {
  const Interval s = subdifferential(x);
  if (s.empty) return ExtReal::infinity();
  return s.distance(0.0);
}

double PWQuad1D::prox(double lambda, double x) const {
  if (!(lambda > 0)) fail(ErrorCode::InvalidArgument, "prox: lambda must be > 0");
  if (lo_ == hi_) return lo_;
  // Nodes z_0 = lo, z_1..z_k = breakpoints, z_{k+1} = hi. The map
  // p ↦ p + λ∂f(p) is monotone; walk the nodes until x falls at or before one.
  const std::size_t k = breaks_.size();
  auto node = [&](std::size_t j) {
    if (j == 0) return lo_;
    if (j == k + 1) return hi_;
    return breaks_[j - 1];
  };
  auto solve_piece = [&](std::size_t i) {
    const QuadPiece& p = pieces_[i];
    const double v = (x - lambda * p.b) / (1.0 + 2.0 * lambda * p.a);
    return std::clamp(v, node(i), node(i + 1));
  };
  for (std::size_t j = 0; j <= k + 1; ++j) {
    const double z = node(j);
    if (std::isinf(z)) continue;
    const Interval img = subdifferential(z).scaled(lambda).shifted(z);
    if (x < img.lo) return solve_piece(j - 1);  // j ≥ 1 here: img.lo = −∞ at finite lo
    if (x <= img.hi) return z;
  }
  return solve_piece(k);
}

bool PWQuad1D::bounded_below() const {
  if (lo_ == hi_) return true;
  if (lo_ == -kInf) {
    const QuadPiece& p = pieces_.front();
    if (p.a == 0.0 && p.b > kFlatSlope) return false;
  }
  if (hi_ == kInf) {
    const QuadPiece& p = pieces_.back();
    if (p.a == 0.0 && p.b < -kFlatSlope) return false;
  }
  return true;
}

Infimum1D PWQuad1D::infimum() const {
  if (!bounded_below()) fail(ErrorCode::UnboundedBelow, "pwq1d: infimum is -inf");
  if (lo_ == hi_) return {value(lo_), Interval::point(lo_), true};

  const std::size_t k = breaks_.size();
  auto node = [&](std::size_t j) {
    if (j == 0) return lo_;
    if (j == k + 1) return hi_;
    return breaks_[j - 1];
  };
  double amin = kInf;
  double amax = -kInf;
  auto add = [&](double lo, double hi) {
    amin = std::min(amin, lo);
    amax = std::max(amax, hi);
  };
  for (std::size_t j = 0; j <= k + 1; ++j) {
    const double z = node(j);
    if (std::isinf(z)) continue;
    const Interval s = subdifferential(z);
    const double tol = kMergeTol * std::max({1.0, std::isfinite(s.lo) ? std::abs(s.lo) : 0.0,
                                             std::isfinite(s.hi) ? std::abs(s.hi) : 0.0});
    if (s.contains(0.0, tol)) add(z, z);
  }
  for (std::size_t i = 0; i <= k; ++i) {
    const QuadPiece& p = pieces_[i];
    const double a = node(i);
    const double b = node(i + 1);
    if (p.a > 0) {
      const double r = -p.b / (2 * p.a);
      if (r > a && r < b) add(r, r);
    } else if (std::abs(p.b) <= kFlatSlope) {
      add(a, b);
    }
  }
  if (amin > amax) {
    // Rounding pushed every candidate out; fall back to the best node.
    double best = kInf;
    double arg = 0.0;
    for (std::size_t j = 0; j <= k + 1; ++j) {
      const double z = node(j);
      if (std::isinf(z)) continue;
      const double v = value(z).value();
      if (v < best) {
        best = v;
        arg = z;
      }
    }
    amin = amax = arg;
  }
  ExtReal v;
  if (std::isfinite(amin)) {
    v = value(amin);
  } else if (std::isfinite(amax)) {
    v = value(amax);
  } else {
    v = value(0.0);
  }
  return {v, Interval{amin, amax, false}, true};
}

ExtReal PWQuad1D::min_over(double a, double b) const {
  const double l = std::max(a, lo_);
  const double h = std::min(b, hi_);
  if (l > h) return ExtReal::infinity();
  if (l == h) return value(l);
  return restricted(l, h).infimum().value;
}

ExtReal PWQuad1D::min_slope_over(double a, double b) const {
  const double l = std::max(a, lo_);
  const double h = std::min(b, hi_);
  if (l > h) return ExtReal::infinity();
  ExtReal best = min(slope(l), slope(h));
  const std::size_t k = breaks_.size();
  for (double t : breaks_) {
    if (t >= l && t <= h) best = min(best, slope(t));
  }
  for (std::size_t i = 0; i <= k; ++i) {
    const QuadPiece& p = pieces_[i];
    if (p.a > 0) {
      const double r = -p.b / (2 * p.a);
      if (r > l && r < h && piece_index(r) == i) best = min(best, slope(r));
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// conjugate

PWQuad1D PWQuad1D::conjugate() const {
  if (lo_ == hi_) {
    // f = indicator{z} + v  ⇒  f*(s) = s z − v
    const double v = value(lo_).value();
    return create(-kInf, kInf, {}, {QuadPiece{0.0, lo_, -v}}, BoundPolicy::AllowUnbounded);
  }
  struct Seg {
    double s_lo;
    double s_hi;
    QuadPiece piece;
  };
  std::vector<Seg> segs;
  const std::size_t k = breaks_.size();
  auto node = [&](std::size_t j) {
    if (j == 0) return lo_;
    if (j == k + 1) return hi_;
    return breaks_[j - 1];
  };

  // Vertical part of ∂f at a finite left end: f* is affine with slope lo.
  if (std::isfinite(lo_)) {
    segs.push_back({-kInf, right_derivative(lo_), {0.0, lo_, -value(lo_).value()}});
  }
  for (std::size_t i = 0; i <= k; ++i) {
    const QuadPiece& p = pieces_[i];
    const double za = node(i);
    const double zb = node(i + 1);
    if (p.a > 0) {
      const double s0 = std::isinf(za) ? -kInf : p.derivative(za);
      const double s1 = std::isinf(zb) ? kInf : p.derivative(zb);
      segs.push_back({s0, s1,
                      {1.0 / (4 * p.a), -p.b / (2 * p.a), p.b * p.b / (4 * p.a) - p.c}});
    }
    if (i < k) {
      const double t = zb;
      const double sl = p.derivative(t);
      const double sr = pieces_[i + 1].derivative(t);
      if (sr > sl) segs.push_back({sl, sr, {0.0, t, -value(t).value()}});
    }
  }
  if (std::isfinite(hi_)) {
    segs.push_back({left_derivative(hi_), kInf, {0.0, hi_, -value(hi_).value()}});
  }

  std::vector<Seg> kept;
  for (const auto& s : segs) {
    if (s.s_hi > s.s_lo) kept.push_back(s);
  }
  if (kept.empty()) {
    // f affine on R with slope b: f* = indicator{b} − c.
    const QuadPiece& p = pieces_.front();
    return create(p.b, p.b, {}, {QuadPiece{0.0, 0.0, -p.c}}, BoundPolicy::AllowUnbounded);
  }
  std::vector<double> nb;
  std::vector<QuadPiece> np;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (i > 0) nb.push_back(kept[i].s_lo);
    np.push_back(kept[i].piece);
  }
  // Keep breakpoints strictly increasing even if rounding made neighbours touch.
  for (std::size_t i = 1; i < nb.size(); ++i) {
    if (!(nb[i] > nb[i - 1])) nb[i] = std::nextafter(nb[i - 1], kInf);
  }
  return create(kept.front().s_lo, kept.back().s_hi, std::move(nb), std::move(np),
                BoundPolicy::AllowUnbounded);
}

// ---------------------------------------------------------------------------
// calculus

PWQuad1D PWQuad1D::operator+(const PWQuad1D& o) const {
  double lo = std::max(lo_, o.lo_);
  double hi = std::min(hi_, o.hi_);
  if (lo > hi) {
    if (lo - hi <= kMergeTol * scale_of(lo)) {
      hi = lo;
    } else {
      fail(ErrorCode::EmptyDomain, "pwq1d sum: domains do not intersect");
    }
  }
  if (lo == hi) {
    const double v = (value(lo) + o.value(lo)).value();
    return create(lo, lo, {}, {QuadPiece{0.0, 0.0, v}}, BoundPolicy::AllowUnbounded);
  }
  std::vector<double> all;
  for (double t : breaks_) {
    if (t > lo && t < hi) all.push_back(t);
  }
  for (double t : o.breaks_) {
    if (t > lo && t < hi) all.push_back(t);
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());

  std::vector<QuadPiece> pieces;
  const std::size_t k = all.size();
  for (std::size_t i = 0; i <= k; ++i) {
    const double a = (i == 0) ? lo : all[i - 1];
    const double b = (i == k) ? hi : all[i];
    double m;
    if (std::isfinite(a) && std::isfinite(b)) {
      m = 0.5 * (a + b);
    } else if (std::isfinite(a)) {
      m = a + 1.0;
    } else if (std::isfinite(b)) {
      m = b - 1.0;
    } else {
      m = 0.0;
    }
    pieces.push_back(pieces_[piece_index(m)] + o.pieces_[o.piece_index(m)]);
  }
  return create(lo, hi, std::move(all), std::move(pieces), BoundPolicy::AllowUnbounded);
}

PWQuad1D PWQuad1D::scaled(double alpha) const {
  if (!(alpha > 0)) fail(ErrorCode::InvalidArgument, "pwq1d scale must be > 0");
  auto p = pieces_;
  for (auto& q : p) q = {alpha * q.a, alpha * q.b, alpha * q.c};
  return create(lo_, hi_, breaks_, std::move(p), BoundPolicy::AllowUnbounded);
}

PWQuad1D PWQuad1D::tilted(double v) const {
  auto p = pieces_;
  if (lo_ == hi_) {
    p.front().c += v * lo_;
  } else {
    for (auto& q : p) q.b += v;
  }
  return create(lo_, hi_, breaks_, std::move(p), BoundPolicy::AllowUnbounded);
}

PWQuad1D PWQuad1D::translated(double z) const {
  auto p = pieces_;
  if (lo_ != hi_) {
    for (auto& q : p) q = {q.a, q.b - 2 * q.a * z, q.a * z * z - q.b * z + q.c};
  }
  auto b = breaks_;
  for (auto& t : b) t += z;
  return create(lo_ + z, hi_ + z, std::move(b), std::move(p), BoundPolicy::AllowUnbounded);
}

PWQuad1D PWQuad1D::restricted(double a, double b) const {
  return *this + create(a, b, {}, {QuadPiece{}}, BoundPolicy::AllowUnbounded);
}

PWQuad1D PWQuad1D::compose_affine(double p, double q) const {
  if (q == 0.0) fail(ErrorCode::InvalidArgument, "compose_affine: q must be nonzero");
  auto map = [&](double x) { return (x - p) / q; };
  double lo = map(lo_);
  double hi = map(hi_);
  if (lo_ == hi_) {
    return create(lo, lo, {}, {QuadPiece{0.0, 0.0, pieces_.front().c}},
                  BoundPolicy::AllowUnbounded);
  }
  std::vector<double> nb;
  std::vector<QuadPiece> np;
  for (double t : breaks_) nb.push_back(map(t));
  for (const auto& c : pieces_) {
    np.push_back({c.a * q * q, 2 * c.a * p * q + c.b * q, c.a * p * p + c.b * p + c.c});
  }
  if (q < 0) {
    std::swap(lo, hi);
    std::reverse(nb.begin(), nb.end());
    std::reverse(np.begin(), np.end());
  }
  return create(lo, hi, std::move(nb), std::move(np), BoundPolicy::AllowUnbounded);
}

bool PWQuad1D::approx_equal(const PWQuad1D& o, double tol) const {
  auto same_end = [&](double a, double b) {
    if (std::isinf(a) || std::isinf(b)) return a == b;
    return std::abs(a - b) <= tol * scale_of(a);
  };
  if (!same_end(lo_, o.lo_) || !same_end(hi_, o.hi_)) return false;
  std::vector<double> pts;
  const double lo = std::max(lo_, o.lo_);
  const double hi = std::min(hi_, o.hi_);
  if (std::isfinite(lo)) pts.push_back(lo);
  if (std::isfinite(hi)) pts.push_back(hi);
  for (double t : breaks_) pts.push_back(t);
  for (double t : o.breaks_) pts.push_back(t);
  if (pts.empty()) pts.push_back(0.0);
  std::sort(pts.begin(), pts.end());
  std::vector<double> probes;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    probes.push_back(pts[i]);
    if (i + 1 < pts.size()) probes.push_back(0.5 * (pts[i] + pts[i + 1]));
  }
  probes.push_back(pts.front() - 1.7);
  probes.push_back(pts.back() + 1.3);
  for (double x : probes) {
    if (x < lo || x > hi) continue;
    const ExtReal a = value(x);
    const ExtReal b = o.value(x);
    if (a.is_infinite() || b.is_infinite()) {
      if (a.is_infinite() != b.is_infinite()) return false;
      continue;
    }
    if (std::abs(a.value() - b.value()) > tol * scale_of(a.value())) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

nlohmann::json bound_to_json(double v) {
  if (std::isinf(v)) return nullptr;
  return v;
}

double bound_from_json(const nlohmann::json& j, double if_null) {
  if (j.is_null()) return if_null;
  if (!j.is_number()) fail(ErrorCode::Schema, "pwq1d: domain bounds must be numbers or null");
  return j.get<double>();
}

}  // namespace

nlohmann::json PWQuad1D::to_json() const {
  nlohmann::json pieces = nlohmann::json::array();
  for (const auto& p : pieces_) pieces.push_back({p.a, p.b, p.c});
  return {{"kind", "pwq1d"},
          {"domain", {bound_to_json(lo_), bound_to_json(hi_)}},
          {"breakpoints", breaks_},
          {"pieces", pieces}};
}

PWQuad1D PWQuad1D::from_json(const nlohmann::json& j, BoundPolicy policy) {
  if (!j.is_object()) fail(ErrorCode::Schema, "pwq1d: expected an object");
  double lo = -kInf;
  double hi = kInf;
  if (j.contains("domain")) {
    const auto& d = j.at("domain");
    if (!d.is_array() || d.size() != 2) fail(ErrorCode::Schema, "pwq1d: domain must be [lo, hi]");
    lo = bound_from_json(d[0], -kInf);
    hi = bound_from_json(d[1], kInf);
  }
  std::vector<double> breaks;
  if (j.contains("breakpoints")) {
    for (const auto& t : j.at("breakpoints")) {
      if (!t.is_number()) fail(ErrorCode::Schema, "pwq1d: breakpoints must be numbers");
      breaks.push_back(t.get<double>());
    }
  }
  std::vector<QuadPiece> pieces;
  if (!j.contains("pieces")) fail(ErrorCode::Schema, "pwq1d: missing 'pieces'");
  for (const auto& p : j.at("pieces")) {
    if (!p.is_array() || p.size() != 3) fail(ErrorCode::Schema, "pwq1d: piece must be [a, b, c]");
    for (const auto& c : p) {
      if (!c.is_number()) fail(ErrorCode::Schema, "pwq1d: piece coefficients must be numbers");
    }
    pieces.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
  }
  return create(lo, hi, std::move(breaks), std::move(pieces), policy);
}

}  // namespace epilab
