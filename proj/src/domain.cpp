#include "epilab/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace epilab {

namespace {

constexpr double kBallTol = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

double segment_param(const SegmentSet& s, const Point& x) {
  const Point d = s.b - s.a;
  const double dd = d.squaredNorm();
  if (dd == 0.0) return 0.0;
  return std::clamp((x - s.a).dot(d) / dd, 0.0, 1.0);
}

}  // namespace

bool Box::contains(const Point& x) const {
  return (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
}

Point Box::clamp(const Point& x) const { return x.cwiseMax(lo).cwiseMin(hi); }

bool contains(const ConvexSet& set, const Point& x) {
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, BoxSet>) {
          return (x.array() >= s.lo.array()).all() && (x.array() <= s.hi.array()).all();
        } else if constexpr (std::is_same_v<T, BallSet>) {
          return (x - s.center).norm() <= s.radius * (1.0 + kBallTol) + kBallTol;
        } else {
          const Point p = s.a + segment_param(s, x) * (s.b - s.a);
          const double sc = std::max({1.0, s.a.template lpNorm<Eigen::Infinity>(),
                                      s.b.template lpNorm<Eigen::Infinity>()});
          return (x - p).norm() <= kBallTol * sc;
        }
      },
      set);
}

Point project(const ConvexSet& set, const Point& x) {
  return std::visit(
      [&](const auto& s) -> Point {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, BoxSet>) {
          return x.cwiseMax(s.lo).cwiseMin(s.hi);
        } else if constexpr (std::is_same_v<T, BallSet>) {
          const Point u = x - s.center;
          const double n = u.norm();
          if (n <= s.radius) return x;
          return s.center + (s.radius / n) * u;
        } else {
          return s.a + segment_param(s, x) * (s.b - s.a);
        }
      },
      set);
}

ConvexSet shifted(const ConvexSet& set, const Point& v) {
  return std::visit(
      [&](const auto& s) -> ConvexSet {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, BoxSet>) {
          return BoxSet{s.lo + v, s.hi + v};
        } else if constexpr (std::is_same_v<T, BallSet>) {
          return BallSet{s.center + v, s.radius};
        } else {
          return SegmentSet{s.a + v, s.b + v};
        }
      },
      set);
}

Domain::Domain(int dim, std::vector<ConvexSet> sets) : dim_(dim), sets_(std::move(sets)) {
  normalize();
}

void Domain::normalize() {
  std::optional<BoxSet> box;
  std::vector<ConvexSet> rest;
  for (auto& s : sets_) {
    if (auto* b = std::get_if<BoxSet>(&s)) {
      if (!box) {
        box = *b;
      } else {
        box->lo = box->lo.cwiseMax(b->lo);
        box->hi = box->hi.cwiseMin(b->hi);
      }
    } else {
      rest.push_back(std::move(s));
    }
  }
  sets_.clear();
  if (box) {
    if ((box->lo.array() > box->hi.array()).any()) {
      fail(ErrorCode::EmptyDomain, "domain: box intersection is empty");
    }
    sets_.push_back(*box);
  }
  for (auto& s : rest) sets_.push_back(std::move(s));
}

bool Domain::contains(const Point& x) const {
  return std::all_of(sets_.begin(), sets_.end(),
                     [&](const ConvexSet& s) { return epilab::contains(s, x); });
}

Domain Domain::intersect(const Domain& other) const {
  std::vector<ConvexSet> all = sets_;
  all.insert(all.end(), other.sets_.begin(), other.sets_.end());
  return Domain(dim_, std::move(all));
}

Domain Domain::shifted(const Point& v) const {
  std::vector<ConvexSet> out;
  for (const auto& s : sets_) out.push_back(epilab::shifted(s, v));
  return Domain(dim_, std::move(out));
}

std::optional<Point> Domain::exact_projection(const Point& x) const {
  if (sets_.empty()) return x;
  if (sets_.size() == 1) return project(sets_.front(), x);
  return std::nullopt;
}

Point Domain::feasible_point() const {
  Point x = Point::Zero(dim_);
  if (sets_.empty()) return x;
  for (int round = 0; round < 2000; ++round) {
    bool ok = true;
    for (const auto& s : sets_) {
      if (!epilab::contains(s, x)) {
        ok = false;
        x = project(s, x);
      }
    }
    if (ok) return x;
  }
  if (contains(x)) return x;
  fail(ErrorCode::EmptyDomain, "domain: intersection of domain pieces appears empty");
}

Interval Domain::as_interval() const {
  if (dim_ != 1) fail(ErrorCode::DimensionMismatch, "domain interval requires d = 1");
  Interval out = Interval::whole();
  for (const auto& s : sets_) {
    Interval iv = std::visit(
        [](const auto& v) -> Interval {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, BoxSet>) {
            return {v.lo(0), v.hi(0), false};
          } else if constexpr (std::is_same_v<T, BallSet>) {
            return {v.center(0) - v.radius, v.center(0) + v.radius, false};
          } else {
            return {std::min(v.a(0), v.b(0)), std::max(v.a(0), v.b(0)), false};
          }
        },
        s);
    out.lo = std::max(out.lo, iv.lo);
    out.hi = std::min(out.hi, iv.hi);
  }
  if (out.lo > out.hi) return Interval::make_empty();
  return out;
}

std::optional<std::vector<Point>> Domain::sample_relative_interior(std::mt19937_64& rng,
                                                                    int count) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Point> out;
  if (sets_.empty()) {
    for (int i = 0; i < count; ++i) {
      Point p(dim_);
      for (int k = 0; k < dim_; ++k) p(k) = 4.0 * unit(rng) - 2.0;
      out.push_back(p);
    }
    return out;
  }
  if (sets_.size() != 1) return std::nullopt;
  const ConvexSet& s = sets_.front();
  for (int i = 0; i < count; ++i) {
    Point p(dim_);
    if (const auto* b = std::get_if<BoxSet>(&s)) {
      for (int k = 0; k < dim_; ++k) {
        double lo = b->lo(k);
        double hi = b->hi(k);
        if (lo == hi) {
          p(k) = lo;
          continue;
        }
        if (std::isinf(lo)) lo = std::isinf(hi) ? -2.0 : hi - 4.0;
        if (std::isinf(hi)) hi = lo + 4.0;
        // Stay strictly inside: t ∈ [0.02, 0.98].
        p(k) = lo + (0.02 + 0.96 * unit(rng)) * (hi - lo);
      }
    } else if (const auto* ball = std::get_if<BallSet>(&s)) {
      if (ball->radius == 0.0) {
        p = ball->center;
      } else {
        Point g(dim_);
        for (int k = 0; k < dim_; ++k) g(k) = gauss(rng);
        const double r = ball->radius * 0.98 * std::pow(unit(rng), 1.0 / dim_);
        p = ball->center + (r / std::max(g.norm(), 1e-300)) * g;
      }
    } else {
      const auto& seg = std::get<SegmentSet>(s);
      p = seg.a + (0.02 + 0.96 * unit(rng)) * (seg.b - seg.a);
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace epilab
