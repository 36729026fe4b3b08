#include "epilab/subdiff.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>

namespace epilab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxPolytopeVertices = 400;

}  // namespace

Point min_norm_in_hull(const std::vector<Point>& pts) {
  if (pts.empty()) fail(ErrorCode::InvalidArgument, "min_norm_in_hull: no points");
  const auto m = pts.size();
  double scale = 0.0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double n2 = pts[i].squaredNorm();
    scale = std::max(scale, n2);
    if (n2 < pts[start].squaredNorm()) start = i;
  }
  scale = std::max(scale, 1e-300);
  const double tol = 1e-12 * scale;
  constexpr double kWeightTol = 1e-14;

  std::vector<std::size_t> corral{start};
  std::vector<double> w{1.0};
  Point x = pts[start];

  auto combine = [&]() {
    Point y = Point::Zero(x.size());
    for (std::size_t i = 0; i < corral.size(); ++i) y += w[i] * pts[corral[i]];
    return y;
  };

  for (int major = 0; major < 1000; ++major) {
    const double xx = x.squaredNorm();
    if (xx <= 1e-30 * scale) return Point::Zero(x.size());
    std::size_t j = 0;
    double best = kInf;
    for (std::size_t i = 0; i < m; ++i) {
      const double v = x.dot(pts[i]);
      if (v < best) {
        best = v;
        j = i;
      }
    }
    if (best >= xx - tol) return x;
    if (std::find(corral.begin(), corral.end(), j) != corral.end()) return x;
    corral.push_back(j);
    w.push_back(0.0);

    for (int minor = 0; minor < 1000; ++minor) {
      const auto k = static_cast<Eigen::Index>(corral.size());
      Matrix a = Matrix::Zero(k + 1, k + 1);
      for (Eigen::Index r = 0; r < k; ++r) {
        for (Eigen::Index c = 0; c < k; ++c) {
          a(r, c) = pts[corral[r]].dot(pts[corral[c]]);
        }
        a(r, k) = 1.0;
        a(k, r) = 1.0;
      }
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
      rhs(k) = 1.0;
      const Eigen::VectorXd sol = a.completeOrthogonalDecomposition().solve(rhs);
      std::vector<double> alpha(sol.data(), sol.data() + k);
      if (std::all_of(alpha.begin(), alpha.end(), [&](double v) { return v > kWeightTol; })) {
        w = alpha;
        x = combine();
        break;
      }
      double theta = 1.0;
      for (std::size_t i = 0; i < alpha.size(); ++i) {
        if (alpha[i] <= kWeightTol && w[i] - alpha[i] > 0) {
          theta = std::min(theta, w[i] / (w[i] - alpha[i]));
        }
      }
      for (std::size_t i = 0; i < w.size(); ++i) w[i] = theta * alpha[i] + (1 - theta) * w[i];
      // Drop vanished weights; always drop at least the smallest one.
      std::size_t smallest = 0;
      for (std::size_t i = 1; i < w.size(); ++i) {
        if (w[i] < w[smallest]) smallest = i;
      }
      std::vector<std::size_t> nc;
      std::vector<double> nw;
      for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] > kWeightTol && i != smallest) {
          nc.push_back(corral[i]);
          nw.push_back(w[i]);
        }
      }
      if (nc.empty()) {
        nc.push_back(corral[smallest == 0 && w.size() > 1 ? 1 : 0]);
        nw.push_back(1.0);
      }
      double sum = 0.0;
      for (double v : nw) sum += v;
      for (double& v : nw) v /= sum;
      corral = std::move(nc);
      w = std::move(nw);
      x = combine();
    }
  }
  fail(ErrorCode::Internal, "min_norm_in_hull: iteration limit reached");
}

// ---------------------------------------------------------------------------

SubdiffSet::SubdiffSet(int dim, Variant v) : dim_(dim), set_(std::move(v)) {}

SubdiffSet SubdiffSet::empty(int dim) { return {dim, Empty{}}; }
SubdiffSet SubdiffSet::point(const Point& p) {
  if (p.size() == 1) return interval(Interval::point(p(0)));
  return {static_cast<int>(p.size()), Polytope{{p}}};
}
SubdiffSet SubdiffSet::hull(std::vector<Point> vertices) {
  if (vertices.empty()) fail(ErrorCode::InvalidArgument, "hull: no vertices");
  const int dim = static_cast<int>(vertices.front().size());
  SubdiffSet s{dim, Polytope{std::move(vertices)}};
  if (dim == 1) return interval(s.to_interval());
  return s;
}
SubdiffSet SubdiffSet::ball(const Point& center, double radius) {
  SubdiffSet s{static_cast<int>(center.size()), Ball{center, radius}};
  if (s.dim_ == 1) return interval(s.to_interval());
  return s;
}
SubdiffSet SubdiffSet::box_cone(const Point& offset, std::vector<ConeAxis> axes) {
  SubdiffSet s{static_cast<int>(offset.size()), BoxCone{offset, std::move(axes)}};
  if (s.dim_ == 1) return interval(s.to_interval());
  return s;
}
SubdiffSet SubdiffSet::ray(const Point& offset, const Point& direction) {
  SubdiffSet s{static_cast<int>(offset.size()), Ray{offset, direction}};
  if (s.dim_ == 1) return interval(s.to_interval());
  return s;
}
SubdiffSet SubdiffSet::interval(const Interval& iv) {
  if (iv.empty) return empty(1);
  return {1, iv};
}

bool SubdiffSet::is_empty() const { return std::holds_alternative<Empty>(set_); }

bool SubdiffSet::is_singleton() const {
  return std::visit(
      [](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Empty>) {
          return false;
        } else if constexpr (std::is_same_v<T, Interval>) {
          return s.lo == s.hi;
        } else if constexpr (std::is_same_v<T, Polytope>) {
          return s.vertices.size() == 1;
        } else if constexpr (std::is_same_v<T, Ball>) {
          return s.radius == 0.0;
        } else if constexpr (std::is_same_v<T, BoxCone>) {
          return std::all_of(s.axes.begin(), s.axes.end(),
                             [](ConeAxis a) { return a == ConeAxis::Zero; });
        } else {
          return s.direction.squaredNorm() == 0.0;
        }
      },
      set_);
}

Interval SubdiffSet::to_interval() const {
  return std::visit(
      [](const auto& s) -> Interval {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Empty>) {
          return Interval::make_empty();
        } else if constexpr (std::is_same_v<T, Interval>) {
          return s;
        } else if constexpr (std::is_same_v<T, Polytope>) {
          double lo = kInf;
          double hi = -kInf;
          for (const auto& v : s.vertices) {
            lo = std::min(lo, v(0));
            hi = std::max(hi, v(0));
          }
          return {lo, hi, false};
        } else if constexpr (std::is_same_v<T, Ball>) {
          return {s.center(0) - s.radius, s.center(0) + s.radius, false};
        } else if constexpr (std::is_same_v<T, BoxCone>) {
          const double o = s.offset(0);
          switch (s.axes.front()) {
            case ConeAxis::Zero: return {o, o, false};
            case ConeAxis::NonNeg: return {o, kInf, false};
            case ConeAxis::NonPos: return {-kInf, o, false};
            case ConeAxis::Free: return Interval::whole();
          }
          return Interval::whole();
        } else {
          const double o = s.offset(0);
          const double dir = s.direction(0);
          if (dir > 0) return {o, kInf, false};
          if (dir < 0) return {-kInf, o, false};
          return {o, o, false};
        }
      },
      set_);
}

Point SubdiffSet::nearest(const Point& y) const {
  require_dimension(y, dim_, "SubdiffSet::nearest");
  return std::visit(
      [&](const auto& s) -> Point {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Empty>) {
          fail(ErrorCode::InvalidArgument, "nearest point of an empty subdifferential");
        } else if constexpr (std::is_same_v<T, Interval>) {
          Point p(1);
          p(0) = s.nearest(y(0));
          return p;
        } else if constexpr (std::is_same_v<T, Polytope>) {
          std::vector<Point> shifted;
          shifted.reserve(s.vertices.size());
          for (const auto& v : s.vertices) shifted.push_back(v - y);
          return min_norm_in_hull(shifted) + y;
        } else if constexpr (std::is_same_v<T, Ball>) {
          const Point u = y - s.center;
          const double n = u.norm();
          if (n <= s.radius) return y;
          return s.center + (s.radius / n) * u;
        } else if constexpr (std::is_same_v<T, BoxCone>) {
          Point u = y - s.offset;
          for (Eigen::Index k = 0; k < u.size(); ++k) {
            switch (s.axes[static_cast<std::size_t>(k)]) {
              case ConeAxis::Zero: u(k) = 0.0; break;
              case ConeAxis::NonNeg: u(k) = std::max(0.0, u(k)); break;
              case ConeAxis::NonPos: u(k) = std::min(0.0, u(k)); break;
              case ConeAxis::Free: break;
            }
          }
          return s.offset + u;
        } else {
          const double dd = s.direction.squaredNorm();
          if (dd == 0.0) return s.offset;
          const double t = std::max(0.0, (y - s.offset).dot(s.direction) / dd);
          return s.offset + t * s.direction;
        }
      },
      set_);
}

double SubdiffSet::distance(const Point& y) const {
  if (is_empty()) return kInf;
  return (nearest(y) - y).norm();
}

bool SubdiffSet::contains(const Point& y, double tol) const { return distance(y) <= tol; }

SubdiffSet SubdiffSet::operator+(const SubdiffSet& o) const {
  if (dim_ != o.dim_) fail(ErrorCode::DimensionMismatch, "SubdiffSet sum: dimensions differ");
  if (is_empty() || o.is_empty()) return empty(dim_);
  if (dim_ == 1) return interval(to_interval() + o.to_interval());
  if (o.is_singleton()) return shifted(o.nearest(Point::Zero(dim_)));
  if (is_singleton()) return o.shifted(nearest(Point::Zero(dim_)));
  if (const auto* a = std::get_if<Polytope>(&set_)) {
    if (const auto* b = std::get_if<Polytope>(&o.set_)) {
      if (a->vertices.size() * b->vertices.size() > kMaxPolytopeVertices) {
        fail(ErrorCode::NotExactClass, "subdifferential sum: polytope too large");
      }
      std::vector<Point> v;
      for (const auto& p : a->vertices) {
        for (const auto& q : b->vertices) v.push_back(p + q);
      }
      return hull(std::move(v));
    }
  }
  if (const auto* a = std::get_if<BoxCone>(&set_)) {
    if (const auto* b = std::get_if<BoxCone>(&o.set_)) {
      std::vector<ConeAxis> axes(a->axes.size());
      for (std::size_t k = 0; k < axes.size(); ++k) {
        const ConeAxis x = a->axes[k];
        const ConeAxis y = b->axes[k];
        if (x == ConeAxis::Zero) {
          axes[k] = y;
        } else if (y == ConeAxis::Zero || x == y) {
          axes[k] = x;
        } else {
          axes[k] = ConeAxis::Free;
        }
      }
      return box_cone(a->offset + b->offset, std::move(axes));
    }
  }
  fail(ErrorCode::NotExactClass, "subdifferential sum leaves the exactly representable family");
}

SubdiffSet SubdiffSet::scaled(double alpha) const {
  if (!(alpha > 0)) fail(ErrorCode::InvalidArgument, "SubdiffSet scale must be > 0");
  return std::visit(
      [&](const auto& s) -> SubdiffSet {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Empty>) {
          return *this;
        } else if constexpr (std::is_same_v<T, Interval>) {
          return interval(s.scaled(alpha));
        } else if constexpr (std::is_same_v<T, Polytope>) {
          auto v = s.vertices;
          for (auto& p : v) p *= alpha;
          return SubdiffSet{dim_, Polytope{std::move(v)}};
        } else if constexpr (std::is_same_v<T, Ball>) {
          return SubdiffSet{dim_, Ball{alpha * s.center, alpha * s.radius}};
        } else if constexpr (std::is_same_v<T, BoxCone>) {
          return SubdiffSet{dim_, BoxCone{alpha * s.offset, s.axes}};
        } else {
          return SubdiffSet{dim_, Ray{alpha * s.offset, s.direction}};
        }
      },
      set_);
}

SubdiffSet SubdiffSet::shifted(const Point& v) const {
  require_dimension(v, dim_, "SubdiffSet::shifted");
  return std::visit(
      [&](const auto& s) -> SubdiffSet {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Empty>) {
          return *this;
        } else if constexpr (std::is_same_v<T, Interval>) {
          return interval(s.shifted(v(0)));
        } else if constexpr (std::is_same_v<T, Polytope>) {
          auto out = s.vertices;
          for (auto& p : out) p += v;
          return SubdiffSet{dim_, Polytope{std::move(out)}};
        } else if constexpr (std::is_same_v<T, Ball>) {
          return SubdiffSet{dim_, Ball{s.center + v, s.radius}};
        } else if constexpr (std::is_same_v<T, BoxCone>) {
          return SubdiffSet{dim_, BoxCone{s.offset + v, s.axes}};
        } else {
          return SubdiffSet{dim_, Ray{s.offset + v, s.direction}};
        }
      },
      set_);
}

}  // namespace epilab
