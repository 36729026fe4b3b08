#include <doctest.h>

#include <cmath>

#include "epilab/error.hpp"
#include "epilab/slope.hpp"

using namespace epilab;

namespace {

ConvexSpec abs1() { return ConvexSpec::scaled_norm(1, 1.0); }
ConvexSpec half_sq1() { return ConvexSpec::quadratic(Matrix::Identity(1, 1), make_point({0.0}), 0.0); }

}  // namespace

TEST_CASE("exact slopes") {
  const ConvexSpec q = ConvexSpec::quadratic(Matrix::Identity(2, 2), Point::Zero(2), 0.0);
  const SlopeValue s = slope_exact(q, make_point({3.0, 4.0}));
  CHECK(s.value.value() == doctest::Approx(5.0));
  CHECK(s.method == SlopeMethod::ExactQuadratic);

  const ConvexSpec abs_ma = ConvexSpec::max_affine({{make_point({1.0}), 0.0}, {make_point({-1.0}), 0.0}});
  CHECK(slope_exact(abs_ma, make_point({0.0})).value == ExtReal(0.0));
  CHECK(slope_exact(abs_ma, make_point({0.0})).method == SlopeMethod::ExactPolyhedral);

  // Kink of max(x, -x, 2x - 1) at 1: hull{1, 2}; oracle1d gives 1.
  const ConvexSpec kink = ConvexSpec::max_affine(
      {{make_point({1.0}), 0.0}, {make_point({-1.0}), 0.0}, {make_point({2.0}), -1.0}});
  CHECK(slope_exact(kink, make_point({1.0})).value.value() == doctest::Approx(1.0));
  CHECK(kink.to_piecewise().slope(1.0).value() == doctest::Approx(1.0));

  const ConvexSpec box = ConvexSpec::indicator_box(make_point({0.0, 0.0}), make_point({1.0, 1.0}));
  CHECK(slope_exact(box, make_point({1.0, 0.5})).value == ExtReal(0.0));
  CHECK(slope_exact(box, make_point({2.0, 0.5})).value.is_infinite());
  // Boundary with a tilt: distance from 0 to (v + normal cone).
  const ConvexSpec tilted = box.tilted(make_point({1.0, 1.0}));
  CHECK(slope_exact(tilted, make_point({0.0, 0.5})).value.value() == doctest::Approx(1.0));
  CHECK(slope_exact(tilted, make_point({0.0, 0.0})).value.value() == doctest::Approx(0.0));
  CHECK(slope_exact(tilted, make_point({1.0, 0.5})).value.value() == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("minimum-norm point of a polytope") {
  std::vector<Point> tri = {make_point({1.0, 1.0}), make_point({2.0, -1.0}), make_point({3.0, 2.0})};
  const Point p = min_norm_in_hull(tri);
  // Nearest point lies on the edge [(1,1), (2,-1)]: t = 0.2, p = (1.2, 0.6).
  CHECK(p(0) == doctest::Approx(1.2));
  CHECK(p(1) == doctest::Approx(0.6));
  std::vector<Point> around = {make_point({1.0, 0.0}), make_point({-1.0, 1.0}), make_point({-1.0, -1.0})};
  CHECK(min_norm_in_hull(around).norm() == doctest::Approx(0.0));
}

TEST_CASE("prox ladder estimates") {
  const std::vector<double> ladder = {1.0, 0.5, 0.25};
  const SlopeValue a = slope_prox_estimate(abs1(), make_point({1.0}), ladder, 1e-12);
  REQUIRE(a.trace.size() == 3);
  for (const auto& s : a.trace) CHECK(s.estimate == doctest::Approx(1.0));
  CHECK(a.value.value() == doctest::Approx(1.0));

  const SlopeValue q = slope_prox_estimate(half_sq1(), make_point({1.0}), ladder, 1e-12);
  CHECK(q.trace[0].estimate == doctest::Approx(0.5));
  CHECK(q.trace[1].estimate == doctest::Approx(2.0 / 3.0));
  CHECK(q.trace[2].estimate == doctest::Approx(0.8));

  const ConvexSpec box = ConvexSpec::indicator_box(make_point({0.0}), make_point({1.0}));
  const SlopeValue z = slope_prox_estimate(box, make_point({0.5}), ladder, 1e-12);
  for (const auto& s : z.trace) CHECK(s.estimate == 0.0);

  CHECK_THROWS_AS(slope_prox_estimate(abs1(), make_point({1.0}), {0.5, 1.0}, 1e-12), Error);
  CHECK_THROWS_AS(slope_prox_estimate(abs1(), make_point({1.0}), {}, 1e-12), Error);
  CHECK(trace_csv(q).rfind("lambda,estimate\n1,0.5\n", 0) == 0);
}

TEST_CASE("prox ladder declares infinite slope outside the domain") {
  const ConvexSpec box = ConvexSpec::indicator_box(make_point({0.0}), make_point({1.0}));
  const SlopeValue s = slope_prox_estimate(box, make_point({3.0}), default_slope_ladder(), 1e-9);
  CHECK(s.value.is_infinite());
  CHECK(slope(box, make_point({3.0})).value.is_infinite());
}

TEST_CASE("min-norm subgradient") {
  const ConvexSpec q = ConvexSpec::quadratic(Matrix::Identity(2, 2), Point::Zero(2), 0.0);
  const MinNormSubgradient g = min_norm_subgradient(q, make_point({3.0, 4.0}));
  CHECK(g.vector(0) == doctest::Approx(3.0));
  CHECK(g.norm == doctest::Approx(5.0));
  CHECK(min_norm_subgradient(abs1(), make_point({0.0})).norm == 0.0);
  CHECK(min_norm_subgradient(abs1(), make_point({-2.0})).vector(0) == doctest::Approx(-1.0));
  const ConvexSpec box = ConvexSpec::indicator_box(make_point({0.0}), make_point({1.0}));
  CHECK_THROWS_AS(min_norm_subgradient(box, make_point({2.0})), Error);
}

TEST_CASE("Moreau envelope") {
  CHECK(moreau_envelope(half_sq1(), 1.0, make_point({2.0})) == doctest::Approx(1.0));
  CHECK(moreau_envelope(abs1(), 1.0, make_point({0.5})) == doctest::Approx(0.125));
  CHECK(moreau_envelope(abs1(), 0.3, make_point({0.0})) == 0.0);
  double prev = -1.0;
  for (double lambda : default_slope_ladder()) {
    const double e = moreau_envelope(abs1(), lambda, make_point({0.7}));
    CHECK(e <= 0.7 + 1e-15);
    CHECK(e >= prev);
    prev = e;
  }
}

TEST_CASE("zero slope exactly on the argmin") {
  const PWQuad1D g = PWQuad1D::max_affine({{-1.0, 0.0}, {0.0, 0.0}, {2.0, -2.0}});  // flat on [0,1]
  const ConvexSpec f = ConvexSpec::piecewise(g);
  const Interval am = g.infimum().argmin;
  for (double x = -2.0; x <= 3.0; x += 0.125) {
    const bool zero = slope_exact(f, make_point({x})).value == ExtReal(0.0);
    CHECK(zero == am.contains(x));
  }
}
