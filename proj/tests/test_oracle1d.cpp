#include <doctest.h>

#include <random>

#include "epilab/error.hpp"
#include "epilab/pwq1d.hpp"

using namespace epilab;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

PWQuad1D abs_fn() { return PWQuad1D::max_affine({{1.0, 0.0}, {-1.0, 0.0}}); }
PWQuad1D half_square() { return PWQuad1D::quadratic(0.5, 0.0, 0.0); }

}  // namespace

TEST_CASE("subdifferential at kinks, smooth points and domain ends") {
  const Interval k = oracle1d::exact_subdiff(abs_fn(), 0.0);
  CHECK(k.lo == -1.0);
  CHECK(k.hi == 1.0);
  const Interval s = oracle1d::exact_subdiff(half_square(), 3.0);
  CHECK(s.lo == 3.0);
  CHECK(s.hi == 3.0);
  const Interval r = oracle1d::exact_subdiff(PWQuad1D::indicator(0.0, 1.0), 1.0);
  CHECK(r.lo == 0.0);
  CHECK(r.hi == kInf);
  CHECK(oracle1d::exact_subdiff(PWQuad1D::indicator(0.0, 1.0), 1.5).empty);
}

TEST_CASE("slope is the distance of the subdifferential to zero") {
  CHECK(oracle1d::exact_slope(abs_fn(), 0.0) == ExtReal(0.0));
  CHECK(oracle1d::exact_slope(abs_fn(), 2.0) == ExtReal(1.0));
  CHECK(oracle1d::exact_slope(PWQuad1D::indicator(0.0, 1.0), 1.5).is_infinite());
}

TEST_CASE("prox solves the optimality inclusion exactly") {
  CHECK(oracle1d::exact_prox(abs_fn(), 0.5, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(oracle1d::exact_prox(half_square(), 2.0, 3.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(oracle1d::exact_prox(PWQuad1D::indicator(0.0, 1.0), 7.0, -4.0) == 0.0);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  const PWQuad1D g = PWQuad1D::max_affine({{-2.0, -1.0}, {0.0, 0.0}, {3.0, -2.0}}) +
                     PWQuad1D::quadratic(0.25, 0.1, 0.0);
  for (int i = 0; i < 200; ++i) {
    const double x = u(rng);
    const double lambda = std::exp(u(rng));
    const double p = g.prox(lambda, x);
    const Interval sub = g.subdifferential(p).scaled(lambda).shifted(p);
    CHECK(sub.contains(x, 1e-10 * std::max(1.0, std::abs(x))));
  }
}

TEST_CASE("conjugates of the reference functions") {
  CHECK(oracle1d::exact_conjugate(half_square()).approx_equal(half_square(), 1e-12));
  const PWQuad1D abs_star = oracle1d::exact_conjugate(abs_fn());
  CHECK(abs_star.approx_equal(PWQuad1D::indicator(-1.0, 1.0), 1e-12));
  const PWQuad1D box_star = oracle1d::exact_conjugate(PWQuad1D::indicator(0.0, 1.0));
  CHECK(box_star.approx_equal(PWQuad1D::max_affine({{0.0, 0.0}, {1.0, 0.0}}), 1e-12));
  // Values cross-checked against a dense-grid supremum.
  for (double s : {-3.0, -1.0, 0.0, 1.0, 2.0, 3.0}) {
    CHECK(box_star.value(s).value() == doctest::Approx(std::max(0.0, s)));
  }
  CHECK(abs_star.value(0.5) == ExtReal(0.0));
  CHECK(abs_star.value(2.0).is_infinite());
}

TEST_CASE("conjugation is an involution") {
  const std::vector<PWQuad1D> fs = {
      half_square(),
      abs_fn(),
      PWQuad1D::huber(0.3),
      PWQuad1D::indicator(-1.0, 2.0),
      PWQuad1D::max_affine({{-1.0, 0.0}, {2.0, -1.0}}),
      PWQuad1D::create(0.0, kInf, {1.0}, {{1.0, 0.0, 0.0}, {0.0, 2.0, -1.0}}),
      PWQuad1D::quadratic(2.0, -1.0, 3.0),
  };
  for (const auto& f : fs) {
    CHECK(f.conjugate().conjugate().approx_equal(f, 1e-9));
  }
}

TEST_CASE("Fenchel-Young inequality with equality on the subdifferential") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const PWQuad1D g = PWQuad1D::huber(0.5) + PWQuad1D::quadratic(0.5, 0.0, 0.0);
  const PWQuad1D gs = g.conjugate();
  for (int i = 0; i < 200; ++i) {
    const double x = u(rng);
    const double s = u(rng);
    const ExtReal lhs = g.value(x) + gs.value(s);
    if (lhs.is_finite()) CHECK(lhs.value() >= x * s - 1e-10);
    const Interval sub = g.subdifferential(x);
    const double t = sub.nearest(s);
    CHECK((g.value(x) + gs.value(t)).value() == doctest::Approx(x * t).epsilon(1e-10));
  }
}

TEST_CASE("infimum and argmin") {
  const Infimum1D a = oracle1d::exact_inf(PWQuad1D::max_affine({{1.0, -2.0}, {-1.0, 2.0}}));
  CHECK(a.value == ExtReal(0.0));
  CHECK(a.argmin.lo == doctest::Approx(2.0));
  CHECK(a.argmin.hi == doctest::Approx(2.0));
  const Infimum1D b = oracle1d::exact_inf(PWQuad1D::max_affine({{0.0, 0.0}, {-1.0, 0.0}}));
  CHECK(b.value == ExtReal(0.0));
  CHECK(b.argmin.lo == 0.0);
  CHECK(b.argmin.hi == kInf);
  CHECK_THROWS_AS(PWQuad1D::quadratic(0.0, 1.0, 0.0), Error);
  const PWQuad1D line = PWQuad1D::quadratic(0.0, 1.0, 0.0, BoundPolicy::AllowUnbounded);
  CHECK_THROWS_AS(line.infimum(), Error);
}

TEST_CASE("construction rejects nonconvex and discontinuous data") {
  CHECK_THROWS_AS(PWQuad1D::create(-kInf, kInf, {0.0}, {{0.0, 1.0, 0.0}, {0.0, -1.0, 0.0}}),
                  Error);
  CHECK_THROWS_AS(PWQuad1D::create(-kInf, kInf, {0.0}, {{0.0, -1.0, 0.0}, {0.0, 1.0, 1.0}}),
                  Error);
  CHECK_THROWS_AS(PWQuad1D::create(-kInf, kInf, {}, {{-1.0, 0.0, 0.0}}), Error);
}

TEST_CASE("minimum over an interval and minimum slope over an interval") {
  const PWQuad1D g = PWQuad1D::max_affine({{1.0, -0.25}, {-1.0, 0.25}});  // |y - 1/4|
  CHECK(g.min_over(0.5, 1.0) == ExtReal(0.25));
  CHECK(g.min_over(-1.0, 1.0) == ExtReal(0.0));
  CHECK(g.min_slope_over(0.5, 1.0) == ExtReal(1.0));
  CHECK(g.min_slope_over(0.0, 0.3) == ExtReal(0.0));
  CHECK(PWQuad1D::indicator(0.0, 1.0).min_over(2.0, 3.0).is_infinite());
}

TEST_CASE("json round trip") {
  const PWQuad1D g = PWQuad1D::create(-1.0, kInf, {0.0, 2.0},
                                      {{0.0, -1.0, 0.0}, {0.5, 0.0, 0.0}, {0.0, 2.0, -2.0}});
  CHECK(PWQuad1D::from_json(g.to_json()).approx_equal(g, 0.0));
}
