#include <doctest.h>

#include <cmath>

#include "epilab/error.hpp"
#include "epilab/setconv.hpp"

using namespace epilab;

namespace {

SampledSet singleton(double v, double h = 1e-3) {
  return {{make_point({v})}, h, {make_point({-100.0}), make_point({100.0})}};
}

SampledSet circle(double r, int m) {
  SampledSet s;
  s.resolution = M_PI * r / m;
  s.box = {make_point({-3.0, -3.0}), make_point({3.0, 3.0})};
  for (int i = 0; i < m; ++i) {
    const double t = 2.0 * M_PI * i / m;
    s.points.push_back(make_point({r * std::cos(t), r * std::sin(t)}));
  }
  return s;
}

SampledSet segment(double a, double b, double h) {
  SampledSet s;
  s.resolution = h;
  s.box = {make_point({-1.0}), make_point({3.0})};
  const int m = static_cast<int>(std::ceil((b - a) / h));
  for (int i = 0; i <= m; ++i) s.points.push_back(make_point({a + (b - a) * i / m}));
  return s;
}

ConvexSpec abs_shift(double z) { return ConvexSpec::scaled_norm(1, 1.0).translated(make_point({z})); }

FunctionSeq shifted_abs() {
  return {1, [](Index n) { return abs_shift(1.0 / static_cast<double>(n)); },
          ConvexSpec::scaled_norm(1, 1.0), default_index_ladder()};
}

FunctionSeq steep_parabola() {
  return {1,
          [](Index n) {
            return ConvexSpec::quadratic(Matrix::Constant(1, 1, 2.0 * static_cast<double>(n)),
                                         make_point({0.0}), 0.0);
          },
          ConvexSpec::indicator_box(make_point({0.0}), make_point({0.0})), default_index_ladder()};
}

FunctionSeq growing_constants() {
  return {1, [](Index n) { return ConvexSpec::constant(1, static_cast<double>(n)); },
          ConvexSpec::constant(1, 0.0), default_index_ladder()};
}

std::vector<Point> grid1(double a, double b, int count) {
  std::vector<Point> out;
  for (int i = 0; i < count; ++i) out.push_back(make_point({a + (b - a) * i / (count - 1)}));
  return out;
}

}  // namespace

TEST_CASE("k-d tree distances match brute force") {
  std::vector<Point> pts;
  for (int i = 0; i < 200; ++i) {
    pts.push_back(make_point({std::sin(1.3 * i), std::cos(0.7 * i), std::sin(0.11 * i * i)}));
  }
  const PointCloudIndex idx(pts);
  for (int k = 0; k < 50; ++k) {
    const Point q = make_point({0.03 * k - 0.7, std::cos(k), 0.5 * std::sin(3.0 * k)});
    double brute = INFINITY;
    for (const Point& p : pts) brute = std::min(brute, (p - q).norm());
    CHECK(idx.distance(q) == doctest::Approx(brute).epsilon(1e-14));
  }
  CHECK(std::isinf(PointCloudIndex({}).distance(make_point({0.0}))));
}

TEST_CASE("PK inner limit defects") {
  std::vector<SampledSet> seq;
  for (int n = 1; n <= 60; ++n) seq.push_back(singleton(1.0 / n));
  CHECK(pk_liminf_defect(singleton(0.0), seq) <= 1.0 / 40.0);
  SampledSet two{{make_point({0.0}), make_point({1.0})}, 1e-3, {}};
  CHECK(pk_liminf_defect(two, seq) == doctest::Approx(1.0).epsilon(0.03));

  std::vector<SampledSet> rings;
  for (int n = 1; n <= 60; ++n) rings.push_back(circle(1.0 + 1.0 / n, 720));
  const SampledSet unit = circle(1.0, 720);
  CHECK(pk_liminf_defect(unit, rings) <= 1.0 / 40.0 + 2.0 * unit.resolution);

  std::vector<SampledSet> few(5, singleton(0.0));
  CHECK_THROWS_AS(pk_liminf_defect(singleton(0.0), few), Error);
}

TEST_CASE("PK outer limit defects") {
  std::vector<SampledSet> alt;
  for (int n = 1; n <= 60; ++n) alt.push_back(singleton(n % 2 == 0 ? 0.0 : 1.0));
  SampledSet both{{make_point({0.0}), make_point({1.0})}, 1e-3, {}};
  CHECK(pk_limsup_defect(both, alt) <= 1e-3);
  // Only one of the two cluster points is in S.
  CHECK(pk_limsup_defect(singleton(0.0), alt) == doctest::Approx(1.0));

  std::vector<SampledSet> escaping;
  for (int n = 1; n <= 60; ++n) escaping.push_back(singleton(static_cast<double>(n)));
  CHECK(pk_limsup_defect(SampledSet{{}, 1e-3, {}}, escaping) == 0.0);

  const double h = 1e-3;
  std::vector<SampledSet> segs;
  for (int n = 1; n <= 60; ++n) segs.push_back(segment(0.0, 1.0 + 1.0 / n, h));
  CHECK(pk_limsup_defect(segment(0.0, 1.0, h), segs) <= 1.0 / 40.0 + 2.0 * h);
  CHECK(pk_liminf_defect(segment(0.0, 1.0, h), segs) <= 2.0 * h);
}

TEST_CASE("tail limits") {
  const TailLimits alt = tail_limits({0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0});
  CHECK(alt.liminf == ExtReal(0.0));
  CHECK(alt.limsup == ExtReal(1.0));
  std::vector<ExtReal> growing;
  for (int k = 0; k <= 32; ++k) growing.push_back(std::ldexp(1.0, k));
  CHECK(tail_limits(growing).liminf.is_infinite());
  std::vector<ExtReal> big(9, ExtReal(2e6));
  CHECK(tail_limits(big).liminf == ExtReal(2e6));
  CHECK(tail_limits({1.0, 1.0, 1.0, 1.0, ExtReal::infinity(), 1.0}).limsup.is_infinite());
  CHECK(tail_limits({1.0, 1.0, 1.0, 1.0, ExtReal::infinity(), 1.0}).liminf == ExtReal(1.0));
}

TEST_CASE("ball grids") {
  CHECK(ball_grid(make_point({0.0}), 1.0).size() >= 34);
  const auto g2 = ball_grid(make_point({1.0, 2.0}), 0.5);
  CHECK(g2.size() >= 4 * 17 / 2);
  for (const Point& p : g2) CHECK((p - make_point({1.0, 2.0})).norm() <= 0.5 + 1e-12);
}

TEST_CASE("epigraphical lower and upper limits") {
  const auto eps = default_eps_ladder();
  const auto ns = default_index_ladder();
  const EpiLimitEstimate a = epi_lower_limit(shifted_abs(), make_point({0.0}), eps, ns);
  CHECK(a.lower.value() == doctest::Approx(0.0));
  CHECK(a.upper.value() == doctest::Approx(0.0));
  // inf_{|y| ≤ ε} |y − 1/n| = max(0, 1/n − ε)
  for (std::size_t j = 0; j < eps.size(); ++j) {
    for (std::size_t i = 0; i < ns.size(); ++i) {
      const double want = std::max(0.0, 1.0 / static_cast<double>(ns[i]) - eps[j]);
      CHECK(a.rungs[j].inner[i].value() == doctest::Approx(want).epsilon(1e-12));
    }
  }

  CHECK(epi_lower_limit(growing_constants(), make_point({0.4}), eps, ns).lower.is_infinite());
  const EpiLimitEstimate p0 = epi_lower_limit(steep_parabola(), make_point({0.0}), eps, ns);
  CHECK(p0.lower == ExtReal(0.0));
  const EpiLimitEstimate p3 = epi_lower_limit(steep_parabola(), make_point({0.3}), eps, ns);
  CHECK(p3.lower.is_infinite());
  CHECK(p3.upper.is_infinite());
  CHECK(p3.lower_stable);

  FunctionSeq alt{1,
                  [](Index n) { return ConvexSpec::constant(1, n % 2 == 0 ? 0.0 : 1.0); },
                  ConvexSpec::constant(1, 0.0),
                  {}};
  std::vector<Index> linear;
  for (Index n = 1; n <= 30; ++n) linear.push_back(n);
  const EpiLimitEstimate c = epi_upper_limit(alt, make_point({2.0}), eps, linear);
  CHECK(c.lower == ExtReal(0.0));
  CHECK(c.upper == ExtReal(1.0));

  FunctionSeq fixed{1, [](Index) { return abs_shift(0.25); }, abs_shift(0.25), {}};
  const EpiLimitEstimate f = epi_upper_limit(fixed, make_point({-0.5}), eps, {1, 2, 3, 4, 5, 6});
  CHECK(f.upper.value() == doctest::Approx(0.75).epsilon(1e-4));
  CHECK(f.lower <= f.upper);
}

TEST_CASE("epi-convergence verdicts") {
  CHECK(epi_converges(shifted_abs(), grid1(-1.0, 1.0, 21), 1e-3).holds());
  const Verdict v = epi_converges(growing_constants(), grid1(-1.0, 1.0, 5), 1e-3);
  CHECK(v.fails());
  CHECK(v.witnesses.size() == 5);
  CHECK(epi_converges(steep_parabola(), {make_point({-0.5}), make_point({0.0}), make_point({0.5})},
                      1e-3)
            .holds());
  // A wrong limit.
  FunctionSeq wrong = shifted_abs();
  wrong.limit = abs_shift(0.5);
  CHECK(epi_converges(wrong, grid1(-1.0, 1.0, 5), 1e-3).fails());
}

TEST_CASE("epi-limits in two dimensions") {
  // f_n(x) = ½‖x − (1/n, 0)‖² → ½‖x‖²
  FunctionSeq seq{2,
                  [](Index n) {
                    return ConvexSpec::quadratic(Matrix::Identity(2, 2), Point::Zero(2), 0.0)
                        .translated(make_point({1.0 / static_cast<double>(n), 0.0}));
                  },
                  ConvexSpec::quadratic(Matrix::Identity(2, 2), Point::Zero(2), 0.0),
                  default_index_ladder()};
  std::vector<Point> pts = {make_point({0.0, 0.0}), make_point({1.0, -0.5}), make_point({-0.3, 0.7})};
  CHECK(epi_converges(seq, pts, 1e-3).holds());

  // Balls of radius 1 + 1/n: indicator values, including far outside.
  FunctionSeq balls{2,
                    [](Index n) {
                      return ConvexSpec::indicator_ball(Point::Zero(2), 1.0 + 1.0 / static_cast<double>(n));
                    },
                    ConvexSpec::indicator_ball(Point::Zero(2), 1.0), default_index_ladder()};
  pts.push_back(make_point({1.0, 0.0}));
  pts.push_back(make_point({1.5, 0.0}));
  CHECK(epi_converges(balls, pts, 1e-3).holds());
}

TEST_CASE("slope functions as extended-real functions") {
  const Family s = slope_family(shifted_abs());
  const EpiLimitEstimate e = epi_limits(s, make_point({0.0}));
  CHECK(e.lower == ExtReal(0.0));
  CHECK(e.upper == ExtReal(0.0));
  const EpiLimitEstimate e2 = epi_limits(s, make_point({0.5}));
  CHECK(e2.lower.value() == doctest::Approx(1.0));
  CHECK(epi_report(s, grid1(-1.0, 1.0, 9)).verdict.holds());
}

TEST_CASE("tightness diagnostics") {
  auto witness = [](const FunctionSeq& seq, auto x_of) {
    std::vector<WitnessPoint> w;
    for (Index n : seq.ladder) w.push_back({n, x_of(n)});
    return w;
  };
  auto inv = [](Index n) { return make_point({1.0 / static_cast<double>(n)}); };
  const FunctionSeq abs_seq = shifted_abs();
  CHECK(tightness_check(abs_seq, witness(abs_seq, inv), make_point({0.0})).holds());
  const FunctionSeq par = steep_parabola();
  CHECK(tightness_check(par, witness(par, inv), make_point({0.0})).holds());

  FunctionSeq half{1, [](Index) { return ConvexSpec::quadratic(Matrix::Identity(1, 1), make_point({0.0}), 0.0); },
                   ConvexSpec::quadratic(Matrix::Identity(1, 1), make_point({0.0}), 0.0),
                   default_index_ladder()};
  CHECK(tightness_check(half, witness(half, inv), make_point({0.0})).holds());

  // n y² at the fixed point 1 has slopes 2n: precondition violated.
  const Verdict v = tightness_check(par, witness(par, [](Index) { return make_point({1.0}); }),
                                    make_point({1.0}));
  CHECK(v.status == VerdictStatus::PreconditionFailed);
}

TEST_CASE("domain sandwich") {
  auto witness = [](const FunctionSeq& seq, auto x_of) {
    std::vector<WitnessPoint> w;
    for (Index n : seq.ladder) w.push_back({n, x_of(n)});
    return w;
  };
  auto inv = [](Index n) { return make_point({1.0 / static_cast<double>(n)}); };
  const FunctionSeq abs_seq = shifted_abs();
  CHECK(domain_sandwich_check(abs_seq, witness(abs_seq, inv), make_point({0.0}), grid1(-1.0, 1.0, 9))
            .holds());
  const FunctionSeq par = steep_parabola();
  CHECK(domain_sandwich_check(par, witness(par, inv), make_point({0.0}), grid1(-1.0, 1.0, 9)).holds());
  const FunctionSeq con = growing_constants();
  CHECK(domain_sandwich_check(con, witness(con, [](Index) { return make_point({0.0}); }),
                              make_point({0.0}), grid1(-1.0, 1.0, 3))
            .status == VerdictStatus::PreconditionFailed);
}
