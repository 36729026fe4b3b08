// Prints one PASS/FAIL line per acceptance criterion; exits nonzero if any
// criterion fails. Usage: epilab_acceptance [golden-corpus-dir]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "epilab/error.hpp"
#include "epilab/flow.hpp"
#include "epilab/scenario.hpp"
#include "epilab/slope.hpp"
#include "epilab/theorems.hpp"

using namespace epilab;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

char buf[512];

template <class... A>
std::string fmt(const char* f, A... a) {
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

bool close(double a, double b, double tol) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
}

double as_double(const ExtReal& v) {
  return v.is_infinite() ? std::numeric_limits<double>::infinity() : v.value();
}

// A d = 1 function built twice: as a generic spec tree and as an oracle
// assembled with the piecewise-quadratic algebra.
struct Pair {
  ConvexSpec spec;
  PWQuad1D oracle;
};

Pair random_pair(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> kind(0, 4);
  std::uniform_int_distribution<int> count(1, 4);
  std::vector<ConvexSpec> terms;
  PWQuad1D oracle = PWQuad1D::constant(0.0);
  bool boxed = false;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    switch (kind(rng)) {
      case 0: {
        const double a = 0.1 + std::abs(u(rng)), b = u(rng), c = u(rng);
        terms.push_back(ConvexSpec::quadratic(Matrix::Constant(1, 1, 2.0 * a), make_point({b}), c));
        oracle = oracle + PWQuad1D::quadratic(a, b, c);
        break;
      }
      case 1: {
        const double alpha = 0.2 + std::abs(u(rng)), z = 2.0 * u(rng);
        terms.push_back(ConvexSpec::scaled_norm(1, alpha).translated(make_point({z})));
        oracle = oracle + PWQuad1D::max_affine({{alpha, -alpha * z}, {-alpha, alpha * z}});
        break;
      }
      case 2: {
        std::vector<std::pair<double, double>> data = {{0.2 + std::abs(u(rng)), u(rng)},
                                                       {-0.2 - std::abs(u(rng)), u(rng)},
                                                       {2.0 * u(rng), u(rng)}};
        std::vector<ConvexSpec::AffinePiece> pieces;
        for (const auto& [g, beta] : data) pieces.push_back({make_point({g}), beta});
        terms.push_back(ConvexSpec::max_affine(pieces));
        oracle = oracle + PWQuad1D::max_affine(data);
        break;
      }
      case 3: {
        if (boxed) break;
        boxed = true;
        const double inf = std::numeric_limits<double>::infinity();
        const double lo = u(rng) < -0.6 ? -inf : -3.0 * std::abs(u(rng)) - 0.1;
        const double hi = u(rng) > 0.6 ? inf : 3.0 * std::abs(u(rng)) + 0.1;
        terms.push_back(ConvexSpec::indicator_box(make_point({lo}), make_point({hi})));
        oracle = oracle + PWQuad1D::indicator(lo, hi);
        break;
      }
      default: {
        const double mu = 0.1 + std::abs(u(rng)), z = u(rng);
        terms.push_back(ConvexSpec::piecewise(PWQuad1D::huber(mu)).translated(make_point({z})));
        oracle = oracle + PWQuad1D::huber(mu).translated(z);
        break;
      }
    }
  }
  if (terms.empty()) {
    terms.push_back(ConvexSpec::scaled_norm(1, 1.0));
    oracle = oracle + PWQuad1D::max_affine({{1.0, 0.0}, {-1.0, 0.0}});
  }
  ConvexSpec spec = terms.size() == 1 ? terms.front() : ConvexSpec::sum(terms);
  if (u(rng) > 0.3) {
    const double alpha = 0.5 + std::abs(u(rng));
    spec = spec.scaled(alpha);
    oracle = oracle.scaled(alpha);
  }
  if (u(rng) > 0.3) {
    const double v = 0.1 * u(rng);
    spec = spec.tilted(make_point({v}));
    oracle = oracle.tilted(v);
  }
  return {spec, oracle};
}

std::vector<Pair> pwq_corpus(std::size_t size) {
  std::mt19937_64 rng(20240611);
  std::vector<Pair> out;
  while (out.size() < size) {
    try {
      out.push_back(random_pair(rng));
    } catch (const Error&) {
      // Unbounded draws are rejected by the oracle constructors; draw again.
    }
  }
  return out;
}

Outcome oracle_equivalence() {
  const auto start = Clock::now();
  const std::vector<Pair> corpus = pwq_corpus(30);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  double worst = 0.0;
  int mismatches = 0;
  int compared = 0;
  for (const Pair& p : corpus) {
    for (int i = 0; i < 100; ++i) {
      const double x = u(rng);
      const double lambda = std::exp2(u(rng));
      const Point xp = make_point({x});
      const double fv = as_double(p.spec.evaluate(xp));
      const double ov = as_double(p.oracle.value(x));
      const double fs = as_double(slope(p.spec, xp).value);
      const double os = as_double(p.oracle.slope(x));
      const double fp = p.spec.prox(lambda, xp)(0);
      const double op = p.oracle.prox(lambda, x);
      for (auto [a, b] : {std::pair{fv, ov}, std::pair{fs, os}, std::pair{fp, op}}) {
        ++compared;
        if (!close(a, b, 1e-8)) {
          ++mismatches;
        } else if (std::isfinite(b)) {
          worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(b)));
        }
      }
    }
  }
  const double t = seconds_since(start);
  return {mismatches == 0 && t < 10.0,
          fmt("%zu functions x 100 points, %d comparisons, %d beyond 1e-8, worst rel err %.2e, %.2fs",
              corpus.size(), compared, mismatches, worst, t)};
}

std::vector<ConvexSpec> exact_class_corpus() {
  std::vector<ConvexSpec> out;
  for (const Pair& p : pwq_corpus(30)) out.push_back(p.spec);
  using AP = ConvexSpec::AffinePiece;
  const ConvexSpec half_sq = ConvexSpec::quadratic(Matrix::Identity(2, 2), Point::Zero(2), 0.0);
  out.push_back(half_sq);
  out.push_back(ConvexSpec::quadratic((Matrix(2, 2) << 2.0, 0.5, 0.5, 1.0).finished(),
                                      make_point({1.0, -1.0}), 0.3));
  out.push_back(ConvexSpec::scaled_norm(2, 1.5).translated(make_point({0.3, -0.2})));
  out.push_back(ConvexSpec::max_affine({AP{make_point({1.0, 0.0}), 0.0}, AP{make_point({-1.0, 0.5}), 0.2},
                                        AP{make_point({0.0, -2.0}), -0.1}}));
  out.push_back(ConvexSpec::indicator_box(make_point({-1.0, 0.0}), make_point({1.0, 2.0})));
  out.push_back(ConvexSpec::indicator_ball(make_point({0.5, 0.0}), 1.0));
  out.push_back(ConvexSpec::sum({half_sq.scaled(3.0), ConvexSpec::scaled_norm(2, 1.0)}));
  return out;
}

Outcome slope_ladder() {
  std::vector<double> ladder;
  for (int k = 0; k <= 20; ++k) ladder.push_back(std::exp2(-k));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  int points = 0, non_monotone = 0, off = 0, functions = 0;
  double worst = 0.0;
  for (const ConvexSpec& f : exact_class_corpus()) {
    ++functions;
    const int d = f.dimension();
    for (int i = 0; i < 40; ++i) {
      Point x(d);
      for (int k = 0; k < d; ++k) x(k) = u(rng);
      if (f.evaluate(x).is_infinite()) continue;
      ++points;
      const SlopeValue est = slope_prox_estimate(f, x, ladder, 1e-9);
      for (std::size_t k = 1; k < est.trace.size(); ++k) {
        const double prev = est.trace[k - 1].estimate;
        if (est.trace[k].estimate < prev - 1e-9 * std::max(1.0, prev)) {
          ++non_monotone;
          break;
        }
      }
      const double exact = as_double(slope_exact(f, x).value);
      const double last = est.trace.back().estimate;
      const double err = std::abs(last - exact) / std::max(1.0, exact);
      worst = std::max(worst, err);
      if (!(err <= 1e-5)) ++off;
    }
  }
  return {non_monotone == 0 && off == 0 && points > 0,
          fmt("%d functions, %d in-domain points, %d non-monotone traces, %d beyond 1e-5 at 2^-20, worst %.2e",
              functions, points, non_monotone, off, worst)};
}

double flow_error(double h) {
  const ConvexSpec f = ConvexSpec::quadratic(Matrix::Identity(1, 1), make_point({0.0}), 0.0);
  const DescentTrajectory tr = descend(f, make_point({2.0}), h, 5.0);
  double err = 0.0;
  for (std::size_t k = 0; k < tr.points.size(); ++k) {
    err = std::max(err, std::abs(tr.points[k](0) - 2.0 * std::exp(-tr.times[k])));
  }
  return err;
}

Outcome flow_accuracy() {
  const double e1 = flow_error(1e-3);
  const double e2 = flow_error(5e-4);
  const double ratio = e1 / e2;
  const ConvexSpec f = ConvexSpec::quadratic(Matrix::Identity(1, 1), make_point({0.0}), 0.0);
  const double energy = energy_identity_defect(descend(f, make_point({2.0}), 1e-3, 5.0));
  const bool ok = e1 <= 5e-3 && std::abs(ratio - 2.0) <= 0.4 && energy <= 5e-3;
  return {ok, fmt("max error %.3e at h=1e-3, %.3e at h=5e-4, ratio %.3f, energy defect %.3e", e1, e2,
                  ratio, energy)};
}

Outcome finite_arrival() {
  const double h = 1e-3;
  const DescentTrajectory tr = descend(ConvexSpec::scaled_norm(1, 1.0), make_point({2.0}), h, 5.0);
  if (!tr.arrival) return {false, "no arrival detected"};
  const double t = tr.times[*tr.arrival];
  bool stationary = true;
  for (std::size_t k = *tr.arrival + 1; k < tr.points.size(); ++k) {
    stationary = stationary && tr.points[k](0) == tr.points[*tr.arrival + 1](0) &&
                 std::abs(tr.points[k](0)) < kArrivalThreshold;
  }
  return {std::abs(t - 2.0) <= 2.0 * h && stationary,
          fmt("arrival at t=%.6f (target 2 +- %.0e), stationary afterwards: %s", t, 2.0 * h,
              stationary ? "yes" : "no")};
}

std::vector<Point> grid(int d, double r, int count) {
  std::vector<Point> out;
  std::vector<int> k(d, 0);
  while (true) {
    Point p(d);
    for (int i = 0; i < d; ++i) p(i) = -r + 2.0 * r * k[i] / (count - 1);
    out.push_back(p);
    int i = 0;
    while (i < d && ++k[i] == count) k[i++] = 0;
    if (i == d) break;
  }
  return out;
}

Outcome comparison_suite() {
  const auto start = Clock::now();
  using AP = ConvexSpec::AffinePiece;
  auto q1 = [](double a, double c) {
    return ConvexSpec::quadratic(Matrix::Constant(1, 1, a), make_point({0.0}), c);
  };
  auto box = [](double r) { return ConvexSpec::indicator_box(make_point({-r}), make_point({r})); };
  const ConvexSpec abs1 = ConvexSpec::scaled_norm(1, 1.0);
  const ConvexSpec huber1 = ConvexSpec::piecewise(PWQuad1D::huber(1.0));
  const ConvexSpec half2 = ConvexSpec::quadratic(Matrix::Identity(2, 2), Point::Zero(2), 0.0);
  const std::vector<std::pair<ConvexSpec, ConvexSpec>> pairs = {
      {ConvexSpec::scaled_norm(1, 2.0), abs1},
      {ConvexSpec::sum({abs1, ConvexSpec::constant(1, 1.0)}), abs1},
      {q1(1.0, 1.0), q1(1.0, 0.0)},
      {q1(2.0, 0.0), q1(1.0, 0.0)},
      {box(1.0), box(2.0)},
      {abs1, huber1},
      {ConvexSpec::sum({abs1, ConvexSpec::constant(1, 0.5)}), ConvexSpec::piecewise(PWQuad1D::huber(2.0))},
      {ConvexSpec::max_affine({AP{make_point({2.0}), 0.0}, AP{make_point({-2.0}), 0.0}}),
       ConvexSpec::max_affine({AP{make_point({1.0}), 0.0}, AP{make_point({-0.5}), 0.0}})},
      {ConvexSpec::scaled_norm(2, 2.0), ConvexSpec::scaled_norm(2, 1.0)},
      {ConvexSpec::quadratic((Matrix(2, 2) << 2.0, 0.0, 0.0, 3.0).finished(), Point::Zero(2), 0.0), half2},
      {ConvexSpec::indicator_ball(Point::Zero(2), 1.0), ConvexSpec::indicator_ball(Point::Zero(2), 2.0)},
      {ConvexSpec::sum({ConvexSpec::scaled_norm(2, 1.0), half2}), ConvexSpec::scaled_norm(2, 1.0)},
  };
  int holds = 0, fails = 0, other = 0;
  for (const auto& [f, g] : pairs) {
    const Verdict v = comparison_check(f, g, f.dimension() == 1 ? grid(1, 3.0, 61) : grid(2, 3.0, 13));
    if (v.holds()) {
      ++holds;
    } else if (v.fails()) {
      ++fails;
    } else {
      ++other;
    }
  }
  const double t = seconds_since(start);
  return {holds == static_cast<int>(pairs.size()) && fails == 0 && t < 5.0,
          fmt("%zu pairs: %d hold, %d fail, %d other, %.2fs", pairs.size(), holds, fails, other, t)};
}

const CheckRow* row(const ScenarioResult& r, const std::string& check) {
  for (const CheckRow& c : r.rows) {
    if (c.check == check) return &c;
  }
  return nullptr;
}

VerdictStatus status(const ScenarioResult& r, const std::string& check) {
  const CheckRow* c = row(r, check);
  return c ? c->status : VerdictStatus::PreconditionFailed;
}

Outcome nc_counterexample(const SuiteReport& rep) {
  for (const ScenarioResult& r : rep.scenarios) {
    if (r.id != "constant-n") continue;
    const VerdictStatus se = status(r, "main.slope-epi");
    const VerdictStatus nc = status(r, "main.nc");
    const VerdictStatus epi = status(r, "main.i");
    const bool ok = se == VerdictStatus::Holds && nc == VerdictStatus::Fails && epi == VerdictStatus::Fails;
    return {ok, fmt("f_n = n vs f = 0: slope-epi %s, NC %s, epi %s", to_string(se), to_string(nc),
                    to_string(epi))};
  }
  return {false, "scenario constant-n missing from the corpus"};
}

bool lists(const Scenario& s, CheckKind k) {
  return std::find(s.checks.begin(), s.checks.end(), k) != s.checks.end();
}

Outcome main_consistency(const std::vector<Scenario>& corpus, const SuiteReport& rep, double t) {
  int n = 0, consistent = 0;
  std::string bad;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (!lists(corpus[i], CheckKind::Main)) continue;
    ++n;
    const ScenarioResult& r = rep.scenarios[i];
    const VerdictStatus a = status(r, "main.i"), b = status(r, "main.ii"), c = status(r, "main.iii");
    const bool agree = r.error.empty() && r.main_consistent && a == b && b == c &&
                       (a == VerdictStatus::Holds || a == VerdictStatus::Fails);
    if (agree) {
      ++consistent;
    } else {
      bad += " " + r.id;
    }
  }
  return {n >= 12 && consistent == n && t < 120.0,
          fmt("%d/%d corpus scenarios with agreeing sub-verdicts, corpus runtime %.1fs%s", consistent, n, t,
              bad.empty() ? "" : (" (disagree:" + bad + ")").c_str())};
}

Outcome attouch_consistency(const std::vector<Scenario>& corpus, const SuiteReport& rep) {
  int n = 0, ok = 0;
  std::string bad;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (!lists(corpus[i], CheckKind::Attouch)) continue;
    ++n;
    const ScenarioResult& r = rep.scenarios[i];
    const VerdictStatus a = status(r, "attouch.i"), b = status(r, "attouch.ii"), c = status(r, "attouch.iii");
    const bool good = r.error.empty() && r.attouch_consistent && a == b && b == c &&
                      (!lists(corpus[i], CheckKind::Main) || a == status(r, "main.i"));
    if (good) {
      ++ok;
    } else {
      bad += " " + r.id;
    }
  }
  return {n > 0 && ok == n, fmt("%d/%d scenarios with exact graph samples agree with each other and main (i)%s",
                                ok, n, bad.empty() ? "" : (" (disagree:" + bad + ")").c_str())};
}

Outcome lemma_checks(const std::vector<Scenario>& corpus, const SuiteReport& rep) {
  int n = 0, ok = 0;
  std::string bad;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    for (const char* check : {"tightness", "sandwich"}) {
      const CheckRow* c = row(rep.scenarios[i], check);
      if (!c) continue;
      ++n;
      if (c->status == VerdictStatus::Holds) {
        ++ok;
      } else {
        bad += " " + corpus[i].id + "/" + check;
      }
    }
  }
  return {n > 0 && ok == n, fmt("%d/%d tightness and domain-sandwich checks hold%s", ok, n,
                                bad.empty() ? "" : (" (failing:" + bad + ")").c_str())};
}

bool same_outputs(const SuiteReport& a, const SuiteReport& b) {
  if (a.report_csv() != b.report_csv() || a.summary_csv() != b.summary_csv()) return false;
  if (a.scenarios.size() != b.scenarios.size()) return false;
  for (std::size_t i = 0; i < a.scenarios.size(); ++i) {
    if (a.scenarios[i].files != b.scenarios[i].files) return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path corpus_dir = argc > 1 ? fs::path(argv[1]) : fs::path(EPILAB_GOLDEN_DIR);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(corpus_dir)) {
    if (e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Scenario> corpus;
  try {
    for (const auto& f : files) corpus.push_back(load_scenario(f));
  } catch (const Error& e) {
    std::printf("corpus: %s\n", e.what());
    return 1;
  }

  RunOptions options;
  options.jobs = static_cast<int>(std::max(2u, std::thread::hardware_concurrency()));
  const auto start = Clock::now();
  const SuiteReport first = scenario_suite(corpus, options);
  const double corpus_seconds = seconds_since(start);
  RunOptions serial;
  const SuiteReport second = scenario_suite(corpus, serial);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"oracle equivalence (d=1)", oracle_equivalence},
      {"slope ladder monotonicity and convergence", slope_ladder},
      {"flow accuracy", flow_accuracy},
      {"finite-time arrival", finite_arrival},
      {"comparison principle suite", comparison_suite},
      {"NC counterexample", [&] { return nc_counterexample(first); }},
      {"main-theorem consistency", [&] { return main_consistency(corpus, first, corpus_seconds); }},
      {"Attouch consistency", [&] { return attouch_consistency(corpus, first); }},
      {"lemma-level diagnostics", [&] { return lemma_checks(corpus, first); }},
      {"determinism",
       [&] {
         const bool same = same_outputs(first, second);
         return Outcome{same, fmt("%zu scenarios, %d jobs vs 1 job: CSV bodies %s", corpus.size(),
                                  options.jobs, same ? "byte-identical" : "differ")};
       }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("criterion %zu: %s %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first,
                o.detail.c_str());
  }
  return failed == 0 ? 0 : 1;
}
