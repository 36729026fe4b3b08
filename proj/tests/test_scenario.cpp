#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "epilab/error.hpp"
#include "epilab/scenario.hpp"

using namespace epilab;
using json = nlohmann::json;

namespace {

json minimal() {
  return json::parse(R"({
    "schema": 1, "id": "abs-shift", "dimension": 1,
    "family": {
      "member": {"kind": "translate", "shift": "1/n", "of": {"kind": "scaled_norm", "alpha": 1}},
      "limit": {"kind": "scaled_norm", "alpha": 1}
    },
    "checks": ["main"]
  })");
}

std::string schema_error(const json& doc) {
  try {
    parse_scenario(doc, "test");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Schema);
    return e.what();
  }
  FAIL("expected a schema error");
  return "";
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("minimal scenario resolves default ladders and grid") {
  const Scenario s = parse_scenario(minimal(), "test");
  CHECK(s.id == "abs-shift");
  CHECK(s.seq.ladder == default_index_ladder());
  CHECK(s.settings.theorem.epi.eps_ladder == default_eps_ladder());
  REQUIRE(s.test_points.size() == 21);
  CHECK(s.test_points.front()(0) == doctest::Approx(-1.0));
  CHECK(s.test_points.back()(0) == doctest::Approx(1.0));
  CHECK(s.seq.member(4).evaluate(make_point({0.0})).value() == doctest::Approx(0.25));

  const json d = describe(s);
  CHECK(d["family"]["ladder"].size() == 33);
  CHECK(d["checks"] == json::array({"main"}));
}

TEST_CASE("schema violations name the field") {
  json doc = minimal();
  doc["settings"] = {{"eps_ladder", {0.5, -0.25}}};
  CHECK(contains(schema_error(doc), "settings.eps_ladder[1]"));

  doc = minimal();
  doc["family"]["member"]["of"]["kind"] = "blob";
  CHECK(contains(schema_error(doc), "family.member"));

  doc = minimal();
  doc["checks"] = {"flow"};
  CHECK(contains(schema_error(doc), "flow: required by check 'flow'"));

  doc = minimal();
  doc["checks"] = {"epi", "epi"};
  CHECK(contains(schema_error(doc), "duplicate check"));

  doc = minimal();
  doc["expected"] = {{"attouch.i", "holds"}};
  CHECK(contains(schema_error(doc), "expected.attouch.i"));

  doc = minimal();
  doc["expected"] = {{"main", "maybe"}};
  CHECK(contains(schema_error(doc), "expected.main"));

  doc = minimal();
  doc["schema"] = 2;
  CHECK(contains(schema_error(doc), "schema"));

  doc = minimal();
  doc["colour"] = "red";
  CHECK(contains(schema_error(doc), "colour: unknown field"));

  doc = minimal();
  doc["family"]["ladder"] = {1, 4, 2};
  CHECK(contains(schema_error(doc), "strictly increasing"));
}

TEST_CASE("ladders and point sets") {
  json doc = minimal();
  doc["family"]["ladder"] = {{"linear", {{"from", 2}, {"to", 10}, {"step", 4}}}};
  doc["test_points"] = {{"grid", {{"lo", -2}, {"hi", 2}, {"count", 5}}}};
  doc["settings"] = {{"eps_ladder", {{"geometric", {{"start", 1}, {"ratio", 0.5}, {"count", 3}}}}}};
  Scenario s = parse_scenario(doc, "test");
  CHECK(s.seq.ladder == std::vector<Index>{2, 6, 10});
  CHECK(s.settings.theorem.epi.eps_ladder == std::vector<double>{1.0, 0.5, 0.25});
  REQUIRE(s.test_points.size() == 5);
  CHECK(s.test_points[1](0) == doctest::Approx(-1.0));

  doc["test_points"] = {{"random", {{"lo", 0}, {"hi", 1}, {"count", 8}}}};
  const auto a = parse_scenario(doc, "test", 7).test_points;
  const auto b = parse_scenario(doc, "test", 7).test_points;
  const auto c = parse_scenario(doc, "test", 8).test_points;
  REQUIRE(a.size() == 8);
  CHECK(a[3](0) == b[3](0));
  CHECK(a[3](0) != c[3](0));
  for (const Point& p : a) CHECK((p(0) >= 0.0 && p(0) <= 1.0));
}

TEST_CASE("expectations drive the exit code") {
  json doc = minimal();
  doc["expected"] = {{"main", "holds"}, {"main.i", "holds"}};
  SuiteReport rep = scenario_suite({parse_scenario(doc, "test")});
  CHECK(rep.exit_code == 0);
  CHECK(contains(rep.report_csv(), "abs-shift,main,holds,holds,as-expected,0,"));

  doc["expected"]["main"] = "fails";
  rep = scenario_suite({parse_scenario(doc, "test")});
  CHECK(rep.exit_code == 1);
  CHECK(rep.scenarios[0].mismatch());

  CHECK(scenario_suite({}).exit_code == 0);
  CHECK_THROWS_AS(scenario_suite({parse_scenario(doc, "a"), parse_scenario(doc, "b")}), Error);
}

TEST_CASE("growing constants fail as expected") {
  json doc = minimal();
  doc["id"] = "constant-n";
  doc["family"] = {{"member", {{"kind", "constant"}, {"c", "n"}}},
                   {"limit", {{"kind", "constant"}, {"c", 0}}}};
  doc["expected"] = {{"main.slope-epi", "holds"}, {"main.nc", "fails"}, {"main.i", "fails"},
                     {"main", "fails"}};
  const SuiteReport rep = scenario_suite({parse_scenario(doc, "test")});
  CHECK(rep.exit_code == 0);
  CHECK(contains(rep.report_csv(), "constant-n,main.i,fails,fails,fails-as-expected"));
  CHECK(rep.scenarios[0].main_consistent);
}

TEST_CASE("tolerance override below resolution is inconclusive") {
  RunOptions o;
  o.tol = 1e-12;
  const SuiteReport rep = scenario_suite({parse_scenario(minimal(), "test")}, o);
  CHECK(rep.exit_code == 3);
  CHECK_FALSE(rep.scenarios[0].red_alert());
}

TEST_CASE("comparison and flow checks") {
  const json doc = json::parse(R"({
    "schema": 1, "id": "cmp", "dimension": 1,
    "family": {"member": {"kind": "scaled_norm", "alpha": 2}, "limit": {"kind": "scaled_norm", "alpha": 2}},
    "checks": ["comparison", "flow", "energy", "infimizing"],
    "comparison": {"f": {"kind": "scaled_norm", "alpha": 2}, "g": {"kind": "scaled_norm", "alpha": 1}},
    "flow": {"x0": 2, "h": 0.01, "T": 3, "g": {"kind": "scaled_norm", "alpha": 1}}
  })");
  RunOptions o;
  o.emit_plots = true;
  const ScenarioResult r = run_scenario(parse_scenario(doc, "test"), o);
  REQUIRE(r.error.empty());
  REQUIRE(r.rows.size() == 4);
  for (const CheckRow& row : r.rows) CHECK(row.status == VerdictStatus::Holds);
  CHECK(r.files.count("trajectory.csv") == 1);
  CHECK(contains(r.files.at("plot.csv"), "series,x,y\nflow.f,0,4\n"));
}

TEST_CASE("suite output is deterministic across job counts") {
  json a = minimal();
  json b = minimal();
  b["id"] = "half-square";
  b["family"] = {{"member", {{"kind", "quadratic"}, {"Q", 1}, {"c", "1/n"}}},
                 {"limit", {{"kind", "quadratic"}, {"Q", 1}}}};
  b["checks"] = {"epi", "nc"};
  const std::vector<Scenario> list = {parse_scenario(a, "a"), parse_scenario(b, "b")};
  RunOptions serial;
  RunOptions parallel;
  parallel.jobs = 4;
  const SuiteReport x = scenario_suite(list, serial);
  const SuiteReport y = scenario_suite(list, parallel);
  CHECK(x.report_csv() == y.report_csv());
  CHECK(x.summary_csv() == y.summary_csv());
  CHECK(x.scenarios[1].files == y.scenarios[1].files);
}

TEST_CASE("load_scenario reports syntax errors with position") {
  const auto path = std::filesystem::temp_directory_path() / "epilab_bad_scenario.json";
  {
    std::ofstream out(path);
    out << "{\n  \"schema\": 1,\n  \"id\": \n}\n";
  }
  try {
    load_scenario(path);
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Parse);
    CHECK(contains(e.what(), "line 4"));
  }
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_scenario(path), Error);
}
