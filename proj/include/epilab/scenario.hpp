#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "epilab/flow.hpp"
#include "epilab/theorems.hpp"

namespace epilab {

enum class CheckKind {
  Epi,
  SlopeEpi,
  NC,
  NCWeak,
  Attouch,
  Main,
  Comparison,
  Flow,
  Energy,
  Infimizing,
  Tightness,
  Sandwich,
};

const char* to_string(CheckKind kind);

struct NCTemplate {
  nlohmann::json x;
  nlohmann::json xstar;
  nlohmann::json value;
  Point limit_x;
  Point limit_xstar;
  double limit_value = 0.0;
};

struct WeakWitnessTemplate {
  nlohmann::json x;
  Point limit;
};

struct ComparisonSetup {
  ConvexSpec f;
  ConvexSpec g;
  std::vector<Point> grid;
};

struct FlowSetup {
  ConvexSpec f;
  std::optional<ConvexSpec> g;
  Point x0;
  double h = 1e-3;
  double T = 20.0;
};

struct ScenarioSettings {
  TheoremConfig theorem;
  double domain_radius = 1e-2;
  double energy_tol = 5e-3;
  std::optional<GraphWindow> graph;
};

/// Fully resolved experiment description.
struct Scenario {
  std::string id;
  std::string description;
  std::string origin;  // file the scenario came from
  int dimension = 1;
  FunctionSeq seq;
  std::vector<Point> test_points;
  std::vector<CheckKind> checks;
  ScenarioSettings settings;
  std::optional<NCTemplate> nc_witness;  // argmin witness when absent
  std::optional<WeakWitnessTemplate> weak_witness;
  std::optional<ComparisonSetup> comparison;
  std::optional<FlowSetup> flow;
  std::map<std::string, VerdictStatus> expected;
  nlohmann::json source;
};

/// Parses a scenario document; schema errors name the offending field.
Scenario parse_scenario(const nlohmann::json& doc, const std::string& origin, std::uint64_t seed = 0);
/// Reads and parses a file; JSON syntax errors carry line and column.
Scenario load_scenario(const std::filesystem::path& path, std::uint64_t seed = 0);

/// Resolved form of a scenario (defaults filled, ladders expanded).
nlohmann::json describe(const Scenario& s);

struct RunOptions {
  std::optional<double> tol;
  bool emit_plots = false;
  int jobs = 1;
};

struct CheckRow {
  std::string check;
  VerdictStatus status = VerdictStatus::Inconclusive;
  std::optional<VerdictStatus> expected;
  bool red_alert = false;
  std::string note;

  bool mismatch() const { return expected && *expected != status; }
};

struct ScenarioResult {
  std::string id;
  std::vector<CheckRow> rows;
  std::map<std::string, std::string> files;  // file name → contents
  std::string error;
  bool main_consistent = true;
  bool attouch_consistent = true;

  bool red_alert() const;
  bool inconclusive() const;
  bool mismatch() const;
};

ScenarioResult run_scenario(const Scenario& s, const RunOptions& options = {});

struct SuiteReport {
  std::vector<ScenarioResult> scenarios;
  int exit_code = 0;

  std::string report_csv() const;
  std::string summary_csv() const;
  std::string summary_text() const;
};

/// Runs every scenario (in parallel up to options.jobs) and aggregates. Exit
/// code: 2 red alert, 3 inconclusive present, 1 errors or expectation
/// mismatches, 0 otherwise.
SuiteReport scenario_suite(const std::vector<Scenario>& scenarios, const RunOptions& options = {});

/// Writes report.csv, summary.csv and per-scenario files under `dir`.
void write_suite(const SuiteReport& report, const std::filesystem::path& dir);

}  // namespace epilab
