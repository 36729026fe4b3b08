#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "epilab/epilab.h"

namespace fs = std::filesystem;

namespace {

struct ScenarioDeleter {
  void operator()(epilab_scenario* s) const { epilab_scenario_free(s); }
};
struct ReportDeleter {
  void operator()(epilab_report* r) const { epilab_report_free(r); }
};
using ScenarioPtr = std::unique_ptr<epilab_scenario, ScenarioDeleter>;
using ReportPtr = std::unique_ptr<epilab_report, ReportDeleter>;

std::string take(char* s) {
  std::string out = s ? s : "";
  epilab_string_free(s);
  return out;
}

unsigned long long seed_from_env() {
  const char* v = std::getenv("EPILAB_SEED");
  if (!v || !*v) return 0;
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    std::cerr << "epilab: ignoring malformed EPILAB_SEED '" << v << "'\n";
    return 0;
  }
}

// Directories expand to their *.json files in name order.
std::vector<fs::path> expand(const std::vector<std::string>& paths) {
  std::vector<fs::path> out;
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(p)) {
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
      }
      std::sort(files.begin(), files.end());
      out.insert(out.end(), files.begin(), files.end());
    } else {
      out.emplace_back(p);
    }
  }
  return out;
}

bool load(const fs::path& path, unsigned long long seed, ScenarioPtr& out) {
  epilab_scenario* s = nullptr;
  if (epilab_scenario_load(path.string().c_str(), seed, &s) != EPILAB_OK) {
    std::cerr << "epilab: " << epilab_last_error() << '\n';
    return false;
  }
  out.reset(s);
  return true;
}

int run(const std::vector<std::string>& paths, int jobs, const std::string& out_dir,
        const std::optional<double>& tol, bool emit_plots) {
  const unsigned long long seed = seed_from_env();
  std::vector<ScenarioPtr> owned;
  for (const auto& path : expand(paths)) {
    ScenarioPtr s;
    if (!load(path, seed, s)) return 1;
    owned.push_back(std::move(s));
  }
  std::vector<const epilab_scenario*> list;
  for (const auto& s : owned) list.push_back(s.get());

  epilab_run_options options;
  epilab_run_options_init(&options);
  options.jobs = jobs;
  options.emit_plots = emit_plots ? 1 : 0;
  if (tol) {
    options.has_tol = 1;
    options.tol = *tol;
  }
  epilab_report* raw = nullptr;
  if (epilab_run(list.data(), list.size(), &options, &raw) != EPILAB_OK) {
    std::cerr << "epilab: " << epilab_last_error() << '\n';
    return 1;
  }
  ReportPtr report(raw);
  if (epilab_report_write(report.get(), out_dir.c_str()) != EPILAB_OK) {
    std::cerr << "epilab: " << epilab_last_error() << '\n';
    return 1;
  }
  char* summary = nullptr;
  epilab_report_summary(report.get(), &summary);
  std::cout << take(summary);
  return epilab_report_exit_code(report.get());
}

int validate(const std::vector<std::string>& paths) {
  const unsigned long long seed = seed_from_env();
  int status = 0;
  for (const auto& path : expand(paths)) {
    ScenarioPtr s;
    if (!load(path, seed, s)) {
      status = 1;
      continue;
    }
    char* id = nullptr;
    epilab_scenario_id(s.get(), &id);
    std::cout << "ok " << take(id) << " (" << path.string() << ")\n";
  }
  return status;
}

int show(const std::string& id, std::string corpus) {
  if (corpus.empty()) {
    const char* env = std::getenv("EPILAB_CORPUS");
    corpus = env && *env ? env : "scenarios/golden";
  }
  if (!fs::is_directory(corpus)) {
    std::cerr << "epilab: corpus directory '" << corpus << "' not found\n";
    return 1;
  }
  const unsigned long long seed = seed_from_env();
  for (const auto& path : expand({corpus})) {
    epilab_scenario* raw = nullptr;
    if (epilab_scenario_load(path.string().c_str(), seed, &raw) != EPILAB_OK) continue;
    ScenarioPtr s(raw);
    char* sid = nullptr;
    epilab_scenario_id(s.get(), &sid);
    if (take(sid) != id) continue;
    char* text = nullptr;
    if (epilab_scenario_describe(s.get(), &text) != EPILAB_OK) {
      std::cerr << "epilab: " << epilab_last_error() << '\n';
      return 1;
    }
    std::cout << take(text);
    return 0;
  }
  std::cerr << "epilab: no scenario '" << id << "' in " << corpus << '\n';
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Epi-convergence and slope laboratory"};
  app.set_version_flag("--version", epilab_version());
  app.require_subcommand(1);

  std::vector<std::string> run_paths;
  int jobs = 1;
  std::string out_dir = "epilab-out";
  std::optional<double> tol;
  bool emit_plots = false;
  auto* run_cmd = app.add_subcommand("run", "Run scenarios and write CSV reports");
  run_cmd->add_option("paths", run_paths, "Scenario files or directories")->required();
  run_cmd->add_option("--jobs,-j", jobs, "Scenarios run in parallel")->check(CLI::Range(1, 256));
  run_cmd->add_option("--out,-o", out_dir, "Output directory");
  run_cmd->add_option("--tol", tol, "Override every scenario tolerance")->check(CLI::PositiveNumber);
  run_cmd->add_flag("--emit-plots", emit_plots, "Write long-format plot.csv per scenario");

  std::vector<std::string> validate_paths;
  auto* validate_cmd = app.add_subcommand("validate", "Check scenario files against the schema");
  validate_cmd->add_option("paths", validate_paths, "Scenario files or directories")->required();

  std::string show_id;
  std::string corpus;
  auto* show_cmd = app.add_subcommand("show", "Print a scenario with defaults resolved");
  show_cmd->add_option("id", show_id, "Scenario id")->required();
  show_cmd->add_option("--corpus", corpus, "Directory searched for the id");

  CLI11_PARSE(app, argc, argv);

  if (*run_cmd) return run(run_paths, jobs, out_dir, tol, emit_plots);
  if (*validate_cmd) return validate(validate_paths);
  if (*show_cmd) return show(show_id, corpus);
  return 1;
}
