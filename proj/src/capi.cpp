#include "epilab/epilab.h"

#include <cstring>
#include <limits>
#include <new>
#include <string>

#include "epilab/scenario.hpp"
#include "epilab/slope.hpp"

struct epilab_scenario {
  epilab::Scenario s;
};

struct epilab_report {
  epilab::SuiteReport r;
};

struct epilab_spec {
  epilab::ConvexSpec f;
};

namespace {

thread_local std::string last_error;

epilab_status status_of(epilab::ErrorCode code) {
  return static_cast<epilab_status>(static_cast<int>(code) + 1);
}

template <class F>
epilab_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return EPILAB_OK;
  } catch (const epilab::Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return EPILAB_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return EPILAB_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) epilab::fail(epilab::ErrorCode::InvalidArgument, what);
}

char* duplicate(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

epilab::Point point_of(const epilab_spec* f, const double* x, std::size_t d) {
  require(f && x, "null argument");
  if (static_cast<int>(d) != f->f.dimension()) {
    epilab::fail(epilab::ErrorCode::DimensionMismatch,
                 "expected " + std::to_string(f->f.dimension()) + " coordinates, got " + std::to_string(d));
  }
  return Eigen::Map<const epilab::Point>(x, static_cast<Eigen::Index>(d));
}

double to_double(const epilab::ExtReal& v) {
  return v.is_infinite() ? std::numeric_limits<double>::infinity() : v.value();
}

}  // namespace

extern "C" {

const char* epilab_version(void) { return "0.1.0"; }

const char* epilab_last_error(void) { return last_error.c_str(); }

const char* epilab_status_name(epilab_status status) {
  if (status == EPILAB_OK) return "ok";
  if (status < EPILAB_OK || status > EPILAB_ERR_INTERNAL) return "unknown";
  return epilab::to_string(static_cast<epilab::ErrorCode>(static_cast<int>(status) - 1));
}

void epilab_string_free(char* s) { delete[] s; }

epilab_status epilab_scenario_load(const char* path, unsigned long long seed, epilab_scenario** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new epilab_scenario{epilab::load_scenario(path, seed)};
  });
}

epilab_status epilab_scenario_parse(const char* json_text, unsigned long long seed, epilab_scenario** out) {
  return guarded([&] {
    require(json_text && out, "null argument");
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
      epilab::fail(epilab::ErrorCode::Parse, e.what());
    }
    *out = new epilab_scenario{epilab::parse_scenario(doc, "<memory>", seed)};
  });
}

void epilab_scenario_free(epilab_scenario* s) { delete s; }

epilab_status epilab_scenario_id(const epilab_scenario* s, char** out) {
  return guarded([&] {
    require(s && out, "null argument");
    *out = duplicate(s->s.id);
  });
}

epilab_status epilab_scenario_describe(const epilab_scenario* s, char** out) {
  return guarded([&] {
    require(s && out, "null argument");
    *out = duplicate(epilab::describe(s->s).dump(2) + "\n");
  });
}

void epilab_run_options_init(epilab_run_options* options) {
  if (!options) return;
  options->jobs = 1;
  options->emit_plots = 0;
  options->has_tol = 0;
  options->tol = 0.0;
}

epilab_status epilab_run(const epilab_scenario* const* scenarios, std::size_t count,
                         const epilab_run_options* options, epilab_report** out) {
  return guarded([&] {
    require(out && (scenarios || count == 0), "null argument");
    epilab::RunOptions o;
    if (options) {
      require(options->jobs >= 1, "jobs must be >= 1");
      require(!options->has_tol || options->tol > 0.0, "tol must be > 0");
      o.jobs = options->jobs;
      o.emit_plots = options->emit_plots != 0;
      if (options->has_tol) o.tol = options->tol;
    }
    std::vector<epilab::Scenario> list;
    for (std::size_t i = 0; i < count; ++i) {
      require(scenarios[i] != nullptr, "null scenario");
      list.push_back(scenarios[i]->s);
    }
    *out = new epilab_report{epilab::scenario_suite(list, o)};
  });
}

void epilab_report_free(epilab_report* r) { delete r; }

int epilab_report_exit_code(const epilab_report* r) { return r ? r->r.exit_code : 1; }

std::size_t epilab_report_scenario_count(const epilab_report* r) { return r ? r->r.scenarios.size() : 0; }

epilab_status epilab_report_summary(const epilab_report* r, char** out) {
  return guarded([&] {
    require(r && out, "null argument");
    *out = duplicate(r->r.summary_text());
  });
}

epilab_status epilab_report_csv(const epilab_report* r, char** out) {
  return guarded([&] {
    require(r && out, "null argument");
    *out = duplicate(r->r.report_csv());
  });
}

epilab_status epilab_report_write(const epilab_report* r, const char* dir) {
  return guarded([&] {
    require(r && dir, "null argument");
    epilab::write_suite(r->r, dir);
  });
}

epilab_status epilab_spec_parse(const char* json_text, epilab_spec** out) {
  return guarded([&] {
    require(json_text && out, "null argument");
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
      epilab::fail(epilab::ErrorCode::Parse, e.what());
    }
    *out = new epilab_spec{epilab::parse_spec(doc)};
  });
}

void epilab_spec_free(epilab_spec* f) { delete f; }

int epilab_spec_dimension(const epilab_spec* f) { return f ? f->f.dimension() : 0; }

epilab_status epilab_spec_evaluate(const epilab_spec* f, const double* x, std::size_t d, double* out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    const epilab::Point p = point_of(f, x, d);
    *out = to_double(f->f.evaluate(p));
  });
}

epilab_status epilab_spec_prox(const epilab_spec* f, double lambda, const double* x, std::size_t d,
                               double* out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    require(lambda > 0.0, "lambda must be > 0");
    const epilab::Point p = point_of(f, x, d);
    const epilab::Point q = f->f.prox(lambda, p);
    for (std::size_t i = 0; i < d; ++i) out[i] = q(static_cast<Eigen::Index>(i));
  });
}

epilab_status epilab_spec_slope(const epilab_spec* f, const double* x, std::size_t d, double* out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    const epilab::Point p = point_of(f, x, d);
    *out = to_double(epilab::slope(f->f, p).value);
  });
}

}  // extern "C"
