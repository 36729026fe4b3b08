#ifndef EPILAB_EPILAB_H
#define EPILAB_EPILAB_H

/* C interface to the epilab core. Every function returns an epilab_status;
   on failure epilab_last_error() describes the problem for the calling
   thread. Handles are opaque and freed with the matching *_free function.
   Strings returned through char** are owned by the caller and released with
   epilab_string_free. */

#include <stddef.h>

#if defined(_WIN32)
#define EPILAB_API __declspec(dllexport)
#else
#define EPILAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum epilab_status {
  EPILAB_OK = 0,
  EPILAB_ERR_INVALID_ARGUMENT = 1,
  EPILAB_ERR_DIMENSION = 2,
  EPILAB_ERR_NO_PROX_PATH = 3,
  EPILAB_ERR_NOT_EXACT_CLASS = 4,
  EPILAB_ERR_OUTSIDE_DOMAIN = 5,
  EPILAB_ERR_EMPTY_DOMAIN = 6,
  EPILAB_ERR_UNBOUNDED_BELOW = 7,
  EPILAB_ERR_UNDEFINED_ARITHMETIC = 8,
  EPILAB_ERR_BROKEN_PROX = 9,
  EPILAB_ERR_UNKNOWN_INFIMUM = 10,
  EPILAB_ERR_PARSE = 11,
  EPILAB_ERR_SCHEMA = 12,
  EPILAB_ERR_IO = 13,
  EPILAB_ERR_INTERNAL = 14
} epilab_status;

typedef struct epilab_scenario epilab_scenario;
typedef struct epilab_report epilab_report;
typedef struct epilab_spec epilab_spec;

typedef struct epilab_run_options {
  int jobs;          /* worker threads, >= 1 */
  int emit_plots;    /* nonzero writes plot.csv per scenario */
  int has_tol;       /* nonzero overrides every scenario tolerance with tol */
  double tol;
} epilab_run_options;

EPILAB_API const char* epilab_version(void);
/* Message of the last failed call on this thread; "" when none. */
EPILAB_API const char* epilab_last_error(void);
EPILAB_API const char* epilab_status_name(epilab_status status);
EPILAB_API void epilab_string_free(char* s);

/* Scenarios. seed drives randomized test-point sampling. */
EPILAB_API epilab_status epilab_scenario_load(const char* path, unsigned long long seed,
                                              epilab_scenario** out);
EPILAB_API epilab_status epilab_scenario_parse(const char* json_text, unsigned long long seed,
                                               epilab_scenario** out);
EPILAB_API void epilab_scenario_free(epilab_scenario* s);
EPILAB_API epilab_status epilab_scenario_id(const epilab_scenario* s, char** out);
/* Resolved scenario as pretty-printed JSON. */
EPILAB_API epilab_status epilab_scenario_describe(const epilab_scenario* s, char** out);

EPILAB_API void epilab_run_options_init(epilab_run_options* options);
/* Runs the scenarios as one suite. Duplicate ids are a schema error. */
EPILAB_API epilab_status epilab_run(const epilab_scenario* const* scenarios, size_t count,
                                    const epilab_run_options* options, epilab_report** out);
EPILAB_API void epilab_report_free(epilab_report* r);
/* 0 clean, 1 errors or expectation mismatches, 2 red alert, 3 inconclusive. */
EPILAB_API int epilab_report_exit_code(const epilab_report* r);
EPILAB_API size_t epilab_report_scenario_count(const epilab_report* r);
EPILAB_API epilab_status epilab_report_summary(const epilab_report* r, char** out);
EPILAB_API epilab_status epilab_report_csv(const epilab_report* r, char** out);
/* Writes report.csv, summary.csv and per-scenario CSVs under dir. */
EPILAB_API epilab_status epilab_report_write(const epilab_report* r, const char* dir);

/* Convex function specs in the JSON dialect {"schema": 1, "dimension": d, "root": {...}}. */
EPILAB_API epilab_status epilab_spec_parse(const char* json_text, epilab_spec** out);
EPILAB_API void epilab_spec_free(epilab_spec* f);
EPILAB_API int epilab_spec_dimension(const epilab_spec* f);
/* Values may be +INFINITY. */
EPILAB_API epilab_status epilab_spec_evaluate(const epilab_spec* f, const double* x, size_t d,
                                              double* out);
EPILAB_API epilab_status epilab_spec_prox(const epilab_spec* f, double lambda, const double* x,
                                          size_t d, double* out);
EPILAB_API epilab_status epilab_spec_slope(const epilab_spec* f, const double* x, size_t d,
                                           double* out);

#ifdef __cplusplus
}
#endif

#endif
