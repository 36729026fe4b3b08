#include <math.h>
#include <stdio.h>
#include <string.h>

#include "epilab/epilab.h"

static int failures = 0;

#define EXPECT(cond)                                              \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "%s:%d: failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                 \
    }                                                             \
  } while (0)

static const char* kAbs =
    "{\"schema\": 1, \"dimension\": 1, \"root\": {\"kind\": \"scaled_norm\", \"alpha\": 1}}";
static const char* kBox =
    "{\"schema\": 1, \"dimension\": 1, \"root\": {\"kind\": \"indicator_box\", \"lo\": 0, \"hi\": 1}}";
static const char* kScenario =
    "{\"schema\": 1, \"id\": \"abs-shift\", \"dimension\": 1,"
    " \"family\": {\"member\": {\"kind\": \"translate\", \"shift\": \"1/n\","
    " \"of\": {\"kind\": \"scaled_norm\", \"alpha\": 1}},"
    " \"limit\": {\"kind\": \"scaled_norm\", \"alpha\": 1}},"
    " \"checks\": [\"main\"], \"expected\": {\"main\": \"holds\"}}";

int main(void) {
  epilab_spec* f = NULL;
  double x = -2.0, v = 0.0, p = 0.0;
  EXPECT(strcmp(epilab_version(), "0.1.0") == 0);

  EXPECT(epilab_spec_parse(kAbs, &f) == EPILAB_OK);
  EXPECT(epilab_spec_dimension(f) == 1);
  EXPECT(epilab_spec_evaluate(f, &x, 1, &v) == EPILAB_OK && v == 2.0);
  EXPECT(epilab_spec_prox(f, 0.5, &x, 1, &p) == EPILAB_OK && p == -1.5);
  EXPECT(epilab_spec_slope(f, &x, 1, &v) == EPILAB_OK && v == 1.0);
  EXPECT(epilab_spec_evaluate(f, &x, 2, &v) == EPILAB_ERR_DIMENSION);
  EXPECT(strlen(epilab_last_error()) > 0);
  epilab_spec_free(f);

  EXPECT(epilab_spec_parse(kBox, &f) == EPILAB_OK);
  EXPECT(epilab_spec_evaluate(f, &x, 1, &v) == EPILAB_OK && isinf(v));
  EXPECT(epilab_spec_slope(f, &x, 1, &v) == EPILAB_OK && isinf(v));
  epilab_spec_free(f);

  EXPECT(epilab_spec_parse("{\"schema\": 1", &f) == EPILAB_ERR_PARSE);
  EXPECT(epilab_spec_parse("{\"schema\": 1, \"dimension\": 1, \"root\": {\"kind\": \"blob\"}}", &f) ==
         EPILAB_ERR_SCHEMA);
  EXPECT(strcmp(epilab_status_name(EPILAB_ERR_SCHEMA), "schema error") == 0);
  EXPECT(strcmp(epilab_status_name(EPILAB_OK), "ok") == 0);

  {
    epilab_scenario* s = NULL;
    epilab_report* r = NULL;
    epilab_run_options o;
    char* text = NULL;
    const epilab_scenario* list[1];
    EXPECT(epilab_scenario_parse(kScenario, 0, &s) == EPILAB_OK);
    EXPECT(epilab_scenario_id(s, &text) == EPILAB_OK && strcmp(text, "abs-shift") == 0);
    epilab_string_free(text);
    list[0] = s;
    epilab_run_options_init(&o);
    EXPECT(o.jobs == 1);
    EXPECT(epilab_run(list, 1, &o, &r) == EPILAB_OK);
    EXPECT(epilab_report_exit_code(r) == 0);
    EXPECT(epilab_report_scenario_count(r) == 1);
    EXPECT(epilab_report_csv(r, &text) == EPILAB_OK && strstr(text, "abs-shift,main,holds") != NULL);
    epilab_string_free(text);
    epilab_report_free(r);
    o.jobs = 0;
    EXPECT(epilab_run(list, 1, &o, &r) == EPILAB_ERR_INVALID_ARGUMENT);
    epilab_scenario_free(s);
  }
  EXPECT(epilab_scenario_load("/nonexistent/scenario.json", 0, NULL) == EPILAB_ERR_INVALID_ARGUMENT);

  if (failures == 0) printf("capi: all checks passed\n");
  return failures == 0 ? 0 : 1;
}
