/* Exercises the shared library through its C header only. */

#include <math.h>
#include <stdio.h>
#include <string.h>

#include "iikit/iikit.h"

static int failures = 0;

#define EXPECT(cond)                                                  \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                     \
    }                                                                 \
  } while (0)

static void test_config_errors(void) {
  iikit_config* cfg = NULL;
  const char* bad = "{\"experiment\": \"bound\", \"domain\": [0, 1],"
                    " \"weight\": {\"kind\": \"jacobi\", \"alpha\": -2, \"beta\": 0},"
                    " \"kernel\": {\"kind\": \"legendre\", \"d\": 2}, \"signal\": {\"poly\": [0, 1]}}";
  EXPECT(iikit_config_parse(bad, strlen(bad), &cfg) == IIKIT_ERR_SCHEMA);
  EXPECT(cfg == NULL);
  EXPECT(strstr(iikit_last_error(), "weight.alpha") != NULL);

  EXPECT(iikit_config_parse("", 0, &cfg) == IIKIT_ERR_SCHEMA);
  EXPECT(strcmp(iikit_last_error(), "experiment: missing") == 0);

  EXPECT(iikit_config_load("/nonexistent/config.json", &cfg) == IIKIT_ERR_IO);
  EXPECT(iikit_config_parse(NULL, 3, &cfg) == IIKIT_ERR_INVALID_ARGUMENT);
}

static void test_jensen_run(void) {
  const char* text = "{\"preset\": \"jensen\"}";
  iikit_config* cfg = NULL;
  iikit_report* rep = NULL;
  char* out = NULL;
  size_t len = 0;
  EXPECT(iikit_config_parse(text, strlen(text), &cfg) == IIKIT_OK);
  EXPECT(strcmp(iikit_config_experiment(cfg), "bound") == 0);
  EXPECT(iikit_config_set_tolerance(cfg, "sound", 1e-8) == IIKIT_OK);
  EXPECT(iikit_config_set_tolerance(cfg, "nope", 1.0) == IIKIT_ERR_SCHEMA);
  EXPECT(iikit_config_set_seed(cfg, 17) == IIKIT_OK);
  EXPECT(iikit_run(cfg, &rep) == IIKIT_OK);
  EXPECT(iikit_report_row_count(rep) == 1);
  EXPECT(iikit_report_exit_status(rep) == 0);
  EXPECT(iikit_report_failure_count(rep) == 0);

  EXPECT(iikit_report_emit(rep, IIKIT_FORMAT_CSV, 0, &out, &len) == IIKIT_OK);
  EXPECT(len == strlen(out));
  EXPECT(strstr(out, "bound,0,1,1,0.333333333333333") != NULL);
  iikit_string_free(out);

  EXPECT(iikit_report_emit(rep, IIKIT_FORMAT_JSON, 0, &out, &len) == IIKIT_OK);
  EXPECT(strstr(out, "\"seed\": 17") != NULL);
  EXPECT(strstr(out, "wall_time") == NULL);
  iikit_string_free(out);

  EXPECT(iikit_report_table(rep, &out, &len) == IIKIT_OK);
  iikit_string_free(out);

  iikit_report_free(rep);
  iikit_config_free(cfg);
}

static void test_presets(void) {
  size_t n = iikit_preset_count();
  size_t i;
  int found = 0;
  EXPECT(n == 15);
  for (i = 0; i < n; ++i) {
    char* json = NULL;
    size_t len = 0;
    if (strcmp(iikit_preset_name(i), "gyurkovics-takacs") == 0) found = 1;
    EXPECT(iikit_preset_config(i, &json, &len) == IIKIT_OK);
    EXPECT(strstr(json, "\"experiment\"") != NULL);
    iikit_string_free(json);
  }
  EXPECT(found);
  EXPECT(iikit_preset_name(n) == NULL);
}

static void test_numeric_handles(void) {
  iikit_family* fam = NULL;
  double gram[9];
  double coeffs[3] = {0.0, 0.0, 1.0}; /* x = t^2 */
  double cost = 1.0;
  double upper = 0.0, lower = 0.0;

  EXPECT(iikit_family_legendre(2, 0.0, 1.0, &fam) == IIKIT_OK);
  EXPECT(iikit_family_size(fam) == 3);
  EXPECT(iikit_family_gram(fam, gram, 9) == IIKIT_OK);
  EXPECT(fabs(gram[0] - 1.0) < 1e-14 && fabs(gram[4] - 1.0 / 3) < 1e-14 && fabs(gram[8] - 0.2) < 1e-14);
  EXPECT(fabs(gram[1]) < 1e-14);
  EXPECT(iikit_family_gram(fam, gram, 4) == IIKIT_ERR_INVALID_ARGUMENT);
  iikit_family_free(fam);

  EXPECT(iikit_family_legendre(1, 0.0, 1.0, &fam) == IIKIT_OK);
  EXPECT(iikit_lower_bound_poly(fam, coeffs, 1, 2, &cost, &upper, &lower) == IIKIT_OK);
  EXPECT(fabs(upper - 0.2) < 1e-14);
  EXPECT(fabs(lower - 7.0 / 36) < 1e-14);
  iikit_family_free(fam);

  EXPECT(iikit_family_jacobi(2, -2.0, 0.0, 0.0, 1.0, &fam) == IIKIT_ERR_PARAMETER);
  EXPECT(fam == NULL);
  EXPECT(iikit_family_legendre(1, 1.0, 0.0, &fam) == IIKIT_ERR_DOMAIN);
}

int main(void) {
  test_config_errors();
  test_jensen_run();
  test_presets();
  test_numeric_handles();
  EXPECT(strcmp(iikit_status_string(IIKIT_OK), "ok") == 0);
  if (failures) {
    fprintf(stderr, "%d C API check(s) failed\n", failures);
    return 1;
  }
  printf("C API checks passed (library %s)\n", iikit_version());
  return 0;
}
