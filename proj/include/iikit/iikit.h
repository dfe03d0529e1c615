#ifndef IIKIT_IIKIT_H
#define IIKIT_IIKIT_H

/* C interface to the integral-inequality toolkit.
 *
 * All objects are opaque handles released with their matching *_free call.
 * Functions return an iikit_status; on failure iikit_last_error() describes
 * the most recent error on the calling thread. Strings returned through
 * char** out-parameters are owned by the caller and released with
 * iikit_string_free. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(IIKIT_BUILDING)
#define IIKIT_API __attribute__((visibility("default")))
#else
#define IIKIT_API
#endif

typedef enum iikit_status {
  IIKIT_OK = 0,
  IIKIT_ERR_DOMAIN = 1,
  IIKIT_ERR_PARAMETER = 2,
  IIKIT_ERR_RANK = 3,
  IIKIT_ERR_SINGULAR_GRAM = 4,
  IIKIT_ERR_NOT_POSITIVE_DEFINITE = 5,
  IIKIT_ERR_SHAPE = 6,
  IIKIT_ERR_NONCONVERGENCE = 7,
  IIKIT_ERR_UNSUPPORTED_WEIGHT = 8,
  IIKIT_ERR_CONSISTENCY = 9,
  IIKIT_ERR_SCHEMA = 10,
  IIKIT_ERR_IO = 11,
  IIKIT_ERR_INVALID_ARGUMENT = 12,
  IIKIT_ERR_INTERNAL = 13
} iikit_status;

typedef enum iikit_format { IIKIT_FORMAT_JSON = 0, IIKIT_FORMAT_CSV = 1 } iikit_format;

typedef struct iikit_config iikit_config;
typedef struct iikit_report iikit_report;
typedef struct iikit_family iikit_family;

IIKIT_API const char* iikit_version(void);
IIKIT_API const char* iikit_status_string(iikit_status status);
/* Message of the last failed call on this thread ("" if none). */
IIKIT_API const char* iikit_last_error(void);
IIKIT_API void iikit_string_free(char* s);

/* ---- configs ---------------------------------------------------------- */

IIKIT_API iikit_status iikit_config_parse(const char* text, size_t len, iikit_config** out);
IIKIT_API iikit_status iikit_config_load(const char* path, iikit_config** out);
IIKIT_API void iikit_config_free(iikit_config* config);
IIKIT_API iikit_status iikit_config_set_seed(iikit_config* config, uint64_t seed);
IIKIT_API iikit_status iikit_config_set_tolerance(iikit_config* config, const char* key, double value);
/* Resolved config with defaults filled in, as JSON. */
IIKIT_API iikit_status iikit_config_resolved(const iikit_config* config, char** json, size_t* len);
/* Borrowed strings valid until the config is modified or freed. */
IIKIT_API const char* iikit_config_experiment(const iikit_config* config);
IIKIT_API const char* iikit_config_output_path(const iikit_config* config);
IIKIT_API const char* iikit_config_output_format(const iikit_config* config);

/* ---- runs and reports ------------------------------------------------- */

IIKIT_API iikit_status iikit_run(const iikit_config* config, iikit_report** out);
IIKIT_API void iikit_report_free(iikit_report* report);
/* 0 iff every row passes. */
IIKIT_API int iikit_report_exit_status(const iikit_report* report);
IIKIT_API size_t iikit_report_row_count(const iikit_report* report);
IIKIT_API size_t iikit_report_failure_count(const iikit_report* report);
IIKIT_API size_t iikit_report_warning_count(const iikit_report* report);
/* Serialized report; wall-clock timings are added only when include_timing
 * is nonzero. */
IIKIT_API iikit_status iikit_report_emit(const iikit_report* report, iikit_format format, int include_timing,
                                         char** out, size_t* len);
/* Human-readable fixed-width table. */
IIKIT_API iikit_status iikit_report_table(const iikit_report* report, char** out, size_t* len);

/* ---- presets ---------------------------------------------------------- */

IIKIT_API size_t iikit_preset_count(void);
IIKIT_API const char* iikit_preset_name(size_t index);
IIKIT_API const char* iikit_preset_description(size_t index);
IIKIT_API iikit_status iikit_preset_config(size_t index, char** json, size_t* len);

/* ---- numerical handles ------------------------------------------------ */

/* Legendre or Jacobi kernels of degrees 0..dmax on [a, b] with their own
 * weight. */
IIKIT_API iikit_status iikit_family_legendre(int dmax, double a, double b, iikit_family** out);
IIKIT_API iikit_status iikit_family_jacobi(int dmax, double alpha, double beta, double a, double b,
                                           iikit_family** out);
IIKIT_API void iikit_family_free(iikit_family* family);
IIKIT_API int iikit_family_size(const iikit_family* family);
/* Gram matrix int w f f^T, row-major into `out` of size size*size. */
IIKIT_API iikit_status iikit_family_gram(const iikit_family* family, double* out, size_t capacity);

/* Bound for a polynomial signal. `coeffs` is row-major n x (degree + 1)
 * (monomial coefficients of each component), `cost` is row-major n x n.
 * Any of upper/lower may be NULL. */
IIKIT_API iikit_status iikit_lower_bound_poly(const iikit_family* family, const double* coeffs, int n, int degree,
                                              const double* cost, double* upper, double* lower);

#ifdef __cplusplus
}
#endif

#endif
