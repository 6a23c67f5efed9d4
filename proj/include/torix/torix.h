#ifndef TORIX_H
#define TORIX_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(TORIX_BUILDING)
#define TORIX_API __attribute__((visibility("default")))
#else
#define TORIX_API
#endif

typedef enum torix_status {
  TORIX_OK = 0,
  TORIX_E_INVALID_ARGUMENT = 1,
  TORIX_E_PARSE = 2,
  TORIX_E_VALIDATION = 3,
  TORIX_E_BUDGET = 4,
  TORIX_E_TOLERANCE = 5,
  TORIX_E_INTERNAL = 6
} torix_status;

typedef struct torix_variety torix_variety;
typedef struct torix_region torix_region;

typedef struct torix_options {
  const char* pairings; /* "1,1,1,2"; NULL picks the registered default */
  double eps;           /* error-exponent diagnostic, default 0.05 */
  double tol;           /* window tolerance on log-heights, default 1e-9 */
  uint64_t samples;     /* Monte Carlo samples, default 10^6 */
  uint64_t seed;        /* default 1 */
  int64_t p_max;        /* Euler product cutoff, default 10^5 */
  unsigned threads;     /* default 1 */
  int exact_boundary;   /* resolve near-boundary heights exactly */
  int timing;           /* add wall-clock columns to count/compare output */
  uint64_t node_budget; /* 0 means the library default */
} torix_options;

/* Message for the last failing call on this thread; never NULL. */
TORIX_API const char* torix_last_error(void);
TORIX_API const char* torix_version(void);
/* Every char* handed out by the library is released with this. */
TORIX_API void torix_string_free(char* s);

TORIX_API void torix_options_default(torix_options* opts);

/* source: "builtin:NAME", a path to a fan document, or the document itself. */
/* Writes the check list and, when all checks pass, an ample certificate.
   *all_pass is 0 for an invalid fan; the call itself still returns TORIX_OK. */
TORIX_API torix_status torix_validate(const char* source, char** report_json, int* all_pass);

TORIX_API torix_status torix_variety_open(const char* source, torix_variety** out);
TORIX_API void torix_variety_free(torix_variety* v);

#define TORIX_DESCRIBE_SECTIONS 1
#define TORIX_DESCRIBE_MOBIUS 2
TORIX_API torix_status torix_describe(const torix_variety* v, int flags, char** out_json);

/* region_path NULL: the box [0, log 2) on every ample basis class. */
TORIX_API torix_status torix_region_open(const torix_variety* v, const char* region_path,
                                         torix_region** out);
TORIX_API void torix_region_free(torix_region* r);

/* B values must be >= 1 and strictly increasing. */
TORIX_API torix_status torix_count(const torix_variety* v, const torix_region* r,
                                   const torix_options* opts, const double* B, size_t nB,
                                   char** out_json);
TORIX_API torix_status torix_predict(const torix_variety* v, const torix_region* r,
                                     const torix_options* opts, const double* B, size_t nB,
                                     char** out_json);
TORIX_API torix_status torix_compare(const torix_variety* v, const torix_region* r,
                                     const torix_options* opts, const double* B, size_t nB,
                                     char** out_csv);

#ifdef __cplusplus
}
#endif

#endif
