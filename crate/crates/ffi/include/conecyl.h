#ifndef CONECYL_H
#define CONECYL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define CONECYL_FLAG_PSEUDO_UMBILICAL (1 << 0)

#define CONECYL_FLAG_ISOTROPIC (1 << 1)

#define CONECYL_FLAG_FLAT (1 << 2)

#define CONECYL_FLAG_FLAT_NORMAL_BUNDLE (1 << 3)

#define CONECYL_FLAG_MARGINALLY_TRAPPED (1 << 4)

#define CONECYL_FLAG_MINIMAL (1 << 5)

#define CONECYL_FLAG_TOTALLY_UMBILICAL (1 << 6)

#define CONECYL_FLAG_A_H_ZERO (1 << 7)

#define CONECYL_FLAG_ALPHA_ZERO (1 << 8)

/**
 * Set when the two routes of some predicate disagree.
 */
#define CONECYL_FLAG_INCONSISTENT 2147483648

/**
 * Result code of every fallible call. Zero is success.
 */
typedef enum ConecylStatus {
  CONECYL_STATUS_OK = 0,
  CONECYL_STATUS_NULL_POINTER = -1,
  CONECYL_STATUS_INVALID_UTF8 = -2,
  CONECYL_STATUS_PARSE = -3,
  CONECYL_STATUS_DIMENSION = -4,
  CONECYL_STATUS_DOMAIN = -5,
  CONECYL_STATUS_DEGENERATE = -6,
  CONECYL_STATUS_NOT_ADMISSIBLE = -7,
  CONECYL_STATUS_PRECONDITION = -8,
  CONECYL_STATUS_BUFFER_TOO_SMALL = -9,
  CONECYL_STATUS_UNKNOWN_FAMILY = -10,
  CONECYL_STATUS_PANIC = -99,
} ConecylStatus;

/**
 * Parsed immersion spec. Opaque to C.
 */
typedef struct ConecylSpec ConecylSpec;

/**
 * Invariants at one parameter point. Fields that do not apply (the
 * curvatures for `n != 2`) are NaN.
 */
typedef struct ConecylPointSummary {
  double alpha;
  double e1_alpha;
  double beta_min;
  double beta_max;
  double mean_curvature_norm2;
  double gauss_curvature;
  double normal_curvature;
  double isotropy_spread;
  /**
   * Largest residual of the frame and structure identities.
   */
  double max_residual;
  /**
   * Bitwise OR of `CONECYL_FLAG_*`.
   */
  uint32_t flags;
} ConecylPointSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *conecyl_version(void);

/**
 * Message of the last failed call on this thread, or an empty string. The
 * pointer stays valid until the next failing call on this thread.
 */
const char *conecyl_last_error(void);

/**
 * Parses DSL text into a new spec handle.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum ConecylStatus conecyl_spec_parse(const char *text, struct ConecylSpec **out);

/**
 * Builds a member of a named family. `options` holds whitespace-separated
 * `key=value` pairs and may be null.
 *
 * # Safety
 * `family` and a non-null `options` must be NUL-terminated strings and `out`
 * a valid pointer.
 */
enum ConecylStatus conecyl_spec_generate(const char *family,
                                         const char *options,
                                         struct ConecylSpec **out);

/**
 * Releases a spec handle. Null is ignored.
 *
 * # Safety
 * `spec` must come from this library and not be used afterwards.
 */
void conecyl_spec_free(struct ConecylSpec *spec);

/**
 * Number of parameters and ambient dimension of a spec.
 *
 * # Safety
 * All pointers must be valid.
 */
enum ConecylStatus conecyl_spec_dims(const struct ConecylSpec *spec,
                                     size_t *n_params,
                                     size_t *ambient_dim);

/**
 * Canonical DSL text of a spec, to be released with [`conecyl_string_free`].
 *
 * # Safety
 * `spec` must be a live handle and `out` a valid pointer.
 */
enum ConecylStatus conecyl_spec_to_dsl(const struct ConecylSpec *spec, char **out);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void conecyl_string_free(char *s);

/**
 * Evaluates the 2-jet at `point` into caller buffers, with `k` the ambient
 * dimension and `n` the parameter count: `value[a]`, `first[a*n + j]` and
 * `second[(a*n + j)*n + l]`. The buffer lengths are `k`, `k*n` and `k*n*n`.
 *
 * # Safety
 * `point` must hold `n_point` doubles and each buffer its stated length.
 */
enum ConecylStatus conecyl_eval_jet2(const struct ConecylSpec *spec,
                                     const double *point,
                                     size_t n_point,
                                     double *value,
                                     size_t value_len,
                                     double *first,
                                     size_t first_len,
                                     double *second,
                                     size_t second_len);

/**
 * Analyzes one point. A non-positive tolerance selects the default.
 *
 * # Safety
 * `point` must hold `n_point` doubles and `out` be a valid pointer.
 */
enum ConecylStatus conecyl_analyze_point(const struct ConecylSpec *spec,
                                         const double *point,
                                         size_t n_point,
                                         double tol_alg,
                                         double tol_class,
                                         struct ConecylPointSummary *out);

/**
 * Grid analysis over the spec's domain as a JSON report. `counts` holds one
 * node count per parameter.
 *
 * # Safety
 * `counts` must hold `n_counts` entries and `out` be a valid pointer.
 */
enum ConecylStatus conecyl_analyze_grid_json(const struct ConecylSpec *spec,
                                             const size_t *counts,
                                             size_t n_counts,
                                             double tol_alg,
                                             double tol_class,
                                             uint64_t seed,
                                             char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CONECYL_H */
