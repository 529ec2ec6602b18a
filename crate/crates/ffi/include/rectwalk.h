#ifndef RECTWALK_H
#define RECTWALK_H

/* Generated by cbindgen from crates/ffi; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Values accepted by the `method` argument of `rectwalk_problem_ratio`.
 */
typedef enum RectwalkMethod {
  RECTWALK_METHOD_QUADRATURE = 0,
  /**
   * Closed form, exponent 1 only.
   */
  RECTWALK_METHOD_CLOSED = 1,
  RECTWALK_METHOD_LEADING = 2,
  RECTWALK_METHOD_TWO_TERM = 3,
} RectwalkMethod;

typedef enum RectwalkStatus {
  RECTWALK_STATUS_OK = 0,
  /**
   * Argument outside the mathematical domain (aspect < 1, exponent <= 0, ...).
   */
  RECTWALK_STATUS_DOMAIN = 1,
  /**
   * Null pointer or unknown enum value.
   */
  RECTWALK_STATUS_INVALID_ARGUMENT = 2,
  /**
   * A numerical routine missed its tolerance.
   */
  RECTWALK_STATUS_ACCURACY = 3,
  /**
   * Internal panic caught at the boundary.
   */
  RECTWALK_STATUS_INTERNAL = 4,
} RectwalkStatus;

/**
 * Opaque handle.
 */
typedef struct RectwalkProblem RectwalkProblem;

typedef struct RectwalkRatio {
  /**
   * `R = P(end) / P(side)`.
   */
  double value;
  double err_estimate;
  /**
   * `R / (1 + R)`.
   */
  double end_probability;
  /**
   * Set when an asymptotic formula was used at small aspect ratio.
   */
  bool regime_warning;
} RectwalkRatio;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds a problem for an `aspect x 1` rectangle, `aspect >= 1`.
 *
 * # Safety
 * `out` must be null or valid for writing one pointer.
 */
enum RectwalkStatus rectwalk_problem_new(double aspect, struct RectwalkProblem **out);

/**
 * Releases a problem. Null is ignored.
 *
 * # Safety
 * `problem` must come from `rectwalk_problem_new` and not be used after.
 */
void rectwalk_problem_free(struct RectwalkProblem *problem);

/**
 * # Safety
 * `problem` must be a live handle or null; `out` null or writable.
 */
enum RectwalkStatus rectwalk_problem_aspect(const struct RectwalkProblem *problem, double *out);

/**
 * `α - 1` for the map parameter.
 *
 * # Safety
 * `problem` must be a live handle or null; `out` null or writable.
 */
enum RectwalkStatus rectwalk_problem_alpha_excess(const struct RectwalkProblem *problem,
                                                  double *out);

/**
 * Edge lengths of the image rectangle before scaling (`a / c` is the aspect).
 *
 * # Safety
 * `problem` must be a live handle or null; `a` and `c` null or writable.
 */
enum RectwalkStatus rectwalk_problem_dims(const struct RectwalkProblem *problem,
                                          double *a,
                                          double *c);

/**
 * End-versus-side ratio for hitting exponent `exponent` (1 for Brownian
 * motion, 0.625 for the self-avoiding walk). `method` is a
 * `RectwalkMethod` value; `rel_tol` applies to quadrature only.
 *
 * # Safety
 * `problem` must be a live handle or null; `out` null or writable.
 */
enum RectwalkStatus rectwalk_problem_ratio(const struct RectwalkProblem *problem,
                                           double exponent,
                                           int32_t method,
                                           double rel_tol,
                                           struct RectwalkRatio *out);

/**
 * Copies the calling thread's last error message into `buf` (NUL
 * terminated, truncated to `len`). Returns the full message length without
 * the NUL, or 0 if there is none. `buf` may be null to query the length.
 *
 * # Safety
 * `buf` must be null or valid for writing `len` bytes.
 */
size_t rectwalk_last_error(char *buf, size_t len);

/**
 * Static version string.
 */
const char *rectwalk_version(void);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* RECTWALK_H */
