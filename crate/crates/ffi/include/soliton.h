#ifndef SOLITON_H
#define SOLITON_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SolitonBranch {
  SOLITON_BRANCH_LOWER = 0,
  SOLITON_BRANCH_UPPER = 1,
} SolitonBranch;

typedef enum SolitonSign {
  SOLITON_SIGN_NONPOSITIVE = 0,
  SOLITON_SIGN_NONNEGATIVE = 1,
  SOLITON_SIGN_CHANGE = 2,
} SolitonSign;

typedef enum SolitonStatus {
  SOLITON_STATUS_OK = 0,
  SOLITON_STATUS_NULL_POINTER = 1,
  SOLITON_STATUS_INVALID_PARAMETER = 2,
  SOLITON_STATUS_DOMAIN = 3,
  SOLITON_STATUS_INTEGRATION = 4,
  SOLITON_STATUS_CONSTRUCTION = 5,
  SOLITON_STATUS_RANGE = 6,
  SOLITON_STATUS_NUMERICAL = 7,
  SOLITON_STATUS_HYPOTHESIS = 8,
  SOLITON_STATUS_IO = 9,
  SOLITON_STATUS_PANIC = 10,
} SolitonStatus;

/**
 * Opaque sampled curve.
 */
typedef struct SolitonCurve SolitonCurve;

/**
 * Opaque winglike solution.
 */
typedef struct SolitonWing SolitonWing;

/**
 * One point `(s, r, V, alpha)` of a generating curve.
 */
typedef struct SolitonSample {
  double s;
  double r;
  double v;
  double alpha;
} SolitonSample;

typedef struct SolitonBoundResult {
  double min_margin;
  double worst_r;
  double r_lo;
  double r_hi;
  size_t grid_size;
  bool passed;
} SolitonBoundResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty when none. Valid until the next failing call.
 */
const char *soliton_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *soliton_version(void);

/**
 * Solves the wing of dimension `n` and aperture `aperture` up to radius `r_max`.
 *
 * # Safety
 * `out_wing` must be a valid pointer; it receives a handle to free with [`soliton_wing_free`].
 */
enum SolitonStatus soliton_wing_solve(size_t n,
                                      double aperture,
                                      double tol,
                                      double r_max,
                                      struct SolitonWing **out_wing);

/**
 * # Safety
 * `wing` must be null or a handle from [`soliton_wing_solve`] not yet freed.
 */
void soliton_wing_free(struct SolitonWing *wing);

/**
 * Radius of the horizontal tangent and depth below the waist.
 *
 * # Safety
 * `wing` must be a live handle; the output pointers must be valid.
 */
enum SolitonStatus soliton_wing_turning(const struct SolitonWing *wing,
                                        double *out_r_star,
                                        double *out_depth);

/**
 * Copies one branch of the wing into a new curve handle.
 *
 * # Safety
 * `wing` must be a live handle; `out_curve` receives a handle to free with [`soliton_curve_free`].
 */
enum SolitonStatus soliton_wing_branch(const struct SolitonWing *wing,
                                       enum SolitonBranch branch,
                                       struct SolitonCurve **out_curve);

/**
 * Solves the bowl of dimension `n` up to radius `r_max`.
 *
 * # Safety
 * `out_curve` must be a valid pointer.
 */
enum SolitonStatus soliton_bowl_solve(size_t n,
                                      double tol,
                                      double r_max,
                                      struct SolitonCurve **out_curve);

/**
 * # Safety
 * `curve` must be null or a live curve handle.
 */
void soliton_curve_free(struct SolitonCurve *curve);

/**
 * # Safety
 * `curve` must be a live handle and `out_len` valid.
 */
enum SolitonStatus soliton_curve_len(const struct SolitonCurve *curve, size_t *out_len);

/**
 * # Safety
 * `curve` must be a live handle and `out_sample` valid.
 */
enum SolitonStatus soliton_curve_sample(const struct SolitonCurve *curve,
                                        size_t index,
                                        struct SolitonSample *out_sample);

/**
 * Dense output at arc length `s`.
 *
 * # Safety
 * `curve` must be a live handle and `out_sample` valid.
 */
enum SolitonStatus soliton_curve_state_at(const struct SolitonCurve *curve,
                                          double s,
                                          struct SolitonSample *out_sample);

/**
 * Lower and upper funnel walls at `r >= r0` (unshifted funnel).
 *
 * # Safety
 * Output pointers must be valid.
 */
enum SolitonStatus soliton_funnel_walls(size_t n,
                                        double r0,
                                        double lambda,
                                        double r,
                                        double *out_lower,
                                        double *out_upper);

/**
 * Number of bound identifiers accepted by [`soliton_bound_check`].
 */
size_t soliton_bound_count(void);

/**
 * Name of bound `id` as a static NUL-terminated string, or null when out of range.
 */
const char *soliton_bound_name(size_t id);

/**
 * Checks bound `id` (an index below [`soliton_bound_count`]) along the wing up to `r_max`.
 *
 * # Safety
 * `wing` must be a live handle and `out_result` valid.
 */
enum SolitonStatus soliton_bound_check(const struct SolitonWing *wing,
                                       size_t id,
                                       double r_max,
                                       double quad_tol,
                                       struct SolitonBoundResult *out_result);

/**
 * Exact sign of the subsolution polynomial for `R* = num / den` on `[R*, inf)`.
 *
 * On a sign change the bracket is written to `out_lo`, `out_hi`; otherwise both are NaN.
 *
 * # Safety
 * Output pointers must be valid.
 */
enum SolitonStatus soliton_subsol_verdict(size_t n,
                                          int64_t r_star_num,
                                          int64_t r_star_den,
                                          enum SolitonSign *out_sign,
                                          double *out_lo,
                                          double *out_hi);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SOLITON_H */
