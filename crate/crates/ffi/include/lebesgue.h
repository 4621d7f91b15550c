#ifndef LEBESGUE_H
#define LEBESGUE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result code of every fallible call.
 */
typedef enum LbStatus {
  LB_STATUS_OK = 0,
  LB_STATUS_NULL_POINTER = 1,
  LB_STATUS_DOMAIN = 2,
  LB_STATUS_SINGULARITY = 3,
  LB_STATUS_HIGH_VARIANCE = 4,
  LB_STATUS_NUMERICAL = 5,
  LB_STATUS_PARSE = 6,
  LB_STATUS_PANIC = 7,
} LbStatus;

/**
 * Law of a sampled series.
 */
typedef enum LbSeriesKind {
  LB_SERIES_KIND_DIRICHLET = 0,
  LB_SERIES_KIND_GAMMA = 1,
  /**
   * Gamma-process draw carrying its Lebesgue importance weight.
   */
  LB_SERIES_KIND_LEBESGUE = 2,
} LbSeriesKind;

/**
 * Opaque truncated atomic measure on `[0, 1)`.
 */
typedef struct LbSeries LbSeries;

/**
 * Opaque piecewise-constant function on `[0, 1)`.
 */
typedef struct LbStepFunction LbStepFunction;

/**
 * Monte Carlo estimate with its standard error.
 */
typedef struct LbEstimate {
  double estimate;
  double std_error;
  uint64_t n_samples;
} LbEstimate;

/**
 * Saddle point of the Mellin integral at one `lambda`.
 */
typedef struct LbSaddle {
  double lambda;
  double gamma;
  double l_value;
  double l_ratio;
  double curvature;
  double residual;
} LbSaddle;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *lb_version(void);

/**
 * Message of the last failed call on this thread, or NULL after a
 * successful call. Valid until the next library call on this thread.
 */
const char *lb_last_error_message(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, not yet freed.
 */
void lb_string_free(char *s);

/**
 * # Safety
 * `out` must be NULL or valid for writes.
 */
enum LbStatus lb_log_gamma(double x, double *out);

/**
 * # Safety
 * `out` must be NULL or valid for writes.
 */
enum LbStatus lb_digamma(double x, double *out);

/**
 * # Safety
 * `out` must be NULL or valid for writes.
 */
enum LbStatus lb_trigamma(double x, double *out);

/**
 * # Safety
 * `out` must be NULL or valid for writes.
 */
enum LbStatus lb_bessel_j(double order, double x, double *out);

/**
 * # Safety
 * `out` must be NULL or valid for writes.
 */
enum LbStatus lb_bessel_k0(double x, double *out);

/**
 * Parses `"v@lo:hi,v@lo:hi,..."`.
 *
 * # Safety
 * `spec` must be NULL or a NUL-terminated string; `out` must be NULL or
 * valid for writes.
 */
enum LbStatus lb_step_function_parse(const char *spec, struct LbStepFunction **out);

/**
 * Builds a step function from `n_values + 1` breakpoints running from 0
 * to 1 and the value on each piece.
 *
 * # Safety
 * The arrays must hold the stated number of elements; `out` must be NULL
 * or valid for writes.
 */
enum LbStatus lb_step_function_new(const double *breakpoints,
                                   size_t n_breakpoints,
                                   const double *values,
                                   size_t n_values,
                                   struct LbStepFunction **out);

/**
 * # Safety
 * `f` must be NULL or a live handle; `out` must be NULL or valid for writes.
 */
enum LbStatus lb_step_function_eval(const struct LbStepFunction *f, double x, double *out);

/**
 * # Safety
 * `f` must be NULL or a handle from this library, not yet freed.
 */
void lb_step_function_free(struct LbStepFunction *f);

/**
 * `θ ∫ ln f`.
 *
 * # Safety
 * `f` must be NULL or a live handle; `out` must be NULL or valid for writes.
 */
enum LbStatus lb_log_mean(double theta, const struct LbStepFunction *f, double *out);

/**
 * Multiplicator character `exp(θ ∫ ln a)`.
 *
 * # Safety
 * `a` must be NULL or a live handle; `out` must be NULL or valid for writes.
 */
enum LbStatus lb_phi(double theta, const struct LbStepFunction *a, double *out);

/**
 * Closed-form Laplace transform `exp(−θ ∫ ln f)`.
 *
 * # Safety
 * `f` must be NULL or a live handle; `out` must be NULL or valid for writes.
 */
enum LbStatus lb_analytic_laplace(double theta, const struct LbStepFunction *f, double *out);

/**
 * Importance-sampled Laplace transform. Refused with
 * `LB_STATUS_HIGH_VARIANCE` when `min f <= 1/2` unless
 * `allow_high_variance` is set.
 *
 * # Safety
 * `f` must be NULL or a live handle; `out` must be NULL or valid for writes.
 */
enum LbStatus lb_mc_laplace(double theta,
                            const struct LbStepFunction *f,
                            uint64_t samples,
                            uint64_t seed,
                            uint64_t streams,
                            double eps,
                            bool allow_high_variance,
                            struct LbEstimate *out);

/**
 * Draws one series from stream `stream_id` of `seed`.
 *
 * # Safety
 * `out` must be NULL or valid for writes.
 */
enum LbStatus lb_series_sample(enum LbSeriesKind kind,
                               double theta,
                               double eps,
                               uint64_t seed,
                               uint64_t stream_id,
                               struct LbSeries **out);

/**
 * Number of retained atoms; 0 for NULL.
 *
 * # Safety
 * `s` must be NULL or a live handle.
 */
size_t lb_series_len(const struct LbSeries *s);

/**
 * Borrowed array of `lb_series_len` masses in non-increasing order,
 * valid while the handle lives; NULL for NULL.
 *
 * # Safety
 * `s` must be NULL or a live handle.
 */
const double *lb_series_masses(const struct LbSeries *s);

/**
 * Borrowed array of atom locations aligned with the masses.
 *
 * # Safety
 * `s` must be NULL or a live handle.
 */
const double *lb_series_locations(const struct LbSeries *s);

/**
 * Total mass; `LB_STATUS_DOMAIN` for normalized (Dirichlet) series.
 *
 * # Safety
 * `s` must be NULL or a live handle; `out` must be NULL or valid for writes.
 */
enum LbStatus lb_series_total_mass(const struct LbSeries *s, double *out);

/**
 * Log importance weight; zero for draws from a probability law.
 *
 * # Safety
 * `s` must be NULL or a live handle; `out` must be NULL or valid for writes.
 */
enum LbStatus lb_series_log_weight(const struct LbSeries *s, double *out);

/**
 * Upper bound on the mass dropped by truncation.
 *
 * # Safety
 * `s` must be NULL or a live handle; `out` must be NULL or valid for writes.
 */
enum LbStatus lb_series_tail_bound(const struct LbSeries *s, double *out);

/**
 * JSON rendering; free with [`lb_string_free`].
 *
 * # Safety
 * `s` must be NULL or a live handle; `out` must be NULL or valid for writes.
 */
enum LbStatus lb_series_to_json(const struct LbSeries *s, char **out);

/**
 * New series with each mass multiplied by `a` at its location.
 *
 * # Safety
 * `a` and `s` must be NULL or live handles; `out` must be NULL or valid
 * for writes.
 */
enum LbStatus lb_series_apply_multiplicator(const struct LbStepFunction *a,
                                            const struct LbSeries *s,
                                            struct LbSeries **out);

/**
 * # Safety
 * `s` must be NULL or a handle from this library, not yet freed.
 */
void lb_series_free(struct LbSeries *s);

/**
 * Solves `ψ(γ) = ln λ`.
 *
 * # Safety
 * `out` must be NULL or valid for writes.
 */
enum LbStatus lb_solve_saddle(double lambda, struct LbSaddle *out);

/**
 * `F_n(λ)` by the vertical-contour integral.
 *
 * # Safety
 * `out` must be NULL or valid for writes.
 */
enum LbStatus lb_f_contour(size_t n, double lambda, double *out);

/**
 * `F_n(λ)` by direct integration over the orthant; `n <= 4`.
 *
 * # Safety
 * `out` must be NULL or valid for writes.
 */
enum LbStatus lb_f_direct(size_t n, double lambda, double *out);

/**
 * Exact Lebesgue mass of the box `[0, b]ⁿ` for part weights `weights`.
 *
 * # Safety
 * `weights` must hold `n` elements; `out` must be NULL or valid for writes.
 */
enum LbStatus lb_box_mass_l(const double *weights, size_t n, double b, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LEBESGUE_H */
