/* C interface for the component-shrink estimation core. */

#ifndef COMPONENT_SHRINK_H
#define COMPONENT_SHRINK_H

/* Generated by cbindgen from the Rust sources; do not edit by hand. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result code for every fallible call.
 */
typedef enum {
  CSK_STATUS_OK = 0,
  CSK_STATUS_NULL_POINTER = 1,
  CSK_STATUS_INVALID_ARGUMENT = 2,
  CSK_STATUS_INSUFFICIENT_DATA = 3,
  CSK_STATUS_NUMERICAL_FAILURE = 4,
} CskStatus;

/**
 * Opaque beta-binomial fit handle.
 */
typedef struct CskBetabinFit CskBetabinFit;

/**
 * Opaque normal-model fit handle.
 */
typedef struct CskNormalFit CskNormalFit;

/**
 * Optimizer settings; get defaults from csk_fit_options_default.
 */
typedef struct {
  double tol;
  uintptr_t max_evals;
  uintptr_t restarts;
  double log_k_cap;
  uint64_t seed;
} CskFitOptions;

/**
 * Scalar view of a beta-binomial fit.
 */
typedef struct {
  double eta;
  double k;
  double talent_sd;
  double log_posterior_at_mode;
  bool converged;
  bool at_k_bound;
  uintptr_t n_players;
} CskBetabinSummary;

/**
 * Scalar view of a normal-model fit.
 */
typedef struct {
  double mu;
  double tau2;
  double sigma2;
  bool converged;
} CskNormalSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

CskFitOptions csk_fit_options_default(void);

/**
 * Fit an exchangeable beta-binomial talent curve to (successes[i],
 * opportunities[i]) pairs. On success writes a handle the caller must
 * release with csk_betabin_free.
 *
 * # Safety
 * `successes` and `opportunities` must point to `len` readable u64 values;
 * `out` must be a valid writable pointer.
 */
CskStatus csk_betabin_fit(const uint64_t *successes,
                          const uint64_t *opportunities,
                          uintptr_t len,
                          CskFitOptions options,
                          CskBetabinFit **out);

/**
 * Build a fit handle directly from known talent-curve parameters
 * (eta in (0,1), k > 0), for shrinking against published values.
 *
 * # Safety
 * `out` must be a valid writable pointer.
 */
CskStatus csk_betabin_with_params(double eta, double k, CskBetabinFit **out);

/**
 * Copy the fit's scalar fields into `out`.
 *
 * # Safety
 * `fit` must be a live handle from this library; `out` must be writable.
 */
CskStatus csk_betabin_summary(const CskBetabinFit *fit, CskBetabinSummary *out);

/**
 * Posterior-mean (shrunken) success probability for y successes in n
 * opportunities under the fitted curve.
 *
 * # Safety
 * `fit` must be a live handle; `out` must be writable.
 */
CskStatus csk_betabin_shrink(const CskBetabinFit *fit,
                             uint64_t successes,
                             uint64_t opportunities,
                             double *out);

/**
 * Predictive standard deviation of an observed rate at sample size n.
 *
 * # Safety
 * `fit` must be a live handle; `out` must be writable.
 */
CskStatus csk_betabin_predictive_sd(const CskBetabinFit *fit, uint64_t opportunities, double *out);

/**
 * Standardized residual of an observed rate against the fitted curve.
 *
 * # Safety
 * `fit` must be a live handle; `out` must be writable.
 */
CskStatus csk_betabin_residual(const CskBetabinFit *fit,
                               uint64_t successes,
                               uint64_t opportunities,
                               double *out);

/**
 * Release a beta-binomial fit handle. Null is a no-op.
 *
 * # Safety
 * `fit` must be a handle from this library, not yet freed.
 */
void csk_betabin_free(CskBetabinFit *fit);

/**
 * Hit probability composed from strikeout, home-run, and hit-in-play
 * probabilities.
 *
 * # Safety
 * `out` must be a valid writable pointer.
 */
CskStatus csk_hit_probability(double p_so, double p_hr, double p_hip, double *out);

/**
 * On-base probability composed from walk and hit probabilities.
 *
 * # Safety
 * `out` must be a valid writable pointer.
 */
CskStatus csk_on_base_probability(double p_bb, double p_hit, double *out);

/**
 * FIP ability (constant omitted) composed from pitching component
 * probabilities. Degenerate combinations (no outs) fail numerically.
 *
 * # Safety
 * `out` must be a valid writable pointer.
 */
CskStatus csk_fip_ability(double p_bb, double p_so, double p_hr, double p_hip, double *out);

/**
 * Fit the exchangeable normal model to (value[i], weight[i]) pairs.
 * Weights must be positive and finite. On success writes a handle the
 * caller must release with csk_normal_free.
 *
 * # Safety
 * `values` and `weights` must point to `len` readable doubles; `out` must
 * be writable.
 */
CskStatus csk_normal_fit(const double *values,
                         const double *weights,
                         uintptr_t len,
                         CskNormalFit **out);

/**
 * Copy the normal fit's scalar fields into `out`.
 *
 * # Safety
 * `fit` must be a live handle; `out` must be writable.
 */
CskStatus csk_normal_summary(const CskNormalFit *fit, CskNormalSummary *out);

/**
 * Posterior-mean pull of an observed value toward the fitted population
 * mean, weighted by the fitted variance components.
 *
 * # Safety
 * `fit` must be a live handle; `out` must be writable.
 */
CskStatus csk_normal_shrink(const CskNormalFit *fit, double value, double weight, double *out);

/**
 * Release a normal fit handle. Null is a no-op.
 *
 * # Safety
 * `fit` must be a handle from this library, not yet freed.
 */
void csk_normal_free(CskNormalFit *fit);

/**
 * Static description of a status code. Never null.
 */
const char *csk_status_message(CskStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COMPONENT_SHRINK_H */
