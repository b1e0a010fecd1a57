//! C ABI over the estimation core: opaque fit handles, status-code errors,
//! plain-double results through out-pointers. The committed header lives in
//! include/component_shrink.h and is regenerated by the build script.
//!
//! Contract notes for callers:
//! - every function that can fail returns CskStatus and writes results only
//!   on CSK_STATUS_OK;
//! - handles are freed exactly once with the matching _free function;
//! - all pointers must be valid for the stated lengths; null is rejected.

use std::os::raw::c_char;
use std::slice;

use component_shrink::betabin::{fit_exchangeable, FitOptions, RandomEffectsFit};
use component_shrink::compose::{
    fip_ability, hit_probability, on_base_probability, PitchingComponents,
};
use component_shrink::error::Error;
use component_shrink::ingest::ComponentObservation;
use component_shrink::normalmodel::{fit_normal_exchangeable, shrink_normal, NormalFit, NormalObservation};

/// Result code for every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CskStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InsufficientData = 3,
    NumericalFailure = 4,
}

fn status_of(e: &Error) -> CskStatus {
    match e {
        Error::InsufficientData(_) => CskStatus::InsufficientData,
        Error::Domain(_) | Error::DegeneratePitcher(_) => CskStatus::NumericalFailure,
        _ => CskStatus::InvalidArgument,
    }
}

/// Optimizer settings; get defaults from csk_fit_options_default.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CskFitOptions {
    pub tol: f64,
    pub max_evals: usize,
    pub restarts: usize,
    pub log_k_cap: f64,
    pub seed: u64,
}

impl From<CskFitOptions> for FitOptions {
    fn from(o: CskFitOptions) -> FitOptions {
        FitOptions {
            tol: o.tol,
            max_evals: o.max_evals,
            restarts: o.restarts,
            log_k_cap: o.log_k_cap,
            seed: o.seed,
        }
    }
}

#[no_mangle]
pub extern "C" fn csk_fit_options_default() -> CskFitOptions {
    let d = FitOptions::default();
    CskFitOptions {
        tol: d.tol,
        max_evals: d.max_evals,
        restarts: d.restarts,
        log_k_cap: d.log_k_cap,
        seed: d.seed,
    }
}

/// Opaque beta-binomial fit handle.
pub struct CskBetabinFit {
    inner: RandomEffectsFit,
}

/// Scalar view of a beta-binomial fit.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CskBetabinSummary {
    pub eta: f64,
    pub k: f64,
    pub talent_sd: f64,
    pub log_posterior_at_mode: f64,
    pub converged: bool,
    pub at_k_bound: bool,
    pub n_players: usize,
}

/// Opaque normal-model fit handle.
pub struct CskNormalFit {
    inner: NormalFit,
}

/// Scalar view of a normal-model fit.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CskNormalSummary {
    pub mu: f64,
    pub tau2: f64,
    pub sigma2: f64,
    pub converged: bool,
}

/// Fit an exchangeable beta-binomial talent curve to (successes[i],
/// opportunities[i]) pairs. On success writes a handle the caller must
/// release with csk_betabin_free.
///
/// # Safety
/// `successes` and `opportunities` must point to `len` readable u64 values;
/// `out` must be a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn csk_betabin_fit(
    successes: *const u64,
    opportunities: *const u64,
    len: usize,
    options: CskFitOptions,
    out: *mut *mut CskBetabinFit,
) -> CskStatus {
    if successes.is_null() || opportunities.is_null() || out.is_null() {
        return CskStatus::NullPointer;
    }
    let ys = slice::from_raw_parts(successes, len);
    let ns = slice::from_raw_parts(opportunities, len);
    if ys.iter().zip(ns).any(|(y, n)| y > n) {
        return CskStatus::InvalidArgument;
    }
    let obs: Vec<ComponentObservation> = ys
        .iter()
        .zip(ns)
        .enumerate()
        .map(|(i, (&y, &n))| ComponentObservation::new(format!("obs{i}"), y, n))
        .collect();
    match fit_exchangeable(&obs, options.into()) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(CskBetabinFit { inner }));
            CskStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Build a fit handle directly from known talent-curve parameters
/// (eta in (0,1), k > 0), for shrinking against published values.
///
/// # Safety
/// `out` must be a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn csk_betabin_with_params(
    eta: f64,
    k: f64,
    out: *mut *mut CskBetabinFit,
) -> CskStatus {
    if out.is_null() {
        return CskStatus::NullPointer;
    }
    if !(eta > 0.0 && eta < 1.0 && eta.is_finite()) || !(k > 0.0 && k.is_finite()) {
        return CskStatus::InvalidArgument;
    }
    let inner = RandomEffectsFit::with_params(eta, k);
    *out = Box::into_raw(Box::new(CskBetabinFit { inner }));
    CskStatus::Ok
}

/// Copy the fit's scalar fields into `out`.
///
/// # Safety
/// `fit` must be a live handle from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn csk_betabin_summary(
    fit: *const CskBetabinFit,
    out: *mut CskBetabinSummary,
) -> CskStatus {
    if fit.is_null() || out.is_null() {
        return CskStatus::NullPointer;
    }
    let f = &(*fit).inner;
    *out = CskBetabinSummary {
        eta: f.eta,
        k: f.k,
        talent_sd: f.talent_sd,
        log_posterior_at_mode: f.log_posterior_at_mode,
        converged: f.converged,
        at_k_bound: f.at_k_bound,
        n_players: f.n_players,
    };
    CskStatus::Ok
}

/// Posterior-mean (shrunken) success probability for y successes in n
/// opportunities under the fitted curve.
///
/// # Safety
/// `fit` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn csk_betabin_shrink(
    fit: *const CskBetabinFit,
    successes: u64,
    opportunities: u64,
    out: *mut f64,
) -> CskStatus {
    if fit.is_null() || out.is_null() {
        return CskStatus::NullPointer;
    }
    if successes > opportunities {
        return CskStatus::InvalidArgument;
    }
    *out = (*fit).inner.shrink(successes, opportunities);
    CskStatus::Ok
}

/// Predictive standard deviation of an observed rate at sample size n.
///
/// # Safety
/// `fit` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn csk_betabin_predictive_sd(
    fit: *const CskBetabinFit,
    opportunities: u64,
    out: *mut f64,
) -> CskStatus {
    if fit.is_null() || out.is_null() {
        return CskStatus::NullPointer;
    }
    match (*fit).inner.predictive_sd(opportunities) {
        Ok(v) => {
            *out = v;
            CskStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Standardized residual of an observed rate against the fitted curve.
///
/// # Safety
/// `fit` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn csk_betabin_residual(
    fit: *const CskBetabinFit,
    successes: u64,
    opportunities: u64,
    out: *mut f64,
) -> CskStatus {
    if fit.is_null() || out.is_null() {
        return CskStatus::NullPointer;
    }
    if successes > opportunities {
        return CskStatus::InvalidArgument;
    }
    match (*fit).inner.standardized_residual(successes, opportunities) {
        Ok(v) => {
            *out = v;
            CskStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Release a beta-binomial fit handle. Null is a no-op.
///
/// # Safety
/// `fit` must be a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn csk_betabin_free(fit: *mut CskBetabinFit) {
    if !fit.is_null() {
        drop(Box::from_raw(fit));
    }
}

fn probability_in_unit(p: f64) -> bool {
    p.is_finite() && (0.0..=1.0).contains(&p)
}

/// Hit probability composed from strikeout, home-run, and hit-in-play
/// probabilities.
///
/// # Safety
/// `out` must be a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn csk_hit_probability(
    p_so: f64,
    p_hr: f64,
    p_hip: f64,
    out: *mut f64,
) -> CskStatus {
    if out.is_null() {
        return CskStatus::NullPointer;
    }
    if ![p_so, p_hr, p_hip].iter().all(|&p| probability_in_unit(p)) {
        return CskStatus::InvalidArgument;
    }
    *out = hit_probability(p_so, p_hr, p_hip);
    CskStatus::Ok
}

/// On-base probability composed from walk and hit probabilities.
///
/// # Safety
/// `out` must be a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn csk_on_base_probability(
    p_bb: f64,
    p_hit: f64,
    out: *mut f64,
) -> CskStatus {
    if out.is_null() {
        return CskStatus::NullPointer;
    }
    if !probability_in_unit(p_bb) || !probability_in_unit(p_hit) {
        return CskStatus::InvalidArgument;
    }
    *out = on_base_probability(p_bb, p_hit);
    CskStatus::Ok
}

/// FIP ability (constant omitted) composed from pitching component
/// probabilities. Degenerate combinations (no outs) fail numerically.
///
/// # Safety
/// `out` must be a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn csk_fip_ability(
    p_bb: f64,
    p_so: f64,
    p_hr: f64,
    p_hip: f64,
    out: *mut f64,
) -> CskStatus {
    if out.is_null() {
        return CskStatus::NullPointer;
    }
    if ![p_bb, p_so, p_hr, p_hip]
        .iter()
        .all(|&p| probability_in_unit(p))
    {
        return CskStatus::InvalidArgument;
    }
    let c = PitchingComponents {
        p_bb,
        p_so,
        p_hr,
        p_hip,
    };
    match fip_ability(&c) {
        Ok(v) => {
            *out = v;
            CskStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Fit the exchangeable normal model to (value[i], weight[i]) pairs.
/// Weights must be positive and finite. On success writes a handle the
/// caller must release with csk_normal_free.
///
/// # Safety
/// `values` and `weights` must point to `len` readable doubles; `out` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn csk_normal_fit(
    values: *const f64,
    weights: *const f64,
    len: usize,
    out: *mut *mut CskNormalFit,
) -> CskStatus {
    if values.is_null() || weights.is_null() || out.is_null() {
        return CskStatus::NullPointer;
    }
    let vs = slice::from_raw_parts(values, len);
    let ws = slice::from_raw_parts(weights, len);
    if vs.iter().any(|v| !v.is_finite()) || ws.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
        return CskStatus::InvalidArgument;
    }
    let obs: Vec<NormalObservation> = vs
        .iter()
        .zip(ws)
        .enumerate()
        .map(|(i, (&v, &w))| NormalObservation::new(format!("obs{i}"), v, w))
        .collect();
    match fit_normal_exchangeable(&obs) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(CskNormalFit { inner }));
            CskStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Copy the normal fit's scalar fields into `out`.
///
/// # Safety
/// `fit` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn csk_normal_summary(
    fit: *const CskNormalFit,
    out: *mut CskNormalSummary,
) -> CskStatus {
    if fit.is_null() || out.is_null() {
        return CskStatus::NullPointer;
    }
    let f = &(*fit).inner;
    *out = CskNormalSummary {
        mu: f.mu,
        tau2: f.tau2,
        sigma2: f.sigma2,
        converged: f.converged,
    };
    CskStatus::Ok
}

/// Posterior-mean pull of an observed value toward the fitted population
/// mean, weighted by the fitted variance components.
///
/// # Safety
/// `fit` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn csk_normal_shrink(
    fit: *const CskNormalFit,
    value: f64,
    weight: f64,
    out: *mut f64,
) -> CskStatus {
    if fit.is_null() || out.is_null() {
        return CskStatus::NullPointer;
    }
    if !value.is_finite() || !(weight > 0.0) || !weight.is_finite() {
        return CskStatus::InvalidArgument;
    }
    *out = shrink_normal(value, weight, &(*fit).inner);
    CskStatus::Ok
}

/// Release a normal fit handle. Null is a no-op.
///
/// # Safety
/// `fit` must be a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn csk_normal_free(fit: *mut CskNormalFit) {
    if !fit.is_null() {
        drop(Box::from_raw(fit));
    }
}

/// Static description of a status code. Never null.
#[no_mangle]
pub extern "C" fn csk_status_message(status: CskStatus) -> *const c_char {
    let msg: &'static [u8] = match status {
        CskStatus::Ok => b"ok\0",
        CskStatus::NullPointer => b"null pointer argument\0",
        CskStatus::InvalidArgument => b"invalid argument\0",
        CskStatus::InsufficientData => b"insufficient data\0",
        CskStatus::NumericalFailure => b"numerical failure\0",
    };
    msg.as_ptr() as *const c_char
}
