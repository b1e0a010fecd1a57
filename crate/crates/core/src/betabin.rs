//! Exchangeable beta-binomial random-effects model.
//!
//! Player success probabilities are drawn i.i.d. from a Beta talent curve
//! with mean `eta` and precision `K` (shapes K*eta and K*(1-eta)). The
//! hyperparameters get a vague prior proportional to 1/(eta(1-eta)(1+K)^2)
//! and are estimated at their posterior mode; player probabilities are then
//! plug-in posterior means, i.e. the familiar shrinkage form
//! (y + K*eta)/(n + K).
//!
//! All optimization happens in (logit eta, log K) coordinates, where the
//! prior times the transform Jacobian collapses to log K - 2 log(1+K).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::ingest::ComponentObservation;
use crate::optim::{minimize, Bounds};
use crate::special::{ln_beta, ln_choose, ln_gamma, logistic, logit};

/// Fitted talent-curve hyperparameters for one component.
#[derive(Debug, Clone, Copy)]
pub struct RandomEffectsFit {
    /// Prior mean of the talent curve, in (0, 1).
    pub eta: f64,
    /// Precision of the talent curve; larger K means a tighter curve.
    pub k: f64,
    /// sqrt(eta*(1-eta)/(K+1)), the talent-curve standard deviation.
    pub talent_sd: f64,
    /// Log posterior density (up to the flat-prior constant) at the mode.
    pub log_posterior_at_mode: f64,
    /// Whether the optimizer reported convergence for the winning start.
    pub converged: bool,
    /// True when the mode sits at the configured log-K cap, i.e. the data
    /// show no detectable between-player spread.
    pub at_k_bound: bool,
    /// Number of observations with positive opportunities that entered the
    /// likelihood.
    pub n_players: usize,
}

impl RandomEffectsFit {
    /// Build a fit from known hyperparameters, for composing estimates with
    /// externally supplied (eta, K). Not derived from data:
    /// `log_posterior_at_mode` is NaN and `n_players` is 0.
    pub fn with_params(eta: f64, k: f64) -> RandomEffectsFit {
        assert!(eta > 0.0 && eta < 1.0, "eta must be in (0,1), got {eta}");
        assert!(k > 0.0, "K must be positive, got {k}");
        RandomEffectsFit {
            eta,
            k,
            talent_sd: talent_sd(eta, k),
            log_posterior_at_mode: f64::NAN,
            converged: true,
            at_k_bound: false,
            n_players: 0,
        }
    }

    /// Plug-in posterior mean (y + K*eta)/(n + K); returns eta when n = 0.
    pub fn shrink(&self, y: u64, n: u64) -> f64 {
        (y as f64 + self.k * self.eta) / (n as f64 + self.k)
    }

    /// Predictive standard deviation of a raw rate y/n at sample size n:
    /// sqrt(eta*(1-eta)*(1/n + 1/(K+1))).
    pub fn predictive_sd(&self, n: u64) -> Result<f64> {
        if n == 0 {
            return Err(Error::Domain(
                "predictive_sd requires n >= 1".to_string(),
            ));
        }
        Ok((self.eta * (1.0 - self.eta) * (1.0 / n as f64 + 1.0 / (self.k + 1.0))).sqrt())
    }

    /// Standardized residual z = (y/n - eta)/predictive_sd(n).
    pub fn standardized_residual(&self, y: u64, n: u64) -> Result<f64> {
        let sd = self.predictive_sd(n)?;
        Ok((y as f64 / n as f64 - self.eta) / sd)
    }
}

/// Talent-curve SD implied by (eta, K).
pub fn talent_sd(eta: f64, k: f64) -> f64 {
    (eta * (1.0 - eta) / (k + 1.0)).sqrt()
}

/// Optimizer settings for `fit_exchangeable`.
#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    /// Convergence tolerance on the simplex function-value spread.
    pub tol: f64,
    /// Hard cap on objective evaluations per start.
    pub max_evals: usize,
    /// Extra starts from perturbed initial points.
    pub restarts: usize,
    /// Upper bound on theta_2 = log K.
    pub log_k_cap: f64,
    /// Seed for the restart perturbations.
    pub seed: u64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            tol: 1e-8,
            max_evals: 5000,
            restarts: 3,
            log_k_cap: 15.0,
            seed: 0,
        }
    }
}

fn check_domain(y: u64, n: u64, eta: f64, k: f64) -> Result<()> {
    if y > n {
        return Err(Error::Domain(format!("y={y} exceeds n={n}")));
    }
    if !(eta > 0.0 && eta < 1.0) || !eta.is_finite() {
        return Err(Error::Domain(format!("eta={eta} outside (0,1)")));
    }
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::Domain(format!("K={k} not positive")));
    }
    Ok(())
}

/// Log beta-binomial marginal probability of y successes in n trials when
/// the success probability is integrated over Beta(K*eta, K*(1-eta)):
/// log [ C(n,y) * B(y + K*eta, n - y + K*(1-eta)) / B(K*eta, K*(1-eta)) ].
/// An empty observation (n = 0) has probability 1, so returns 0.
pub fn log_marginal(y: u64, n: u64, eta: f64, k: f64) -> Result<f64> {
    check_domain(y, n, eta, k)?;
    if n == 0 {
        return Ok(0.0);
    }
    let a = k * eta;
    let b = k * (1.0 - eta);
    Ok(ln_choose(n, y) + ln_beta(y as f64 + a, (n - y) as f64 + b) - ln_beta(a, b))
}

/// Sum of per-observation log marginals without the binomial coefficients,
/// which are constant in theta. The shared -ln B(a,b) term is hoisted out of
/// the player loop; per observation this costs three ln_gamma calls.
fn log_marginal_core_sum(pairs: &[(u64, u64)], eta: f64, k: f64) -> f64 {
    let a = k * eta;
    let b = k * (1.0 - eta);
    // ln B(y+a, n-y+b) - ln B(a, b) expands so that lnGamma(a), lnGamma(b),
    // and lnGamma(a+b) = lnGamma(k) appear once per observation; -ln B(a,b)
    // carries all three.
    let ln_b_prior = ln_beta(a, b);
    let mut total = 0.0;
    for &(y, n) in pairs {
        total += ln_gamma(y as f64 + a) + ln_gamma((n - y) as f64 + b) - ln_gamma(n as f64 + k);
    }
    total - pairs.len() as f64 * ln_b_prior
}

/// Log posterior density of theta = (logit eta, log K) given the
/// observations: the sum of log marginals plus log K - 2 log(1+K), which is
/// the vague hyperprior combined with the Jacobian of the transform.
/// Zero-opportunity observations contribute nothing.
pub fn log_posterior(observations: &[ComponentObservation], theta: [f64; 2]) -> Result<f64> {
    let pairs: Vec<(u64, u64)> = observations
        .iter()
        .filter(|o| o.opportunities > 0)
        .map(|o| (o.successes, o.opportunities))
        .collect();
    if pairs.is_empty() {
        return Err(Error::Domain(
            "log_posterior needs at least one observation with n > 0".to_string(),
        ));
    }
    let eta = logistic(theta[0]);
    let k = theta[1].exp();
    check_domain(0, 0, eta, k)?;
    let ln_choose_sum: f64 = pairs.iter().map(|&(y, n)| ln_choose(n, y)).sum();
    Ok(log_marginal_core_sum(&pairs, eta, k) + ln_choose_sum + prior_term(k))
}

/// log K - 2 log(1+K).
fn prior_term(k: f64) -> f64 {
    k.ln() - 2.0 * (1.0 + k).ln()
}

/// Method-of-moments start: eta_0 is the pooled rate; K_0 comes from
/// equating the observed between-player rate variance to
/// eta_0(1-eta_0)(1/n_bar + 1/(K+1)). Nonpositive solutions fall back to 100.
fn mom_start(pairs: &[(u64, u64)], log_k_cap: f64) -> [f64; 2] {
    let total_y: u64 = pairs.iter().map(|p| p.0).sum();
    let total_n: u64 = pairs.iter().map(|p| p.1).sum();
    let eta0 = (total_y as f64 / total_n as f64).clamp(1e-4, 1.0 - 1e-4);

    let j = pairs.len() as f64;
    let rates: Vec<f64> = pairs.iter().map(|&(y, n)| y as f64 / n as f64).collect();
    let mean_rate = rates.iter().sum::<f64>() / j;
    let var_rate = rates.iter().map(|r| (r - mean_rate).powi(2)).sum::<f64>() / (j - 1.0);
    let n_bar = total_n as f64 / j;

    let excess = var_rate / (eta0 * (1.0 - eta0)) - 1.0 / n_bar;
    let k0 = if excess > 0.0 { 1.0 / excess - 1.0 } else { -1.0 };
    let k0 = if k0 <= 0.0 { 100.0 } else { k0 };
    let log_k0 = k0.ln().min(log_k_cap - 0.5);
    [logit(eta0), log_k0]
}

/// Fit the exchangeable model by maximizing the log posterior with a
/// simplex search, multi-started from the method-of-moments point and
/// seeded perturbations of it. log K is capped; a mode at the cap is
/// reported through `at_k_bound`.
pub fn fit_exchangeable(
    observations: &[ComponentObservation],
    options: FitOptions,
) -> Result<RandomEffectsFit> {
    let pairs: Vec<(u64, u64)> = observations
        .iter()
        .filter(|o| o.opportunities > 0)
        .map(|o| (o.successes, o.opportunities))
        .collect();
    if pairs.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "fit_exchangeable needs >= 2 observations with n > 0, got {}",
            pairs.len()
        )));
    }

    let bounds = Bounds {
        lower: [-15.0, -10.0],
        upper: [15.0, options.log_k_cap],
    };
    // The binomial coefficients are constant in theta; optimize without them
    // and add them back when reporting the posterior value at the mode.
    let objective = |x: &[f64; 2]| {
        let eta = logistic(x[0]);
        let k = x[1].exp();
        -(log_marginal_core_sum(&pairs, eta, k) + prior_term(k))
    };

    let start = mom_start(&pairs, options.log_k_cap);
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let jitter_eta = Normal::new(0.0, 0.3).unwrap();
    let jitter_k = Normal::new(0.0, 1.0).unwrap();

    let mut best: Option<(f64, [f64; 2], bool)> = None;
    for attempt in 0..=options.restarts {
        let x0 = if attempt == 0 {
            start
        } else {
            [
                start[0] + jitter_eta.sample(&mut rng),
                start[1] + jitter_k.sample(&mut rng),
            ]
        };
        let r = minimize(objective, x0, bounds, options.tol, options.max_evals);
        let better = match &best {
            None => true,
            Some((fval, _, _)) => r.fval < *fval,
        };
        if better {
            best = Some((r.fval, r.x, r.converged));
        }
    }
    let (_, x, converged) = best.expect("at least one optimizer start runs");

    let eta = logistic(x[0]);
    let k = x[1].exp();
    let at_k_bound = x[1] >= options.log_k_cap - 1e-6;
    let ln_choose_sum: f64 = pairs.iter().map(|&(y, n)| ln_choose(n, y)).sum();
    let log_post = log_marginal_core_sum(&pairs, eta, k) + ln_choose_sum + prior_term(k);

    Ok(RandomEffectsFit {
        eta,
        k,
        talent_sd: talent_sd(eta, k),
        log_posterior_at_mode: log_post,
        converged,
        at_k_bound,
        n_players: pairs.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn obs(id: &str, y: u64, n: u64) -> ComponentObservation {
        ComponentObservation::new(id, y, n)
    }

    #[test]
    fn log_marginal_uniform_prior_case() {
        // Under Beta(1,1) the marginal of y=1, n=2 is 1/3.
        let v = log_marginal(1, 2, 0.5, 2.0).unwrap();
        assert!((v - (1.0f64 / 3.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn log_marginal_empty_observation() {
        assert_eq!(log_marginal(0, 0, 0.3, 7.0).unwrap(), 0.0);
    }

    #[test]
    fn log_marginal_large_k_is_binomial() {
        let v = log_marginal(5, 10, 0.5, 1e6).unwrap();
        let binom = ln_choose(10, 5) + 10.0 * 0.5f64.ln();
        assert!(
            ((v - binom) / binom).abs() < 1e-4,
            "marginal {v} vs binomial {binom}"
        );
    }

    #[test]
    fn log_marginal_domain_errors() {
        assert!(log_marginal(3, 2, 0.5, 1.0).is_err());
        assert!(log_marginal(1, 2, 0.0, 1.0).is_err());
        assert!(log_marginal(1, 2, 1.0, 1.0).is_err());
        assert!(log_marginal(1, 2, 0.5, 0.0).is_err());
        assert!(log_marginal(1, 2, 0.5, -3.0).is_err());
    }

    #[test]
    fn log_posterior_single_observation() {
        let data = vec![obs("a", 1, 2)];
        let v = log_posterior(&data, [0.0, 2.0f64.ln()]).unwrap();
        let expect = (1.0f64 / 3.0).ln() + 2.0f64.ln() - 2.0 * 3.0f64.ln();
        assert!((v - expect).abs() < 1e-12, "got {v}, expect {expect}");
    }

    #[test]
    fn log_posterior_ignores_zero_opportunities() {
        let data = vec![obs("a", 30, 150), obs("b", 12, 88)];
        let theta = [-1.2, 3.4];
        let base = log_posterior(&data, theta).unwrap();
        let mut padded = data.clone();
        padded.push(obs("ghost", 0, 0));
        let with_ghost = log_posterior(&padded, theta).unwrap();
        assert_eq!(base, with_ghost);
    }

    #[test]
    fn log_posterior_empty_effective_set_is_domain_error() {
        let data = vec![obs("ghost", 0, 0)];
        assert!(log_posterior(&data, [0.0, 0.0]).is_err());
        assert!(log_posterior(&[], [0.0, 0.0]).is_err());
    }

    #[test]
    fn log_posterior_matches_marginal_sum() {
        let data = vec![obs("a", 30, 150), obs("b", 12, 88), obs("c", 55, 400)];
        let theta = [logit(0.21), 40.0f64.ln()];
        let direct: f64 = data
            .iter()
            .map(|o| log_marginal(o.successes, o.opportunities, 0.21, 40.0).unwrap())
            .sum();
        let expect = direct + 40.0f64.ln() - 2.0 * 41.0f64.ln();
        let got = log_posterior(&data, theta).unwrap();
        assert!((got - expect).abs() < 1e-9, "got {got}, expect {expect}");
    }

    #[test]
    fn shrink_matches_published_beltran_values() {
        let so = RandomEffectsFit::with_params(0.203, 40.60);
        assert!((so.shrink(88, 520) - 0.172).abs() < 0.0005);
        let hip = RandomEffectsFit::with_params(0.303, 418.10);
        assert!((hip.shrink(134, 410) - 0.315).abs() < 0.0005);
    }

    #[test]
    fn shrink_fixed_point_and_n_zero() {
        let fit = RandomEffectsFit::with_params(0.25, 30.0);
        assert!((fit.shrink(25, 100) - 0.25).abs() < 1e-12);
        assert_eq!(fit.shrink(0, 0), 0.25);
    }

    #[test]
    fn predictive_sd_value_and_limits() {
        let fit = RandomEffectsFit::with_params(0.203, 40.60);
        let sd = fit.predictive_sd(520).unwrap();
        assert!((sd - 0.06481).abs() < 1e-4, "sd={sd}");
        // Large n converges to the talent SD from above.
        let sd_huge = fit.predictive_sd(u64::MAX).unwrap();
        assert!((sd_huge - fit.talent_sd).abs() < 1e-6);
        for n in [1u64, 10, 100, 10_000] {
            assert!(fit.predictive_sd(n).unwrap() > fit.talent_sd);
        }
        assert!(fit.predictive_sd(0).is_err());
    }

    #[test]
    fn standardized_residual_beltran() {
        let fit = RandomEffectsFit::with_params(0.203, 40.60);
        let z = fit.standardized_residual(88, 520).unwrap();
        assert!((z - (-0.521)).abs() < 0.005, "z={z}");
        assert!(fit.standardized_residual(1, 0).is_err());
        // Centered case.
        let fit = RandomEffectsFit::with_params(0.25, 30.0);
        assert_eq!(fit.standardized_residual(25, 100).unwrap(), 0.0);
    }

    #[test]
    fn talent_sd_recomputable() {
        let fit = RandomEffectsFit::with_params(0.203, 40.60);
        let expect = (0.203f64 * 0.797 / 41.60).sqrt();
        assert!((fit.talent_sd - expect).abs() < 1e-15);
    }

    #[test]
    fn fit_requires_two_effective_observations() {
        let data = vec![obs("a", 3, 10), obs("ghost", 0, 0)];
        assert!(matches!(
            fit_exchangeable(&data, FitOptions::default()),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn identical_rates_drive_k_to_cap() {
        // Zero between-player variance pushes K up until the prior's
        // -log K tail stops it near (total opportunities)/2, so the cap
        // engages once the data are large enough to overwhelm the prior.
        let data: Vec<ComponentObservation> = (0..400)
            .map(|i| obs(&format!("p{i}"), 6_000, 20_000))
            .collect();
        let fit = fit_exchangeable(&data, FitOptions::default()).unwrap();
        assert!(fit.at_k_bound, "K={} logK={}", fit.k, fit.k.ln());
        assert!((fit.eta - 0.3).abs() < 0.01, "eta={}", fit.eta);
    }

    #[test]
    fn identical_rates_small_sample_mode_is_finite() {
        // With modest data the posterior mode in K is interior: the
        // marginal likelihood gains only ~(total n)/(2K) from raising K,
        // which the -log K prior tail beats beyond K of about (total n)/2.
        let data: Vec<ComponentObservation> = (0..20)
            .map(|i| obs(&format!("p{i}"), 30, 100))
            .collect();
        let fit = fit_exchangeable(&data, FitOptions::default()).unwrap();
        assert!(!fit.at_k_bound);
        assert!(fit.k > 500.0 && fit.k < 2000.0, "K={}", fit.k);
        assert!((fit.eta - 0.3).abs() < 0.01, "eta={}", fit.eta);
    }

    #[test]
    fn fit_recovers_dispersed_synthetic_mode() {
        // Deterministic two-point talent mixture with a known spread; the
        // fitted eta must sit near the pooled rate and K well off the cap.
        let mut data = Vec::new();
        for i in 0..60 {
            let (y, n) = if i % 2 == 0 { (12, 100) } else { (28, 100) };
            data.push(obs(&format!("p{i}"), y, n));
        }
        let fit = fit_exchangeable(&data, FitOptions::default()).unwrap();
        assert!(fit.converged);
        assert!(!fit.at_k_bound);
        assert!((fit.eta - 0.2).abs() < 0.02, "eta={}", fit.eta);
        // Between-player SD is 0.08; talent_sd should be in that vicinity.
        assert!(
            fit.talent_sd > 0.04 && fit.talent_sd < 0.13,
            "talent_sd={}",
            fit.talent_sd
        );
    }

    #[test]
    fn fit_mode_beats_nearby_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut data = Vec::new();
        for i in 0..80 {
            let n = rng.gen_range(100..400u64);
            let p: f64 = 0.15 + 0.1 * rng.gen::<f64>();
            let mut y = 0u64;
            for _ in 0..n {
                if rng.gen::<f64>() < p {
                    y += 1;
                }
            }
            data.push(obs(&format!("p{i}"), y, n));
        }
        let fit = fit_exchangeable(&data, FitOptions::default()).unwrap();
        let mode = [logit(fit.eta), fit.k.ln()];
        let at_mode = log_posterior(&data, mode).unwrap();
        for d1 in [-0.05, 0.0, 0.05] {
            for d2 in [-0.2, 0.0, 0.2] {
                let v = log_posterior(&data, [mode[0] + d1, mode[1] + d2]).unwrap();
                assert!(
                    v <= at_mode + 1e-7,
                    "nearby point beats mode: {v} > {at_mode}"
                );
            }
        }
    }

    proptest! {
        #[test]
        fn shrinkage_betweenness(y in 0u64..400, extra in 1u64..600, eta in 0.01f64..0.99, k in 0.1f64..1000.0) {
            let n = y + extra;
            let fit = RandomEffectsFit::with_params(eta, k);
            let p = fit.shrink(y, n);
            let raw = y as f64 / n as f64;
            let lo = raw.min(eta) - 1e-12;
            let hi = raw.max(eta) + 1e-12;
            prop_assert!(p >= lo && p <= hi, "p={} raw={} eta={}", p, raw, eta);
        }

        #[test]
        fn shrinkage_monotone_in_n(mult in 2u64..50, eta in 0.01f64..0.99, k in 0.1f64..1000.0) {
            // Fixed rate 0.3; growing n pulls the estimate toward the rate.
            let fit = RandomEffectsFit::with_params(eta, k);
            let p_small = fit.shrink(3 * mult, 10 * mult);
            let p_large = fit.shrink(30 * mult, 100 * mult);
            let raw = 0.3f64;
            prop_assert!((p_large - raw).abs() <= (p_small - raw).abs() + 1e-12);
        }

        #[test]
        fn marginal_is_a_log_probability(y in 0u64..50, extra in 0u64..200, eta in 0.01f64..0.99, k in 0.1f64..10000.0) {
            let n = y + extra;
            let v = log_marginal(y, n, eta, k).unwrap();
            prop_assert!(v <= 1e-12, "log probability must be <= 0, got {}", v);
        }
    }
}
