//! Single exchangeable normal random-effects model, the baseline estimator
//! for pitcher FIP values.
//!
//! Observed values satisfy value_j ~ Normal(mu, tau^2 + sigma^2 / weight_j):
//! a common ability distribution with between-player variance tau^2 plus
//! sampling noise that shrinks with innings pitched. Season aggregates carry
//! no per-inning information, so sigma^2 is estimated jointly by marginal
//! maximum likelihood; identifiability comes from the spread of weights.

use crate::error::{Error, Result};
use crate::optim::{minimize, Bounds};

/// One observed value with a positive precision weight (innings pitched).
#[derive(Debug, Clone, PartialEq)]
pub struct NormalObservation {
    pub player_id: String,
    pub value: f64,
    pub weight: f64,
}

impl NormalObservation {
    pub fn new(player_id: impl Into<String>, value: f64, weight: f64) -> Self {
        assert!(weight > 0.0, "weight must be positive, got {weight}");
        assert!(value.is_finite(), "value must be finite, got {value}");
        NormalObservation {
            player_id: player_id.into(),
            value,
            weight,
        }
    }
}

/// Fitted hyperparameters of the normal random-effects model.
#[derive(Debug, Clone, Copy)]
pub struct NormalFit {
    pub mu: f64,
    /// Between-player variance; 0 means complete pooling.
    pub tau2: f64,
    /// Within-inning variance (noise variance is sigma2 / weight).
    pub sigma2: f64,
    pub converged: bool,
}

/// Marginal log likelihood of (mu, tau2, sigma2) under
/// value_j ~ Normal(mu, tau2 + sigma2 / weight_j).
pub fn marginal_log_likelihood(
    obs: &[NormalObservation],
    mu: f64,
    tau2: f64,
    sigma2: f64,
) -> f64 {
    assert!(tau2 >= 0.0 && sigma2 > 0.0);
    let mut ll = 0.0;
    for o in obs {
        let v = tau2 + sigma2 / o.weight;
        ll += -0.5 * ((2.0 * std::f64::consts::PI * v).ln() + (o.value - mu).powi(2) / v);
    }
    ll
}

/// Precision-weighted mean, the exact inner maximizer of the marginal
/// likelihood over mu at fixed variances.
fn profile_mu(obs: &[NormalObservation], tau2: f64, sigma2: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for o in obs {
        let w = 1.0 / (tau2 + sigma2 / o.weight);
        num += w * o.value;
        den += w;
    }
    num / den
}

// Variances below exp(LOG_VAR_FLOOR) are reported as exactly zero (tau2)
// or pinned (sigma2): the likelihood is flat there to double precision.
const LOG_VAR_FLOOR: f64 = -30.0;
const LOG_VAR_CEIL: f64 = 30.0;

/// Fit (mu, tau2, sigma2) by maximizing the marginal likelihood. The search
/// runs over (log tau2, log sigma2) with mu maximized exactly at each step;
/// starts come from a moment split of the observed variance. A tau2 at the
/// search floor is reported as exactly 0 (complete pooling) with
/// converged = true.
pub fn fit_normal_exchangeable(obs: &[NormalObservation]) -> Result<NormalFit> {
    if obs.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "fit_normal_exchangeable needs >= 3 observations, got {}",
            obs.len()
        )));
    }
    let n = obs.len() as f64;
    let mean = obs.iter().map(|o| o.value).sum::<f64>() / n;
    let var = obs
        .iter()
        .map(|o| (o.value - mean).powi(2))
        .sum::<f64>()
        / (n - 1.0);
    let mean_inv_w = obs.iter().map(|o| 1.0 / o.weight).sum::<f64>() / n;

    let bounds = Bounds {
        lower: [LOG_VAR_FLOOR, LOG_VAR_FLOOR],
        upper: [LOG_VAR_CEIL, LOG_VAR_CEIL],
    };
    let objective = |x: &[f64; 2]| {
        let tau2 = x[0].exp();
        let sigma2 = x[1].exp();
        let mu = profile_mu(obs, tau2, sigma2);
        -marginal_log_likelihood(obs, mu, tau2, sigma2)
    };

    // Moment split: the observed variance is tau2 + sigma2 * E[1/w]; start
    // half/half, then from each extreme attribution.
    let var = var.max(1e-12);
    let starts = [
        [(0.5 * var).ln(), (0.5 * var / mean_inv_w).ln()],
        [(0.9 * var).ln(), (0.1 * var / mean_inv_w).ln()],
        [(0.1 * var).ln(), (0.9 * var / mean_inv_w).ln()],
    ];
    let mut best: Option<(f64, [f64; 2], bool)> = None;
    for x0 in starts {
        let r = minimize(objective, x0, bounds, 1e-10, 5000);
        let better = match &best {
            None => true,
            Some((fval, _, _)) => r.fval < *fval,
        };
        if better {
            best = Some((r.fval, r.x, r.converged));
        }
    }
    let (_, x, converged) = best.expect("at least one start runs");

    let tau2 = if x[0] <= LOG_VAR_FLOOR + 1e-9 {
        0.0
    } else {
        x[0].exp()
    };
    let sigma2 = x[1].exp();
    let mu = profile_mu(obs, tau2.max(f64::MIN_POSITIVE), sigma2);
    Ok(NormalFit {
        mu,
        tau2,
        sigma2,
        converged,
    })
}

/// Posterior mean of a player's ability: precision-weighted average of the
/// observed value (precision weight/sigma2) and the population mean
/// (precision 1/tau2). Complete pooling (tau2 = 0) returns mu.
pub fn shrink_normal(value: f64, weight: f64, fit: &NormalFit) -> f64 {
    assert!(weight > 0.0, "weight must be positive, got {weight}");
    // Algebraically (value*w + mu*u)/(w + u) with w = weight/sigma2,
    // u = 1/tau2, rearranged to stay finite at tau2 = 0.
    let noise = fit.sigma2 / weight;
    (value * fit.tau2 + fit.mu * noise) / (fit.tau2 + noise)
}
