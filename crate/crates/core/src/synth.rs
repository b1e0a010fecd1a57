//! Seeded synthetic data generators and the Monte-Carlo contest harness.
//!
//! Abilities are drawn once per player from the beta talent curves, then
//! seasons are generated by walking the same sequential decomposition the
//! models assume: walk or not, strikeout or not, home run or not, hit in
//! play or out. Two seasons generated from one set of abilities share the
//! players' true talents, which is exactly the situation a prediction
//! contest exercises.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Binomial, Distribution};

use crate::betabin::FitOptions;
use crate::contest::{run_contest, ContestResult, Eligibility, Measure, SeasonPair};
use crate::error::{Error, Result};
use crate::ingest::{ComponentObservation, PlayerSeasonBatting, PlayerSeasonPitching};

/// (eta, K) pairs for the four batting talent curves.
#[derive(Debug, Clone, Copy)]
pub struct BattingTruth {
    pub so: (f64, f64),
    pub hr: (f64, f64),
    pub hip: (f64, f64),
    pub bb: (f64, f64),
}

impl Default for BattingTruth {
    fn default() -> Self {
        // Magnitudes chosen to look like modern full-time batters.
        BattingTruth {
            so: (0.203, 40.6),
            hr: (0.0369, 65.7),
            hip: (0.303, 418.1),
            bb: (0.09, 80.0),
        }
    }
}

/// (eta, K) pairs for the four pitching talent curves.
#[derive(Debug, Clone, Copy)]
pub struct PitchingTruth {
    pub bb: (f64, f64),
    pub so: (f64, f64),
    pub hr: (f64, f64),
    pub hip: (f64, f64),
}

impl Default for PitchingTruth {
    fn default() -> Self {
        PitchingTruth {
            bb: (0.085, 90.0),
            so: (0.18, 55.0),
            hr: (0.028, 140.0),
            hip: (0.30, 380.0),
        }
    }
}

/// One batter's true component probabilities.
#[derive(Debug, Clone)]
pub struct SyntheticBatter {
    pub player_id: String,
    pub p_so: f64,
    pub p_hr: f64,
    pub p_hip: f64,
    pub p_bb: f64,
}

/// One pitcher's true component probabilities.
#[derive(Debug, Clone)]
pub struct SyntheticPitcher {
    pub player_id: String,
    pub p_bb: f64,
    pub p_so: f64,
    pub p_hr: f64,
    pub p_hip: f64,
}

fn draw_beta<R: Rng>(rng: &mut R, eta: f64, k: f64) -> f64 {
    let dist = Beta::new(k * eta, k * (1.0 - eta)).expect("valid beta shapes");
    // Guard against endpoint draws, which would make later binomials
    // degenerate; the open interval is the model's support anyway.
    dist.sample(rng).clamp(1e-9, 1.0 - 1e-9)
}

fn draw_binomial<R: Rng>(rng: &mut R, n: u64, p: f64) -> u64 {
    if n == 0 {
        return 0;
    }
    Binomial::new(n, p).expect("valid binomial").sample(rng)
}

/// Draw `n_players` batters from the talent curves.
pub fn draw_batters<R: Rng>(rng: &mut R, n_players: usize, truth: &BattingTruth) -> Vec<SyntheticBatter> {
    (0..n_players)
        .map(|i| SyntheticBatter {
            player_id: format!("bat{i:04}"),
            p_so: draw_beta(rng, truth.so.0, truth.so.1),
            p_hr: draw_beta(rng, truth.hr.0, truth.hr.1),
            p_hip: draw_beta(rng, truth.hip.0, truth.hip.1),
            p_bb: draw_beta(rng, truth.bb.0, truth.bb.1),
        })
        .collect()
}

/// Draw `n_players` pitchers from the talent curves.
pub fn draw_pitchers<R: Rng>(
    rng: &mut R,
    n_players: usize,
    truth: &PitchingTruth,
) -> Vec<SyntheticPitcher> {
    (0..n_players)
        .map(|i| SyntheticPitcher {
            player_id: format!("pit{i:04}"),
            p_bb: draw_beta(rng, truth.bb.0, truth.bb.1),
            p_so: draw_beta(rng, truth.so.0, truth.so.1),
            p_hr: draw_beta(rng, truth.hr.0, truth.hr.1),
            p_hip: draw_beta(rng, truth.hip.0, truth.hip.1),
        })
        .collect()
}

/// Generate one batting season: each batter gets `at_bats` at-bats walked
/// through the sequential decomposition, plus walks accumulated at rate
/// p_bb per plate appearance until the at-bats are used up.
pub fn batting_season<R: Rng>(
    rng: &mut R,
    batters: &[SyntheticBatter],
    year: i32,
    at_bats: u64,
) -> Vec<PlayerSeasonBatting> {
    batters
        .iter()
        .map(|b| {
            let so = draw_binomial(rng, at_bats, b.p_so);
            let hr = draw_binomial(rng, at_bats - so, b.p_hr);
            let hip = draw_binomial(rng, at_bats - so - hr, b.p_hip);
            // Walk count before the at_bats-th non-walk plate appearance.
            let mut bb = 0u64;
            let mut abs_seen = 0u64;
            while abs_seen < at_bats {
                if rng.gen::<f64>() < b.p_bb {
                    bb += 1;
                } else {
                    abs_seen += 1;
                }
            }
            PlayerSeasonBatting {
                player_id: b.player_id.clone(),
                year,
                ab: at_bats,
                h: hr + hip,
                hr,
                so,
                bb,
                hbp: 0,
                sf: 0,
                sh: 0,
            }
        })
        .collect()
}

/// Generate one pitching season over `bfp` batters faced per pitcher.
/// Outs are strikeouts plus balls in play that stayed hits-free, so
/// IPouts is consistent with the component counts.
pub fn pitching_season<R: Rng>(
    rng: &mut R,
    pitchers: &[SyntheticPitcher],
    year: i32,
    bfp: u64,
) -> Vec<PlayerSeasonPitching> {
    pitchers
        .iter()
        .map(|p| {
            let bb = draw_binomial(rng, bfp, p.p_bb);
            let so = draw_binomial(rng, bfp - bb, p.p_so);
            let hr = draw_binomial(rng, bfp - bb - so, p.p_hr);
            let hip = draw_binomial(rng, bfp - bb - so - hr, p.p_hip);
            let in_play_outs = bfp - bb - so - hr - hip;
            PlayerSeasonPitching {
                player_id: p.player_id.clone(),
                year,
                bfp,
                ipouts: so + in_play_outs,
                h: hr + hip,
                hr,
                so,
                bb,
                hbp: 0,
            }
        })
        .collect()
}

/// Single-component observations with known truth: abilities from
/// Beta(K*eta, K*(1-eta)), opportunities uniform in `n_range`, successes
/// binomial.
pub fn synthetic_component_observations<R: Rng>(
    rng: &mut R,
    n_players: usize,
    n_range: (u64, u64),
    eta: f64,
    k: f64,
) -> Vec<ComponentObservation> {
    (0..n_players)
        .map(|i| {
            let p = draw_beta(rng, eta, k);
            let n = rng.gen_range(n_range.0..=n_range.1);
            ComponentObservation::new(format!("syn{i:04}"), draw_binomial(rng, n, p), n)
        })
        .collect()
}

/// Settings for the Monte-Carlo contest harness.
#[derive(Debug, Clone, Copy)]
pub struct SimulationSpec {
    pub measure: Measure,
    pub replications: usize,
    pub n_players: usize,
    /// At-bats per batter or batters faced per pitcher, per season.
    pub opportunities: u64,
    pub seed: u64,
    pub eligibility: Eligibility,
    pub fit: FitOptions,
}

impl Default for SimulationSpec {
    fn default() -> Self {
        SimulationSpec {
            measure: Measure::Ba,
            replications: 50,
            n_players: 400,
            opportunities: 500,
            seed: 0,
            eligibility: Eligibility::default(),
            fit: FitOptions::default(),
        }
    }
}

/// Replication results plus the fraction with positive improvement.
#[derive(Debug, Clone)]
pub struct SimulationOutcome {
    pub results: Vec<ContestResult>,
    pub positive_fraction: f64,
}

/// Run seeded two-season contests on data generated from the model's own
/// truth. Each replication draws fresh abilities, generates a train and a
/// test season from them, and scores component vs. single predictions.
pub fn run_simulation(spec: &SimulationSpec) -> Result<SimulationOutcome> {
    if spec.replications == 0 {
        return Err(Error::Config("replications must be at least 1".to_string()));
    }
    let threshold = match spec.measure {
        Measure::Ba | Measure::Obp => spec.eligibility.min_ab,
        Measure::Fip => spec.eligibility.min_bfp,
    };
    if spec.opportunities < threshold {
        return Err(Error::Config(format!(
            "opportunities {} fall below the eligibility threshold {threshold}; every synthetic player would be excluded",
            spec.opportunities
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut results = Vec::with_capacity(spec.replications);
    let mut positive = 0usize;
    for _ in 0..spec.replications {
        let result = match spec.measure {
            Measure::Ba | Measure::Obp => {
                let batters = draw_batters(&mut rng, spec.n_players, &BattingTruth::default());
                let train = batting_season(&mut rng, &batters, 0, spec.opportunities);
                let test = batting_season(&mut rng, &batters, 1, spec.opportunities);
                run_contest(
                    spec.measure,
                    SeasonPair::Batting {
                        train: &train,
                        test: &test,
                    },
                    spec.eligibility,
                    spec.fit,
                )?
            }
            Measure::Fip => {
                let pitchers = draw_pitchers(&mut rng, spec.n_players, &PitchingTruth::default());
                let train = pitching_season(&mut rng, &pitchers, 0, spec.opportunities);
                let test = pitching_season(&mut rng, &pitchers, 1, spec.opportunities);
                run_contest(
                    Measure::Fip,
                    SeasonPair::Pitching {
                        train: &train,
                        test: &test,
                    },
                    spec.eligibility,
                    spec.fit,
                )?
            }
        };
        if result.improvement > 0.0 {
            positive += 1;
        }
        results.push(result);
    }
    Ok(SimulationOutcome {
        positive_fraction: positive as f64 / spec.replications as f64,
        results,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{aggregate_stints, RawBattingRow};

    #[test]
    fn batting_season_satisfies_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let batters = draw_batters(&mut rng, 50, &BattingTruth::default());
        let season = batting_season(&mut rng, &batters, 2000, 500);
        for s in &season {
            assert!(s.h <= s.ab);
            assert!(s.hr <= s.h);
            assert!(s.so + s.h <= s.ab);
        }
        // The invariants the aggregator enforces must hold by construction.
        let rows: Vec<RawBattingRow> = season
            .iter()
            .map(|s| RawBattingRow {
                player_id: s.player_id.clone(),
                year: s.year,
                stint: 1,
                ab: s.ab,
                h: s.h,
                hr: s.hr,
                so: s.so,
                bb: s.bb,
                hbp: s.hbp,
                sf: s.sf,
                sh: s.sh,
            })
            .collect();
        assert!(aggregate_stints(&rows).is_ok());
    }

    #[test]
    fn pitching_season_satisfies_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pitchers = draw_pitchers(&mut rng, 50, &PitchingTruth::default());
        let season = pitching_season(&mut rng, &pitchers, 2000, 900);
        for s in &season {
            assert!(s.hr <= s.h);
            assert!(s.so <= s.ipouts);
            assert!(s.bb + s.so + s.h <= s.bfp);
            assert_eq!(s.ipouts + s.h + s.bb + s.hbp, s.bfp);
        }
    }

    #[test]
    fn generation_is_seed_deterministic() {
        let gen = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let batters = draw_batters(&mut rng, 20, &BattingTruth::default());
            batting_season(&mut rng, &batters, 2000, 300)
        };
        assert_eq!(gen(42), gen(42));
        assert_ne!(gen(42), gen(43));
    }

    #[test]
    fn component_observation_generator_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let obs = synthetic_component_observations(&mut rng, 100, (100, 600), 0.203, 40.6);
        assert_eq!(obs.len(), 100);
        for o in &obs {
            assert!(o.opportunities >= 100 && o.opportunities <= 600);
            assert!(o.successes <= o.opportunities);
        }
        // Pooled rate should land near the talent-curve mean.
        let pooled: f64 = obs.iter().map(|o| o.successes).sum::<u64>() as f64
            / obs.iter().map(|o| o.opportunities).sum::<u64>() as f64;
        assert!((pooled - 0.203).abs() < 0.03, "pooled={pooled}");
    }

    #[test]
    fn simulation_runs_and_counts_signs() {
        let spec = SimulationSpec {
            replications: 2,
            n_players: 120,
            opportunities: 400,
            ..SimulationSpec::default()
        };
        let outcome = run_simulation(&spec).unwrap();
        assert_eq!(outcome.results.len(), 2);
        for r in &outcome.results {
            assert!((r.improvement - (r.s_i - r.s_c)).abs() < 1e-15);
            assert_eq!(r.n_players, 120);
        }
        let hand_count = outcome
            .results
            .iter()
            .filter(|r| r.improvement > 0.0)
            .count() as f64
            / 2.0;
        assert_eq!(outcome.positive_fraction, hand_count);
    }

    #[test]
    fn simulation_rejects_degenerate_settings() {
        let spec = SimulationSpec {
            replications: 0,
            ..SimulationSpec::default()
        };
        assert!(run_simulation(&spec).is_err());
        let spec = SimulationSpec {
            opportunities: 50,
            ..SimulationSpec::default()
        };
        assert!(run_simulation(&spec).is_err());
    }
}
