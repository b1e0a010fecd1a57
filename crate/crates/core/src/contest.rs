//! Season-to-season prediction contests, multi-season talent-curve history,
//! and per-player trajectory extraction.
//!
//! A contest trains on one season and predicts the next: the component
//! method fits one exchangeable model per component and composes them; the
//! single method fits one model to the raw measure (beta-binomial for BA and
//! OBP, normal for FIP). Both are scored by root-sum-squared error against
//! observed test-season rates, and the improvement I = S_I - S_C is positive
//! when the component method wins.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::betabin::{fit_exchangeable, FitOptions, RandomEffectsFit};
use crate::compose::{fip_ability, hit_probability, on_base_probability, PitchingComponents};
use crate::error::{Error, Result};
use crate::ingest::{
    derive_batting_components, derive_pitching_components, ComponentObservation,
    PlayerSeasonBatting, PlayerSeasonPitching,
};
use crate::normalmodel::{fit_normal_exchangeable, shrink_normal, NormalObservation};

/// Measures a contest can score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Measure {
    Ba,
    Obp,
    Fip,
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Measure::Ba => "BA",
            Measure::Obp => "OBP",
            Measure::Fip => "FIP",
        })
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Measure> {
        match s.to_ascii_uppercase().as_str() {
            "BA" => Ok(Measure::Ba),
            "OBP" => Ok(Measure::Obp),
            "FIP" => Ok(Measure::Fip),
            _ => Err(Error::Config(format!(
                "unknown measure `{s}` (expected BA, OBP, or FIP)"
            ))),
        }
    }
}

/// The four modeled components, in batting opportunity-chain order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Component {
    So,
    Hr,
    Hip,
    Bb,
}

impl Component {
    pub const ALL: [Component; 4] = [Component::So, Component::Hr, Component::Hip, Component::Bb];
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Component::So => "SO",
            Component::Hr => "HR",
            Component::Hip => "HIP",
            Component::Bb => "BB",
        })
    }
}

impl FromStr for Component {
    type Err = Error;

    fn from_str(s: &str) -> Result<Component> {
        match s.to_ascii_uppercase().as_str() {
            "SO" => Ok(Component::So),
            "HR" => Ok(Component::Hr),
            "HIP" => Ok(Component::Hip),
            "BB" => Ok(Component::Bb),
            _ => Err(Error::Config(format!(
                "unknown component `{s}` (expected SO, HR, HIP, or BB)"
            ))),
        }
    }
}

/// Which population a fit or chart describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Population {
    Batters,
    Pitchers,
}

impl fmt::Display for Population {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Population::Batters => "batters",
            Population::Pitchers => "pitchers",
        })
    }
}

impl FromStr for Population {
    type Err = Error;

    fn from_str(s: &str) -> Result<Population> {
        match s.to_ascii_lowercase().as_str() {
            "batters" => Ok(Population::Batters),
            "pitchers" => Ok(Population::Pitchers),
            _ => Err(Error::Config(format!(
                "unknown population `{s}` (expected batters or pitchers)"
            ))),
        }
    }
}

/// Season-total eligibility thresholds.
#[derive(Debug, Clone, Copy)]
pub struct Eligibility {
    pub min_ab: u64,
    pub min_bfp: u64,
}

impl Default for Eligibility {
    fn default() -> Self {
        Eligibility {
            min_ab: 100,
            min_bfp: 300,
        }
    }
}

/// Outcome of one train-season/test-season contest.
#[derive(Debug, Clone, Copy)]
pub struct ContestResult {
    pub train_year: i32,
    pub test_year: i32,
    pub measure: Measure,
    /// Root-sum-squared error of the component method.
    pub s_c: f64,
    /// Root-sum-squared error of the single exchangeable model.
    pub s_i: f64,
    /// S_I - S_C; positive when the component method predicts better.
    pub improvement: f64,
    pub n_players: usize,
}

/// One season's fitted talent curve for one component.
#[derive(Debug, Clone, Copy)]
pub struct HistoryPoint {
    pub year: i32,
    pub component: Component,
    pub population: Population,
    pub eta_hat: f64,
    pub k_hat: f64,
    pub sd_hat: f64,
}

/// History points plus the seasons that failed to fit, with reasons.
#[derive(Debug, Clone, Default)]
pub struct HistoryOutcome {
    pub points: Vec<HistoryPoint>,
    pub skipped: Vec<(i32, String)>,
}

/// One player-season-component standardized residual.
#[derive(Debug, Clone)]
pub struct TrajectoryPoint {
    pub player_id: String,
    pub year: i32,
    pub component: Component,
    pub raw_rate: f64,
    pub z: f64,
}

/// Train and test season rosters for a contest, already restricted to one
/// year each by the caller.
#[derive(Debug, Clone, Copy)]
pub enum SeasonPair<'a> {
    Batting {
        train: &'a [PlayerSeasonBatting],
        test: &'a [PlayerSeasonBatting],
    },
    Pitching {
        train: &'a [PlayerSeasonPitching],
        test: &'a [PlayerSeasonPitching],
    },
}

/// Multi-season rosters for history and trajectory extraction.
#[derive(Debug, Clone, Copy)]
pub enum SeasonData<'a> {
    Batting(&'a [PlayerSeasonBatting]),
    Pitching(&'a [PlayerSeasonPitching]),
}

/// Root-sum-squared prediction error sqrt(sum (outcome - prediction)^2).
pub fn rss_error(predictions: &[f64], outcomes: &[f64]) -> Result<f64> {
    if predictions.len() != outcomes.len() {
        return Err(Error::Domain(format!(
            "prediction/outcome length mismatch: {} vs {}",
            predictions.len(),
            outcomes.len()
        )));
    }
    if predictions.is_empty() {
        return Err(Error::Domain("rss_error needs at least one pair".to_string()));
    }
    Ok(predictions
        .iter()
        .zip(outcomes)
        .map(|(p, o)| (o - p) * (o - p))
        .sum::<f64>()
        .sqrt())
}

/// Constant-free observed FIP for a pitcher season; None when no outs were
/// recorded (the ratio is undefined).
pub fn observed_fip(s: &PlayerSeasonPitching) -> Option<f64> {
    if s.ipouts == 0 {
        return None;
    }
    let ip = s.ipouts as f64 / 3.0;
    Some((13.0 * s.hr as f64 + 3.0 * (s.bb + s.hbp) as f64 - 2.0 * s.so as f64) / ip)
}

fn shrink_map(
    obs: &[ComponentObservation],
    fit: &RandomEffectsFit,
) -> BTreeMap<String, f64> {
    obs.iter()
        .map(|o| (o.player_id.clone(), fit.shrink(o.successes, o.opportunities)))
        .collect()
}

fn batting_contest(
    measure: Measure,
    train: &[PlayerSeasonBatting],
    test: &[PlayerSeasonBatting],
    eligibility: Eligibility,
    options: FitOptions,
) -> Result<ContestResult> {
    let min_ab = eligibility.min_ab;
    let train_ids: BTreeSet<&str> = train
        .iter()
        .filter(|s| s.ab >= min_ab)
        .map(|s| s.player_id.as_str())
        .collect();
    let paired: Vec<&PlayerSeasonBatting> = test
        .iter()
        .filter(|s| s.ab >= min_ab && train_ids.contains(s.player_id.as_str()))
        .collect();
    if paired.is_empty() {
        return Err(Error::InsufficientData(
            "no players eligible in both seasons".to_string(),
        ));
    }
    let paired_ids: BTreeSet<&str> = paired.iter().map(|s| s.player_id.as_str()).collect();
    let train_paired: Vec<PlayerSeasonBatting> = train
        .iter()
        .filter(|s| paired_ids.contains(s.player_id.as_str()))
        .cloned()
        .collect();

    // Component method: one exchangeable fit per component on train data.
    let sets = derive_batting_components(&train_paired, min_ab)?;
    let so_fit = fit_exchangeable(&sets.so, options)?;
    let hr_fit = fit_exchangeable(&sets.hr, options)?;
    let hip_fit = fit_exchangeable(&sets.hip, options)?;
    let p_so = shrink_map(&sets.so, &so_fit);
    let p_hr = shrink_map(&sets.hr, &hr_fit);
    let p_hip = shrink_map(&sets.hip, &hip_fit);
    let p_bb = if measure == Measure::Obp {
        let bb_fit = fit_exchangeable(&sets.bb, options)?;
        Some(shrink_map(&sets.bb, &bb_fit))
    } else {
        None
    };

    // Single method: one exchangeable fit on the raw measure counts.
    let single_obs: Vec<ComponentObservation> = train_paired
        .iter()
        .map(|s| match measure {
            Measure::Ba => ComponentObservation::new(&s.player_id, s.h, s.ab),
            Measure::Obp => ComponentObservation::new(
                &s.player_id,
                s.h + s.bb + s.hbp,
                s.ab + s.bb + s.hbp,
            ),
            Measure::Fip => unreachable!("FIP routed to the pitching contest"),
        })
        .collect();
    let single_fit = fit_exchangeable(&single_obs, options)?;
    let p_single = shrink_map(&single_obs, &single_fit);

    let mut component_preds = Vec::with_capacity(paired.len());
    let mut single_preds = Vec::with_capacity(paired.len());
    let mut outcomes = Vec::with_capacity(paired.len());
    for s in &paired {
        let id = s.player_id.as_str();
        let p_h = hit_probability(p_so[id], p_hr[id], p_hip[id]);
        let (pred_c, outcome) = match measure {
            Measure::Ba => (p_h, s.h as f64 / s.ab as f64),
            Measure::Obp => (
                on_base_probability(p_bb.as_ref().unwrap()[id], p_h),
                (s.h + s.bb + s.hbp) as f64 / (s.ab + s.bb + s.hbp) as f64,
            ),
            Measure::Fip => unreachable!(),
        };
        component_preds.push(pred_c);
        single_preds.push(p_single[id]);
        outcomes.push(outcome);
    }

    let s_c = rss_error(&component_preds, &outcomes)?;
    let s_i = rss_error(&single_preds, &outcomes)?;
    Ok(ContestResult {
        train_year: paired_train_year(&train_paired),
        test_year: paired.first().map_or(0, |s| s.year),
        measure,
        s_c,
        s_i,
        improvement: s_i - s_c,
        n_players: paired.len(),
    })
}

fn paired_train_year(train: &[PlayerSeasonBatting]) -> i32 {
    train.first().map_or(0, |s| s.year)
}

fn pitching_contest(
    train: &[PlayerSeasonPitching],
    test: &[PlayerSeasonPitching],
    eligibility: Eligibility,
    options: FitOptions,
) -> Result<ContestResult> {
    let min_bfp = eligibility.min_bfp;
    // Observed FIP needs recorded outs on both sides, so IPouts > 0 joins
    // the eligibility rule for this contest.
    let eligible = |s: &&PlayerSeasonPitching| s.bfp >= min_bfp && s.ipouts > 0;
    let train_ids: BTreeSet<&str> = train
        .iter()
        .filter(eligible)
        .map(|s| s.player_id.as_str())
        .collect();
    let paired: Vec<&PlayerSeasonPitching> = test
        .iter()
        .filter(eligible)
        .filter(|s| train_ids.contains(s.player_id.as_str()))
        .collect();
    if paired.is_empty() {
        return Err(Error::InsufficientData(
            "no pitchers eligible in both seasons".to_string(),
        ));
    }
    let paired_ids: BTreeSet<&str> = paired.iter().map(|s| s.player_id.as_str()).collect();
    let train_paired: Vec<PlayerSeasonPitching> = train
        .iter()
        .filter(|s| paired_ids.contains(s.player_id.as_str()))
        .cloned()
        .collect();

    let sets = derive_pitching_components(&train_paired, min_bfp)?;
    let bb_fit = fit_exchangeable(&sets.bb, options)?;
    let so_fit = fit_exchangeable(&sets.so, options)?;
    let hr_fit = fit_exchangeable(&sets.hr, options)?;
    let hip_fit = fit_exchangeable(&sets.hip, options)?;
    let p_bb = shrink_map(&sets.bb, &bb_fit);
    let p_so = shrink_map(&sets.so, &so_fit);
    let p_hr = shrink_map(&sets.hr, &hr_fit);
    let p_hip = shrink_map(&sets.hip, &hip_fit);

    // Single method: normal exchangeable model on observed train FIP,
    // weighted by innings pitched.
    let normal_obs: Vec<NormalObservation> = train_paired
        .iter()
        .map(|s| {
            let fip = observed_fip(s).expect("eligibility guarantees IPouts > 0");
            NormalObservation::new(&s.player_id, fip, s.ipouts as f64 / 3.0)
        })
        .collect();
    let normal_fit = fit_normal_exchangeable(&normal_obs)?;
    let single_by_id: BTreeMap<String, f64> = normal_obs
        .iter()
        .map(|o| {
            (
                o.player_id.clone(),
                shrink_normal(o.value, o.weight, &normal_fit),
            )
        })
        .collect();

    let mut component_preds = Vec::with_capacity(paired.len());
    let mut single_preds = Vec::with_capacity(paired.len());
    let mut outcomes = Vec::with_capacity(paired.len());
    for s in &paired {
        let id = s.player_id.as_str();
        let c = PitchingComponents {
            p_bb: p_bb[id],
            p_so: p_so[id],
            p_hr: p_hr[id],
            p_hip: p_hip[id],
        };
        component_preds.push(fip_ability(&c)?);
        single_preds.push(single_by_id[id]);
        outcomes.push(observed_fip(s).expect("eligibility guarantees IPouts > 0"));
    }

    let s_c = rss_error(&component_preds, &outcomes)?;
    let s_i = rss_error(&single_preds, &outcomes)?;
    Ok(ContestResult {
        train_year: train_paired.first().map_or(0, |s| s.year),
        test_year: paired.first().map_or(0, |s| s.year),
        measure: Measure::Fip,
        s_c,
        s_i,
        improvement: s_i - s_c,
        n_players: paired.len(),
    })
}

/// Run one prediction contest. BA and OBP take batting data; FIP takes
/// pitching data. Players must clear the eligibility threshold in both
/// seasons; everyone else is excluded.
pub fn run_contest(
    measure: Measure,
    data: SeasonPair<'_>,
    eligibility: Eligibility,
    options: FitOptions,
) -> Result<ContestResult> {
    match (measure, data) {
        (Measure::Ba | Measure::Obp, SeasonPair::Batting { train, test }) => {
            batting_contest(measure, train, test, eligibility, options)
        }
        (Measure::Fip, SeasonPair::Pitching { train, test }) => {
            pitching_contest(train, test, eligibility, options)
        }
        (m, SeasonPair::Batting { .. }) => Err(Error::Config(format!(
            "measure {m} requires pitching data"
        ))),
        (m, SeasonPair::Pitching { .. }) => Err(Error::Config(format!(
            "measure {m} requires batting data"
        ))),
    }
}

fn batting_component_obs(
    seasons: &[PlayerSeasonBatting],
    component: Component,
    min_ab: u64,
) -> Result<Vec<ComponentObservation>> {
    let sets = derive_batting_components(seasons, min_ab)?;
    Ok(match component {
        Component::So => sets.so,
        Component::Hr => sets.hr,
        Component::Hip => sets.hip,
        Component::Bb => sets.bb,
    })
}

fn pitching_component_obs(
    seasons: &[PlayerSeasonPitching],
    component: Component,
    min_bfp: u64,
) -> Result<Vec<ComponentObservation>> {
    let sets = derive_pitching_components(seasons, min_bfp)?;
    Ok(match component {
        Component::So => sets.so,
        Component::Hr => sets.hr,
        Component::Hip => sets.hip,
        Component::Bb => sets.bb,
    })
}

/// Observations for one component and one season, honoring eligibility.
pub fn component_observations_for_year(
    data: SeasonData<'_>,
    year: i32,
    component: Component,
    eligibility: Eligibility,
) -> Result<Vec<ComponentObservation>> {
    match data {
        SeasonData::Batting(rows) => {
            let season: Vec<PlayerSeasonBatting> =
                rows.iter().filter(|s| s.year == year).cloned().collect();
            batting_component_obs(&season, component, eligibility.min_ab)
        }
        SeasonData::Pitching(rows) => {
            let season: Vec<PlayerSeasonPitching> =
                rows.iter().filter(|s| s.year == year).cloned().collect();
            pitching_component_obs(&season, component, eligibility.min_bfp)
        }
    }
}

fn years_present(data: SeasonData<'_>) -> BTreeSet<i32> {
    match data {
        SeasonData::Batting(rows) => rows.iter().map(|s| s.year).collect(),
        SeasonData::Pitching(rows) => rows.iter().map(|s| s.year).collect(),
    }
}

/// Fit the chosen component independently for every season present in the
/// data. Seasons whose fit fails are skipped and reported, not fatal.
pub fn history(
    data: SeasonData<'_>,
    component: Component,
    eligibility: Eligibility,
    options: FitOptions,
) -> HistoryOutcome {
    let population = match data {
        SeasonData::Batting(_) => Population::Batters,
        SeasonData::Pitching(_) => Population::Pitchers,
    };
    let mut outcome = HistoryOutcome::default();
    for year in years_present(data) {
        let fitted = component_observations_for_year(data, year, component, eligibility)
            .and_then(|obs| fit_exchangeable(&obs, options));
        match fitted {
            Ok(fit) => outcome.points.push(HistoryPoint {
                year,
                component,
                population,
                eta_hat: fit.eta,
                k_hat: fit.k,
                sd_hat: fit.talent_sd,
            }),
            Err(e) => outcome.skipped.push((year, e.to_string())),
        }
    }
    outcome
}

/// Standardized residuals for one player across seasons and components,
/// using the supplied per-(year, component) fits. Seasons where the player
/// misses eligibility are not covered; components with zero opportunities
/// are skipped within a covered season.
pub fn trajectory(
    player_id: &str,
    data: SeasonData<'_>,
    eligibility: Eligibility,
    fits: &BTreeMap<(i32, Component), RandomEffectsFit>,
) -> Result<Vec<TrajectoryPoint>> {
    let mut points = Vec::new();
    let mut seen = false;
    for year in years_present(data) {
        for component in Component::ALL {
            let obs = component_observations_for_year(data, year, component, eligibility)?;
            let Some(o) = obs.into_iter().find(|o| o.player_id == player_id) else {
                continue;
            };
            seen = true;
            if o.opportunities == 0 {
                continue;
            }
            let fit = fits.get(&(year, component)).ok_or_else(|| {
                Error::Config(format!("missing fit for year {year} component {component}"))
            })?;
            points.push(TrajectoryPoint {
                player_id: player_id.to_string(),
                year,
                component,
                raw_rate: o.rate(),
                z: fit.standardized_residual(o.successes, o.opportunities)?,
            });
        }
    }
    if !seen {
        return Err(Error::UnknownPlayer(player_id.to_string()));
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{batting_season, draw_batters, BattingTruth};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rss_error_cases() {
        assert_eq!(rss_error(&[0.2, 0.3], &[0.2, 0.3]).unwrap(), 0.0);
        let v = rss_error(&[0.25, 0.30], &[0.20, 0.32]).unwrap();
        assert!((v - 0.05385).abs() < 1e-5, "rss={v}");
        assert!((rss_error(&[0.4], &[0.1]).unwrap() - 0.3).abs() < 1e-15);
        assert!(rss_error(&[0.1], &[0.1, 0.2]).is_err());
        assert!(rss_error(&[], &[]).is_err());
    }

    #[test]
    fn measure_component_population_roundtrip() {
        for m in [Measure::Ba, Measure::Obp, Measure::Fip] {
            assert_eq!(m.to_string().parse::<Measure>().unwrap(), m);
        }
        for c in Component::ALL {
            assert_eq!(c.to_string().parse::<Component>().unwrap(), c);
        }
        for p in [Population::Batters, Population::Pitchers] {
            assert_eq!(p.to_string().parse::<Population>().unwrap(), p);
        }
        assert!("xyz".parse::<Measure>().is_err());
    }

    #[test]
    fn self_prediction_with_huge_samples_has_tiny_errors() {
        // Train = test with enormous at-bats: both methods converge to the
        // observed rates, so both scores collapse and I vanishes.
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let batters = draw_batters(&mut rng, 30, &BattingTruth::default());
        let season = batting_season(&mut rng, &batters, 2005, 200_000);
        let result = run_contest(
            Measure::Ba,
            SeasonPair::Batting {
                train: &season,
                test: &season,
            },
            Eligibility::default(),
            crate::betabin::FitOptions::default(),
        )
        .unwrap();
        assert!(result.s_c < 5e-3, "S_C={}", result.s_c);
        assert!(result.s_i < 5e-3, "S_I={}", result.s_i);
        assert!(result.improvement.abs() < 1e-2, "I={}", result.improvement);
        assert_eq!(result.n_players, 30);
    }

    #[test]
    fn contest_runs_on_two_synthetic_seasons() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let batters = draw_batters(&mut rng, 150, &BattingTruth::default());
        let train = batting_season(&mut rng, &batters, 2000, 500);
        let test = batting_season(&mut rng, &batters, 2001, 500);
        for measure in [Measure::Ba, Measure::Obp] {
            let r = run_contest(
                measure,
                SeasonPair::Batting {
                    train: &train,
                    test: &test,
                },
                Eligibility::default(),
                crate::betabin::FitOptions::default(),
            )
            .unwrap();
            assert_eq!(r.n_players, 150);
            assert!(r.s_c > 0.0 && r.s_i > 0.0);
            assert!((r.improvement - (r.s_i - r.s_c)).abs() < 1e-15);
            assert_eq!((r.train_year, r.test_year), (2000, 2001));
        }
    }

    #[test]
    fn contest_requires_intersection() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let train_batters = draw_batters(&mut rng, 20, &BattingTruth::default());
        let train = batting_season(&mut rng, &train_batters, 2000, 400);
        // Disjoint ids in the test season.
        let mut test_batters = draw_batters(&mut rng, 20, &BattingTruth::default());
        for (i, b) in test_batters.iter_mut().enumerate() {
            b.player_id = format!("other{i}");
        }
        let test = batting_season(&mut rng, &test_batters, 2001, 400);
        let err = run_contest(
            Measure::Ba,
            SeasonPair::Batting {
                train: &train,
                test: &test,
            },
            Eligibility::default(),
            crate::betabin::FitOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::InsufficientData(_)), "got {err:?}");
    }

    #[test]
    fn measure_data_mismatch_is_config_error() {
        let train: Vec<PlayerSeasonBatting> = Vec::new();
        let test: Vec<PlayerSeasonBatting> = Vec::new();
        let err = run_contest(
            Measure::Fip,
            SeasonPair::Batting {
                train: &train,
                test: &test,
            },
            Eligibility::default(),
            crate::betabin::FitOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn history_matches_direct_fit_and_sorts_years() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let batters = draw_batters(&mut rng, 120, &BattingTruth::default());
        let mut rows = batting_season(&mut rng, &batters, 2002, 450);
        rows.extend(batting_season(&mut rng, &batters, 2001, 450));
        let eligibility = Eligibility::default();
        let options = crate::betabin::FitOptions::default();
        let outcome = history(SeasonData::Batting(&rows), Component::So, eligibility, options);
        assert!(outcome.skipped.is_empty());
        assert_eq!(
            outcome.points.iter().map(|p| p.year).collect::<Vec<_>>(),
            vec![2001, 2002]
        );
        for p in &outcome.points {
            assert_eq!(p.population, Population::Batters);
            let sd = (p.eta_hat * (1.0 - p.eta_hat) / (p.k_hat + 1.0)).sqrt();
            assert!((p.sd_hat - sd).abs() < 1e-12);
        }
        // Composition consistency against a direct per-season fit.
        let obs = component_observations_for_year(
            SeasonData::Batting(&rows),
            2001,
            Component::So,
            eligibility,
        )
        .unwrap();
        let direct = fit_exchangeable(&obs, options).unwrap();
        let point = &outcome.points[0];
        assert!((point.eta_hat - direct.eta).abs() < 1e-12);
        assert!((point.k_hat - direct.k).abs() < 1e-9);
    }

    #[test]
    fn history_reports_failed_seasons() {
        // A one-player season cannot be fit and must be skipped, not fatal.
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let batters = draw_batters(&mut rng, 80, &BattingTruth::default());
        let mut rows = batting_season(&mut rng, &batters, 2003, 450);
        let lone = draw_batters(&mut rng, 1, &BattingTruth::default());
        rows.extend(batting_season(&mut rng, &lone, 2004, 450));
        let outcome = history(
            SeasonData::Batting(&rows),
            Component::So,
            Eligibility::default(),
            crate::betabin::FitOptions::default(),
        );
        assert_eq!(outcome.points.len(), 1);
        assert_eq!(outcome.skipped.len(), 1);
        assert_eq!(outcome.skipped[0].0, 2004);
    }

    #[test]
    fn trajectory_covers_player_seasons() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let batters = draw_batters(&mut rng, 100, &BattingTruth::default());
        let mut rows = batting_season(&mut rng, &batters, 2001, 450);
        rows.extend(batting_season(&mut rng, &batters, 2002, 450));
        let eligibility = Eligibility::default();
        let options = crate::betabin::FitOptions::default();
        let mut fits = BTreeMap::new();
        for year in [2001, 2002] {
            for component in Component::ALL {
                let obs = component_observations_for_year(
                    SeasonData::Batting(&rows),
                    year,
                    component,
                    eligibility,
                )
                .unwrap();
                fits.insert((year, component), fit_exchangeable(&obs, options).unwrap());
            }
        }
        let id = batters[0].player_id.clone();
        let points = trajectory(&id, SeasonData::Batting(&rows), eligibility, &fits).unwrap();
        assert_eq!(points.len(), 8, "two seasons x four components");
        for p in &points {
            assert!(p.raw_rate >= 0.0 && p.raw_rate <= 1.0);
            assert!(p.z.is_finite());
            let fit = &fits[&(p.year, p.component)];
            let sign_raw = p.raw_rate - fit.eta;
            assert_eq!(p.z > 0.0, sign_raw > 0.0, "z and rate deviation agree in sign");
        }
    }

    #[test]
    fn trajectory_unknown_player_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let batters = draw_batters(&mut rng, 30, &BattingTruth::default());
        let rows = batting_season(&mut rng, &batters, 2001, 450);
        let fits = BTreeMap::new();
        let err = trajectory(
            "nobody99",
            SeasonData::Batting(&rows),
            Eligibility::default(),
            &fits,
        )
        .unwrap_err();
        assert!(matches!(err, Error::UnknownPlayer(_)));
    }

    #[test]
    fn trajectory_missing_fit_is_config_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let batters = draw_batters(&mut rng, 30, &BattingTruth::default());
        let rows = batting_season(&mut rng, &batters, 2001, 450);
        let fits = BTreeMap::new();
        let err = trajectory(
            &batters[0].player_id,
            SeasonData::Batting(&rows),
            Eligibility::default(),
            &fits,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Config(_)), "got {err:?}");
    }
}
