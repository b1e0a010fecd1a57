//! Composition formulas: component probabilities to batting average,
//! on-base probability, and FIP ability.
//!
//! An at-bat decomposes sequentially: strikeout or not; if not, home run or
//! not; if not, hit in play or out. Hit probability is therefore
//! (1 - p_SO) * (p_HR + (1 - p_HR) * p_HIP), and on-base probability adds
//! the walk step in front. FIP ability is the corresponding plug-in form of
//! the counts formula (13 HR + 3 (BB+HBP) - 2 SO)/IP with the league
//! constant left out.

use crate::error::{Error, Result};

/// Shrunken batting component probabilities. `p_bb` is only needed for
/// on-base composition, not batting average.
#[derive(Debug, Clone, Copy)]
pub struct BattingComponents {
    pub p_so: f64,
    pub p_hr: f64,
    pub p_hip: f64,
    pub p_bb: Option<f64>,
}

/// Shrunken pitching component probabilities, in opportunity-chain order.
#[derive(Debug, Clone, Copy)]
pub struct PitchingComponents {
    pub p_bb: f64,
    pub p_so: f64,
    pub p_hr: f64,
    pub p_hip: f64,
}

/// Innings and counts implied by pitching components at a given number of
/// batters faced. Fractional values are expected; these are model
/// quantities, not observed integers.
#[derive(Debug, Clone, Copy)]
pub struct FipCounts {
    pub hr: f64,
    pub bb_hbp: f64,
    pub so: f64,
    pub ip: f64,
}

fn assert_probability(name: &str, p: f64) {
    assert!(
        (0.0..=1.0).contains(&p),
        "{name} must be in [0,1], got {p}"
    );
}

/// Probability an at-bat yields a hit:
/// (1 - p_SO) * (p_HR + (1 - p_HR) * p_HIP).
pub fn hit_probability(p_so: f64, p_hr: f64, p_hip: f64) -> f64 {
    assert_probability("p_so", p_so);
    assert_probability("p_hr", p_hr);
    assert_probability("p_hip", p_hip);
    (1.0 - p_so) * (p_hr + (1.0 - p_hr) * p_hip)
}

/// Probability of reaching base: p_BB + (1 - p_BB) * p_H.
pub fn on_base_probability(p_bb: f64, p_h: f64) -> f64 {
    assert_probability("p_bb", p_bb);
    assert_probability("p_h", p_h);
    p_bb + (1.0 - p_bb) * p_h
}

/// Constant-free FIP ability implied by component probabilities:
/// (39 (1-p_BB)(1-p_SO) p_HR + 9 p_BB - 6 (1-p_BB) p_SO)
///   / ((1-p_BB)(p_SO + (1-p_SO)(1-p_HR)(1-p_HIP))).
/// May be negative for strikeout-heavy, walk-free profiles.
pub fn fip_ability(c: &PitchingComponents) -> Result<f64> {
    fip_ability_with_constant(c, 0.0)
}

/// `fip_ability` plus an additive league-calibration constant.
pub fn fip_ability_with_constant(c: &PitchingComponents, constant: f64) -> Result<f64> {
    assert_probability("p_bb", c.p_bb);
    assert_probability("p_so", c.p_so);
    assert_probability("p_hr", c.p_hr);
    assert_probability("p_hip", c.p_hip);
    let not_bb = 1.0 - c.p_bb;
    let numerator =
        39.0 * not_bb * (1.0 - c.p_so) * c.p_hr + 9.0 * c.p_bb - 6.0 * not_bb * c.p_so;
    let denominator =
        not_bb * (c.p_so + (1.0 - c.p_so) * (1.0 - c.p_hr) * (1.0 - c.p_hip));
    if denominator <= 0.0 {
        return Err(Error::DegeneratePitcher(format!(
            "FIP denominator {denominator} is not positive (p_bb={}, p_so={}, p_hr={}, p_hip={})",
            c.p_bb, c.p_so, c.p_hr, c.p_hip
        )));
    }
    Ok(numerator / denominator + constant)
}

/// Constant-free FIP from counts: (13 HR + 3 (BB+HBP) - 2 SO) / IP.
/// Counts are real-valued so model-implied fractional counts are accepted.
pub fn fip_from_counts(hr: f64, bb_hbp: f64, so: f64, ip: f64) -> Result<f64> {
    if !(ip > 0.0) {
        return Err(Error::Domain(format!("IP must be positive, got {ip}")));
    }
    Ok((13.0 * hr + 3.0 * bb_hbp - 2.0 * so) / ip)
}

/// Counts implied by pitching components over `bfp` batters faced. Walks
/// come off the top; strikeouts, home runs, and balls in play follow in
/// chain order; innings collect one third of each out, where outs are
/// strikeouts plus balls in play that are not hits.
pub fn fip_counts_from_components(c: &PitchingComponents, bfp: f64) -> FipCounts {
    assert!(bfp > 0.0, "bfp must be positive, got {bfp}");
    let not_bb = 1.0 - c.p_bb;
    let not_so = 1.0 - c.p_so;
    let bb_hbp = bfp * c.p_bb;
    let so = bfp * not_bb * c.p_so;
    let hr = bfp * not_bb * not_so * c.p_hr;
    let ip = bfp / 3.0
        * not_bb
        * (c.p_so + not_so * (1.0 - c.p_hr) * (1.0 - c.p_hip));
    FipCounts { hr, bb_hbp, so, ip }
}
