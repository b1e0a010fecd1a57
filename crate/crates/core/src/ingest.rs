//! Lahman-style CSV ingestion: parsing, stint aggregation, eligibility
//! filtering, and derivation of per-component (successes, opportunities)
//! observations.
//!
//! Lahman stores one row per stint (a player traded mid-season has several
//! rows per year), so aggregation to player-season totals happens before any
//! filtering: eligibility is a season-total property.

use std::collections::BTreeMap;
use std::io::Read;

use crate::error::{Error, Result};

/// One data line of a Batting.csv file, header-resolved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawBattingRow {
    pub player_id: String,
    pub year: i32,
    pub stint: u32,
    pub ab: u64,
    pub h: u64,
    pub hr: u64,
    pub so: u64,
    pub bb: u64,
    pub hbp: u64,
    pub sf: u64,
    pub sh: u64,
}

/// One data line of a Pitching.csv file, header-resolved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawPitchingRow {
    pub player_id: String,
    pub year: i32,
    pub stint: u32,
    pub bfp: u64,
    pub ipouts: u64,
    pub h: u64,
    pub hr: u64,
    pub so: u64,
    pub bb: u64,
    pub hbp: u64,
}

/// Batting totals for one player-season (stints already summed).
///
/// Invariants checked at aggregation time: H <= AB, HR <= H, SO + H <= AB
/// (a strikeout is never a hit, and both are at-bat outcomes).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlayerSeasonBatting {
    pub player_id: String,
    pub year: i32,
    pub ab: u64,
    pub h: u64,
    pub hr: u64,
    pub so: u64,
    pub bb: u64,
    pub hbp: u64,
    pub sf: u64,
    pub sh: u64,
}

/// Pitching totals for one player-season (stints already summed).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlayerSeasonPitching {
    pub player_id: String,
    pub year: i32,
    pub bfp: u64,
    pub ipouts: u64,
    pub h: u64,
    pub hr: u64,
    pub so: u64,
    pub bb: u64,
    pub hbp: u64,
}

/// A single binomial observation: `successes` out of `opportunities`.
///
/// Zero-opportunity observations are legal here; the model layer skips them
/// in the likelihood but still produces a prior-mean estimate for the player.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentObservation {
    pub player_id: String,
    pub successes: u64,
    pub opportunities: u64,
}

impl ComponentObservation {
    pub fn new(player_id: impl Into<String>, successes: u64, opportunities: u64) -> Self {
        let obs = ComponentObservation {
            player_id: player_id.into(),
            successes,
            opportunities,
        };
        assert!(
            obs.successes <= obs.opportunities,
            "successes {} exceed opportunities {} for {}",
            obs.successes,
            obs.opportunities,
            obs.player_id
        );
        obs
    }

    /// Raw rate y/n; zero-opportunity observations report 0.
    pub fn rate(&self) -> f64 {
        if self.opportunities == 0 {
            0.0
        } else {
            self.successes as f64 / self.opportunities as f64
        }
    }
}

/// The four batting component observation lists, one entry per eligible
/// player in each, in a shared deterministic player order.
#[derive(Debug, Clone, Default)]
pub struct BattingComponentSets {
    pub so: Vec<ComponentObservation>,
    pub hr: Vec<ComponentObservation>,
    pub hip: Vec<ComponentObservation>,
    pub bb: Vec<ComponentObservation>,
}

/// The four pitching component observation lists.
#[derive(Debug, Clone, Default)]
pub struct PitchingComponentSets {
    pub bb: Vec<ComponentObservation>,
    pub so: Vec<ComponentObservation>,
    pub hr: Vec<ComponentObservation>,
    pub hip: Vec<ComponentObservation>,
}

struct ColumnIndex {
    idx: Vec<usize>,
}

impl ColumnIndex {
    fn resolve(headers: &csv::StringRecord, names: &[&str]) -> Result<ColumnIndex> {
        let mut idx = Vec::with_capacity(names.len());
        for name in names {
            let pos = headers
                .iter()
                .position(|h| h.trim() == *name)
                .ok_or_else(|| Error::MissingColumn((*name).to_string()))?;
            idx.push(pos);
        }
        Ok(ColumnIndex { idx })
    }

    fn get<'r>(&self, record: &'r csv::StringRecord, slot: usize) -> &'r str {
        record.get(self.idx[slot]).unwrap_or("")
    }
}

fn parse_count(field: &str, line: u64, column: &str) -> Result<u64> {
    let t = field.trim();
    if t.is_empty() {
        // Empty count fields are common in old seasons (HBP, SF, SH were not
        // recorded); read as 0.
        return Ok(0);
    }
    t.parse::<u64>().map_err(|_| Error::InvalidValue {
        line,
        column: column.to_string(),
        value: field.to_string(),
    })
}

fn parse_year(field: &str, line: u64) -> Result<i32> {
    field.trim().parse::<i32>().map_err(|_| Error::InvalidValue {
        line,
        column: "yearID".to_string(),
        value: field.to_string(),
    })
}

const BATTING_COLUMNS: [&str; 11] = [
    "playerID", "yearID", "stint", "AB", "H", "HR", "SO", "BB", "HBP", "SF", "SH",
];

/// Parse a Batting.csv byte stream into raw rows. Column order is
/// header-driven; extra columns are ignored; empty count fields read as 0.
pub fn parse_batting_csv<R: Read>(source: R) -> Result<Vec<RawBattingRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(source);
    let cols = ColumnIndex::resolve(reader.headers()?, &BATTING_COLUMNS)?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        rows.push(RawBattingRow {
            player_id: cols.get(&record, 0).trim().to_string(),
            year: parse_year(cols.get(&record, 1), line)?,
            stint: parse_count(cols.get(&record, 2), line, "stint")? as u32,
            ab: parse_count(cols.get(&record, 3), line, "AB")?,
            h: parse_count(cols.get(&record, 4), line, "H")?,
            hr: parse_count(cols.get(&record, 5), line, "HR")?,
            so: parse_count(cols.get(&record, 6), line, "SO")?,
            bb: parse_count(cols.get(&record, 7), line, "BB")?,
            hbp: parse_count(cols.get(&record, 8), line, "HBP")?,
            sf: parse_count(cols.get(&record, 9), line, "SF")?,
            sh: parse_count(cols.get(&record, 10), line, "SH")?,
        });
    }
    Ok(rows)
}

const PITCHING_COLUMNS: [&str; 10] = [
    "playerID", "yearID", "stint", "BFP", "IPouts", "H", "HR", "SO", "BB", "HBP",
];

/// Parse a Pitching.csv byte stream into raw rows.
pub fn parse_pitching_csv<R: Read>(source: R) -> Result<Vec<RawPitchingRow>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(source);
    let cols = ColumnIndex::resolve(reader.headers()?, &PITCHING_COLUMNS)?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        rows.push(RawPitchingRow {
            player_id: cols.get(&record, 0).trim().to_string(),
            year: parse_year(cols.get(&record, 1), line)?,
            stint: parse_count(cols.get(&record, 2), line, "stint")? as u32,
            bfp: parse_count(cols.get(&record, 3), line, "BFP")?,
            ipouts: parse_count(cols.get(&record, 4), line, "IPouts")?,
            h: parse_count(cols.get(&record, 5), line, "H")?,
            hr: parse_count(cols.get(&record, 6), line, "HR")?,
            so: parse_count(cols.get(&record, 7), line, "SO")?,
            bb: parse_count(cols.get(&record, 8), line, "BB")?,
            hbp: parse_count(cols.get(&record, 9), line, "HBP")?,
        });
    }
    Ok(rows)
}

/// Sum batting stints within (player, year) and check season invariants.
/// Output is sorted by (player_id, year); input order is irrelevant.
pub fn aggregate_stints(rows: &[RawBattingRow]) -> Result<Vec<PlayerSeasonBatting>> {
    let mut map: BTreeMap<(String, i32), PlayerSeasonBatting> = BTreeMap::new();
    for r in rows {
        let entry = map
            .entry((r.player_id.clone(), r.year))
            .or_insert_with(|| PlayerSeasonBatting {
                player_id: r.player_id.clone(),
                year: r.year,
                ab: 0,
                h: 0,
                hr: 0,
                so: 0,
                bb: 0,
                hbp: 0,
                sf: 0,
                sh: 0,
            });
        entry.ab += r.ab;
        entry.h += r.h;
        entry.hr += r.hr;
        entry.so += r.so;
        entry.bb += r.bb;
        entry.hbp += r.hbp;
        entry.sf += r.sf;
        entry.sh += r.sh;
    }
    let seasons: Vec<PlayerSeasonBatting> = map.into_values().collect();
    for s in &seasons {
        let violation = if s.h > s.ab {
            Some(format!("H={} exceeds AB={}", s.h, s.ab))
        } else if s.hr > s.h {
            Some(format!("HR={} exceeds H={}", s.hr, s.h))
        } else if s.so + s.h > s.ab {
            Some(format!("SO={} + H={} exceeds AB={}", s.so, s.h, s.ab))
        } else {
            None
        };
        if let Some(reason) = violation {
            return Err(Error::DataIntegrity {
                player_id: s.player_id.clone(),
                year: s.year,
                reason,
            });
        }
    }
    Ok(seasons)
}

/// Sum pitching stints within (player, year) and check season invariants.
pub fn aggregate_pitching_stints(rows: &[RawPitchingRow]) -> Result<Vec<PlayerSeasonPitching>> {
    let mut map: BTreeMap<(String, i32), PlayerSeasonPitching> = BTreeMap::new();
    for r in rows {
        let entry = map
            .entry((r.player_id.clone(), r.year))
            .or_insert_with(|| PlayerSeasonPitching {
                player_id: r.player_id.clone(),
                year: r.year,
                bfp: 0,
                ipouts: 0,
                h: 0,
                hr: 0,
                so: 0,
                bb: 0,
                hbp: 0,
            });
        entry.bfp += r.bfp;
        entry.ipouts += r.ipouts;
        entry.h += r.h;
        entry.hr += r.hr;
        entry.so += r.so;
        entry.bb += r.bb;
        entry.hbp += r.hbp;
    }
    let seasons: Vec<PlayerSeasonPitching> = map.into_values().collect();
    for s in &seasons {
        let violation = if s.hr > s.h {
            Some(format!("HR={} exceeds H={}", s.hr, s.h))
        } else if s.so > s.ipouts {
            Some(format!("SO={} exceeds IPouts={}", s.so, s.ipouts))
        } else {
            None
        };
        if let Some(reason) = violation {
            return Err(Error::DataIntegrity {
                player_id: s.player_id.clone(),
                year: s.year,
                reason,
            });
        }
    }
    Ok(seasons)
}

/// Derive the four batting component observations for players with
/// AB >= `min_ab`.
///
/// Opportunity chain: SO out of AB, HR out of AB - SO, hit-in-play out of
/// AB - SO - HR, and walks (BB + HBP) out of AB + BB + HBP. The chain
/// telescopes: each component's opportunities are the previous component's
/// failures.
pub fn derive_batting_components(
    seasons: &[PlayerSeasonBatting],
    min_ab: u64,
) -> Result<BattingComponentSets> {
    if min_ab < 1 {
        return Err(Error::Config("min_ab must be at least 1".to_string()));
    }
    let mut sets = BattingComponentSets::default();
    for s in seasons {
        if s.ab < min_ab {
            continue;
        }
        // Season invariants guarantee these subtractions cannot underflow.
        let after_so = s.ab - s.so;
        let after_hr = after_so - s.hr;
        sets.so
            .push(ComponentObservation::new(&s.player_id, s.so, s.ab));
        sets.hr
            .push(ComponentObservation::new(&s.player_id, s.hr, after_so));
        sets.hip
            .push(ComponentObservation::new(&s.player_id, s.h - s.hr, after_hr));
        sets.bb.push(ComponentObservation::new(
            &s.player_id,
            s.bb + s.hbp,
            s.ab + s.bb + s.hbp,
        ));
    }
    Ok(sets)
}

/// Derive the four pitching component observations for pitchers with
/// BFP >= `min_bfp`.
///
/// Opportunity chain mirrors the batting one but starts from batters faced:
/// walks out of BFP, strikeouts out of the non-walks, home runs out of what
/// remains, hits-in-play out of the rest.
pub fn derive_pitching_components(
    seasons: &[PlayerSeasonPitching],
    min_bfp: u64,
) -> Result<PitchingComponentSets> {
    if min_bfp < 1 {
        return Err(Error::Config("min_bfp must be at least 1".to_string()));
    }
    let mut sets = PitchingComponentSets::default();
    for s in seasons {
        if s.bfp < min_bfp {
            continue;
        }
        let integrity = |reason: String| Error::DataIntegrity {
            player_id: s.player_id.clone(),
            year: s.year,
            reason,
        };
        let walks = s.bb + s.hbp;
        let after_bb = s
            .bfp
            .checked_sub(walks)
            .ok_or_else(|| integrity(format!("BB+HBP={} exceeds BFP={}", walks, s.bfp)))?;
        let after_so = after_bb
            .checked_sub(s.so)
            .ok_or_else(|| integrity(format!("SO={} exceeds BFP-BB-HBP={}", s.so, after_bb)))?;
        let after_hr = after_so.checked_sub(s.hr).ok_or_else(|| {
            integrity(format!("HR={} exceeds BFP-BB-HBP-SO={}", s.hr, after_so))
        })?;
        let hip = s.h - s.hr;
        if hip > after_hr {
            return Err(integrity(format!(
                "H-HR={} exceeds derived in-play opportunities {}",
                hip, after_hr
            )));
        }
        sets.bb
            .push(ComponentObservation::new(&s.player_id, walks, s.bfp));
        sets.so
            .push(ComponentObservation::new(&s.player_id, s.so, after_bb));
        sets.hr
            .push(ComponentObservation::new(&s.player_id, s.hr, after_so));
        sets.hip
            .push(ComponentObservation::new(&s.player_id, hip, after_hr));
    }
    Ok(sets)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn season(player: &str, ab: u64, h: u64, hr: u64, so: u64, bb: u64) -> PlayerSeasonBatting {
        PlayerSeasonBatting {
            player_id: player.to_string(),
            year: 2011,
            ab,
            h,
            hr,
            so,
            bb,
            hbp: 0,
            sf: 0,
            sh: 0,
        }
    }

    #[test]
    fn parse_single_row() {
        let data = "playerID,yearID,stint,teamID,AB,H,HR,SO,BB,HBP,SF,SH\n\
                    beltrca01,2011,1,SFN,520,156,22,88,60,5,3,0\n";
        let rows = parse_batting_csv(data.as_bytes()).unwrap();
        assert_eq!(rows.len(), 1);
        let r = &rows[0];
        assert_eq!(r.player_id, "beltrca01");
        assert_eq!(r.year, 2011);
        assert_eq!((r.ab, r.h, r.hr, r.so), (520, 156, 22, 88));
        assert_eq!((r.bb, r.hbp, r.sf, r.sh), (60, 5, 3, 0));
    }

    #[test]
    fn empty_count_fields_read_as_zero() {
        let data = "playerID,yearID,stint,AB,H,HR,SO,BB,HBP,SF,SH\n\
                    oldguy01,1915,1,400,120,4,30,40,,,\n";
        let rows = parse_batting_csv(data.as_bytes()).unwrap();
        assert_eq!(rows[0].hbp, 0);
        assert_eq!(rows[0].sf, 0);
        assert_eq!(rows[0].sh, 0);
    }

    #[test]
    fn missing_column_names_it() {
        let data = "playerID,yearID,stint,AB,H,HR,BB,HBP,SF,SH\nx,2011,1,1,0,0,0,0,0,0\n";
        let err = parse_batting_csv(data.as_bytes()).unwrap_err();
        match err {
            Error::MissingColumn(c) => assert_eq!(c, "SO"),
            other => panic!("expected MissingColumn, got {other:?}"),
        }
    }

    #[test]
    fn non_numeric_count_reports_line() {
        let data = "playerID,yearID,stint,AB,H,HR,SO,BB,HBP,SF,SH\n\
                    a,2011,1,100,30,2,20,10,0,0,0\n\
                    b,2011,1,oops,30,2,20,10,0,0,0\n";
        let err = parse_batting_csv(data.as_bytes()).unwrap_err();
        match err {
            Error::InvalidValue { line, column, value } => {
                assert_eq!(line, 3);
                assert_eq!(column, "AB");
                assert_eq!(value, "oops");
            }
            other => panic!("expected InvalidValue, got {other:?}"),
        }
    }

    #[test]
    fn stints_sum_within_player_year() {
        let data = "playerID,yearID,stint,AB,H,HR,SO,BB,HBP,SF,SH\n\
                    t,2011,1,100,30,3,20,10,1,0,0\n\
                    t,2011,2,50,10,1,12,5,0,1,0\n\
                    t,2012,1,200,60,6,40,20,2,1,1\n";
        let rows = parse_batting_csv(data.as_bytes()).unwrap();
        let seasons = aggregate_stints(&rows).unwrap();
        assert_eq!(seasons.len(), 2);
        let s2011 = seasons.iter().find(|s| s.year == 2011).unwrap();
        assert_eq!((s2011.ab, s2011.h, s2011.so, s2011.bb), (150, 40, 32, 15));
        assert_eq!((s2011.hbp, s2011.sf), (1, 1));
    }

    #[test]
    fn aggregation_is_order_independent() {
        let data = "playerID,yearID,stint,AB,H,HR,SO,BB,HBP,SF,SH\n\
                    a,2011,1,100,30,3,20,10,1,0,0\n\
                    b,2011,1,250,70,9,55,22,2,3,1\n\
                    a,2011,2,50,10,1,12,5,0,1,0\n";
        let mut rows = parse_batting_csv(data.as_bytes()).unwrap();
        let forward = aggregate_stints(&rows).unwrap();
        rows.reverse();
        let backward = aggregate_stints(&rows).unwrap();
        assert_eq!(forward, backward);
    }

    #[test]
    fn integrity_violation_identifies_player_year() {
        let rows = vec![
            RawBattingRow {
                player_id: "bad".to_string(),
                year: 1999,
                stint: 1,
                ab: 150,
                h: 151,
                hr: 0,
                so: 0,
                bb: 0,
                hbp: 0,
                sf: 0,
                sh: 0,
            },
        ];
        let err = aggregate_stints(&rows).unwrap_err();
        match err {
            Error::DataIntegrity { player_id, year, .. } => {
                assert_eq!(player_id, "bad");
                assert_eq!(year, 1999);
            }
            other => panic!("expected DataIntegrity, got {other:?}"),
        }
    }

    #[test]
    fn batting_component_chain() {
        let seasons = vec![season("beltrca01", 520, 156, 22, 88, 60)];
        let sets = derive_batting_components(&seasons, 100).unwrap();
        assert_eq!(sets.so[0], ComponentObservation::new("beltrca01", 88, 520));
        assert_eq!(sets.hr[0], ComponentObservation::new("beltrca01", 22, 432));
        assert_eq!(sets.hip[0], ComponentObservation::new("beltrca01", 134, 410));
        assert_eq!(sets.bb[0], ComponentObservation::new("beltrca01", 60, 580));
    }

    #[test]
    fn eligibility_threshold_excludes_everywhere() {
        let seasons = vec![season("short", 99, 20, 2, 30, 8)];
        let sets = derive_batting_components(&seasons, 100).unwrap();
        assert!(sets.so.is_empty());
        assert!(sets.hr.is_empty());
        assert!(sets.hip.is_empty());
        assert!(sets.bb.is_empty());
    }

    #[test]
    fn zero_opportunity_observations_are_emitted() {
        // Every at-bat a strikeout: HR and HIP have no opportunities left.
        let seasons = vec![season("whiffs", 10, 0, 0, 10, 0)];
        let sets = derive_batting_components(&seasons, 1).unwrap();
        assert_eq!(sets.hr[0].opportunities, 0);
        assert_eq!(sets.hip[0].opportunities, 0);
    }

    #[test]
    fn opportunity_chain_telescopes() {
        let seasons = vec![
            season("a", 520, 156, 22, 88, 60),
            season("b", 300, 80, 10, 70, 25),
        ];
        let sets = derive_batting_components(&seasons, 100).unwrap();
        for i in 0..seasons.len() {
            assert_eq!(sets.hr[i].opportunities, sets.so[i].opportunities - sets.so[i].successes);
            assert_eq!(
                sets.hip[i].opportunities,
                sets.hr[i].opportunities - sets.hr[i].successes
            );
        }
    }

    #[test]
    fn pitching_component_chain() {
        let seasons = vec![PlayerSeasonPitching {
            player_id: "ace".to_string(),
            year: 2011,
            bfp: 1000,
            ipouts: 700,
            h: 230,
            hr: 22,
            so: 200,
            bb: 75,
            hbp: 5,
        }];
        let sets = derive_pitching_components(&seasons, 300).unwrap();
        assert_eq!(sets.bb[0], ComponentObservation::new("ace", 80, 1000));
        assert_eq!(sets.so[0], ComponentObservation::new("ace", 200, 920));
        assert_eq!(sets.hr[0], ComponentObservation::new("ace", 22, 720));
        assert_eq!(sets.hip[0], ComponentObservation::new("ace", 208, 698));
    }

    #[test]
    fn pitching_negative_opportunity_is_integrity_error() {
        let seasons = vec![PlayerSeasonPitching {
            player_id: "weird".to_string(),
            year: 2011,
            bfp: 400,
            ipouts: 400,
            h: 10,
            hr: 0,
            so: 350,
            bb: 80,
            hbp: 0,
        }];
        let err = derive_pitching_components(&seasons, 300).unwrap_err();
        assert!(matches!(err, Error::DataIntegrity { .. }), "got {err:?}");
    }

    #[test]
    fn pitching_below_threshold_excluded() {
        let seasons = vec![PlayerSeasonPitching {
            player_id: "mop-up".to_string(),
            year: 2011,
            bfp: 120,
            ipouts: 90,
            h: 30,
            hr: 4,
            so: 18,
            bb: 12,
            hbp: 1,
        }];
        let sets = derive_pitching_components(&seasons, 300).unwrap();
        assert!(sets.bb.is_empty());
    }
}
