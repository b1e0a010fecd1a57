//! Command-line front end: flag parsing, config resolution, data loading,
//! subcommand dispatch, and serialization of results to CSV/JSON and SVG.
//!
//! Precedence for settings is flags over config file over defaults. The
//! config file is TOML named by the COMPONENT_SHRINK_CONFIG env var. All
//! outputs are byte-for-byte reproducible for fixed inputs and settings.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand};
use serde::Deserialize;

use crate::betabin::{fit_exchangeable, FitOptions, RandomEffectsFit};
use crate::chart::{four_panel_chart, line_chart, scatter_chart, Series};
use crate::compose::{fip_ability, hit_probability, on_base_probability, PitchingComponents};
use crate::contest::{
    history, run_contest, trajectory, Component, ContestResult, Eligibility, Measure, Population,
    SeasonData, SeasonPair,
};
use crate::contest::component_observations_for_year;
use crate::error::{Error, Result};
use crate::ingest::{
    aggregate_pitching_stints, aggregate_stints, parse_batting_csv, parse_pitching_csv,
    PlayerSeasonBatting, PlayerSeasonPitching,
};
use crate::output::{write_csv, write_json, CellValue, Table};
use crate::synth::{run_simulation, SimulationSpec};

pub const CONFIG_ENV_VAR: &str = "COMPONENT_SHRINK_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<OutputFormat> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::Config(format!(
                "unknown format `{s}` (expected csv or json)"
            ))),
        }
    }
}

/// Fully resolved run settings.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub batting_path: Option<PathBuf>,
    pub pitching_path: Option<PathBuf>,
    pub min_ab: u64,
    pub min_bfp: u64,
    pub log_k_cap: f64,
    pub tol: f64,
    pub max_evals: usize,
    pub restarts: usize,
    pub output_dir: PathBuf,
    pub output_format: OutputFormat,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            batting_path: None,
            pitching_path: None,
            min_ab: 100,
            min_bfp: 300,
            log_k_cap: 15.0,
            tol: 1e-8,
            max_evals: 5000,
            restarts: 3,
            output_dir: PathBuf::from("."),
            output_format: OutputFormat::Csv,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn eligibility(&self) -> Eligibility {
        Eligibility {
            min_ab: self.min_ab,
            min_bfp: self.min_bfp,
        }
    }

    pub fn fit_options(&self) -> FitOptions {
        FitOptions {
            tol: self.tol,
            max_evals: self.max_evals,
            restarts: self.restarts,
            log_k_cap: self.log_k_cap,
            seed: self.seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.min_ab < 1 || self.min_bfp < 1 {
            return Err(Error::Config(
                "eligibility thresholds must be at least 1".to_string(),
            ));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Config(format!(
                "tolerance must be positive, got {}",
                self.tol
            )));
        }
        if self.max_evals == 0 {
            return Err(Error::Config(
                "max_evals must be at least 1".to_string(),
            ));
        }
        Ok(())
    }
}

/// Optional settings read from the TOML config file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    batting: Option<PathBuf>,
    pitching: Option<PathBuf>,
    min_ab: Option<u64>,
    min_bfp: Option<u64>,
    log_k_cap: Option<f64>,
    tol: Option<f64>,
    max_evals: Option<usize>,
    restarts: Option<usize>,
    out: Option<PathBuf>,
    format: Option<String>,
    seed: Option<u64>,
}

fn load_config_file(path: &Path) -> Result<ConfigFile> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("config file {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("config file {}: {e}", path.display())))
}

/// Estimate batting and pitching component abilities with beta-binomial
/// random-effects shrinkage, compose them into BA/OBP/FIP estimates, and
/// score component against single-model predictions across seasons.
#[derive(Debug, Parser)]
#[command(name = "component-shrink", version, disable_help_subcommand = true)]
pub struct Cli {
    /// Batting CSV path (Lahman Batting.csv schema)
    #[arg(long, global = true, value_name = "PATH")]
    pub batting: Option<PathBuf>,
    /// Pitching CSV path (Lahman Pitching.csv schema)
    #[arg(long, global = true, value_name = "PATH")]
    pub pitching: Option<PathBuf>,
    /// Minimum season at-bats for batter eligibility
    #[arg(long, global = true, value_name = "N")]
    pub min_ab: Option<u64>,
    /// Minimum season batters faced for pitcher eligibility
    #[arg(long, global = true, value_name = "N")]
    pub min_bfp: Option<u64>,
    /// Output format: csv or json
    #[arg(long, global = true, value_name = "FMT")]
    pub format: Option<String>,
    /// Output directory (created if absent)
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Seed for optimizer restarts and synthetic data
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit one component's talent curve for one season
    Fit {
        /// Season to fit
        #[arg(long)]
        year: i32,
        /// Component: SO, HR, HIP, or BB
        #[arg(long)]
        component: String,
        /// Population: batters or pitchers (inferred when only one data path is set)
        #[arg(long)]
        population: Option<String>,
    },
    /// Per-player shrunken component estimates and composed measures for one season
    Estimate {
        /// Season to estimate
        #[arg(long)]
        year: i32,
        /// Population: batters (default) or pitchers
        #[arg(long, default_value = "batters")]
        population: String,
    },
    /// Season-to-season prediction contests across a year range
    Contest {
        /// Measure: BA, OBP, or FIP
        #[arg(long)]
        measure: String,
        /// First train season
        #[arg(long)]
        year_from: i32,
        /// Last test season
        #[arg(long)]
        year_to: i32,
    },
    /// Fitted talent-curve parameters for each season in a range
    History {
        /// Component: SO, HR, HIP, or BB
        #[arg(long)]
        component: String,
        /// Population: batters or pitchers; omit to cover every configured data path
        #[arg(long)]
        population: Option<String>,
        /// First season
        #[arg(long)]
        year_from: i32,
        /// Last season
        #[arg(long)]
        year_to: i32,
    },
    /// One player's standardized component residuals across seasons
    Trajectory {
        /// Player id as it appears in the data
        #[arg(long)]
        player: String,
        /// Population: batters or pitchers (inferred when only one data path is set)
        #[arg(long)]
        population: Option<String>,
        /// First season
        #[arg(long)]
        year_from: i32,
        /// Last season
        #[arg(long)]
        year_to: i32,
    },
    /// Monte-Carlo prediction contests on data generated from the model
    Simulate {
        /// Measure: BA, OBP, or FIP
        #[arg(long)]
        measure: String,
        /// Number of replications
        #[arg(long, default_value_t = 50)]
        reps: usize,
        /// Players per replication
        #[arg(long, default_value_t = 400)]
        players: usize,
        /// Opportunities (at-bats or batters faced) per player-season
        #[arg(long, default_value_t = 500)]
        opportunities: u64,
    },
}

impl Cli {
    /// Resolve settings (flags over config file over defaults) and run the
    /// chosen subcommand.
    pub fn run(self) -> Result<()> {
        let mut config = RunConfig::default();
        if let Ok(path) = std::env::var(CONFIG_ENV_VAR) {
            let file = load_config_file(Path::new(&path))?;
            if file.batting.is_some() {
                config.batting_path = file.batting;
            }
            if file.pitching.is_some() {
                config.pitching_path = file.pitching;
            }
            if let Some(v) = file.min_ab {
                config.min_ab = v;
            }
            if let Some(v) = file.min_bfp {
                config.min_bfp = v;
            }
            if let Some(v) = file.log_k_cap {
                config.log_k_cap = v;
            }
            if let Some(v) = file.tol {
                config.tol = v;
            }
            if let Some(v) = file.max_evals {
                config.max_evals = v;
            }
            if let Some(v) = file.restarts {
                config.restarts = v;
            }
            if let Some(v) = file.out {
                config.output_dir = v;
            }
            if let Some(v) = file.format {
                config.output_format = v.parse()?;
            }
            if let Some(v) = file.seed {
                config.seed = v;
            }
        }
        if self.batting.is_some() {
            config.batting_path = self.batting;
        }
        if self.pitching.is_some() {
            config.pitching_path = self.pitching;
        }
        if let Some(v) = self.min_ab {
            config.min_ab = v;
        }
        if let Some(v) = self.min_bfp {
            config.min_bfp = v;
        }
        if let Some(v) = &self.format {
            config.output_format = v.parse()?;
        }
        if let Some(v) = self.out {
            config.output_dir = v;
        }
        if let Some(v) = self.seed {
            config.seed = v;
        }
        config.validate()?;

        match self.command {
            Command::Fit {
                year,
                component,
                population,
            } => cmd_fit(
                &config,
                year,
                component.parse()?,
                resolve_population(&config, population.as_deref())?,
            ),
            Command::Estimate { year, population } => {
                cmd_estimate(&config, year, population.parse()?)
            }
            Command::Contest {
                measure,
                year_from,
                year_to,
            } => cmd_contest(&config, measure.parse()?, year_from, year_to),
            Command::History {
                component,
                population,
                year_from,
                year_to,
            } => {
                let populations = match population.as_deref() {
                    Some(s) => vec![s.parse()?],
                    None => configured_populations(&config)?,
                };
                cmd_history(&config, component.parse()?, &populations, year_from, year_to)
            }
            Command::Trajectory {
                player,
                population,
                year_from,
                year_to,
            } => cmd_trajectory(
                &config,
                &player,
                resolve_population(&config, population.as_deref())?,
                year_from,
                year_to,
            ),
            Command::Simulate {
                measure,
                reps,
                players,
                opportunities,
            } => cmd_simulate(&config, measure.parse()?, reps, players, opportunities),
        }
    }
}

fn resolve_population(config: &RunConfig, flag: Option<&str>) -> Result<Population> {
    if let Some(s) = flag {
        return s.parse();
    }
    match (config.batting_path.is_some(), config.pitching_path.is_some()) {
        (true, false) => Ok(Population::Batters),
        (false, true) => Ok(Population::Pitchers),
        _ => Err(Error::Config(
            "pass --population batters or --population pitchers".to_string(),
        )),
    }
}

fn configured_populations(config: &RunConfig) -> Result<Vec<Population>> {
    let mut populations = Vec::new();
    if config.batting_path.is_some() {
        populations.push(Population::Batters);
    }
    if config.pitching_path.is_some() {
        populations.push(Population::Pitchers);
    }
    if populations.is_empty() {
        return Err(Error::Config(
            "no data paths configured; pass --batting and/or --pitching".to_string(),
        ));
    }
    Ok(populations)
}

fn open_named(path: &Path) -> Result<fs::File> {
    fs::File::open(path)
        .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn load_batting(config: &RunConfig) -> Result<Vec<PlayerSeasonBatting>> {
    let path = config.batting_path.as_deref().ok_or_else(|| {
        Error::Config("no batting data; pass --batting or set it in the config file".to_string())
    })?;
    let rows = parse_batting_csv(io::BufReader::new(open_named(path)?))?;
    aggregate_stints(&rows)
}

fn load_pitching(config: &RunConfig) -> Result<Vec<PlayerSeasonPitching>> {
    let path = config.pitching_path.as_deref().ok_or_else(|| {
        Error::Config("no pitching data; pass --pitching or set it in the config file".to_string())
    })?;
    let rows = parse_pitching_csv(io::BufReader::new(open_named(path)?))?;
    aggregate_pitching_stints(&rows)
}

fn write_table(config: &RunConfig, stem: &str, table: &Table) -> Result<PathBuf> {
    fs::create_dir_all(&config.output_dir)?;
    let path = config
        .output_dir
        .join(format!("{stem}.{}", config.output_format.extension()));
    let body = match config.output_format {
        OutputFormat::Csv => write_csv(table),
        OutputFormat::Json => write_json(table),
    };
    fs::write(&path, body)?;
    println!("wrote {}", path.display());
    Ok(path)
}

fn write_svg(config: &RunConfig, stem: &str, svg: &str) -> Result<PathBuf> {
    fs::create_dir_all(&config.output_dir)?;
    let path = config.output_dir.join(format!("{stem}.svg"));
    fs::write(&path, svg)?;
    println!("wrote {}", path.display());
    Ok(path)
}

fn lower(v: impl ToString) -> String {
    v.to_string().to_lowercase()
}

fn fit_for(
    config: &RunConfig,
    data: SeasonData<'_>,
    year: i32,
    component: Component,
) -> Result<RandomEffectsFit> {
    let obs = component_observations_for_year(data, year, component, config.eligibility())?;
    fit_exchangeable(&obs, config.fit_options())
}

pub fn cmd_fit(
    config: &RunConfig,
    year: i32,
    component: Component,
    population: Population,
) -> Result<()> {
    let batting;
    let pitching;
    let data = match population {
        Population::Batters => {
            batting = load_batting(config)?;
            SeasonData::Batting(&batting)
        }
        Population::Pitchers => {
            pitching = load_pitching(config)?;
            SeasonData::Pitching(&pitching)
        }
    };
    let fit = fit_for(config, data, year, component)?;
    let mut table = Table::new(&[
        "year",
        "component",
        "population",
        "eta_hat",
        "k_hat",
        "sd_hat",
        "converged",
        "at_k_bound",
        "n_players",
    ]);
    table.push_row(vec![
        CellValue::Int(year.into()),
        component.to_string().into(),
        population.to_string().into(),
        fit.eta.into(),
        fit.k.into(),
        fit.talent_sd.into(),
        fit.converged.into(),
        fit.at_k_bound.into(),
        CellValue::Int(fit.n_players as i64),
    ]);
    write_table(
        config,
        &format!("fit_{population}_{}_{year}", lower(component)),
        &table,
    )?;
    Ok(())
}

fn estimate_batters(config: &RunConfig, year: i32) -> Result<Table> {
    let seasons = load_batting(config)?;
    let data = SeasonData::Batting(&seasons);
    let eligibility = config.eligibility();
    let options = config.fit_options();
    let mut obs = BTreeMap::new();
    let mut fits = BTreeMap::new();
    for component in Component::ALL {
        let component_obs =
            component_observations_for_year(data, year, component, eligibility)?;
        fits.insert(component, fit_exchangeable(&component_obs, options)?);
        obs.insert(component, component_obs);
    }
    let mut table = Table::new(&[
        "player_id",
        "year",
        "ab",
        "so_rate",
        "hr_rate",
        "hip_rate",
        "bb_rate",
        "p_so",
        "p_hr",
        "p_hip",
        "p_bb",
        "p_hit",
        "p_onbase",
    ]);
    let n = obs[&Component::So].len();
    for i in 0..n {
        let so = &obs[&Component::So][i];
        let hr = &obs[&Component::Hr][i];
        let hip = &obs[&Component::Hip][i];
        let bb = &obs[&Component::Bb][i];
        debug_assert!(so.player_id == hr.player_id && so.player_id == bb.player_id);
        let p_so = fits[&Component::So].shrink(so.successes, so.opportunities);
        let p_hr = fits[&Component::Hr].shrink(hr.successes, hr.opportunities);
        let p_hip = fits[&Component::Hip].shrink(hip.successes, hip.opportunities);
        let p_bb = fits[&Component::Bb].shrink(bb.successes, bb.opportunities);
        let p_hit = hit_probability(p_so, p_hr, p_hip);
        table.push_row(vec![
            so.player_id.clone().into(),
            CellValue::Int(year.into()),
            CellValue::Int(so.opportunities as i64),
            so.rate().into(),
            hr.rate().into(),
            hip.rate().into(),
            bb.rate().into(),
            p_so.into(),
            p_hr.into(),
            p_hip.into(),
            p_bb.into(),
            p_hit.into(),
            on_base_probability(p_bb, p_hit).into(),
        ]);
    }
    Ok(table)
}

fn estimate_pitchers(config: &RunConfig, year: i32) -> Result<Table> {
    let seasons = load_pitching(config)?;
    let data = SeasonData::Pitching(&seasons);
    let eligibility = config.eligibility();
    let options = config.fit_options();
    let mut obs = BTreeMap::new();
    let mut fits = BTreeMap::new();
    for component in Component::ALL {
        let component_obs =
            component_observations_for_year(data, year, component, eligibility)?;
        fits.insert(component, fit_exchangeable(&component_obs, options)?);
        obs.insert(component, component_obs);
    }
    let mut table = Table::new(&[
        "player_id",
        "year",
        "bfp",
        "bb_rate",
        "so_rate",
        "hr_rate",
        "hip_rate",
        "p_bb",
        "p_so",
        "p_hr",
        "p_hip",
        "fip",
    ]);
    let n = obs[&Component::Bb].len();
    for i in 0..n {
        let bb = &obs[&Component::Bb][i];
        let so = &obs[&Component::So][i];
        let hr = &obs[&Component::Hr][i];
        let hip = &obs[&Component::Hip][i];
        debug_assert!(bb.player_id == so.player_id && bb.player_id == hip.player_id);
        let components = PitchingComponents {
            p_bb: fits[&Component::Bb].shrink(bb.successes, bb.opportunities),
            p_so: fits[&Component::So].shrink(so.successes, so.opportunities),
            p_hr: fits[&Component::Hr].shrink(hr.successes, hr.opportunities),
            p_hip: fits[&Component::Hip].shrink(hip.successes, hip.opportunities),
        };
        table.push_row(vec![
            bb.player_id.clone().into(),
            CellValue::Int(year.into()),
            CellValue::Int(bb.opportunities as i64),
            bb.rate().into(),
            so.rate().into(),
            hr.rate().into(),
            hip.rate().into(),
            components.p_bb.into(),
            components.p_so.into(),
            components.p_hr.into(),
            components.p_hip.into(),
            fip_ability(&components)?.into(),
        ]);
    }
    Ok(table)
}

pub fn cmd_estimate(config: &RunConfig, year: i32, population: Population) -> Result<()> {
    let table = match population {
        Population::Batters => estimate_batters(config, year)?,
        Population::Pitchers => estimate_pitchers(config, year)?,
    };
    write_table(config, &format!("estimates_{population}_{year}"), &table)?;
    Ok(())
}

pub fn cmd_contest(
    config: &RunConfig,
    measure: Measure,
    year_from: i32,
    year_to: i32,
) -> Result<()> {
    if year_from >= year_to {
        return Err(Error::Config(format!(
            "year range {year_from}..{year_to} holds no train/test pair"
        )));
    }
    let batting;
    let pitching;
    enum Rows<'a> {
        Batting(&'a [PlayerSeasonBatting]),
        Pitching(&'a [PlayerSeasonPitching]),
    }
    let rows = match measure {
        Measure::Ba | Measure::Obp => {
            batting = load_batting(config)?;
            Rows::Batting(&batting)
        }
        Measure::Fip => {
            pitching = load_pitching(config)?;
            Rows::Pitching(&pitching)
        }
    };
    let mut results: Vec<ContestResult> = Vec::new();
    let mut last_err = None;
    for train_year in year_from..year_to {
        let test_year = train_year + 1;
        let outcome = match &rows {
            Rows::Batting(all) => {
                let train: Vec<PlayerSeasonBatting> =
                    all.iter().filter(|s| s.year == train_year).cloned().collect();
                let test: Vec<PlayerSeasonBatting> =
                    all.iter().filter(|s| s.year == test_year).cloned().collect();
                run_contest(
                    measure,
                    SeasonPair::Batting {
                        train: &train,
                        test: &test,
                    },
                    config.eligibility(),
                    config.fit_options(),
                )
            }
            Rows::Pitching(all) => {
                let train: Vec<PlayerSeasonPitching> =
                    all.iter().filter(|s| s.year == train_year).cloned().collect();
                let test: Vec<PlayerSeasonPitching> =
                    all.iter().filter(|s| s.year == test_year).cloned().collect();
                run_contest(
                    measure,
                    SeasonPair::Pitching {
                        train: &train,
                        test: &test,
                    },
                    config.eligibility(),
                    config.fit_options(),
                )
            }
        };
        match outcome {
            Ok(r) => results.push(r),
            Err(e) => {
                eprintln!("skipping pair {train_year}-{test_year}: {e}");
                last_err = Some(e);
            }
        }
    }
    if results.is_empty() {
        // Report-and-skip must not turn a fully failed run into success.
        return Err(last_err.unwrap_or_else(|| {
            Error::Config("no season pairs produced results".to_string())
        }));
    }
    let mut table = Table::new(&[
        "train_year",
        "test_year",
        "measure",
        "s_c",
        "s_i",
        "improvement",
        "n_players",
    ]);
    let mut points = Vec::new();
    for r in &results {
        table.push_row(vec![
            CellValue::Int(r.train_year.into()),
            CellValue::Int(r.test_year.into()),
            r.measure.to_string().into(),
            r.s_c.into(),
            r.s_i.into(),
            r.improvement.into(),
            CellValue::Int(r.n_players as i64),
        ]);
        points.push((r.train_year as f64, r.improvement));
    }
    let stem = format!("contest_{}_{year_from}_{year_to}", lower(measure));
    write_table(config, &stem, &table)?;
    let svg = scatter_chart(
        &format!("{measure} prediction improvement by season"),
        "train season",
        "improvement",
        &[Series::new(measure.to_string(), points)],
        true,
    );
    write_svg(config, &stem, &svg)?;
    Ok(())
}

pub fn cmd_history(
    config: &RunConfig,
    component: Component,
    populations: &[Population],
    year_from: i32,
    year_to: i32,
) -> Result<()> {
    if year_from > year_to {
        return Err(Error::Config(format!(
            "empty year range {year_from}..{year_to}"
        )));
    }
    let mut table = Table::new(&[
        "year",
        "component",
        "population",
        "eta_hat",
        "k_hat",
        "sd_hat",
    ]);
    let mut eta_series = Vec::new();
    let mut sd_series = Vec::new();
    for &population in populations {
        let batting;
        let pitching;
        let data = match population {
            Population::Batters => {
                batting = year_slice_batting(load_batting(config)?, year_from, year_to);
                SeasonData::Batting(&batting)
            }
            Population::Pitchers => {
                pitching = year_slice_pitching(load_pitching(config)?, year_from, year_to);
                SeasonData::Pitching(&pitching)
            }
        };
        let outcome = history(data, component, config.eligibility(), config.fit_options());
        for (year, reason) in &outcome.skipped {
            eprintln!("skipping {population} {year}: {reason}");
        }
        let mut eta_points = Vec::new();
        let mut sd_points = Vec::new();
        for p in &outcome.points {
            table.push_row(vec![
                CellValue::Int(p.year.into()),
                p.component.to_string().into(),
                p.population.to_string().into(),
                p.eta_hat.into(),
                p.k_hat.into(),
                p.sd_hat.into(),
            ]);
            eta_points.push((p.year as f64, p.eta_hat));
            sd_points.push((p.year as f64, p.sd_hat));
        }
        eta_series.push(Series::new(population.to_string(), eta_points));
        sd_series.push(Series::new(population.to_string(), sd_points));
    }
    if table.rows.is_empty() {
        return Err(Error::InsufficientData(format!(
            "no season in {year_from}..={year_to} could be fit"
        )));
    }
    let pop_tag = if populations.len() == 2 {
        "both".to_string()
    } else {
        populations[0].to_string()
    };
    let stem = format!(
        "history_{}_{pop_tag}_{year_from}_{year_to}",
        lower(component)
    );
    write_table(config, &stem, &table)?;
    let eta_svg = line_chart(
        &format!("{component} rate talent-curve mean by season"),
        "season",
        "eta_hat",
        &eta_series,
    );
    write_svg(config, &format!("{stem}_eta"), &eta_svg)?;
    let sd_svg = line_chart(
        &format!("{component} rate talent-curve spread by season"),
        "season",
        "sd_hat",
        &sd_series,
    );
    write_svg(config, &format!("{stem}_sd"), &sd_svg)?;
    Ok(())
}

fn year_slice_batting(
    rows: Vec<PlayerSeasonBatting>,
    year_from: i32,
    year_to: i32,
) -> Vec<PlayerSeasonBatting> {
    rows.into_iter()
        .filter(|s| s.year >= year_from && s.year <= year_to)
        .collect()
}

fn year_slice_pitching(
    rows: Vec<PlayerSeasonPitching>,
    year_from: i32,
    year_to: i32,
) -> Vec<PlayerSeasonPitching> {
    rows.into_iter()
        .filter(|s| s.year >= year_from && s.year <= year_to)
        .collect()
}

pub fn cmd_trajectory(
    config: &RunConfig,
    player: &str,
    population: Population,
    year_from: i32,
    year_to: i32,
) -> Result<()> {
    if year_from > year_to {
        return Err(Error::Config(format!(
            "empty year range {year_from}..{year_to}"
        )));
    }
    let batting;
    let pitching;
    let data = match population {
        Population::Batters => {
            batting = year_slice_batting(load_batting(config)?, year_from, year_to);
            SeasonData::Batting(&batting)
        }
        Population::Pitchers => {
            pitching = year_slice_pitching(load_pitching(config)?, year_from, year_to);
            SeasonData::Pitching(&pitching)
        }
    };
    let years: BTreeSet<i32> = match data {
        SeasonData::Batting(rows) => rows.iter().map(|s| s.year).collect(),
        SeasonData::Pitching(rows) => rows.iter().map(|s| s.year).collect(),
    };
    // Keep only seasons where every component curve fits, so each covered
    // season carries a full residual set.
    let mut fits = BTreeMap::new();
    let mut kept_years = BTreeSet::new();
    for &year in &years {
        let mut season_fits = Vec::with_capacity(4);
        let mut failure = None;
        for component in Component::ALL {
            match fit_for(config, data, year, component) {
                Ok(f) => season_fits.push((component, f)),
                Err(e) => {
                    failure = Some(e);
                    break;
                }
            }
        }
        match failure {
            None => {
                for (component, f) in season_fits {
                    fits.insert((year, component), f);
                }
                kept_years.insert(year);
            }
            Some(e) => eprintln!("skipping season {year}: {e}"),
        }
    }
    let kept_batting;
    let kept_pitching;
    let kept_data = match data {
        SeasonData::Batting(rows) => {
            kept_batting = rows
                .iter()
                .filter(|s| kept_years.contains(&s.year))
                .cloned()
                .collect::<Vec<_>>();
            SeasonData::Batting(&kept_batting)
        }
        SeasonData::Pitching(rows) => {
            kept_pitching = rows
                .iter()
                .filter(|s| kept_years.contains(&s.year))
                .cloned()
                .collect::<Vec<_>>();
            SeasonData::Pitching(&kept_pitching)
        }
    };
    let points = trajectory(player, kept_data, config.eligibility(), &fits)?;
    let mut table = Table::new(&["player_id", "year", "component", "raw_rate", "z"]);
    for p in &points {
        table.push_row(vec![
            p.player_id.clone().into(),
            CellValue::Int(p.year.into()),
            p.component.to_string().into(),
            p.raw_rate.into(),
            p.z.into(),
        ]);
    }
    let stem = format!("trajectory_{player}_{year_from}_{year_to}");
    write_table(config, &stem, &table)?;
    let panel_order = [Component::Bb, Component::So, Component::Hr, Component::Hip];
    let panels: Vec<(String, Vec<(f64, f64)>)> = panel_order
        .iter()
        .map(|&c| {
            (
                c.to_string(),
                points
                    .iter()
                    .filter(|p| p.component == c)
                    .map(|p| (p.year as f64, p.z))
                    .collect(),
            )
        })
        .collect();
    let svg = four_panel_chart(
        &format!("Standardized component residuals for {player}"),
        "season",
        "z",
        &panels,
    );
    write_svg(config, &stem, &svg)?;
    Ok(())
}

pub fn cmd_simulate(
    config: &RunConfig,
    measure: Measure,
    reps: usize,
    players: usize,
    opportunities: u64,
) -> Result<()> {
    let spec = SimulationSpec {
        measure,
        replications: reps,
        n_players: players,
        opportunities,
        seed: config.seed,
        eligibility: config.eligibility(),
        fit: config.fit_options(),
    };
    let outcome = run_simulation(&spec)?;
    let mut table = Table::new(&[
        "rep",
        "measure",
        "s_c",
        "s_i",
        "improvement",
        "n_players",
    ]);
    let mut positive = 0usize;
    for (i, r) in outcome.results.iter().enumerate() {
        table.push_row(vec![
            CellValue::Int(i as i64 + 1),
            r.measure.to_string().into(),
            r.s_c.into(),
            r.s_i.into(),
            r.improvement.into(),
            CellValue::Int(r.n_players as i64),
        ]);
        if r.improvement > 0.0 {
            positive += 1;
        }
    }
    write_table(config, &format!("simulate_{}", lower(measure)), &table)?;
    println!(
        "positive improvement in {positive} of {} replications (fraction {})",
        outcome.results.len(),
        crate::output::format_sig(outcome.positive_fraction, 6)
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_structure_is_valid() {
        Cli::command().debug_assert();
    }

    #[test]
    fn format_parses_case_insensitively() {
        assert_eq!("CSV".parse::<OutputFormat>().unwrap(), OutputFormat::Csv);
        assert_eq!("Json".parse::<OutputFormat>().unwrap(), OutputFormat::Json);
        assert!("yaml".parse::<OutputFormat>().is_err());
    }

    #[test]
    fn config_defaults_match_documented_values() {
        let c = RunConfig::default();
        assert_eq!(c.min_ab, 100);
        assert_eq!(c.min_bfp, 300);
        assert_eq!(c.log_k_cap, 15.0);
        assert_eq!(c.seed, 0);
        assert_eq!(c.output_format, OutputFormat::Csv);
    }

    #[test]
    fn validate_rejects_bad_thresholds() {
        let mut c = RunConfig::default();
        c.min_ab = 0;
        assert!(c.validate().is_err());
        let mut c = RunConfig::default();
        c.tol = 0.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn config_file_rejects_unknown_keys() {
        let err = toml::from_str::<ConfigFile>("minAB = 5").unwrap_err();
        assert!(err.to_string().contains("minAB"));
    }

    #[test]
    fn population_inference_needs_exactly_one_path() {
        let mut config = RunConfig::default();
        assert!(resolve_population(&config, None).is_err());
        config.batting_path = Some(PathBuf::from("b.csv"));
        assert_eq!(
            resolve_population(&config, None).unwrap(),
            Population::Batters
        );
        config.pitching_path = Some(PathBuf::from("p.csv"));
        assert!(resolve_population(&config, None).is_err());
        assert_eq!(
            resolve_population(&config, Some("pitchers")).unwrap(),
            Population::Pitchers
        );
    }
}
