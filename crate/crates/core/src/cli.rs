//! Configuration files and the `gwpi` subcommands.
//!
//! A run is described by one JSON document; every command-line flag has a
//! field of the same meaning there, and flags win. The effective
//! configuration is echoed into every report written.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::distributions::{validate_model, ModelParams, DEFAULT_EPSILON};
use crate::error::{Error, Result};
use crate::exact::{enumerate_tiny, iterate_survival, single_clan_bound, GoldenFile, DEFAULT_HISTORY_CAP};
use crate::harness::experiments::{ComparisonSummary, LimitConfig, SweepReport};
use crate::harness::{
    compare_reports, run_finite_n, run_limits, run_sweep, Execution, FiniteNConfig, FiniteNReport, LimitTable,
    DEFAULT_SLACK,
};
use crate::simulator::{SimulationLimits, DEFAULT_PARTICLE_CAP};

/// Environment variable consulted when neither flag nor file sets a seed.
pub const SEED_ENV: &str = "GWPI_SEED";
pub const FALLBACK_SEED: u64 = 42;

/// Exit code when a comparison produced at least one FAIL.
pub const EXIT_COMPARISON_FAILED: i32 = 1;

fn default_offspring() -> Vec<f64> {
    vec![0.5, 0.0, 0.5]
}
fn default_immigration() -> Vec<f64> {
    vec![0.5, 0.5]
}
fn default_n() -> usize {
    256
}
fn default_replicates() -> u64 {
    20_000
}
fn default_u_grid() -> Vec<f64> {
    vec![0.1, 0.25, 0.5, 0.75, 0.9]
}
fn default_epsilon() -> f64 {
    DEFAULT_EPSILON
}
fn default_slack() -> f64 {
    DEFAULT_SLACK
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_limit_draws() -> u64 {
    200_000
}
fn default_n_grid() -> Vec<usize> {
    vec![64, 128, 256]
}
fn default_exact_n() -> usize {
    3
}
fn default_survival_n() -> usize {
    10_000
}
fn default_max_particles() -> usize {
    DEFAULT_PARTICLE_CAP
}
fn default_max_histories() -> usize {
    DEFAULT_HISTORY_CAP
}

/// Configuration document. Missing fields take the defaults below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default = "default_offspring")]
    pub offspring: Vec<f64>,
    #[serde(default = "default_immigration")]
    pub immigration: Vec<f64>,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_replicates")]
    pub replicates: u64,
    #[serde(default = "default_u_grid")]
    pub u_grid: Vec<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_slack")]
    pub slack: f64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub threads: Option<usize>,
    /// Monte Carlo draws per limit value.
    #[serde(default = "default_limit_draws")]
    pub limit_draws: u64,
    /// Generation counts for `sweep`.
    #[serde(default = "default_n_grid")]
    pub n_grid: Vec<usize>,
    /// Largest `n` enumerated by `exact`.
    #[serde(default = "default_exact_n")]
    pub exact_n: usize,
    /// Length of the survival table written by `exact`.
    #[serde(default = "default_survival_n")]
    pub survival_n: usize,
    #[serde(default = "default_max_particles")]
    pub max_particles: usize,
    #[serde(default = "default_max_histories")]
    pub max_histories: usize,
}

impl Default for Config {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

fn config_error(field: &str, message: impl Into<String>) -> Error {
    Error::Config { field: field.to_string(), message: message.into() }
}

impl Config {
    /// Parses a configuration document; diagnostics carry line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            let msg = e.to_string();
            // serde names the offending field in backticks
            let field = msg.split('`').nth(1).filter(|_| !e.is_syntax()).unwrap_or("document").to_string();
            Error::Config { field, message: msg }
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| config_error("--config", format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Applies flag overrides and resolves the seed (flag, file, environment,
    /// then the fallback).
    pub fn with_overrides(mut self, flags: &RunFlags) -> Result<Self> {
        if let Some(v) = flags.seed {
            self.seed = Some(v);
        }
        if let Some(v) = flags.n {
            self.n = v;
        }
        if let Some(v) = flags.replicates {
            self.replicates = v;
        }
        if let Some(v) = &flags.u {
            self.u_grid = v.clone();
        }
        if let Some(v) = flags.epsilon {
            self.epsilon = v;
        }
        if let Some(v) = flags.slack {
            self.slack = v;
        }
        if let Some(v) = &flags.out {
            self.output_dir = v.clone();
        }
        if let Some(v) = flags.threads {
            self.threads = Some(v);
        }
        if self.seed.is_none() {
            self.seed = Some(match std::env::var(SEED_ENV) {
                Ok(s) => s
                    .trim()
                    .parse()
                    .map_err(|e| config_error(SEED_ENV, format!("`{s}` is not an unsigned integer: {e}")))?,
                Err(_) => FALLBACK_SEED,
            });
        }
        Ok(self)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(FALLBACK_SEED)
    }

    /// Validates the laws; failures name the check that was violated.
    pub fn params(&self) -> Result<ModelParams> {
        validate_model(&self.offspring, &self.immigration).map_err(|e| {
            let field = match e {
                Error::NoImmigration => "immigration",
                Error::NotAProbability { .. } if crate::distributions::DiscreteLaw::new(self.offspring.clone()).is_ok() => {
                    "immigration"
                }
                _ => "offspring",
            };
            config_error(field, e.to_string())
        })
    }

    fn check_run(&self) -> Result<()> {
        if self.n < 1 {
            return Err(config_error("n", "must be at least 1"));
        }
        if self.replicates < 100 {
            return Err(config_error("replicates", "must be at least 100"));
        }
        self.check_grid()?;
        if self.slack.is_nan() || self.slack < 0.0 {
            return Err(config_error("slack", "must be nonnegative"));
        }
        Ok(())
    }

    fn check_grid(&self) -> Result<()> {
        if self.u_grid.is_empty() {
            return Err(config_error("u_grid", "must not be empty"));
        }
        if let Some(u) = self.u_grid.iter().find(|u| !(**u > 0.0 && **u < 1.0)) {
            return Err(config_error("u_grid", format!("{u} is not in (0,1)")));
        }
        Ok(())
    }

    fn check_limits(&self) -> Result<()> {
        self.check_grid()?;
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(config_error("epsilon", "must be positive"));
        }
        if self.limit_draws < 2 {
            return Err(config_error("limit_draws", "must be at least 2"));
        }
        Ok(())
    }

    pub fn execution(&self) -> Execution {
        Execution { threads: self.threads, limits: SimulationLimits { max_particles: self.max_particles } }
    }

    pub fn finite_n(&self) -> FiniteNConfig {
        FiniteNConfig {
            n: self.n,
            replicates: self.replicates,
            u_grid: self.u_grid.clone(),
            seed: self.seed(),
            slack: self.slack,
        }
    }

    pub fn limit_config(&self) -> LimitConfig {
        LimitConfig { u_grid: self.u_grid.clone(), draws: self.limit_draws, epsilon: self.epsilon, seed: self.seed() }
    }
}

#[derive(Debug, Parser)]
#[command(name = "gwpi", version, about = "Coalescence times in critical Galton-Watson processes with immigration")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate replicates at one n and write the report.
    Simulate(RunFlags),
    /// Evaluate the limit values on the u grid.
    Limit(RunFlags),
    /// Enumerate tiny instances and write golden files.
    Exact(RunFlags),
    /// Compare a simulation report with a limit table.
    Compare(CompareFlags),
    /// Repeat the simulation over the n grid.
    Sweep(RunFlags),
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunFlags {
    /// JSON configuration document.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub replicates: Option<u64>,
    /// Values of u, comma separated or repeated.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub u: Option<Vec<f64>>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub slack: Option<f64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct CompareFlags {
    /// Report written by `simulate`.
    pub report: PathBuf,
    /// Table written by `limit`.
    pub limits: PathBuf,
    #[arg(long)]
    pub slack: Option<f64>,
    /// Directory for the comparison summary.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Effective configuration for a run: file, then flags, then seed resolution.
pub fn resolve_config(flags: &RunFlags) -> Result<Config> {
    let base = match &flags.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    base.with_overrides(flags)
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(&path, text)?;
    Ok(path)
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, text)?;
    Ok(path)
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path, what: &str) -> Result<T> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Schema(format!("{} is not a {what}: {e}", path.display())))
}

/// Runs the finite-`n` experiment; writes `report.json` and `report.csv`.
pub fn cmd_simulate(flags: &RunFlags) -> Result<FiniteNReport> {
    let config = resolve_config(flags)?;
    config.check_run()?;
    let params = config.params()?;
    let started = Instant::now();
    let report = run_finite_n(&params, &config.finite_n(), &config.execution())?;
    write_json(&config.output_dir, "report.json", &report)?;
    write_text(&config.output_dir, "report.csv", &report.to_csv())?;
    eprintln!("simulate: {} replicates at n = {} in {:.2?}", config.replicates, config.n, started.elapsed());
    Ok(report)
}

/// Evaluates the limit values; writes `limits.json` and `limits.csv`.
pub fn cmd_limit(flags: &RunFlags) -> Result<LimitTable> {
    let config = resolve_config(flags)?;
    config.check_limits()?;
    let params = config.params()?;
    let started = Instant::now();
    let table = run_limits(&params, &config.limit_config(), &config.execution())?;
    write_json(&config.output_dir, "limits.json", &table)?;
    write_text(&config.output_dir, "limits.csv", &table.to_csv())?;
    eprintln!("limit: {} draws per value in {:.2?}", config.limit_draws, started.elapsed());
    Ok(table)
}

/// Survival probabilities and single-clan probabilities up to `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalGolden {
    pub offspring: Vec<f64>,
    pub immigration: Vec<f64>,
    /// `q_j`, `j = 0..=n`.
    pub q: Vec<f64>,
    /// `(n, single-clan probability)` at powers of two and at the last `n`.
    pub single_clan: Vec<(usize, f64)>,
}

/// Enumerates `n = 1..=exact_n` (or `--n`) and writes `exact_n{n}.json`
/// plus `survival.json`.
pub fn cmd_exact(flags: &RunFlags) -> Result<Vec<GoldenFile>> {
    let config = resolve_config(flags)?;
    let params = config.params()?;
    let top = flags.n.unwrap_or(config.exact_n);
    if top < 1 {
        return Err(config_error("n", "must be at least 1"));
    }
    let mut goldens = Vec::new();
    for n in 1..=top {
        let table = enumerate_tiny(&params, n, config.max_histories)?;
        let golden = GoldenFile::from_table(&params, &table);
        write_json(&config.output_dir, &format!("exact_n{n}.json"), &golden)?;
        goldens.push(golden);
    }
    let survival = iterate_survival(&params.offspring, config.survival_n);
    let mut checkpoints: Vec<usize> =
        std::iter::successors(Some(1usize), |n| n.checked_mul(2)).take_while(|n| *n < config.survival_n).collect();
    if config.survival_n >= 1 {
        checkpoints.push(config.survival_n);
    }
    let single_clan = checkpoints.into_iter().map(|n| Ok((n, single_clan_bound(&params, n)?))).collect::<Result<_>>()?;
    let golden = SurvivalGolden {
        offspring: config.offspring.clone(),
        immigration: config.immigration.clone(),
        q: survival.survival().to_vec(),
        single_clan,
    };
    write_json(&config.output_dir, "survival.json", &golden)?;
    Ok(goldens)
}

/// Joins a report and a limit table. Exit code 1 is signalled through
/// [`ComparisonSummary::all_pass`].
pub fn cmd_compare(flags: &CompareFlags) -> Result<ComparisonSummary> {
    let report: FiniteNReport = read_json(&flags.report, "simulation report")?;
    let limits: LimitTable = read_json(&flags.limits, "limit table")?;
    let slack = flags.slack.unwrap_or(report.config.run.slack);
    if slack.is_nan() || slack < 0.0 {
        return Err(config_error("slack", "must be nonnegative"));
    }
    let summary = compare_reports(&report, &limits, slack)?;
    if let Some(dir) = &flags.out {
        write_json(dir, "comparison.json", &summary)?;
    }
    Ok(summary)
}

/// Runs the experiment for each `n` in the grid; writes `sweep.json`,
/// `sweep.csv` and one `report_n{n}.json` per grid point.
pub fn cmd_sweep(flags: &RunFlags) -> Result<SweepReport> {
    let mut config = resolve_config(flags)?;
    if let Some(n) = flags.n {
        config.n_grid = vec![n];
    }
    if config.n_grid.is_empty() || config.n_grid.contains(&0) {
        return Err(config_error("n_grid", "must be a nonempty list of positive integers"));
    }
    config.check_run()?;
    let params = config.params()?;
    let (sweep, reports) = run_sweep(&params, &config.n_grid, &config.finite_n(), &config.execution())?;
    for r in &reports {
        write_json(&config.output_dir, &format!("report_n{}.json", r.config.run.n), r)?;
    }
    write_json(&config.output_dir, "sweep.json", &sweep)?;
    write_text(&config.output_dir, "sweep.csv", &sweep.to_csv())?;
    Ok(sweep)
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let outcome = match &cli.command {
        Command::Simulate(f) => cmd_simulate(f).map(|r| {
            for v in &r.verdicts {
                println!("{}", v.line());
            }
            0
        }),
        Command::Limit(f) => cmd_limit(f).map(|t| {
            print!("{}", t.to_csv());
            0
        }),
        Command::Exact(f) => cmd_exact(f).map(|g| {
            for file in &g {
                println!("n = {}: {} targets", file.n, file.targets.len());
            }
            0
        }),
        Command::Compare(f) => cmd_compare(f).map(|s| {
            for v in &s.verdicts {
                println!("{}", v.line());
            }
            if s.all_pass {
                0
            } else {
                EXIT_COMPARISON_FAILED
            }
        }),
        Command::Sweep(f) => cmd_sweep(f).map(|s| {
            print!("{}", s.to_csv());
            0
        }),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
