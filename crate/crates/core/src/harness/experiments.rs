//! Replicate batches and the reports built from them.
//!
//! Replicate `i` always draws from stream `i` of the master seed, replicates
//! are grouped in fixed-size chunks, and chunk partials are merged in chunk
//! order, so reports are identical for every worker count.

use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::distributions::{ModelParams, WSampler};
use crate::error::{Error, Result};
use crate::exact::{extinction_probability, single_clan_bound};
use crate::harness::stats::{ConditionalStats, EstimateWithCI, MeanStats};
use crate::harness::{compare, compare_at_most, ks_distance, Verdict, DEFAULT_SLACK};
use crate::limits::{gamma_limit_cdf, limit_pairwise, limit_pairwise_finite, limit_tau, LimitEstimate};
use crate::rng::{limit_stream, stream};
use crate::simulator::{
    simulate_forest, simulate_plain_gw, CoalescenceOutcome, GenealogyForest, SimulationLimits,
};

pub const REPORT_VERSION: &str = concat!("gwpi-", env!("CARGO_PKG_VERSION"));
/// Replicates per work unit; fixed so results do not depend on the thread count.
const CHUNK: u64 = 64;
/// KS threshold between `Z_n / n` and its Gamma limit.
pub const KS_GAMMA_THRESHOLD: f64 = 0.05;

/// Execution settings that never affect reported values.
#[derive(Debug, Clone, Copy, Default)]
pub struct Execution {
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
    pub limits: SimulationLimits,
}

impl Execution {
    fn install<T: Send>(&self, work: impl FnOnce() -> T + Send) -> Result<T> {
        match self.threads {
            Some(t) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(t.max(1))
                    .build()
                    .map_err(|e| Error::domain(format!("thread pool: {e}")))?;
                Ok(pool.install(work))
            }
            None => Ok(work()),
        }
    }
}

/// Runs `replicates` independent work items in chunks and merges their
/// partial statistics in chunk order.
fn run_chunked<P, F>(exec: &Execution, replicates: u64, init: fn() -> P, work: F) -> Result<P>
where
    P: Send + Mergeable,
    F: Fn(u64, &mut P) -> Result<()> + Sync,
{
    let chunks = replicates.div_ceil(CHUNK);
    let partials: Vec<Result<P>> = exec.install(|| {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut partial = init();
                for i in c * CHUNK..((c + 1) * CHUNK).min(replicates) {
                    work(i, &mut partial)?;
                }
                Ok(partial)
            })
            .collect()
    })?;
    let mut total = init();
    for p in partials {
        total.merge(p?);
    }
    Ok(total)
}

trait Mergeable {
    fn merge(&mut self, other: Self);
}

/// Hex SHA-256 of the two laws, used to match reports with limit tables.
pub fn params_hash(params: &ModelParams) -> String {
    let canonical = serde_json::json!({
        "offspring": params.offspring.pmf(),
        "immigration": params.immigration.pmf(),
    });
    let digest = Sha256::digest(canonical.to_string().as_bytes());
    digest.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// `k = round(u n)`, kept inside `0..n`.
pub fn cut_generation(u: f64, n: usize) -> usize {
    ((u * n as f64).round() as usize).min(n.saturating_sub(1))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteNConfig {
    pub n: usize,
    pub replicates: u64,
    pub u_grid: Vec<f64>,
    pub seed: u64,
    pub slack: f64,
}

impl FiniteNConfig {
    pub fn new(n: usize, replicates: u64, u_grid: Vec<f64>, seed: u64) -> Self {
        Self { n, replicates, u_grid, seed, slack: DEFAULT_SLACK }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelEcho {
    pub offspring: Vec<f64>,
    pub immigration: Vec<f64>,
    pub m: f64,
    pub sigma2: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl From<&ModelParams> for ModelEcho {
    fn from(p: &ModelParams) -> Self {
        Self {
            offspring: p.offspring.pmf().to_vec(),
            immigration: p.immigration.pmf().to_vec(),
            m: p.m,
            sigma2: p.sigma2,
            beta: p.beta,
            gamma: p.gamma,
        }
    }
}

/// One estimated quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub u: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k: Option<usize>,
    pub estimate: EstimateWithCI,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactReferences {
    /// Probability that exactly one clan survives to `n`.
    pub single_clan_bound: f64,
    /// `P(Z_n = 0)`.
    pub extinction_probability: f64,
    /// `P(A_n < inf | Z_n > 0)`.
    pub total_coalescence_finite: f64,
    /// `(u, (1 - u)^gamma)` on the grid.
    pub oldest_clan_limit: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub model: ModelEcho,
    #[serde(flatten)]
    pub run: FiniteNConfig,
}

/// Finite-`n` experiment report. Serializes to `{config, params_hash,
/// targets, references, verdicts, seed, version}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteNReport {
    pub version: String,
    pub config: ReportConfig,
    pub params_hash: String,
    pub seed: u64,
    pub targets: Vec<Target>,
    pub references: ExactReferences,
    pub verdicts: Vec<Verdict>,
    /// `Z_n / n` for every replicate, in replicate order (not serialized).
    #[serde(skip)]
    pub scaled_population: Vec<f64>,
}

impl FiniteNReport {
    pub fn target(&self, name: &str, u: Option<f64>) -> Option<&Target> {
        self.targets.iter().find(|t| t.name == name && same_u(t.u, u))
    }

    pub fn estimate(&self, name: &str, u: Option<f64>) -> Option<EstimateWithCI> {
        self.target(name, u).map(|t| t.estimate)
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    /// Plot-ready rows keyed by `u`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "u,k,pair_window_clan,pair_window_clan_stderr,pair_window_traced,pair_window_traced_stderr,\
             oldest_clan_after,oldest_clan_after_stderr,oldest_clan_limit,verdict\n",
        );
        for (i, &u) in self.config.run.u_grid.iter().enumerate() {
            let clan = self.estimate("pair_window_clan", Some(u)).expect("target present");
            let traced = self.estimate("pair_window_traced", Some(u)).expect("target present");
            let oldest = self.estimate("oldest_clan_after", Some(u)).expect("target present");
            let k = self.target("pair_window_clan", Some(u)).and_then(|t| t.k).unwrap_or_default();
            let pass = self.verdicts.iter().filter(|v| same_u(v.u, Some(u))).all(|v| v.pass);
            let _ = writeln!(
                out,
                "{u},{k},{},{},{},{},{},{},{},{}",
                clan.value,
                clan.stderr,
                traced.value,
                traced.stderr,
                oldest.value,
                oldest.stderr,
                self.references.oldest_clan_limit[i].1,
                if pass { "PASS" } else { "FAIL" }
            );
        }
        out
    }
}

fn same_u(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (Some(x), Some(y)) => (x - y).abs() < 1e-12,
        (None, None) => true,
        _ => false,
    }
}

/// Per-chunk sufficient statistics for [`run_finite_n`].
#[derive(Debug, Clone, Default)]
struct FiniteNPartial {
    scaled_population: Vec<f64>,
    population: MeanStats,
    pair_window_clan: Vec<ConditionalStats>,
    pair_window_traced: Vec<ConditionalStats>,
    pair_finite_clan: ConditionalStats,
    pair_finite_traced: ConditionalStats,
    total_finite: ConditionalStats,
    single_clan: MeanStats,
    oldest_after: Vec<MeanStats>,
}

impl Mergeable for FiniteNPartial {
    fn merge(&mut self, other: Self) {
        self.scaled_population.extend(other.scaled_population);
        self.population.merge(&other.population);
        merge_vec(&mut self.pair_window_clan, &other.pair_window_clan, ConditionalStats::merge);
        merge_vec(&mut self.pair_window_traced, &other.pair_window_traced, ConditionalStats::merge);
        self.pair_finite_clan.merge(&other.pair_finite_clan);
        self.pair_finite_traced.merge(&other.pair_finite_traced);
        self.total_finite.merge(&other.total_finite);
        self.single_clan.merge(&other.single_clan);
        merge_vec(&mut self.oldest_after, &other.oldest_after, MeanStats::merge);
    }
}

fn merge_vec<T: Default + Clone>(into: &mut Vec<T>, from: &[T], merge: fn(&mut T, &T)) {
    if into.len() < from.len() {
        into.resize(from.len(), T::default());
    }
    for (a, b) in into.iter_mut().zip(from) {
        merge(a, b);
    }
}

fn indicator(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

impl FiniteNPartial {
    fn record<R: Rng>(&mut self, forest: &GenealogyForest, ks: &[usize], rng: &mut R) -> Result<()> {
        let n = forest.n();
        let z = forest.final_population();
        if self.pair_window_clan.is_empty() {
            self.pair_window_clan = vec![ConditionalStats::default(); ks.len()];
            self.pair_window_traced = vec![ConditionalStats::default(); ks.len()];
            self.oldest_after = vec![MeanStats::default(); ks.len()];
        }
        self.scaled_population.push(z as f64 / n as f64);
        self.population.push(z as f64);

        if z > 1 {
            let ratios = forest.pairwise_ratios(ks);
            let pair = forest.sample_pairwise_coalescence(rng)?;
            for (i, &k) in ks.iter().enumerate() {
                self.pair_window_clan[i].push(Some(ratios[i].ratio));
                self.pair_window_traced[i].push(Some(indicator(pair.within(k, n))));
            }
            self.pair_finite_clan.push(forest.same_founder_ratio());
            self.pair_finite_traced.push(Some(indicator(pair.is_finite())));
        } else {
            for i in 0..ks.len() {
                self.pair_window_clan[i].push(None);
                self.pair_window_traced[i].push(None);
            }
            self.pair_finite_clan.push(None);
            self.pair_finite_traced.push(None);
        }

        if z > 0 {
            self.total_finite.push(Some(indicator(forest.total_coalescence()?.is_finite())));
        } else {
            self.total_finite.push(None);
        }
        self.single_clan.push(indicator(forest.single_surviving_clan()));

        let oldest = forest.oldest_clan_birth();
        for (i, &k) in ks.iter().enumerate() {
            let after = match oldest {
                CoalescenceOutcome::Finite(t) => t as usize > k,
                CoalescenceOutcome::Infinite => true,
            };
            self.oldest_after[i].push(indicator(after));
        }
        Ok(())
    }
}

/// Simulates `replicates` forests to generation `n` and estimates every
/// finite-`n` coalescence quantity, with exact references where they exist.
pub fn run_finite_n(params: &ModelParams, config: &FiniteNConfig, exec: &Execution) -> Result<FiniteNReport> {
    if config.n < 1 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    if config.replicates < 2 {
        return Err(Error::Precondition("at least two replicates are needed".into()));
    }
    if let Some(u) = config.u_grid.iter().find(|u| !(**u > 0.0 && **u < 1.0)) {
        return Err(Error::domain(format!("u = {u} not in (0,1)")));
    }
    let n = config.n;
    let ks: Vec<usize> = config.u_grid.iter().map(|u| cut_generation(*u, n)).collect();
    let total = run_chunked(exec, config.replicates, FiniteNPartial::default, |i, partial| {
        let mut rng = stream(config.seed, i);
        let forest = simulate_forest(params, n, &exec.limits, &mut rng)?;
        partial.record(&forest, &ks, &mut rng)
    })?;

    let mut targets = Vec::new();
    let push = |targets: &mut Vec<Target>, name: &str, u: Option<f64>, k: Option<usize>, e: EstimateWithCI| {
        targets.push(Target { name: name.to_string(), u, k, estimate: e })
    };
    for (i, (&u, &k)) in config.u_grid.iter().zip(&ks).enumerate() {
        push(&mut targets, "pair_window_clan", Some(u), Some(k), total.pair_window_clan[i].estimate());
        push(&mut targets, "pair_window_traced", Some(u), Some(k), total.pair_window_traced[i].estimate());
        push(&mut targets, "oldest_clan_after", Some(u), Some(k), total.oldest_after[i].estimate());
    }
    push(&mut targets, "pair_finite_clan", None, None, total.pair_finite_clan.estimate());
    push(&mut targets, "pair_finite_traced", None, None, total.pair_finite_traced.estimate());
    push(&mut targets, "total_coalescence_finite", None, None, total.total_finite.estimate());
    push(&mut targets, "single_clan", None, None, total.single_clan.estimate());
    let mut scaled_mean = total.population.estimate();
    scaled_mean.value /= n as f64;
    scaled_mean.stderr /= n as f64;
    push(&mut targets, "population_over_n_mean", None, None, scaled_mean);
    let ks_gamma = ks_distance(&total.scaled_population, |t| gamma_limit_cdf(t, params).unwrap_or(0.0))?;
    push(&mut targets, "population_over_n_ks_gamma", None, None, EstimateWithCI::exact(ks_gamma));

    let bound = single_clan_bound(params, n)?;
    let extinction = extinction_probability(params, n);
    let references = ExactReferences {
        single_clan_bound: bound,
        extinction_probability: extinction,
        total_coalescence_finite: bound / (1.0 - extinction),
        oldest_clan_limit: config
            .u_grid
            .iter()
            .map(|u| Ok((*u, limit_tau(*u, params.gamma)?)))
            .collect::<Result<_>>()?,
    };

    let mut verdicts = Vec::new();
    for (i, &u) in config.u_grid.iter().enumerate() {
        let clan = total.pair_window_clan[i].estimate();
        let traced = total.pair_window_traced[i].estimate();
        if clan.n_effective > 1 {
            verdicts.push(compare(&traced, clan, 0.0).named("pair_estimators_agree").at_u(u));
        }
        verdicts.push(
            compare(&total.oldest_after[i].estimate(), references.oldest_clan_limit[i].1, config.slack)
                .named("oldest_clan_vs_limit")
                .at_u(u),
        );
    }
    let clan = total.pair_finite_clan.estimate();
    if clan.n_effective > 1 {
        verdicts.push(compare(&total.pair_finite_traced.estimate(), clan, 0.0).named("pair_finite_estimators_agree"));
    }
    let total_finite = total.total_finite.estimate();
    verdicts.push(compare_at_most(&total_finite, bound, 0.0).named("total_coalescence_below_single_clan_bound"));
    verdicts.push(
        compare(&total_finite, references.total_coalescence_finite, 0.0).named("total_coalescence_vs_exact"),
    );
    verdicts.push(compare(&total.single_clan.estimate(), bound, 0.0).named("single_clan_vs_exact"));
    verdicts.push(
        compare_at_most(&EstimateWithCI::exact(ks_gamma), 0.0, KS_GAMMA_THRESHOLD).named("population_ks_vs_gamma"),
    );

    Ok(FiniteNReport {
        version: REPORT_VERSION.to_string(),
        config: ReportConfig { model: params.into(), run: config.clone() },
        params_hash: params_hash(params),
        seed: config.seed,
        targets,
        references,
        verdicts,
        scaled_population: total.scaled_population,
    })
}

/// Finite-`n` scan over several generation counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub version: String,
    pub params_hash: String,
    pub seed: u64,
    pub rows: Vec<SweepRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub pair_finite: EstimateWithCI,
    pub total_coalescence_finite: EstimateWithCI,
    pub total_coalescence_exact: f64,
    pub single_clan_bound: f64,
    pub population_ks_gamma: f64,
}

impl SweepReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "n,pair_finite,pair_finite_stderr,total_coalescence_finite,total_coalescence_stderr,\
             total_coalescence_exact,single_clan_bound,population_ks_gamma\n",
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.n,
                r.pair_finite.value,
                r.pair_finite.stderr,
                r.total_coalescence_finite.value,
                r.total_coalescence_finite.stderr,
                r.total_coalescence_exact,
                r.single_clan_bound,
                r.population_ks_gamma
            );
        }
        out
    }
}

/// Runs [`run_finite_n`] for every `n` in `n_grid` (seeded identically) and
/// tabulates the scaling of the pair and total coalescence probabilities.
pub fn run_sweep(
    params: &ModelParams,
    n_grid: &[usize],
    base: &FiniteNConfig,
    exec: &Execution,
) -> Result<(SweepReport, Vec<FiniteNReport>)> {
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for &n in n_grid {
        let report = run_finite_n(params, &FiniteNConfig { n, ..base.clone() }, exec)?;
        rows.push(SweepRow {
            n,
            pair_finite: report.estimate("pair_finite_clan", None).expect("target present"),
            total_coalescence_finite: report.estimate("total_coalescence_finite", None).expect("target present"),
            total_coalescence_exact: report.references.total_coalescence_finite,
            single_clan_bound: report.references.single_clan_bound,
            population_ks_gamma: report.estimate("population_over_n_ks_gamma", None).expect("target present").value,
        });
        reports.push(report);
    }
    let sweep = SweepReport { version: REPORT_VERSION.to_string(), params_hash: params_hash(params), seed: base.seed, rows };
    Ok((sweep, reports))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitConfig {
    pub u_grid: Vec<f64>,
    pub draws: u64,
    pub epsilon: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitRow {
    pub u: f64,
    pub pairwise: LimitEstimate,
    pub oldest_clan: f64,
}

/// Limit values over a grid of `u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitTable {
    pub version: String,
    pub model: ModelEcho,
    pub config: LimitConfig,
    pub params_hash: String,
    pub rows: Vec<LimitRow>,
    pub pairwise_finite: LimitEstimate,
    /// `gamma sigma2 / 2`, the mean of the immigration mass `<f, W>`.
    pub immigration_mass_mean: f64,
}

impl LimitTable {
    pub fn row(&self, u: f64) -> Option<&LimitRow> {
        self.rows.iter().find(|r| (r.u - u).abs() < 1e-12)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("u,pairwise_limit,pairwise_stderr,oldest_clan_limit,bias_bound,resamples\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.u,
                r.pairwise.estimate.value,
                r.pairwise.estimate.stderr,
                r.oldest_clan,
                r.pairwise.bias_bound,
                r.pairwise.resample_count
            );
        }
        let f = &self.pairwise_finite;
        let _ = writeln!(out, "finite,{},{},,{},{}", f.estimate.value, f.estimate.stderr, f.bias_bound, f.resample_count);
        out
    }
}

/// Evaluates the pairwise limit on the grid, the finite-coalescence limit and
/// the oldest-clan limit. Grid point `i` uses limit stream `i`; the finite
/// limit uses the stream after the grid.
pub fn run_limits(params: &ModelParams, config: &LimitConfig, exec: &Execution) -> Result<LimitTable> {
    // validates epsilon before spawning work
    WSampler::for_params(params, config.epsilon)?;
    let rows: Vec<Result<LimitRow>> = exec.install(|| {
        config
            .u_grid
            .par_iter()
            .enumerate()
            .map(|(i, &u)| {
                let mut rng = limit_stream(config.seed, i as u64);
                Ok(LimitRow {
                    u,
                    pairwise: limit_pairwise(u, params, config.draws, config.epsilon, &mut rng)?,
                    oldest_clan: limit_tau(u, params.gamma)?,
                })
            })
            .collect()
    })?;
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let mut rng = limit_stream(config.seed, config.u_grid.len() as u64);
    let pairwise_finite = limit_pairwise_finite(params, config.draws, config.epsilon, &mut rng)?;
    Ok(LimitTable {
        version: REPORT_VERSION.to_string(),
        model: params.into(),
        config: config.clone(),
        params_hash: params_hash(params),
        rows,
        pairwise_finite,
        immigration_mass_mean: params.gamma * params.sigma2 / 2.0,
    })
}

/// Verdicts joining a finite-`n` report with a limit table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonSummary {
    pub params_hash: String,
    pub n: usize,
    pub slack: f64,
    pub verdicts: Vec<Verdict>,
    pub all_pass: bool,
}

/// Compares the finite-`n` pair probabilities with their limits.
pub fn compare_reports(report: &FiniteNReport, limits: &LimitTable, slack: f64) -> Result<ComparisonSummary> {
    if report.params_hash != limits.params_hash {
        return Err(Error::Schema(format!(
            "report params hash {} does not match limit table hash {}",
            report.params_hash, limits.params_hash
        )));
    }
    let mut verdicts = Vec::new();
    for &u in &report.config.run.u_grid {
        let row = limits
            .row(u)
            .ok_or_else(|| Error::Schema(format!("limit table has no row for u = {u}")))?;
        let clan = report
            .estimate("pair_window_clan", Some(u))
            .ok_or_else(|| Error::Schema(format!("report has no pair estimate for u = {u}")))?;
        verdicts.push(compare(&clan, row.pairwise.estimate, slack).named("pair_window_vs_limit").at_u(u).at_n(report.config.run.n));
    }
    let finite = report
        .estimate("pair_finite_clan", None)
        .ok_or_else(|| Error::Schema("report has no finite pair estimate".into()))?;
    verdicts.push(
        compare(&finite, limits.pairwise_finite.estimate, slack).named("pair_finite_vs_limit").at_n(report.config.run.n),
    );
    let all_pass = verdicts.iter().all(|v| v.pass);
    Ok(ComparisonSummary { params_hash: report.params_hash.clone(), n: report.config.run.n, slack, verdicts, all_pass })
}

/// Single-ancestor baseline: tails of the total and pair coalescence times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlainBaseline {
    pub n: usize,
    pub runs: u64,
    pub seed: u64,
    /// `P(Y_n >= 1)`.
    pub survival: EstimateWithCI,
    pub rows: Vec<PlainRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlainRow {
    pub u: f64,
    pub k: usize,
    /// `P(A_n > k | Y_n >= 1)`.
    pub total_tail: EstimateWithCI,
    /// `P(X_n >= k | Y_n >= 2)` by pair sampling.
    pub pair_tail: EstimateWithCI,
}

#[derive(Debug, Clone, Default)]
struct PlainPartial {
    survival: MeanStats,
    total_tail: Vec<ConditionalStats>,
    pair_tail: Vec<ConditionalStats>,
}

impl Mergeable for PlainPartial {
    fn merge(&mut self, other: Self) {
        self.survival.merge(&other.survival);
        merge_vec(&mut self.total_tail, &other.total_tail, ConditionalStats::merge);
        merge_vec(&mut self.pair_tail, &other.pair_tail, ConditionalStats::merge);
    }
}

/// Runs `runs` single-ancestor processes to generation `n`; tail
/// probabilities are conditioned on survival by rejection.
pub fn run_plain_baseline(
    params: &ModelParams,
    n: usize,
    u_grid: &[f64],
    runs: u64,
    seed: u64,
    exec: &Execution,
) -> Result<PlainBaseline> {
    let ks: Vec<usize> = u_grid.iter().map(|u| cut_generation(*u, n)).collect();
    let total = run_chunked(exec, runs, PlainPartial::default, |i, partial| {
        let mut rng = stream(seed, i);
        let forest = simulate_plain_gw(&params.offspring, n, &exec.limits, &mut rng)?;
        let y = forest.final_population();
        if partial.total_tail.is_empty() {
            partial.total_tail = vec![ConditionalStats::default(); ks.len()];
            partial.pair_tail = vec![ConditionalStats::default(); ks.len()];
        }
        partial.survival.push(indicator(y >= 1));
        let total_time = if y >= 1 { Some(forest.total_coalescence()?) } else { None };
        let pair_time = if y >= 2 { Some(forest.sample_pairwise_coalescence(&mut rng)?) } else { None };
        for (j, &k) in ks.iter().enumerate() {
            partial.total_tail[j].push(total_time.map(|a| indicator(matches!(a, CoalescenceOutcome::Finite(g) if g as usize > k))));
            partial.pair_tail[j].push(pair_time.map(|x| indicator(matches!(x, CoalescenceOutcome::Finite(g) if g as usize >= k))));
        }
        Ok(())
    })?;
    Ok(PlainBaseline {
        n,
        runs,
        seed,
        survival: total.survival.estimate(),
        rows: u_grid
            .iter()
            .zip(&ks)
            .enumerate()
            .map(|(j, (&u, &k))| PlainRow {
                u,
                k,
                total_tail: total.total_tail[j].estimate(),
                pair_tail: total.pair_tail[j].estimate(),
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::validate_model;

    fn params() -> ModelParams {
        validate_model(&[0.5, 0.0, 0.5], &[0.5, 0.5]).unwrap()
    }

    #[test]
    fn cut_generation_rounds_and_clamps() {
        assert_eq!(cut_generation(0.5, 256), 128);
        assert_eq!(cut_generation(0.1, 256), 26);
        assert_eq!(cut_generation(0.99, 10), 9);
    }

    #[test]
    fn hash_depends_on_laws_only() {
        let a = params_hash(&params());
        assert_eq!(a.len(), 64);
        assert_eq!(a, params_hash(&params()));
        assert_ne!(a, params_hash(&validate_model(&[0.5, 0.0, 0.5], &[0.4, 0.6]).unwrap()));
    }

    #[test]
    fn worker_count_does_not_change_report() {
        let cfg = FiniteNConfig::new(16, 300, vec![0.25, 0.5], 99);
        let one = run_finite_n(&params(), &cfg, &Execution { threads: Some(1), ..Default::default() }).unwrap();
        let four = run_finite_n(&params(), &cfg, &Execution { threads: Some(4), ..Default::default() }).unwrap();
        assert_eq!(serde_json::to_string(&one).unwrap(), serde_json::to_string(&four).unwrap());
        assert_eq!(one.scaled_population, four.scaled_population);
    }

    #[test]
    fn merge_order_does_not_matter() {
        let p = params();
        let ks = [2usize, 5];
        let parts: Vec<FiniteNPartial> = (0..6)
            .map(|c| {
                let mut part = FiniteNPartial::default();
                for i in 0..50 {
                    let mut rng = stream(5, c * 50 + i);
                    let f = simulate_forest(&p, 10, &SimulationLimits::default(), &mut rng).unwrap();
                    part.record(&f, &ks, &mut rng).unwrap();
                }
                part
            })
            .collect();
        let fold = |order: &[usize]| {
            let mut t = FiniteNPartial::default();
            for &i in order {
                t.merge(parts[i].clone());
            }
            t
        };
        let a = fold(&[0, 1, 2, 3, 4, 5]);
        let b = fold(&[5, 3, 1, 0, 4, 2]);
        for (x, y) in [
            (a.pair_window_clan[0].estimate(), b.pair_window_clan[0].estimate()),
            (a.pair_window_traced[1].estimate(), b.pair_window_traced[1].estimate()),
            (a.total_finite.estimate(), b.total_finite.estimate()),
            (a.population.estimate(), b.population.estimate()),
        ] {
            assert!((x.value - y.value).abs() < 1e-12);
            assert!((x.stderr - y.stderr).abs() < 1e-12);
        }
    }

    #[test]
    fn compare_rejects_mismatched_models() {
        let exec = Execution::default();
        let report = run_finite_n(&params(), &FiniteNConfig::new(8, 100, vec![0.5], 1), &exec).unwrap();
        let other = validate_model(&[0.5, 0.0, 0.5], &[0.4, 0.6]).unwrap();
        let limits = run_limits(&other, &LimitConfig { u_grid: vec![0.5], draws: 100, epsilon: 1e-6, seed: 1 }, &exec).unwrap();
        assert!(matches!(compare_reports(&report, &limits, 0.03), Err(Error::Schema(_))));
    }

    #[test]
    fn finite_n_rejects_bad_input() {
        let exec = Execution::default();
        assert!(run_finite_n(&params(), &FiniteNConfig::new(0, 100, vec![0.5], 1), &exec).is_err());
        assert!(run_finite_n(&params(), &FiniteNConfig::new(4, 100, vec![1.5], 1), &exec).is_err());
    }
}
