//! Deterministic ground truth: survival probabilities by generating-function
//! iteration, the exact single-surviving-clan probability, and exhaustive
//! enumeration of every history of a tiny instance.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::distributions::{DiscreteLaw, ModelParams};
use crate::error::{Error, Result};
use crate::simulator::{CoalescenceOutcome, FounderId, GenealogyForest, Particle};

/// Default cap on enumerated histories.
pub const DEFAULT_HISTORY_CAP: usize = 10_000_000;

/// `q_j = P(Y_j > 0)` for a single-ancestor process, `j = 0..=n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurvivalTable {
    q: Vec<f64>,
}

impl SurvivalTable {
    pub fn q(&self, j: usize) -> f64 {
        self.q[j]
    }

    /// `a_j = 1 - q_j = P(Y_j = 0)`.
    pub fn a(&self, j: usize) -> f64 {
        1.0 - self.q[j]
    }

    pub fn survival(&self) -> &[f64] {
        &self.q
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }
}

/// Iterates `q_{j+1} = 1 - F(1 - q_j)` from `q_0 = 1`.
pub fn iterate_survival(offspring: &DiscreteLaw, n: usize) -> SurvivalTable {
    let mut q = Vec::with_capacity(n + 1);
    q.push(1.0);
    for j in 0..n {
        let next = offspring.pgf_complement(q[j]).expect("q stays in [0,1]");
        q.push(next.clamp(0.0, 1.0));
    }
    SurvivalTable { q }
}

/// `P(Z_n = 0) = prod_{k=0..n} B(a_k)`.
pub fn extinction_probability(params: &ModelParams, n: usize) -> f64 {
    let survival = iterate_survival(&params.offspring, n);
    (0..=n).map(|k| pgf(&params.immigration, survival.a(k))).product()
}

/// Probability that exactly one immigrant clan has descendants at generation `n`:
///
/// `[prod_{k=0..n} B(a_k)] [sum_{j=0..n} B'(a_j) q_j / B(a_j)]`,
///
/// evaluated as `sum_j B'(a_j) q_j prod_{k != j} B(a_k)` so that `b_0 = 0`
/// needs no division. This is an upper bound for
/// `P(A_n < inf, Z_n > 0)`, and in fact equal to it.
pub fn single_clan_bound(params: &ModelParams, n: usize) -> Result<f64> {
    if n < 1 {
        return Err(Error::Precondition("single-clan bound needs n >= 1".into()));
    }
    let survival = iterate_survival(&params.offspring, n);
    let b: Vec<f64> = (0..=n).map(|k| pgf(&params.immigration, survival.a(k))).collect();
    let mut prefix = vec![1.0; n + 2];
    for k in 0..=n {
        prefix[k + 1] = prefix[k] * b[k];
    }
    let mut suffix = 1.0;
    let mut total = 0.0;
    for j in (0..=n).rev() {
        let slope = params.immigration.pgf_derivative(survival.a(j))?;
        total += slope * survival.q(j) * prefix[j] * suffix;
        suffix *= b[j];
    }
    Ok(total)
}

/// `P(A_n < inf | Z_n > 0)` from the exact single-clan probability.
pub fn single_clan_conditional(params: &ModelParams, n: usize) -> Result<f64> {
    Ok(single_clan_bound(params, n)? / (1.0 - extinction_probability(params, n)))
}

fn pgf(law: &DiscreteLaw, s: f64) -> f64 {
    law.pgf(s).expect("argument in [0,1]")
}

/// Exact joint quantities over every history up to generation `n`.
///
/// Pair statistics are accumulated as `E[statistic; Z_n > 1]`, total
/// coalescence as `P(A_n <= g, Z_n > 0)`; the accessor methods condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactTable {
    pub n: usize,
    pub histories: usize,
    pub total_probability: f64,
    /// `P(Z_n = z)`.
    pub population_law: Vec<f64>,
    /// Clan-count form of `P(k <= X < n, Z_n > 1)`, indexed by `k`.
    pub pair_window_clan: Vec<f64>,
    /// Same quantity by tracing every pair to its common ancestor.
    pub pair_window_traced: Vec<f64>,
    pub pair_finite_clan: f64,
    pub pair_finite_traced: f64,
    /// `P(A_n <= g, Z_n > 0)`, indexed by `g`.
    pub total_coalescence_by: Vec<f64>,
    pub total_coalescence_finite: f64,
    /// `P(tau_n > k)`, indexed by `k = 0..=n`.
    pub oldest_clan_after: Vec<f64>,
    /// `P(exactly one clan survives to n)`.
    pub single_clan: f64,
}

impl ExactTable {
    fn new(n: usize) -> Self {
        Self {
            n,
            histories: 0,
            total_probability: 0.0,
            population_law: Vec::new(),
            pair_window_clan: vec![0.0; n],
            pair_window_traced: vec![0.0; n],
            pair_finite_clan: 0.0,
            pair_finite_traced: 0.0,
            total_coalescence_by: vec![0.0; n + 1],
            total_coalescence_finite: 0.0,
            oldest_clan_after: vec![0.0; n + 1],
            single_clan: 0.0,
        }
    }

    pub fn prob_population(&self, z: usize) -> f64 {
        self.population_law.get(z).copied().unwrap_or(0.0)
    }

    /// `P(Z_n > 1)`.
    pub fn prob_more_than_one(&self) -> f64 {
        self.population_law.iter().skip(2).sum()
    }

    /// `P(Z_n > 0)`.
    pub fn prob_positive(&self) -> f64 {
        self.population_law.iter().skip(1).sum()
    }

    /// `P(k <= X < n | Z_n > 1)` from clan counts.
    pub fn pair_window(&self, k: usize) -> f64 {
        self.pair_window_clan[k] / self.prob_more_than_one()
    }

    /// `P(k <= X < n | Z_n > 1)` from traced pair ancestries.
    pub fn pair_window_by_tracing(&self, k: usize) -> f64 {
        self.pair_window_traced[k] / self.prob_more_than_one()
    }

    pub fn pair_finite(&self) -> f64 {
        self.pair_finite_clan / self.prob_more_than_one()
    }

    pub fn pair_finite_by_tracing(&self) -> f64 {
        self.pair_finite_traced / self.prob_more_than_one()
    }

    /// `P(A_n <= g | Z_n > 0)`.
    pub fn total_coalescence_cdf(&self, g: usize) -> f64 {
        self.total_coalescence_by[g] / self.prob_positive()
    }

    pub fn total_coalescence_finite_conditional(&self) -> f64 {
        self.total_coalescence_finite / self.prob_positive()
    }

    /// Named conditional targets for golden files.
    pub fn targets(&self) -> BTreeMap<String, f64> {
        let mut out = BTreeMap::new();
        for (z, p) in self.population_law.iter().enumerate() {
            out.insert(format!("prob_population_eq_{z:02}"), *p);
        }
        if self.prob_more_than_one() > 0.0 {
            for k in 0..self.n {
                out.insert(format!("pair_window_k{k}"), self.pair_window(k));
            }
            out.insert("pair_finite".into(), self.pair_finite());
        }
        if self.prob_positive() > 0.0 {
            for g in 0..=self.n {
                out.insert(format!("total_coalescence_le_{g}"), self.total_coalescence_cdf(g));
            }
            out.insert("total_coalescence_finite".into(), self.total_coalescence_finite_conditional());
        }
        for (k, p) in self.oldest_clan_after.iter().enumerate() {
            out.insert(format!("oldest_clan_after_{k}"), *p);
        }
        out.insert("single_clan".into(), self.single_clan);
        out
    }

    fn record(&mut self, forest: &GenealogyForest, prob: f64) {
        let n = self.n;
        let z = forest.final_population();
        self.histories += 1;
        self.total_probability += prob;
        if self.population_law.len() <= z {
            self.population_law.resize(z + 1, 0.0);
        }
        self.population_law[z] += prob;

        if z > 1 {
            let ks: Vec<usize> = (0..n).collect();
            for (k, r) in forest.pairwise_ratios(&ks).iter().enumerate() {
                self.pair_window_clan[k] += prob * r.ratio;
            }
            self.pair_finite_clan += prob * forest.same_founder_ratio().expect("z > 1");

            let mut by_generation = vec![0usize; n];
            let mut finite = 0usize;
            for j in 1..z {
                for i in 0..j {
                    if let CoalescenceOutcome::Finite(g) = forest.pair_coalescence(i, j) {
                        finite += 1;
                        if (g as usize) < n {
                            by_generation[g as usize] += 1;
                        }
                    }
                }
            }
            let pairs = (z * (z - 1) / 2) as f64;
            // pairs with ancestor in k..n, by suffix sum
            let mut acc = 0usize;
            for k in (0..n).rev() {
                acc += by_generation[k];
                self.pair_window_traced[k] += prob * acc as f64 / pairs;
            }
            self.pair_finite_traced += prob * finite as f64 / pairs;
        }

        if z > 0 {
            if let CoalescenceOutcome::Finite(g) = forest.total_coalescence().expect("z > 0") {
                self.total_coalescence_finite += prob;
                for slot in &mut self.total_coalescence_by[g as usize..] {
                    *slot += prob;
                }
            }
            if forest.single_surviving_clan() {
                self.single_clan += prob;
            }
        }

        let oldest = forest.oldest_clan_birth();
        for k in 0..=n {
            let after = match oldest {
                CoalescenceOutcome::Finite(t) => t as usize > k,
                CoalescenceOutcome::Infinite => true,
            };
            if after {
                self.oldest_clan_after[k] += prob;
            }
        }
    }
}

struct Enumerator<'a> {
    params: &'a ModelParams,
    n: usize,
    cap: usize,
    table: ExactTable,
    generations: Vec<Vec<Particle>>,
}

impl Enumerator<'_> {
    /// Chooses the immigrant count of generation `g`, then expands offspring.
    fn arrivals(&mut self, g: usize, prob: f64) -> Result<()> {
        let support: Vec<(usize, f64)> = self.params.immigration.support().collect();
        for (count, p) in support {
            let gen = self.generations.last_mut().expect("generation open");
            let base = gen.len();
            gen.extend((0..count).map(|l| Particle {
                parent: None,
                founder: FounderId { generation: g as u32, ordinal: l as u32 },
            }));
            if g == self.n {
                if self.table.histories >= self.cap {
                    return Err(Error::Explosion { cap: self.cap });
                }
                let forest = GenealogyForest::from_generations(self.generations.clone())?;
                self.table.record(&forest, prob * p);
            } else {
                self.generations.push(Vec::new());
                self.offspring(g, 0, prob * p)?;
                self.generations.pop();
            }
            self.generations.last_mut().expect("generation open").truncate(base);
        }
        Ok(())
    }

    /// Chooses the child count of particle `i` of generation `g`.
    fn offspring(&mut self, g: usize, i: usize, prob: f64) -> Result<()> {
        if i == self.generations[g].len() {
            return self.arrivals(g + 1, prob);
        }
        let founder = self.generations[g][i].founder;
        let support: Vec<(usize, f64)> = self.params.offspring.support().collect();
        for (count, p) in support {
            let next = self.generations.last_mut().expect("next generation open");
            let base = next.len();
            next.extend(std::iter::repeat_n(Particle { parent: Some(i as u32), founder }, count));
            self.offspring(g, i + 1, prob * p)?;
            self.generations.last_mut().expect("next generation open").truncate(base);
        }
        Ok(())
    }
}

/// Enumerates every history (immigration draw, then each particle's
/// offspring, left to right) up to generation `n` with its exact probability.
pub fn enumerate_tiny(params: &ModelParams, n: usize, max_histories: usize) -> Result<ExactTable> {
    if n < 1 {
        return Err(Error::Precondition("enumeration needs n >= 1".into()));
    }
    let mut e = Enumerator { params, n, cap: max_histories, table: ExactTable::new(n), generations: vec![Vec::new()] };
    e.arrivals(0, 1.0)?;
    Ok(e.table)
}

/// `P(k <= X < n | Z_n > 1)` computed two ways from the same enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairwiseExact {
    /// From same-clan pair counts over all pairs.
    pub clan_counts: f64,
    /// From tracing each pair to its most recent common ancestor.
    pub traced: f64,
}

pub fn exact_pairwise_prob(params: &ModelParams, n: usize, k: usize, max_histories: usize) -> Result<PairwiseExact> {
    if k >= n {
        return Err(Error::domain(format!("cut generation k = {k} must be below n = {n}")));
    }
    let table = enumerate_tiny(params, n, max_histories)?;
    Ok(PairwiseExact { clan_counts: table.pair_window(k), traced: table.pair_window_by_tracing(k) })
}

/// Golden file contents: `{params, n, targets: {name: value}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenFile {
    pub params: GoldenParams,
    pub n: usize,
    pub targets: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenParams {
    pub offspring: Vec<f64>,
    pub immigration: Vec<f64>,
}

impl GoldenFile {
    pub fn from_table(params: &ModelParams, table: &ExactTable) -> Self {
        Self {
            params: GoldenParams {
                offspring: params.offspring.pmf().to_vec(),
                immigration: params.immigration.pmf().to_vec(),
            },
            n: table.n,
            targets: table.targets(),
        }
    }
}
