//! Forward simulation of the branching process with immigration, keeping the
//! full parent-indexed genealogy, and the coalescence statistics read off a
//! realized forest.

use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::distributions::{DiscreteLaw, ModelParams};
use crate::error::{Error, Result};

/// Default cap on particle records in one forest.
pub const DEFAULT_PARTICLE_CAP: usize = 100_000_000;

/// Immigrant that started a clan: generation of arrival and ordinal among
/// that generation's immigrants (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct FounderId {
    pub generation: u32,
    pub ordinal: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Particle {
    /// Index into the previous generation; `None` for immigrants.
    pub parent: Option<u32>,
    pub founder: FounderId,
}

impl Particle {
    pub fn is_immigrant(&self) -> bool {
        self.parent.is_none()
    }
}

/// Generation of a most recent common ancestor, or `Infinite` when none exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum CoalescenceOutcome {
    Finite(u32),
    Infinite,
}

impl CoalescenceOutcome {
    pub fn is_finite(&self) -> bool {
        matches!(self, CoalescenceOutcome::Finite(_))
    }

    /// `true` when the outcome is a finite generation in `lo..hi`.
    pub fn within(&self, lo: usize, hi: usize) -> bool {
        match *self {
            CoalescenceOutcome::Finite(g) => (lo..hi).contains(&(g as usize)),
            CoalescenceOutcome::Infinite => false,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SimulationLimits {
    pub max_particles: usize,
}

impl Default for SimulationLimits {
    fn default() -> Self {
        Self { max_particles: DEFAULT_PARTICLE_CAP }
    }
}

#[derive(Debug, Clone, Copy)]
enum Roots<'a> {
    Immigration(&'a DiscreteLaw),
    SingleAncestor,
}

/// Genealogy of one run up to generation `n`.
///
/// Within a generation, children appear in the order of their parents and
/// the generation's immigrants come last.
#[derive(Debug, Clone, PartialEq)]
pub struct GenealogyForest {
    generations: Vec<Vec<Particle>>,
    immigrant_counts: Vec<usize>,
}

/// Simulates generations `0..=n` of the process with immigration.
pub fn simulate_forest<R: Rng + ?Sized>(
    params: &ModelParams,
    n: usize,
    limits: &SimulationLimits,
    rng: &mut R,
) -> Result<GenealogyForest> {
    simulate(&params.offspring, Roots::Immigration(&params.immigration), n, limits, rng)
}

/// Simulates a plain Galton-Watson process started from one ancestor.
pub fn simulate_plain_gw<R: Rng + ?Sized>(
    offspring: &DiscreteLaw,
    n: usize,
    limits: &SimulationLimits,
    rng: &mut R,
) -> Result<GenealogyForest> {
    simulate(offspring, Roots::SingleAncestor, n, limits, rng)
}

fn simulate<R: Rng + ?Sized>(
    offspring: &DiscreteLaw,
    roots: Roots<'_>,
    n: usize,
    limits: &SimulationLimits,
    rng: &mut R,
) -> Result<GenealogyForest> {
    if n < 1 {
        return Err(Error::Precondition("simulation needs at least one generation (n >= 1)".into()));
    }
    if n > u32::MAX as usize {
        return Err(Error::domain("generation count exceeds u32 range"));
    }
    let mut generations: Vec<Vec<Particle>> = Vec::with_capacity(n + 1);
    let mut immigrant_counts = Vec::with_capacity(n + 1);
    let mut total = 0usize;

    for g in 0..=n {
        let mut current: Vec<Particle> = match generations.last() {
            Some(prev) => {
                let mut next = Vec::with_capacity(prev.len() + 2);
                for (i, p) in prev.iter().enumerate() {
                    let children = offspring.sample(rng);
                    if total + next.len() + children > limits.max_particles {
                        return Err(Error::ResourceLimit { cap: limits.max_particles });
                    }
                    let child = Particle { parent: Some(i as u32), founder: p.founder };
                    next.extend(std::iter::repeat_n(child, children));
                }
                next
            }
            None => Vec::new(),
        };
        let arrivals = match roots {
            Roots::Immigration(law) => law.sample(rng),
            Roots::SingleAncestor => usize::from(g == 0),
        };
        if total + current.len() + arrivals > limits.max_particles {
            return Err(Error::ResourceLimit { cap: limits.max_particles });
        }
        current.extend((0..arrivals).map(|l| Particle {
            parent: None,
            founder: FounderId { generation: g as u32, ordinal: l as u32 },
        }));
        total += current.len();
        immigrant_counts.push(arrivals);
        generations.push(current);
    }
    Ok(GenealogyForest { generations, immigrant_counts })
}

/// Descendant counts at the final generation, for the particles of a cut
/// generation `k` and for every immigrant arriving after `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClanDecomposition {
    pub k: usize,
    /// Final-generation descendants of each generation-`k` particle.
    pub clan_sizes: Vec<usize>,
    /// Final-generation descendants of each immigrant of generations `k+1..=n`.
    pub immigrant_clan_sizes: Vec<(FounderId, usize)>,
}

impl ClanDecomposition {
    pub fn total(&self) -> usize {
        self.clan_sizes.iter().sum::<usize>() + self.immigrant_clan_sizes.iter().map(|(_, s)| s).sum::<usize>()
    }
}

/// One draw of the clan-based pair statistic at cut generation `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairwiseRatio {
    pub ratio: f64,
    /// Whether the final generation holds at least two particles.
    pub selected: bool,
}

/// `m (m - 1)`, the number of ordered pairs among `m` items.
pub fn falling2(m: usize) -> f64 {
    m as f64 * (m as f64 - 1.0).max(0.0)
}

/// Maps `r` in `0..m(m-1)/2` to the `r`-th unordered pair `(i, j)`, `i < j`,
/// in the order (0,1), (0,2), (1,2), (0,3), ...
pub fn pair_from_index(r: u64) -> (usize, usize) {
    let mut j = ((1.0 + (1.0 + 8.0 * r as f64).sqrt()) / 2.0) as u64;
    while j * (j - 1) / 2 > r {
        j -= 1;
    }
    while (j + 1) * j / 2 <= r {
        j += 1;
    }
    ((r - j * (j - 1) / 2) as usize, j as usize)
}

impl GenealogyForest {
    /// Builds a forest from explicit generations. Immigrant counts are taken
    /// from the parentless particles, which must come last in each generation.
    pub fn from_generations(generations: Vec<Vec<Particle>>) -> Result<Self> {
        if generations.len() < 2 {
            return Err(Error::Precondition("a forest needs generations 0..=n with n >= 1".into()));
        }
        let mut immigrant_counts = Vec::with_capacity(generations.len());
        for (g, gen) in generations.iter().enumerate() {
            let first_immigrant = gen.iter().position(Particle::is_immigrant).unwrap_or(gen.len());
            if gen[first_immigrant..].iter().any(|p| !p.is_immigrant()) {
                return Err(Error::Precondition(format!("generation {g}: immigrants must follow children")));
            }
            for p in &gen[..first_immigrant] {
                let parent = p.parent.expect("checked") as usize;
                let ok = g > 0 && parent < generations[g - 1].len() && generations[g - 1][parent].founder == p.founder;
                if !ok {
                    return Err(Error::Precondition(format!("generation {g}: invalid parent {parent}")));
                }
            }
            immigrant_counts.push(gen.len() - first_immigrant);
        }
        Ok(Self { generations, immigrant_counts })
    }

    /// Final generation `n`.
    pub fn n(&self) -> usize {
        self.generations.len() - 1
    }

    pub fn generation(&self, g: usize) -> &[Particle] {
        &self.generations[g]
    }

    /// `Z_g`.
    pub fn population(&self, g: usize) -> usize {
        self.generations[g].len()
    }

    /// `Z_n`.
    pub fn final_population(&self) -> usize {
        self.population(self.n())
    }

    /// `I_0..I_n`.
    pub fn immigrant_counts(&self) -> &[usize] {
        &self.immigrant_counts
    }

    pub fn total_particles(&self) -> usize {
        self.generations.iter().map(Vec::len).sum()
    }

    /// Index within generation `g` of that generation's first immigrant.
    fn first_immigrant(&self, g: usize) -> usize {
        self.population(g) - self.immigrant_counts[g]
    }

    /// Number of final-generation descendants of every particle, per generation.
    pub fn descendant_counts(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut counts: Vec<Vec<usize>> = self.generations.iter().map(|g| vec![0; g.len()]).collect();
        counts[n].iter_mut().for_each(|c| *c = 1);
        for g in (1..=n).rev() {
            let (lower, upper) = counts.split_at_mut(g);
            let below = &mut lower[g - 1];
            for (p, c) in self.generations[g].iter().zip(&upper[0]) {
                if let Some(parent) = p.parent {
                    below[parent as usize] += c;
                }
            }
        }
        counts
    }

    fn check_cut(&self, k: usize) -> Result<()> {
        if k >= self.n() {
            return Err(Error::domain(format!("cut generation k = {k} must be below n = {}", self.n())));
        }
        Ok(())
    }

    pub fn clan_decomposition(&self, k: usize) -> Result<ClanDecomposition> {
        self.check_cut(k)?;
        let counts = self.descendant_counts();
        Ok(self.decomposition_from_counts(&counts, k))
    }

    fn decomposition_from_counts(&self, counts: &[Vec<usize>], k: usize) -> ClanDecomposition {
        let immigrant_clan_sizes = (k + 1..=self.n())
            .flat_map(|j| {
                let start = self.first_immigrant(j);
                self.generations[j][start..]
                    .iter()
                    .zip(&counts[j][start..])
                    .map(|(p, c)| (p.founder, *c))
            })
            .collect();
        ClanDecomposition { k, clan_sizes: counts[k].clone(), immigrant_clan_sizes }
    }

    /// Clan-based estimate of `P(k <= X < n | Z_n > 1)` for one forest:
    /// same-clan pairs among generation-`k` clans and among clans of
    /// immigrants arriving in `k+1..n`, over all pairs.
    pub fn pairwise_ratio_sample(&self, k: usize) -> Result<PairwiseRatio> {
        self.check_cut(k)?;
        Ok(self.pairwise_ratios(&[k])[0])
    }

    /// [`Self::pairwise_ratio_sample`] for several cut generations from one
    /// pass over the genealogy. Cuts must be below `n`.
    pub fn pairwise_ratios(&self, ks: &[usize]) -> Vec<PairwiseRatio> {
        let z = self.final_population();
        if z < 2 {
            return ks.iter().map(|_| PairwiseRatio { ratio: 0.0, selected: false }).collect();
        }
        let n = self.n();
        let counts = self.descendant_counts();
        // pairs inside clans of immigrants arriving at generation j, j < n
        let immigrant_pairs: Vec<f64> = (0..n)
            .map(|j| counts[j][self.first_immigrant(j)..].iter().map(|c| falling2(*c)).sum())
            .collect();
        // suffix[j] = sum over arrival generations j..n-1
        let mut suffix = vec![0.0; n + 1];
        for j in (0..n).rev() {
            suffix[j] = suffix[j + 1] + immigrant_pairs[j];
        }
        let all_pairs = falling2(z);
        ks.iter()
            .map(|&k| {
                assert!(k < n, "cut generation {k} must be below n = {n}");
                let within: f64 = counts[k].iter().map(|c| falling2(*c)).sum();
                PairwiseRatio { ratio: (within + suffix[k + 1]) / all_pairs, selected: true }
            })
            .collect()
    }

    /// Same-founder pairs over all pairs, i.e. the clan statistic for
    /// `P(X < inf | Z_n > 1)` summed over every arrival generation `0..n`.
    pub fn same_founder_ratio(&self) -> Option<f64> {
        let z = self.final_population();
        if z < 2 {
            return None;
        }
        let mut sizes: Vec<(FounderId, usize)> = Vec::new();
        let mut last = self.generations[self.n()].iter().map(|p| p.founder).collect::<Vec<_>>();
        last.sort_unstable();
        for f in last {
            match sizes.last_mut() {
                Some((g, c)) if *g == f => *c += 1,
                _ => sizes.push((f, 1)),
            }
        }
        Some(sizes.iter().map(|(_, c)| falling2(*c)).sum::<f64>() / falling2(z))
    }

    /// Most recent common ancestor of final-generation particles `a != b`.
    pub fn pair_coalescence(&self, a: usize, b: usize) -> CoalescenceOutcome {
        debug_assert_ne!(a, b);
        let (mut a, mut b) = (a, b);
        let mut g = self.n();
        loop {
            if a == b {
                return CoalescenceOutcome::Finite(g as u32);
            }
            let (pa, pb) = (self.generations[g][a].parent, self.generations[g][b].parent);
            match (pa, pb) {
                (Some(x), Some(y)) => {
                    a = x as usize;
                    b = y as usize;
                    g -= 1;
                }
                _ => return CoalescenceOutcome::Infinite,
            }
        }
    }

    /// Picks an unordered pair uniformly from the final generation and
    /// returns its coalescence time.
    pub fn sample_pairwise_coalescence<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<CoalescenceOutcome> {
        let z = self.final_population() as u64;
        if z < 2 {
            return Err(Error::Precondition(format!("pair sampling needs Z_n > 1 (Z_n = {z})")));
        }
        let (i, j) = pair_from_index(rng.random_range(0..z * (z - 1) / 2));
        Ok(self.pair_coalescence(i, j))
    }

    /// Sizes of the backward ancestor sets of the final generation, starting
    /// at generation `n` and stopping once some lineage reaches its founder.
    pub fn ancestor_set_sizes(&self) -> Vec<usize> {
        let mut sizes = Vec::new();
        self.walk_ancestors(|_, size| {
            sizes.push(size);
            false
        });
        sizes
    }

    /// Walks the ancestor sets backward; `visit(g, size)` returns `true` to stop.
    /// Returns the generation where the walk stopped, or `None` if it ran out
    /// because a lineage reached an immigrant (or the population was empty).
    fn walk_ancestors(&self, mut visit: impl FnMut(usize, usize) -> bool) -> Option<usize> {
        let n = self.n();
        let mut current: Vec<u32> = (0..self.final_population() as u32).collect();
        if current.is_empty() {
            return None;
        }
        let mut mark = Vec::new();
        let mut g = n;
        loop {
            if visit(g, current.len()) {
                return Some(g);
            }
            if g == 0 {
                return None;
            }
            let gen = &self.generations[g];
            mark.clear();
            mark.resize(self.population(g - 1), false);
            let mut next = Vec::with_capacity(current.len());
            for &i in &current {
                // a parentless particle is a founder: the walk has left the genealogy
                let p = gen[i as usize].parent?;
                if !mark[p as usize] {
                    mark[p as usize] = true;
                    next.push(p);
                }
            }
            current = next;
            g -= 1;
        }
    }

    /// Generation of the most recent common ancestor of the whole final generation.
    pub fn total_coalescence(&self) -> Result<CoalescenceOutcome> {
        if self.final_population() == 0 {
            return Err(Error::Precondition("total coalescence needs Z_n > 0".into()));
        }
        Ok(match self.walk_ancestors(|_, size| size == 1) {
            Some(g) => CoalescenceOutcome::Finite(g as u32),
            None => CoalescenceOutcome::Infinite,
        })
    }

    /// Earliest arrival generation among immigrants with living final-generation
    /// descendants; `Infinite` when the final generation is empty.
    pub fn oldest_clan_birth(&self) -> CoalescenceOutcome {
        self.generations[self.n()]
            .iter()
            .map(|p| p.founder.generation)
            .min()
            .map_or(CoalescenceOutcome::Infinite, CoalescenceOutcome::Finite)
    }

    /// Whether exactly one founder has descendants in the final generation.
    pub fn single_surviving_clan(&self) -> bool {
        let mut founders = self.generations[self.n()].iter().map(|p| p.founder);
        match founders.next() {
            Some(first) => founders.all(|f| f == first),
            None => false,
        }
    }

    /// Debug dump: `{"n", "generations": [[[parent|null, j, l], ...], ...]}`.
    pub fn to_json(&self) -> Value {
        let generations: Vec<Value> = self
            .generations
            .iter()
            .map(|gen| {
                gen.iter()
                    .map(|p| json!([p.parent, p.founder.generation, p.founder.ordinal]))
                    .collect()
            })
            .collect();
        json!({ "n": self.n(), "immigrant_counts": self.immigrant_counts, "generations": generations })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::validate_model;
    use crate::rng::stream;

    fn imm(g: u32, l: u32) -> Particle {
        Particle { parent: None, founder: FounderId { generation: g, ordinal: l } }
    }

    fn child(parent: u32, of: Particle) -> Particle {
        Particle { parent: Some(parent), founder: of.founder }
    }

    /// Immigrant at 0 with two children at generation 1.
    fn siblings() -> GenealogyForest {
        let root = imm(0, 0);
        GenealogyForest::from_generations(vec![vec![root], vec![child(0, root), child(0, root)]]).unwrap()
    }

    /// Two immigrants at generation 0, one child each.
    fn cousins_by_immigration() -> GenealogyForest {
        let (a, b) = (imm(0, 0), imm(0, 1));
        GenealogyForest::from_generations(vec![vec![a, b], vec![child(0, a), child(1, b)]]).unwrap()
    }

    #[test]
    fn deterministic_dynamics_smoke() {
        let params = ModelParams::without_validation(DiscreteLaw::point_mass(1), DiscreteLaw::point_mass(1));
        let forest = simulate_forest(&params, 10, &SimulationLimits::default(), &mut stream(0, 0)).unwrap();
        for g in 0..=10 {
            assert_eq!(forest.population(g), g + 1);
        }
        let founders: std::collections::HashSet<_> = forest.generation(10).iter().map(|p| p.founder).collect();
        assert_eq!(founders.len(), 11);
        assert_eq!(forest.total_coalescence().unwrap(), CoalescenceOutcome::Infinite);
        assert_eq!(forest.oldest_clan_birth(), CoalescenceOutcome::Finite(0));
    }

    #[test]
    fn generation_sizes_follow_recursion() {
        let params = validate_model(&[0.5, 0.0, 0.5], &[0.5, 0.5]).unwrap();
        for seed in 0..50 {
            let forest = simulate_forest(&params, 20, &SimulationLimits::default(), &mut stream(seed, 0)).unwrap();
            assert_eq!(forest.population(0), forest.immigrant_counts()[0]);
            for g in 0..20 {
                let children = forest.generation(g + 1).iter().filter(|p| !p.is_immigrant()).count();
                assert_eq!(forest.population(g + 1), children + forest.immigrant_counts()[g + 1]);
                for p in forest.generation(g + 1).iter().filter(|p| !p.is_immigrant()) {
                    let parent = forest.generation(g)[p.parent.unwrap() as usize];
                    assert_eq!(parent.founder, p.founder);
                }
            }
        }
    }

    #[test]
    fn resource_cap_is_enforced() {
        let params = ModelParams::without_validation(DiscreteLaw::point_mass(2), DiscreteLaw::point_mass(1));
        let err = simulate_forest(&params, 30, &SimulationLimits { max_particles: 1000 }, &mut stream(0, 0));
        assert!(matches!(err, Err(Error::ResourceLimit { cap: 1000 })));
    }

    #[test]
    fn rejects_zero_generations() {
        let params = validate_model(&[0.5, 0.0, 0.5], &[0.5, 0.5]).unwrap();
        assert!(simulate_forest(&params, 0, &SimulationLimits::default(), &mut stream(0, 0)).is_err());
    }

    #[test]
    fn siblings_coalesce_one_generation_back() {
        let f = siblings();
        assert_eq!(f.pair_coalescence(0, 1), CoalescenceOutcome::Finite(0));
        assert_eq!(f.sample_pairwise_coalescence(&mut stream(0, 0)).unwrap(), CoalescenceOutcome::Finite(0));
        assert_eq!(f.total_coalescence().unwrap(), CoalescenceOutcome::Finite(0));
        let r = f.pairwise_ratio_sample(0).unwrap();
        assert!(r.selected);
        assert_eq!(r.ratio, 1.0);
    }

    #[test]
    fn distinct_immigrants_never_coalesce() {
        let f = cousins_by_immigration();
        assert_eq!(f.pair_coalescence(0, 1), CoalescenceOutcome::Infinite);
        assert_eq!(f.total_coalescence().unwrap(), CoalescenceOutcome::Infinite);
        assert_eq!(f.pairwise_ratio_sample(0).unwrap().ratio, 0.0);
        assert_eq!(f.same_founder_ratio(), Some(0.0));
        assert!(!f.single_surviving_clan());
    }

    #[test]
    fn ratio_with_uneven_clans() {
        // generation 1 holds two particles; the first has two children, the second one
        let root = imm(0, 0);
        let g1 = vec![child(0, root), child(0, root)];
        let g2 = vec![child(0, g1[0]), child(0, g1[0]), child(1, g1[1])];
        let f = GenealogyForest::from_generations(vec![vec![root], g1, g2]).unwrap();
        let r = f.pairwise_ratio_sample(1).unwrap();
        assert!((r.ratio - 1.0 / 3.0).abs() < 1e-15);
        let d = f.clan_decomposition(1).unwrap();
        assert_eq!(d.clan_sizes, vec![2, 1]);
        assert_eq!(d.total(), 3);
        assert_eq!(f.pairwise_ratio_sample(0).unwrap().ratio, 1.0);
        assert!(f.pairwise_ratio_sample(2).is_err());
    }

    #[test]
    fn singleton_and_empty_final_generation() {
        let root = imm(0, 0);
        let single = GenealogyForest::from_generations(vec![vec![root], vec![child(0, root)]]).unwrap();
        assert_eq!(single.total_coalescence().unwrap(), CoalescenceOutcome::Finite(1));
        assert!(single.sample_pairwise_coalescence(&mut stream(0, 0)).is_err());
        assert!(!single.pairwise_ratio_sample(0).unwrap().selected);
        assert!(single.single_surviving_clan());

        let empty = GenealogyForest::from_generations(vec![vec![root], vec![]]).unwrap();
        assert!(empty.total_coalescence().is_err());
        assert_eq!(empty.oldest_clan_birth(), CoalescenceOutcome::Infinite);
        let d = empty.clan_decomposition(0).unwrap();
        assert_eq!(d.total(), 0);
        assert!(d.clan_sizes.iter().all(|s| *s == 0));
    }

    #[test]
    fn cut_at_zero_indexes_initial_immigrants() {
        let params = validate_model(&[0.5, 0.0, 0.5], &[0.25, 0.25, 0.5]).unwrap();
        for seed in 0..50 {
            let f = simulate_forest(&params, 6, &SimulationLimits::default(), &mut stream(seed, 1)).unwrap();
            let d = f.clan_decomposition(0).unwrap();
            assert_eq!(d.clan_sizes.len(), f.immigrant_counts()[0]);
            let counts = f.descendant_counts();
            assert_eq!(d.clan_sizes, counts[0]);
            assert_eq!(d.total(), f.final_population());
        }
    }

    #[test]
    fn pair_index_mapping_is_a_bijection() {
        let m = 40u64;
        let mut seen = std::collections::HashSet::new();
        for r in 0..m * (m - 1) / 2 {
            let (i, j) = pair_from_index(r);
            assert!(i < j && (j as u64) < m);
            assert!(seen.insert((i, j)));
        }
        assert_eq!(pair_from_index(0), (0, 1));
        assert_eq!(pair_from_index(2), (1, 2));
    }

    #[test]
    fn plain_gw_has_single_root() {
        let law = DiscreteLaw::new(vec![0.5, 0.0, 0.5]).unwrap();
        let f = simulate_plain_gw(&law, 8, &SimulationLimits::default(), &mut stream(4, 4)).unwrap();
        assert_eq!(f.population(0), 1);
        assert_eq!(f.immigrant_counts().iter().sum::<usize>(), 1);
        if f.final_population() > 0 {
            assert!(f.total_coalescence().unwrap().is_finite());
        }
    }

    #[test]
    fn plain_gw_one_step_survival() {
        let law = DiscreteLaw::new(vec![0.5, 0.0, 0.5]).unwrap();
        let reps = 100_000;
        let mut rng = stream(77, 0);
        let alive = (0..reps)
            .filter(|_| simulate_plain_gw(&law, 1, &SimulationLimits::default(), &mut rng).unwrap().final_population() > 0)
            .count();
        let p = alive as f64 / reps as f64;
        assert!((p - 0.5).abs() < 3.0 * (0.25 / reps as f64).sqrt(), "q_1 estimate {p}");
    }

    #[test]
    fn json_dump_shape() {
        let v = siblings().to_json();
        assert_eq!(v["n"], 1);
        assert_eq!(v["generations"][0][0], json!([null, 0, 0]));
        assert_eq!(v["generations"][1][1], json!([0, 0, 0]));
    }
}
