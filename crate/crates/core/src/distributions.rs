//! Offspring and immigration laws, their generating functions, and the
//! samplers needed by the limit objects (negative binomial clan counts and
//! the Poisson random measure of immigrant clan masses).

use rand::Rng;
use rand_distr::{Distribution, Gamma, Poisson};
use serde::{Deserialize, Serialize};
use statrs::function::exponential;

use crate::error::{Error, Result};
use crate::quadrature;

/// Tolerance on `sum(pmf) == 1`.
pub const PMF_SUM_TOLERANCE: f64 = 1e-12;
/// Tolerance on `m == 1`.
pub const CRITICALITY_TOLERANCE: f64 = 1e-9;
/// Default truncation level for the immigration measure.
pub const DEFAULT_EPSILON: f64 = 1e-6;
/// Number of log-spaced knots in the inverse-CDF table of the immigration measure.
pub const W_TABLE_KNOTS: usize = 4096;

/// A probability law on `0..=max_count()`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct DiscreteLaw {
    pmf: Vec<f64>,
    cdf: Vec<f64>,
}

impl DiscreteLaw {
    pub fn new(pmf: Vec<f64>) -> Result<Self> {
        if pmf.is_empty() || pmf.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::NotAProbability { sum: pmf.iter().sum() });
        }
        let sum: f64 = pmf.iter().sum();
        if (sum - 1.0).abs() > PMF_SUM_TOLERANCE {
            return Err(Error::NotAProbability { sum });
        }
        let mut pmf = pmf;
        while pmf.len() > 1 && pmf[pmf.len() - 1] == 0.0 {
            pmf.pop();
        }
        let cdf = pmf
            .iter()
            .scan(0.0, |acc, p| {
                *acc += p;
                Some(*acc)
            })
            .collect();
        Ok(Self { pmf, cdf })
    }

    /// The law putting all mass on `count`.
    pub fn point_mass(count: usize) -> Self {
        let mut pmf = vec![0.0; count + 1];
        pmf[count] = 1.0;
        Self::new(pmf).expect("point mass is a probability")
    }

    /// `P(k) = (1-r) r^k` truncated to `0..=max_count` and renormalized.
    pub fn truncated_geometric(ratio: f64, max_count: usize) -> Result<Self> {
        if !(0.0..1.0).contains(&ratio) {
            return Err(Error::domain(format!("geometric ratio {ratio} not in [0,1)")));
        }
        let raw: Vec<f64> = (0..=max_count as i32).map(|k| (1.0 - ratio) * ratio.powi(k)).collect();
        let total: f64 = raw.iter().sum();
        Self::new(raw.into_iter().map(|p| p / total).collect())
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn prob(&self, count: usize) -> f64 {
        self.pmf.get(count).copied().unwrap_or(0.0)
    }

    pub fn max_count(&self) -> usize {
        self.pmf.len() - 1
    }

    /// Indices with positive mass.
    pub fn support(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.pmf.iter().copied().enumerate().filter(|(_, p)| *p > 0.0)
    }

    pub fn mean(&self) -> f64 {
        self.pmf.iter().enumerate().map(|(j, p)| j as f64 * p).sum()
    }

    /// `B(s) = sum_j p_j s^j`.
    pub fn pgf(&self, s: f64) -> Result<f64> {
        check_unit(s)?;
        Ok(self.pmf.iter().rev().fold(0.0, |acc, p| acc * s + p))
    }

    /// `B'(s) = sum_j j p_j s^(j-1)`.
    pub fn pgf_derivative(&self, s: f64) -> Result<f64> {
        check_unit(s)?;
        Ok(self
            .pmf
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (j, p)| acc * s + j as f64 * p))
    }

    /// `1 - B(1 - q)`, evaluated without cancellation for small `q`.
    pub fn pgf_complement(&self, q: f64) -> Result<f64> {
        check_unit(q)?;
        let log_a = (-q).ln_1p();
        Ok(self
            .pmf
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, p)| -p * (j as f64 * log_a).exp_m1())
            .sum())
    }

    /// Draws a count with probability `pmf[count]`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        self.cdf.iter().position(|c| u < *c).unwrap_or_else(|| {
            // u landed in the rounding gap above the last partial sum
            self.pmf.iter().rposition(|p| *p > 0.0).unwrap_or(0)
        })
    }
}

impl TryFrom<Vec<f64>> for DiscreteLaw {
    type Error = Error;

    fn try_from(pmf: Vec<f64>) -> Result<Self> {
        Self::new(pmf)
    }
}

impl From<DiscreteLaw> for Vec<f64> {
    fn from(law: DiscreteLaw) -> Self {
        law.pmf
    }
}

fn check_unit(s: f64) -> Result<()> {
    if (0.0..=1.0).contains(&s) {
        Ok(())
    } else {
        Err(Error::domain(format!("generating function argument {s} outside [0,1]")))
    }
}

/// A validated critical model together with its derived constants.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelParams {
    pub offspring: DiscreteLaw,
    pub immigration: DiscreteLaw,
    /// Offspring mean.
    pub m: f64,
    /// `sum_j (j^2 - 1) p_j`.
    pub sigma2: f64,
    /// Immigration mean.
    pub beta: f64,
    /// `2 beta / sigma2`.
    pub gamma: f64,
}

impl ModelParams {
    /// Builds the derived constants without checking the critical-model
    /// assumptions. Only meant for structural tests with degenerate laws.
    pub fn without_validation(offspring: DiscreteLaw, immigration: DiscreteLaw) -> Self {
        let m = offspring.mean();
        let sigma2: f64 = offspring
            .pmf()
            .iter()
            .enumerate()
            .map(|(j, p)| ((j * j) as f64 - 1.0) * p)
            .sum();
        let beta = immigration.mean();
        let gamma = if sigma2 > 0.0 { 2.0 * beta / sigma2 } else { f64::INFINITY };
        Self { offspring, immigration, m, sigma2, beta, gamma }
    }

    /// Rate `2 / sigma2` of the exponential clan masses.
    pub fn mass_rate(&self) -> f64 {
        2.0 / self.sigma2
    }
}

/// Validates a pair of laws against the critical-model assumptions.
pub fn validate_model(offspring_pmf: &[f64], immigration_pmf: &[f64]) -> Result<ModelParams> {
    let offspring = DiscreteLaw::new(offspring_pmf.to_vec())?;
    let immigration = DiscreteLaw::new(immigration_pmf.to_vec())?;
    validate_laws(offspring, immigration)
}

pub fn validate_laws(offspring: DiscreteLaw, immigration: DiscreteLaw) -> Result<ModelParams> {
    let p01 = offspring.prob(0) + offspring.prob(1);
    if p01 <= 0.0 || p01 >= 1.0 {
        return Err(Error::DegenerateOffspring { p01 });
    }
    let params = ModelParams::without_validation(offspring, immigration);
    if (params.m - 1.0).abs() > CRITICALITY_TOLERANCE {
        return Err(Error::NotCritical { mean: params.m });
    }
    if params.immigration.prob(0) >= 1.0 {
        return Err(Error::NoImmigration);
    }
    if !(params.sigma2 > 0.0 && params.sigma2.is_finite()) {
        return Err(Error::domain(format!("offspring variance {} not in (0, inf)", params.sigma2)));
    }
    if !(params.beta > 0.0 && params.beta.is_finite()) {
        return Err(Error::domain(format!("immigration mean {} not in (0, inf)", params.beta)));
    }
    Ok(params)
}

/// `P(N = k)` for the negative binomial clan count with parameters `(gamma, u)`:
/// `Gamma(gamma + k) / (Gamma(gamma) k!) (1-u)^gamma u^k`.
pub fn negative_binomial_pmf(gamma: f64, u: f64, k: usize) -> Result<f64> {
    Ok(negative_binomial_pmf_table(gamma, u, k)?[k])
}

/// `P(N = 0..=max_k)`, by the ratio recursion `P(k+1) = P(k) u (gamma + k) / (k + 1)`.
pub fn negative_binomial_pmf_table(gamma: f64, u: f64, max_k: usize) -> Result<Vec<f64>> {
    check_nb(gamma, u)?;
    let mut out = Vec::with_capacity(max_k + 1);
    let mut p = (1.0 - u).powf(gamma);
    for k in 0..=max_k {
        out.push(p);
        p *= u * (gamma + k as f64) / (k as f64 + 1.0);
    }
    Ok(out)
}

fn check_nb(gamma: f64, u: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::domain(format!("negative binomial shape {gamma} must be positive")));
    }
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::domain(format!("negative binomial parameter u = {u} not in (0,1)")));
    }
    Ok(())
}

/// Draws the negative binomial clan count as a Poisson count whose rate is
/// Gamma distributed with shape `gamma` and scale `u / (1 - u)`.
pub fn sample_negative_binomial<R: Rng + ?Sized>(gamma: f64, u: f64, rng: &mut R) -> Result<u64> {
    check_nb(gamma, u)?;
    let rate_law = Gamma::new(gamma, u / (1.0 - u)).map_err(|e| Error::domain(e.to_string()))?;
    Ok(poisson_count(rate_law.sample(rng), rng))
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("positive finite mean").sample(rng) as u64
}

/// Finite truncation of a point measure on `(0, inf)`: the atoms above `truncation_epsilon`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointMeasure {
    pub atoms: Vec<f64>,
    pub truncation_epsilon: f64,
}

impl PointMeasure {
    pub fn empty(truncation_epsilon: f64) -> Self {
        Self { atoms: Vec::new(), truncation_epsilon }
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `<f, W>` with `f(r) = r`.
    pub fn sum_f(&self) -> f64 {
        self.atoms.iter().sum()
    }

    /// `<f^2, W>`.
    pub fn sum_f2(&self) -> f64 {
        self.atoms.iter().map(|r| r * r).sum()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            atoms: self.atoms.iter().map(|r| r * c).collect(),
            truncation_epsilon: self.truncation_epsilon * c,
        }
    }
}

/// Sampler for the Poisson random measure with intensity
/// `(gamma / r) exp(-rate r) dr` restricted to `(epsilon, inf)`.
///
/// The atom count is Poisson with mean `gamma E1(rate epsilon)`; atom
/// positions are drawn by inverting a tabulated CDF on log-spaced knots,
/// interpolating `ln r` linearly between knots.
#[derive(Debug, Clone)]
pub struct WSampler {
    gamma: f64,
    rate: f64,
    epsilon: f64,
    mean_count: f64,
    log_knots: Vec<f64>,
    cdf: Vec<f64>,
}

/// Upper end of the position table: `rate * r_max = 60`, beyond which the
/// normalized tail mass is below 1e-27.
const W_TABLE_RATE_SPAN: f64 = 60.0;

impl WSampler {
    pub fn new(gamma: f64, sigma2: f64, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::domain(format!(
                "truncation epsilon must be positive (got {epsilon}); the intensity has infinite mass near 0"
            )));
        }
        if !(gamma > 0.0 && gamma.is_finite() && sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(Error::domain(format!("invalid intensity parameters gamma={gamma}, sigma2={sigma2}")));
        }
        let rate = 2.0 / sigma2;
        let total = exp_integral_e1(rate * epsilon);
        let r_max = (W_TABLE_RATE_SPAN / rate).max(2.0 * epsilon);
        let (lo, hi) = (epsilon.ln(), r_max.ln());
        let step = (hi - lo) / (W_TABLE_KNOTS - 1) as f64;
        let log_knots: Vec<f64> = (0..W_TABLE_KNOTS).map(|i| lo + step * i as f64).collect();
        let mut cdf: Vec<f64> = log_knots
            .iter()
            .map(|x| 1.0 - exp_integral_e1(rate * x.exp()) / total)
            .collect();
        cdf[0] = 0.0;
        // enforce monotonicity against last-ulp noise in E1
        for i in 1..cdf.len() {
            if cdf[i] < cdf[i - 1] {
                cdf[i] = cdf[i - 1];
            }
        }
        Ok(Self { gamma, rate, epsilon, mean_count: gamma * total, log_knots, cdf })
    }

    pub fn for_params(params: &ModelParams, epsilon: f64) -> Result<Self> {
        Self::new(params.gamma, params.sigma2, epsilon)
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Expected number of atoms above epsilon.
    pub fn mean_count(&self) -> f64 {
        self.mean_count
    }

    /// Expected `<f, W>` discarded by the truncation: `gamma (1 - e^{-rate eps}) / rate <= gamma eps`.
    pub fn dropped_mass_f(&self) -> f64 {
        -self.gamma * (-self.rate * self.epsilon).exp_m1() / self.rate
    }

    /// Upper bound `gamma eps^2 / 2` on the expected discarded `<f^2, W>`.
    pub fn dropped_mass_f2_bound(&self) -> f64 {
        self.gamma * self.epsilon * self.epsilon / 2.0
    }

    /// Inverse of the normalized restricted intensity's CDF.
    pub fn position(&self, p: f64) -> f64 {
        let last = self.cdf.len() - 1;
        if p >= self.cdf[last] {
            return self.log_knots[last].exp();
        }
        let i = self.cdf.partition_point(|c| *c <= p).clamp(1, last);
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        let t = if c1 > c0 { (p - c0) / (c1 - c0) } else { 0.0 };
        (self.log_knots[i - 1] + t * (self.log_knots[i] - self.log_knots[i - 1])).exp()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PointMeasure {
        let count = poisson_count(self.mean_count, rng);
        let atoms = (0..count).map(|_| self.position(rng.random::<f64>())).collect();
        PointMeasure { atoms, truncation_epsilon: self.epsilon }
    }

    /// Largest gap between the tabulated CDF and adaptive quadrature of the
    /// intensity, checked on every `stride`-th knot.
    pub fn table_error(&self, stride: usize) -> f64 {
        let total = self.mean_count / self.gamma;
        // integrate exp(-rate e^x) dx in log space from ln(eps) to each knot
        let density = |x: f64| (-self.rate * x.exp()).exp();
        let mut acc = 0.0;
        let mut worst: f64 = 0.0;
        let mut prev = self.log_knots[0];
        for i in (stride..self.log_knots.len()).step_by(stride) {
            acc += quadrature::adaptive_simpson(density, prev, self.log_knots[i], 1e-14);
            prev = self.log_knots[i];
            worst = worst.max((acc / total - self.cdf[i]).abs());
        }
        worst
    }
}

/// Samples the immigration measure truncated at `epsilon`.
pub fn sample_w<R: Rng + ?Sized>(params: &ModelParams, epsilon: f64, rng: &mut R) -> Result<PointMeasure> {
    Ok(WSampler::for_params(params, epsilon)?.sample(rng))
}

/// Exponential integral `E1(x) = int_x^inf e^{-t} / t dt` for `x > 0`.
///
/// statrs stops its continued fraction at a tolerance below double
/// precision and gives up for some `x` just above 1; those points fall back
/// to the same fraction with an attainable tolerance.
pub fn exp_integral_e1(x: f64) -> f64 {
    exponential::integral(x, 1).unwrap_or_else(|| e1_continued_fraction(x))
}

/// Modified Lentz evaluation of `E1(x) = e^{-x} / (x + 1 - 1/(x + 3 - 4/(x + 5 - ...)))`, `x > 1`.
fn e1_continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=1000 {
        let a = -(i as f64) * (i as f64);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() <= 2.0 * f64::EPSILON {
            break;
        }
    }
    h * (-x).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn default_params() -> ModelParams {
        validate_model(&[0.5, 0.0, 0.5], &[0.5, 0.5]).unwrap()
    }

    #[test]
    fn default_model_constants() {
        let p = default_params();
        assert_eq!(p.m, 1.0);
        assert_eq!(p.sigma2, 1.0);
        assert_eq!(p.beta, 0.5);
        assert_eq!(p.gamma, 1.0);
    }

    #[test]
    fn truncated_geometric_model_constants() {
        let geo = DiscreteLaw::truncated_geometric(0.5, 64).unwrap();
        let p = validate_laws(geo, DiscreteLaw::new(vec![0.5, 0.5]).unwrap()).unwrap();
        assert!((p.m - 1.0).abs() < 1e-12);
        assert!((p.sigma2 - 2.0).abs() < 1e-12);
        assert!((p.gamma - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_assumption_violations() {
        assert!(matches!(validate_model(&[0.0, 1.0], &[0.5, 0.5]), Err(Error::DegenerateOffspring { .. })));
        assert!(matches!(validate_model(&[0.0, 0.0, 1.0], &[0.5, 0.5]), Err(Error::DegenerateOffspring { .. })));
        assert!(matches!(validate_model(&[0.4, 0.0, 0.6], &[0.5, 0.5]), Err(Error::NotCritical { .. })));
        assert!(matches!(validate_model(&[0.5, 0.0, 0.5], &[1.0]), Err(Error::NoImmigration)));
        assert!(matches!(validate_model(&[0.5, 0.0, 0.6], &[0.5, 0.5]), Err(Error::NotAProbability { .. })));
        assert!(matches!(validate_model(&[0.5, 0.0, 0.5], &[-0.5, 1.5]), Err(Error::NotAProbability { .. })));
    }

    #[test]
    fn pgf_boundary_values() {
        let b = DiscreteLaw::new(vec![0.25, 0.5, 0.25]).unwrap();
        assert_eq!(b.pgf(0.0).unwrap(), 0.25);
        assert!((b.pgf(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((b.pgf_derivative(1.0).unwrap() - b.mean()).abs() < 1e-15);
        assert!(b.pgf(1.5).is_err());
        assert!(b.pgf_derivative(-0.1).is_err());
        let q = 0.013;
        let direct = 1.0 - b.pgf(1.0 - q).unwrap();
        assert!((b.pgf_complement(q).unwrap() - direct).abs() < 1e-15);
    }

    #[test]
    fn sampling_is_deterministic_and_unbiased() {
        assert!((0..100).all(|_| DiscreteLaw::point_mass(1).sample(&mut stream(1, 0)) == 1));
        let law = DiscreteLaw::new(vec![0.5, 0.0, 0.5]).unwrap();
        let mut r1 = stream(3, 0);
        let mut r2 = stream(3, 0);
        let a: Vec<usize> = (0..64).map(|_| law.sample(&mut r1)).collect();
        let b: Vec<usize> = (0..64).map(|_| law.sample(&mut r2)).collect();
        assert_eq!(a, b);

        let mut rng = stream(11, 0);
        let n = 1_000_000;
        let total: usize = (0..n).map(|_| law.sample(&mut rng)).sum();
        let mean = total as f64 / n as f64;
        // variance of {0,2} fair law is 1
        assert!((mean - 1.0).abs() < 3.0 / (n as f64).sqrt(), "mean {mean}");
    }

    #[test]
    fn negative_binomial_pmf_sums_to_one() {
        for &gamma in &[0.5, 1.0, 2.0] {
            for &u in &[0.1, 0.5, 0.9] {
                let table = negative_binomial_pmf_table(gamma, u, 10_000).unwrap();
                let mut partial = 0.0;
                for p in &table {
                    let next = partial + p;
                    assert!(next >= partial);
                    partial = next;
                }
                assert!((partial - 1.0).abs() < 1e-10, "gamma={gamma} u={u} sum={partial}");
            }
        }
    }

    #[test]
    fn negative_binomial_gamma_one_is_shifted_geometric() {
        for k in 0..40 {
            let p = negative_binomial_pmf(1.0, 0.5, k).unwrap();
            assert!((p - 0.5f64.powi(k as i32 + 1)).abs() < 1e-15);
        }
    }

    #[test]
    fn negative_binomial_sampler_matches_pmf() {
        let n = 200_000;
        for &(gamma, u) in &[(1.0, 0.5), (0.5, 0.3), (2.5, 0.7)] {
            let mut rng = stream(5, 1);
            let draws: Vec<u64> = (0..n).map(|_| sample_negative_binomial(gamma, u, &mut rng).unwrap()).collect();
            let zero_freq = draws.iter().filter(|k| **k == 0).count() as f64 / n as f64;
            let p0: f64 = (1.0 - u).powf(gamma);
            let se = (p0 * (1.0 - p0) / n as f64).sqrt();
            assert!((zero_freq - p0).abs() < 3.0 * se, "gamma={gamma} u={u}: {zero_freq} vs {p0}");
            if gamma == 1.0 {
                let mean = draws.iter().sum::<u64>() as f64 / n as f64;
                // variance gamma u / (1-u)^2 = 2
                let se = (2.0 / n as f64).sqrt();
                assert!((mean - 1.0).abs() < 3.0 * se, "mean {mean}");
            }
        }
        assert!(sample_negative_binomial(0.0, 0.5, &mut stream(0, 0)).is_err());
        assert!(sample_negative_binomial(1.0, 1.0, &mut stream(0, 0)).is_err());
    }

    #[test]
    fn w_sampler_rejects_nonpositive_epsilon() {
        assert!(WSampler::new(1.0, 1.0, 0.0).is_err());
        assert!(sample_w(&default_params(), -1.0, &mut stream(0, 0)).is_err());
    }

    #[test]
    fn w_table_matches_quadrature() {
        let s = WSampler::new(1.0, 1.0, DEFAULT_EPSILON).unwrap();
        assert!(s.table_error(64) < 1e-8, "table error {}", s.table_error(64));
        let s = WSampler::new(0.5, 2.0, 1e-4).unwrap();
        assert!(s.table_error(64) < 1e-8);
    }

    #[test]
    fn w_positions_stay_above_epsilon() {
        let s = WSampler::new(1.0, 1.0, 1e-6).unwrap();
        assert!(s.position(0.0) >= 1e-6 * (1.0 - 1e-12));
        let mut rng = stream(9, 9);
        for _ in 0..1000 {
            assert!(s.sample(&mut rng).atoms.iter().all(|r| *r > 1e-6 * (1.0 - 1e-12)));
        }
    }

    #[test]
    fn w_truncation_bias_within_budget() {
        let s = WSampler::new(1.0, 1.0, DEFAULT_EPSILON).unwrap();
        assert!(s.dropped_mass_f() <= 1.0 * DEFAULT_EPSILON);
        assert!(s.dropped_mass_f() < 1e-5);
        assert!(s.dropped_mass_f2_bound() < 1e-11);
    }

    #[test]
    fn w_mean_mass_matches_closed_form() {
        // E<f,W> = gamma sigma2 / 2 = 0.5, Var<f,W> = gamma (sigma2/2)^2 = 0.25
        let params = default_params();
        let s = WSampler::for_params(&params, DEFAULT_EPSILON).unwrap();
        let mut rng = stream(21, 0);
        let n = 100_000;
        let mean = (0..n).map(|_| s.sample(&mut rng).sum_f()).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 3.0 * (0.25 / n as f64).sqrt(), "mean {mean}");
    }

    #[test]
    fn e1_is_finite_and_decreasing_across_the_fraction_switch() {
        // reference values: E1(1) = 0.21938393439552029, E1(2) = 0.04890051070806112
        assert!((exp_integral_e1(1.0) - 0.219_383_934_395_520_3).abs() < 1e-15);
        assert!((exp_integral_e1(2.0) - 0.048_900_510_708_061_12).abs() < 1e-15);
        let mut x = 0.9;
        let mut prev = exp_integral_e1(x);
        while x < 60.0 {
            x *= 1.0007;
            let v = exp_integral_e1(x);
            assert!(v > 0.0 && v < prev, "x = {x}");
            prev = v;
        }
    }
}
