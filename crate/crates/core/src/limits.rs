//! Limit laws: the pair-coalescence functional of the negative binomial clan
//! count and the immigration measure, the oldest-clan limit, the Gamma limit
//! of `Z_n / n`, and the single-ancestor baseline.

use rand::Rng;
use rand_distr::{Distribution, Exp, Geometric};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma_lr, ln_gamma};

use crate::distributions::{sample_negative_binomial, ModelParams, PointMeasure, WSampler};
use crate::error::{Error, Result};
use crate::harness::stats::MeanStats;
use crate::harness::EstimateWithCI;

/// Resampling attempts before an empty truncated measure is treated as an error.
const MAX_RESAMPLES: u32 = 10_000;

/// One joint realization of the limit objects.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitSample {
    pub n_clans: usize,
    /// Exponential clan masses, one per clan.
    pub clan_masses: Vec<f64>,
    pub immigration_measure: PointMeasure,
}

impl LimitSample {
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            n_clans: self.n_clans,
            clan_masses: self.clan_masses.iter().map(|w| w * c).collect(),
            immigration_measure: self.immigration_measure.scaled(c),
        }
    }

    /// Sum of the clan masses and the immigration atoms.
    pub fn total_mass(&self) -> f64 {
        self.clan_masses.iter().sum::<f64>() + self.immigration_measure.sum_f()
    }
}

/// `(sum w_i^2 + <f^2, W>) / (sum w_i + <f, W>)^2`.
pub fn phi_integrand(sample: &LimitSample) -> Result<f64> {
    debug_assert_eq!(sample.clan_masses.len(), sample.n_clans);
    if sample.clan_masses.is_empty() && sample.immigration_measure.is_empty() {
        return Err(Error::EmptySample);
    }
    let squares = sample.clan_masses.iter().map(|w| w * w).sum::<f64>() + sample.immigration_measure.sum_f2();
    let total = sample.total_mass();
    Ok(squares / (total * total))
}

/// Limit estimate with the truncation bookkeeping that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitEstimate {
    pub estimate: EstimateWithCI,
    pub draws: u64,
    pub epsilon: f64,
    /// Expected immigration mass `<f, W>` lost below epsilon.
    pub bias_bound: f64,
    /// Draws rejected because the truncated sample was empty.
    pub resample_count: u64,
}

fn check_u(u: f64) -> Result<()> {
    if u > 0.0 && u < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("u = {u} not in (0,1)")))
    }
}

fn mass_law(sigma2: f64) -> Result<Exp<f64>> {
    Exp::new(2.0 / sigma2).map_err(|e| Error::domain(e.to_string()))
}

/// Draws `(N, w_1..w_N, W)`; `u = None` forces `N = 0`.
pub fn sample_limit<R: Rng + ?Sized>(
    u: Option<f64>,
    params: &ModelParams,
    sampler: &WSampler,
    rng: &mut R,
) -> Result<LimitSample> {
    let n_clans = match u {
        Some(u) => sample_negative_binomial(params.gamma, u, rng)? as usize,
        None => 0,
    };
    let masses = mass_law(params.sigma2)?;
    let clan_masses = (0..n_clans).map(|_| masses.sample(rng)).collect();
    let immigration_measure = sampler.sample(rng);
    Ok(LimitSample { n_clans, clan_masses, immigration_measure })
}

fn estimate_phi<R: Rng + ?Sized>(
    u: Option<f64>,
    params: &ModelParams,
    mc_draws: u64,
    epsilon: f64,
    rng: &mut R,
) -> Result<LimitEstimate> {
    if mc_draws == 0 {
        return Err(Error::domain("mc_draws must be at least 1"));
    }
    let sampler = WSampler::for_params(params, epsilon)?;
    let mut stats = MeanStats::default();
    let mut resample_count = 0u64;
    for _ in 0..mc_draws {
        let mut attempts = 0;
        let value = loop {
            match phi_integrand(&sample_limit(u, params, &sampler, rng)?) {
                Ok(v) => break v,
                Err(Error::EmptySample) if attempts < MAX_RESAMPLES => {
                    attempts += 1;
                    resample_count += 1;
                }
                Err(e) => return Err(e),
            }
        };
        debug_assert!(value > 0.0 && value <= 1.0 + 1e-12);
        stats.push(value);
    }
    Ok(LimitEstimate {
        estimate: stats.estimate(),
        draws: mc_draws,
        epsilon,
        bias_bound: sampler.dropped_mass_f(),
        resample_count,
    })
}

/// Monte Carlo estimate of `E phi(N_u, W)`, the limit of
/// `P(k <= X_n < n | Z_n > 1)` as `k / n -> u`.
pub fn limit_pairwise<R: Rng + ?Sized>(
    u: f64,
    params: &ModelParams,
    mc_draws: u64,
    epsilon: f64,
    rng: &mut R,
) -> Result<LimitEstimate> {
    check_u(u)?;
    estimate_phi(Some(u), params, mc_draws, epsilon, rng)
}

/// Monte Carlo estimate of `E[<f^2, W> / <f, W>^2]`, the limit of
/// `P(X_n < inf | Z_n > 1)`.
pub fn limit_pairwise_finite<R: Rng + ?Sized>(
    params: &ModelParams,
    mc_draws: u64,
    epsilon: f64,
    rng: &mut R,
) -> Result<LimitEstimate> {
    estimate_phi(None, params, mc_draws, epsilon, rng)
}

/// `(1 - u)^gamma`, the limit of `P(tau_n > k)` as `k / n -> u`.
pub fn limit_tau(u: f64, gamma: f64) -> Result<f64> {
    check_u(u)?;
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::domain(format!("gamma = {gamma} must be positive")));
    }
    Ok((1.0 - u).powf(gamma))
}

/// CDF of the Gamma law with shape `gamma` and rate `2 / sigma2`.
pub fn gamma_limit_cdf(t: f64, params: &ModelParams) -> Result<f64> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::domain(format!("t = {t} must be nonnegative")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    Ok(gamma_lr(params.gamma, t * params.mass_rate()))
}

/// Density `h(t)` of the Gamma law with shape `gamma` and rate `2 / sigma2`.
pub fn gamma_limit_density(t: f64, params: &ModelParams) -> Result<f64> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::domain(format!("t = {t} must be nonnegative")));
    }
    let rate = params.mass_rate();
    let x = rate * t;
    if t == 0.0 {
        return Ok(match params.gamma {
            g if g < 1.0 => f64::INFINITY,
            1.0 => rate,
            _ => 0.0,
        });
    }
    Ok((rate.ln() + (params.gamma - 1.0) * x.ln() - x - ln_gamma(params.gamma)).exp())
}

/// `N` with `P(N = k) = (1 - u) u^(k-1)`, `k >= 1`.
pub fn sample_plain_clan_count<R: Rng + ?Sized>(u: f64, rng: &mut R) -> Result<u64> {
    check_u(u)?;
    let failures = Geometric::new(1.0 - u).map_err(|e| Error::domain(e.to_string()))?;
    Ok(1 + failures.sample(rng))
}

/// Monte Carlo estimate of the single-ancestor limit
/// `E[sum eta_i^2 / (sum eta_i)^2]` with a geometric number of
/// exponential masses of mean `sigma2 / 2`.
pub fn limit_plain_pairwise<R: Rng + ?Sized>(u: f64, sigma2: f64, mc_draws: u64, rng: &mut R) -> Result<EstimateWithCI> {
    check_u(u)?;
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(Error::domain(format!("sigma2 = {sigma2} must be positive")));
    }
    if mc_draws == 0 {
        return Err(Error::domain("mc_draws must be at least 1"));
    }
    let masses = mass_law(sigma2)?;
    let mut stats = MeanStats::default();
    for _ in 0..mc_draws {
        let count = sample_plain_clan_count(u, rng)?;
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..count {
            let w = masses.sample(rng);
            s1 += w;
            s2 += w * w;
        }
        stats.push(s2 / (s1 * s1));
    }
    Ok(stats.estimate())
}

/// `(1 - u) (sum_{i <= N} w_i + <f, W>)`, which has the Gamma limit law of `Z_n / n`.
pub fn sample_composite_mass<R: Rng + ?Sized>(u: f64, params: &ModelParams, sampler: &WSampler, rng: &mut R) -> Result<f64> {
    check_u(u)?;
    Ok((1.0 - u) * sample_limit(Some(u), params, sampler, rng)?.total_mass())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{validate_model, DEFAULT_EPSILON};
    use crate::quadrature::adaptive_simpson;
    use crate::rng::stream;

    fn params() -> ModelParams {
        validate_model(&[0.5, 0.0, 0.5], &[0.5, 0.5]).unwrap()
    }

    fn sample(masses: &[f64], atoms: &[f64]) -> LimitSample {
        LimitSample {
            n_clans: masses.len(),
            clan_masses: masses.to_vec(),
            immigration_measure: PointMeasure { atoms: atoms.to_vec(), truncation_epsilon: 1e-6 },
        }
    }

    #[test]
    fn phi_degenerate_cases() {
        assert_eq!(phi_integrand(&sample(&[0.7], &[])).unwrap(), 1.0);
        assert_eq!(phi_integrand(&sample(&[], &[2.5])).unwrap(), 1.0);
        assert!(matches!(phi_integrand(&sample(&[], &[])), Err(Error::EmptySample)));
        assert!((phi_integrand(&sample(&[1.0, 1.0], &[])).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn phi_two_clans_averages_two_thirds() {
        // B = w1/(w1+w2) is uniform, so E[B^2 + (1-B)^2] = int_0^1 b^2 + (1-b)^2 db
        let oracle = adaptive_simpson(|b| b * b + (1.0 - b) * (1.0 - b), 0.0, 1.0, 1e-14);
        assert!((oracle - 2.0 / 3.0).abs() < 1e-12);
        let masses = mass_law(1.0).unwrap();
        let mut rng = stream(2, 2);
        let mut stats = MeanStats::default();
        for _ in 0..200_000 {
            let s = sample(&[masses.sample(&mut rng), masses.sample(&mut rng)], &[]);
            stats.push(phi_integrand(&s).unwrap());
        }
        let e = stats.estimate();
        assert!((e.value - oracle).abs() < 3.0 * e.stderr, "{} +- {}", e.value, e.stderr);
    }

    #[test]
    fn limit_tau_values() {
        assert_eq!(limit_tau(0.5, 1.0).unwrap(), 0.5);
        assert!((limit_tau(0.75, 2.0).unwrap() - 0.0625).abs() < 1e-15);
        assert!((limit_tau(1e-12, 1.0).unwrap() - 1.0).abs() < 1e-11);
        assert!(limit_tau(0.0, 1.0).is_err());
        assert!(limit_tau(0.5, 0.0).is_err());
    }

    #[test]
    fn gamma_cdf_shape_one_is_exponential() {
        // sigma2 = 2 and gamma = 1: geometric offspring, one immigrant per generation
        let offspring = crate::distributions::DiscreteLaw::truncated_geometric(0.5, 64).unwrap();
        let p = crate::distributions::validate_laws(offspring, crate::distributions::DiscreteLaw::point_mass(1)).unwrap();
        assert!((p.sigma2 - 2.0).abs() < 1e-12 && (p.gamma - 1.0).abs() < 1e-12);
        for t in [0.0, 0.1, 0.5, 1.0, 3.0, 10.0] {
            assert!((gamma_limit_cdf(t, &p).unwrap() - (1.0 - (-t).exp())).abs() < 1e-10);
        }
        assert!(gamma_limit_cdf(-1.0, &p).is_err());
    }

    #[test]
    fn gamma_density_normalized_with_mean() {
        for (offspring, immigration) in [
            (vec![0.5, 0.0, 0.5], vec![0.5, 0.5]),
            (vec![0.5, 0.0, 0.5], vec![0.2, 0.3, 0.5]),
            (vec![0.25, 0.5, 0.25], vec![0.5, 0.5]),
        ] {
            let p = validate_model(&offspring, &immigration).unwrap();
            let h = |t: f64| gamma_limit_density(t, &p).unwrap();
            let upper = 80.0 / p.mass_rate();
            // substitute t = s^2 to tame the t^(gamma-1) endpoint behaviour
            let mass = adaptive_simpson(|s| 2.0 * s * h(s * s), 0.0, upper.sqrt(), 1e-12);
            let mean = adaptive_simpson(|s| 2.0 * s * s * s * h(s * s), 0.0, upper.sqrt(), 1e-12);
            assert!((mass - 1.0).abs() < 1e-8, "mass {mass}");
            assert!((mean - p.gamma * p.sigma2 / 2.0).abs() < 1e-8, "mean {mean}");
            let cdf_mid = gamma_limit_cdf(1.0, &p).unwrap();
            let quad_mid = adaptive_simpson(|s| 2.0 * s * h(s * s), 0.0, 1.0, 1e-12);
            assert!((cdf_mid - quad_mid).abs() < 1e-8);
        }
    }

    #[test]
    fn phi_stays_in_unit_interval() {
        let p = params();
        let sampler = WSampler::for_params(&p, DEFAULT_EPSILON).unwrap();
        let mut rng = stream(8, 0);
        for _ in 0..20_000 {
            let s = sample_limit(Some(0.6), &p, &sampler, &mut rng).unwrap();
            if let Ok(v) = phi_integrand(&s) {
                assert!(v > 0.0 && v <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn small_u_approaches_finite_limit() {
        let p = params();
        let a = limit_pairwise(1e-9, &p, 40_000, DEFAULT_EPSILON, &mut stream(1, 0)).unwrap();
        let b = limit_pairwise_finite(&p, 40_000, DEFAULT_EPSILON, &mut stream(1, 1)).unwrap();
        let combined = (a.estimate.stderr.powi(2) + b.estimate.stderr.powi(2)).sqrt();
        assert!((a.estimate.value - b.estimate.value).abs() < 3.0 * combined);
    }

    #[test]
    fn limit_pairwise_decreases_in_u() {
        let p = params();
        let values: Vec<f64> = [0.1, 0.3, 0.5, 0.7, 0.9]
            .iter()
            .enumerate()
            .map(|(i, u)| limit_pairwise(*u, &p, 50_000, DEFAULT_EPSILON, &mut stream(3, i as u64)).unwrap().estimate.value)
            .collect();
        assert!(values.windows(2).all(|w| w[1] < w[0]), "{values:?}");
    }

    #[test]
    fn small_gamma_finite_limit_near_one() {
        // beta = 0.01 gives gamma = 0.02: the measure is usually a single dominant atom
        let p = validate_model(&[0.5, 0.0, 0.5], &[0.99, 0.01]).unwrap();
        let e = limit_pairwise_finite(&p, 20_000, DEFAULT_EPSILON, &mut stream(4, 0)).unwrap();
        assert!(e.estimate.value > 0.95 && e.estimate.value < 1.0, "{}", e.estimate.value);
        assert!(e.resample_count > 0);
    }

    #[test]
    fn plain_limit_near_one_for_small_u() {
        let e = limit_plain_pairwise(1e-6, 1.0, 10_000, &mut stream(5, 0)).unwrap();
        assert!((e.value - 1.0).abs() < 1e-3);
        assert!(limit_plain_pairwise(1.0, 1.0, 10, &mut stream(5, 0)).is_err());
    }

    #[test]
    fn plain_clan_count_is_geometric_on_positive_integers() {
        let mut rng = stream(6, 0);
        let n = 100_000;
        let draws: Vec<u64> = (0..n).map(|_| sample_plain_clan_count(0.5, &mut rng).unwrap()).collect();
        assert!(draws.iter().all(|k| *k >= 1));
        let ones = draws.iter().filter(|k| **k == 1).count() as f64 / n as f64;
        assert!((ones - 0.5).abs() < 3.0 * (0.25 / n as f64).sqrt());
    }
}
