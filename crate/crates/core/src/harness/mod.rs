//! Experiment orchestration: replicate batches, estimates with standard
//! errors, distribution distances, and comparison verdicts.

pub mod experiments;
pub mod stats;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use experiments::{
    compare_reports, run_finite_n, run_limits, run_plain_baseline, run_sweep, Execution, FiniteNConfig, FiniteNReport,
    LimitConfig, LimitTable, PlainBaseline, SweepReport,
};
pub use stats::{ConditionalStats, EstimateWithCI, MeanStats};

/// Allowance multiplier on the combined standard error.
pub const STDERR_MULTIPLIER: f64 = 3.0;
/// Default additive slack for comparisons against asymptotic references.
pub const DEFAULT_SLACK: f64 = 0.03;

/// Kolmogorov-Smirnov distance between the empirical CDF of `samples` and `cdf`.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::domain("KS distance needs at least two samples"));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut worst: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        // step over ties so the empirical CDF jumps once per distinct value
        let mut j = i;
        while j + 1 < xs.len() && xs[j + 1] == xs[i] {
            j += 1;
        }
        let f = cdf(xs[i]);
        worst = worst.max((f - i as f64 / n).abs()).max(((j + 1) as f64 / n - f).abs());
        i = j + 1;
    }
    Ok(worst)
}

/// Two-sample Kolmogorov-Smirnov distance (sup gap between the two empirical CDFs).
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::domain("two-sample KS distance needs nonempty samples"));
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (na, nb) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut worst: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        let v = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= v {
            i += 1;
        }
        while j < ys.len() && ys[j] <= v {
            j += 1;
        }
        worst = worst.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(worst)
}

/// What an empirical estimate is compared against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reference {
    Exact(f64),
    Estimate(EstimateWithCI),
}

impl Reference {
    fn value(&self) -> f64 {
        match self {
            Reference::Exact(v) => *v,
            Reference::Estimate(e) => e.value,
        }
    }

    fn stderr(&self) -> f64 {
        match self {
            Reference::Exact(_) => 0.0,
            Reference::Estimate(e) => e.stderr,
        }
    }
}

impl From<f64> for Reference {
    fn from(v: f64) -> Self {
        Reference::Exact(v)
    }
}

impl From<EstimateWithCI> for Reference {
    fn from(e: EstimateWithCI) -> Self {
        Reference::Estimate(e)
    }
}

/// Outcome of one comparison, citing both sides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub u: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n: Option<usize>,
    pub empirical: f64,
    pub empirical_stderr: f64,
    pub reference: f64,
    pub reference_stderr: f64,
    pub slack: f64,
    /// Largest tolerated gap: `3 * combined stderr + slack`.
    pub allowance: f64,
    /// `empirical - reference`.
    pub difference: f64,
    /// `true` for one-sided checks `empirical <= reference + allowance`.
    #[serde(default)]
    pub one_sided: bool,
    pub pass: bool,
}

impl Verdict {
    pub fn named(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn at_u(mut self, u: f64) -> Self {
        self.u = Some(u);
        self
    }

    pub fn at_n(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }

    pub fn line(&self) -> String {
        let mut where_ = String::new();
        if let Some(n) = self.n {
            where_.push_str(&format!(" n={n}"));
        }
        if let Some(u) = self.u {
            where_.push_str(&format!(" u={u}"));
        }
        format!(
            "{} {}{}: empirical {:.5} +- {:.5} vs reference {:.5} +- {:.5} (|diff| {:.5}{} allowance {:.5})",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            where_,
            self.empirical,
            self.empirical_stderr,
            self.reference,
            self.reference_stderr,
            self.difference.abs(),
            if self.one_sided { ", one-sided," } else { "," },
            self.allowance,
        )
    }
}

fn build_verdict(empirical: &EstimateWithCI, reference: Reference, slack: f64, one_sided: bool) -> Verdict {
    let combined = (empirical.stderr.powi(2) + reference.stderr().powi(2)).sqrt();
    let allowance = STDERR_MULTIPLIER * combined + slack;
    let difference = empirical.value - reference.value();
    let pass = if one_sided { difference <= allowance } else { difference.abs() <= allowance };
    Verdict {
        name: String::new(),
        u: None,
        n: None,
        empirical: empirical.value,
        empirical_stderr: empirical.stderr,
        reference: reference.value(),
        reference_stderr: reference.stderr(),
        slack,
        allowance,
        difference,
        one_sided,
        pass,
    }
}

/// PASS when `|empirical - reference| <= 3 * combined stderr + slack`.
pub fn compare(empirical: &EstimateWithCI, reference: impl Into<Reference>, slack: f64) -> Verdict {
    build_verdict(empirical, reference.into(), slack, false)
}

/// PASS when `empirical <= reference + 3 * combined stderr + slack`.
pub fn compare_at_most(empirical: &EstimateWithCI, reference: impl Into<Reference>, slack: f64) -> Verdict {
    build_verdict(empirical, reference.into(), slack, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use rand::Rng;

    fn est(value: f64, stderr: f64) -> EstimateWithCI {
        EstimateWithCI { value, stderr, n_effective: 100, conditioning_rate: 1.0 }
    }

    #[test]
    fn compare_examples() {
        assert!(compare(&est(2.0 / 3.0, 0.001), 2.0 / 3.0, 0.0).pass);
        assert!(!compare(&est(0.40, 0.01), 0.50, 0.03).pass);
        assert!(compare(&est(0.40, 0.01), est(0.44, 0.01), 0.0).pass);
        assert!(!compare(&est(0.40, 0.01), est(0.45, 0.01), 0.0).pass);
        let v = compare_at_most(&est(0.1, 0.0), 0.5, 0.0);
        assert!(v.pass && v.one_sided);
        assert!(!compare_at_most(&est(0.6, 0.01), 0.5, 0.0).pass);
    }

    #[test]
    fn ks_of_constant_samples() {
        let d = ks_distance(&[1.0; 100], |x: f64| (x / 2.0).clamp(0.0, 1.0)).unwrap();
        assert!(d >= 0.5);
        assert!(ks_distance(&[], |x| x).is_err());
        assert!(ks_distance(&[0.3], |x| x).is_err());
    }

    #[test]
    fn ks_self_consistency() {
        let mut rng = stream(10, 0);
        let xs: Vec<f64> = (0..100_000).map(|_| rng.random::<f64>()).collect();
        let d = ks_distance(&xs, |x: f64| x.clamp(0.0, 1.0)).unwrap();
        assert!(d <= 0.01, "KS {d}");
    }

    #[test]
    fn ks_hand_computed() {
        // ECDF of {0.2, 0.6} vs uniform: gaps 0.2, 0.3, 0.1, 0.4 -> 0.4
        let d = ks_distance(&[0.6, 0.2], |x| x).unwrap();
        assert!((d - 0.4).abs() < 1e-15);
    }

    #[test]
    fn two_sample_ks() {
        let a = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(ks_two_sample(&a, &a).unwrap(), 0.0);
        assert_eq!(ks_two_sample(&[1.0, 1.0], &[2.0, 2.0]).unwrap(), 1.0);
        assert!((ks_two_sample(&[1.0, 2.0], &[2.0, 3.0]).unwrap() - 0.5).abs() < 1e-15);
    }
}
