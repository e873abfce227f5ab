//! Mergeable sufficient statistics and the estimates built from them.

use serde::{Deserialize, Serialize};

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithCI {
    pub value: f64,
    pub stderr: f64,
    /// Replicates that contributed (those satisfying the conditioning event).
    pub n_effective: u64,
    /// Fraction of all replicates satisfying the conditioning event.
    pub conditioning_rate: f64,
}

impl EstimateWithCI {
    pub fn exact(value: f64) -> Self {
        Self { value, stderr: 0.0, n_effective: 0, conditioning_rate: 1.0 }
    }
}

/// Running sums for a plain sample mean.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MeanStats {
    pub count: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl MeanStats {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(&mut self, other: &Self) {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn estimate(&self) -> EstimateWithCI {
        let n = self.count as f64;
        let mean = if self.count > 0 { self.sum / n } else { f64::NAN };
        let stderr = if self.count > 1 {
            ((self.sum_sq - n * mean * mean).max(0.0) / (n - 1.0) / n).sqrt()
        } else {
            f64::NAN
        };
        EstimateWithCI { value: mean, stderr, n_effective: self.count, conditioning_rate: 1.0 }
    }
}

/// Running sums for a mean conditional on a selection event, estimated as a
/// ratio of means over all replicates.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ConditionalStats {
    pub total: u64,
    pub selected: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl ConditionalStats {
    /// Records one replicate; `value` is `None` when the replicate is rejected.
    pub fn push(&mut self, value: Option<f64>) {
        self.total += 1;
        if let Some(x) = value {
            self.selected += 1;
            self.sum += x;
            self.sum_sq += x * x;
        }
    }

    pub fn merge(&mut self, other: &Self) {
        self.total += other.total;
        self.selected += other.selected;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    /// Delta-method standard error of `mean(x s) / mean(s)`:
    /// `Var(R) ~ Var(x s - R s) / (N mean(s)^2)`.
    pub fn estimate(&self) -> EstimateWithCI {
        let big_n = self.total as f64;
        let sel = self.selected as f64;
        let rate = if self.total > 0 { sel / big_n } else { 0.0 };
        if self.selected == 0 {
            return EstimateWithCI { value: f64::NAN, stderr: f64::NAN, n_effective: 0, conditioning_rate: rate };
        }
        let value = self.sum / sel;
        let stderr = if self.total > 1 {
            // sum over selected of (x - R)^2; the residual has mean zero over all replicates
            let resid = (self.sum_sq - sel * value * value).max(0.0);
            (resid / (big_n - 1.0) / big_n).sqrt() / rate
        } else {
            f64::NAN
        };
        EstimateWithCI { value, stderr, n_effective: self.selected, conditioning_rate: rate }
    }
}
