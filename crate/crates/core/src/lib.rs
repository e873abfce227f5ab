//! Simulation and verification toolkit for coalescence times in critical
//! Galton-Watson processes with immigration.
//!
//! * [`distributions`]: offspring/immigration laws, the negative binomial clan
//!   count and the Poisson random measure of immigrant clan masses.
//! * [`simulator`]: forward simulation with full genealogy and the coalescence
//!   statistics read off a forest.
//! * [`exact`]: survival iteration, the exact single-clan probability and
//!   exhaustive enumeration of tiny instances.
//! * [`limits`]: Monte Carlo and closed-form evaluation of the limit laws.
//! * [`harness`]: replicate batches, estimates with standard errors, reports.
//! * [`cli`]: configuration files and the `gwpi` subcommands.

pub mod cli;
pub mod distributions;
pub mod error;
pub mod exact;
pub mod harness;
pub mod limits;
pub mod quadrature;
pub mod rng;
pub mod simulator;

pub use distributions::{validate_model, DiscreteLaw, ModelParams, PointMeasure};
pub use error::{Error, Result};
pub use harness::EstimateWithCI;
pub use simulator::{CoalescenceOutcome, GenealogyForest};
