//! How the coalescence probabilities move with `n`: the pair probability
//! settles at its limit while total coalescence tends to zero.
//!
//! ```text
//! cargo run --release --example scaling_sweep -- [replicates]
//! ```

use gwpi::harness::{run_sweep, Execution, FiniteNConfig};
use gwpi::validate_model;

fn main() -> gwpi::Result<()> {
    let replicates: u64 = std::env::args().nth(1).map_or(5_000, |s| s.parse().expect("replicates"));
    let params = validate_model(&[0.5, 0.0, 0.5], &[0.5, 0.5])?;
    let base = FiniteNConfig::new(64, replicates, vec![0.5], 42);
    let (sweep, _) = run_sweep(&params, &[32, 64, 128, 256], &base, &Execution::default())?;
    print!("{}", sweep.to_csv());
    Ok(())
}
