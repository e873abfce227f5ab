//! Single-ancestor baseline: the total coalescence time `A_n / n` has tail
//! `1 - u` given survival, and the pair coalescence time has a limit built
//! from a geometric number of exponential masses.
//!
//! ```text
//! cargo run --release --example plain_baseline -- [n] [runs]
//! ```

use gwpi::harness::{compare, run_plain_baseline, Execution, DEFAULT_SLACK};
use gwpi::limits::limit_plain_pairwise;
use gwpi::rng::limit_stream;
use gwpi::validate_model;

fn main() -> gwpi::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(256, |s| s.parse().expect("n"));
    let runs: u64 = args.next().map_or(1_300_000, |s| s.parse().expect("runs"));
    let params = validate_model(&[0.5, 0.0, 0.5], &[0.5, 0.5])?;
    let grid = [0.25, 0.5, 0.75];

    let base = run_plain_baseline(&params, n, &grid, runs, 2024, &Execution::default())?;
    println!("n = {n}, {runs} runs, P(Y_n >= 1) = {:.5} (about 2 / (sigma2 n) = {:.5})", base.survival.value, 2.0 / (params.sigma2 * n as f64));
    for (i, row) in base.rows.iter().enumerate() {
        let limit = limit_plain_pairwise(row.u, params.sigma2, 1_000_000, &mut limit_stream(2024, i as u64))?;
        println!("u = {}  k = {}", row.u, row.k);
        println!("  {}", compare(&row.total_tail, 1.0 - row.u, DEFAULT_SLACK).named("total_tail_vs_1-u").line());
        println!("  {}", compare(&row.pair_tail, limit, DEFAULT_SLACK).named("pair_tail_vs_limit").line());
    }
    Ok(())
}
