//! Full finite-n experiment: replicate batch, limit table and the joined
//! comparison, the library equivalent of `gwpi simulate`, `limit`, `compare`.
//!
//! ```text
//! cargo run --release --example finite_n_experiment -- [n] [replicates]
//! ```

use gwpi::harness::{compare_reports, run_finite_n, run_limits, Execution, FiniteNConfig, LimitConfig, DEFAULT_SLACK};
use gwpi::validate_model;

fn main() -> gwpi::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(128, |s| s.parse().expect("n"));
    let replicates: u64 = args.next().map_or(10_000, |s| s.parse().expect("replicates"));
    let params = validate_model(&[0.5, 0.0, 0.5], &[0.5, 0.5])?;
    let grid = vec![0.25, 0.5, 0.75];
    let exec = Execution::default();

    let report = run_finite_n(&params, &FiniteNConfig::new(n, replicates, grid.clone(), 42), &exec)?;
    for t in &report.targets {
        let at = t.u.map(|u| format!(" u={u}")).unwrap_or_default();
        println!(
            "{}{at}: {:.4} +- {:.4} (conditioning rate {:.3})",
            t.name, t.estimate.value, t.estimate.stderr, t.estimate.conditioning_rate
        );
    }
    for v in &report.verdicts {
        println!("{}", v.line());
    }
    let limits = run_limits(&params, &LimitConfig { u_grid: grid, draws: 200_000, epsilon: 1e-6, seed: 42 }, &exec)?;
    let summary = compare_reports(&report, &limits, DEFAULT_SLACK)?;
    for v in &summary.verdicts {
        println!("{}", v.line());
    }
    print!("{}", report.to_csv());
    Ok(())
}
