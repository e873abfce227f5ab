//! Regenerates the golden files under `tests/golden/`: exhaustive
//! enumerations for tiny `n` and high-precision Monte Carlo limit values.
//!
//! ```text
//! cargo run --release --example write_goldens -- [dir] [draws]
//! ```

use std::path::PathBuf;

use gwpi::cli::{cmd_exact, cmd_limit, RunFlags};
use gwpi::harness::stats::EstimateWithCI;
use gwpi::limits::limit_plain_pairwise;
use gwpi::rng::limit_stream;

#[derive(serde::Serialize)]
struct PlainGolden {
    u: f64,
    sigma2: f64,
    draws: u64,
    seed: u64,
    limit: EstimateWithCI,
}

fn main() -> gwpi::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "crates/core/tests/golden".into()));
    let draws: u64 = args.next().map_or(10_000_000, |s| s.parse().expect("draws"));
    let config = |name: &str, body: &str| -> gwpi::Result<PathBuf> {
        let path = std::env::temp_dir().join(name);
        std::fs::write(&path, body)?;
        Ok(path)
    };

    let default_law = RunFlags { out: Some(dir.join("default")), ..Default::default() };
    cmd_exact(&RunFlags { config: Some(config("gwpi_exact_default.json", r#"{"exact_n": 3}"#)?), ..default_law })?;
    let second = config(
        "gwpi_exact_second.json",
        r#"{"offspring": [0.25, 0.5, 0.25], "immigration": [0.5, 0.25, 0.25], "exact_n": 2}"#,
    )?;
    cmd_exact(&RunFlags { config: Some(second), out: Some(dir.join("second")), ..Default::default() })?;

    let limits = config("gwpi_limits.json", &format!(r#"{{"limit_draws": {draws}, "seed": 20240601}}"#))?;
    cmd_limit(&RunFlags { config: Some(limits), out: Some(dir.join("limits")), ..Default::default() })?;

    let (u, sigma2, seed) = (0.5, 1.0, 20240601);
    let limit = limit_plain_pairwise(u, sigma2, draws, &mut limit_stream(seed, 0))?;
    let golden = PlainGolden { u, sigma2, draws, seed, limit };
    std::fs::write(dir.join("limits/plain_pairwise.json"), serde_json::to_string_pretty(&golden)? + "\n")?;
    println!("goldens written to {}", dir.display());
    Ok(())
}
