//! Every replicate owns a random stream derived from `(seed, index)`, so a
//! report does not depend on how many worker threads produced it.
//!
//! ```text
//! cargo run --release --example reproducible_streams
//! ```

use gwpi::harness::{run_finite_n, Execution, FiniteNConfig};
use gwpi::validate_model;

fn main() -> gwpi::Result<()> {
    let params = validate_model(&[0.25, 0.5, 0.25], &[0.5, 0.25, 0.25])?;
    let config = FiniteNConfig::new(64, 2_000, vec![0.5], 9);
    let mut outputs = Vec::new();
    for threads in [1, 2, 4] {
        let exec = Execution { threads: Some(threads), ..Default::default() };
        let json = serde_json::to_string(&run_finite_n(&params, &config, &exec)?)?;
        println!("{threads} thread(s): {} bytes", json.len());
        outputs.push(json);
    }
    println!("identical: {}", outputs.windows(2).all(|w| w[0] == w[1]));
    Ok(())
}
