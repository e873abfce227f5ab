//! Exhaustive enumeration of tiny instances: every coalescence probability
//! computed two ways, plus the exact single-clan probability.
//!
//! ```text
//! cargo run --example exact_enumeration -- [max_n]
//! ```

use gwpi::exact::{enumerate_tiny, single_clan_bound, single_clan_conditional, DEFAULT_HISTORY_CAP};
use gwpi::validate_model;

fn main() -> gwpi::Result<()> {
    let max_n: usize = std::env::args().nth(1).map_or(3, |s| s.parse().expect("max_n"));
    let params = validate_model(&[0.5, 0.0, 0.5], &[0.5, 0.5])?;
    for n in 1..=max_n {
        let t = enumerate_tiny(&params, n, DEFAULT_HISTORY_CAP)?;
        println!("n = {n}: {} histories, total probability {}", t.histories, t.total_probability);
        println!("  P(X < inf | Z_n > 1): clan counts {:.15}, traced {:.15}", t.pair_finite(), t.pair_finite_by_tracing());
        for k in 0..n {
            println!("  P({k} <= X < {n} | Z_n > 1): {:.15} / {:.15}", t.pair_window(k), t.pair_window_by_tracing(k));
        }
        println!(
            "  P(A < inf | Z_n > 0) = {:.15}, exact formula {:.15}",
            t.total_coalescence_finite_conditional(),
            single_clan_conditional(&params, n)?
        );
        println!("  P(one surviving clan) = {:.15}, product formula {:.15}", t.single_clan, single_clan_bound(&params, n)?);
    }
    match enumerate_tiny(&params, 12, 100_000) {
        Err(e) => println!("n = 12 with a 1e5 cap: {e}"),
        Ok(_) => println!("n = 12 unexpectedly enumerable"),
    }
    Ok(())
}
