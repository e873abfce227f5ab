//! Survival probabilities by generating-function iteration: closed form for
//! geometric offspring and the `n q_n -> 2 / sigma2` rate in general.
//!
//! ```text
//! cargo run --example survival_rates
//! ```

use gwpi::exact::{iterate_survival, single_clan_bound};
use gwpi::{validate_model, DiscreteLaw};

fn main() -> gwpi::Result<()> {
    // p_j = 2^{-(j+1)}, truncated far beyond double precision
    let geometric = DiscreteLaw::truncated_geometric(0.5, 64)?;
    let s = iterate_survival(&geometric, 100);
    let worst = (0..=100).map(|j| (s.q(j) - 1.0 / (j as f64 + 1.0)).abs()).fold(0.0, f64::max);
    println!("geometric offspring: max |q_j - 1/(j+1)| over j <= 100 = {worst:.2e}");

    for pmf in [vec![0.5, 0.0, 0.5], vec![0.25, 0.5, 0.25], vec![0.4, 0.3, 0.2, 0.1]] {
        let params = validate_model(&pmf, &[0.5, 0.5])?;
        let s = iterate_survival(&params.offspring, 10_000);
        print!("offspring {pmf:?} (sigma2 = {}): n q_n =", params.sigma2);
        for n in [10, 100, 1000, 10_000] {
            print!(" {:.4}", n as f64 * s.q(n));
        }
        println!(" -> {:.4}", 2.0 / params.sigma2);
    }

    let params = validate_model(&[0.5, 0.0, 0.5], &[0.5, 0.5])?;
    println!("single surviving clan probability:");
    for n in [16, 64, 256, 1024, 4096] {
        println!("  n = {n:>5}: {:.6}", single_clan_bound(&params, n)?);
    }
    Ok(())
}
