//! Splits generation `n` into clans at a cut generation `k` and evaluates the
//! same-clan pair fraction, which averages to `P(k <= X_n < n | Z_n > 1)`.
//!
//! ```text
//! cargo run --example clan_decomposition -- [n] [k]
//! ```

use gwpi::rng::stream;
use gwpi::simulator::{falling2, simulate_forest, SimulationLimits};
use gwpi::validate_model;

fn main() -> gwpi::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(40, |s| s.parse().expect("n"));
    let k: usize = args.next().map_or(3 * n / 4, |s| s.parse().expect("k"));
    let params = validate_model(&[0.5, 0.0, 0.5], &[0.5, 0.5])?;

    // find a run with a few particles at generation n
    let forest = (0..)
        .map(|i| simulate_forest(&params, n, &SimulationLimits::default(), &mut stream(11, i)))
        .find(|f| f.as_ref().map_or(true, |f| f.final_population() > 3))
        .expect("unbounded search")?;

    let clans = forest.clan_decomposition(k)?;
    println!("Z_n = {}, cut at k = {}", forest.final_population(), clans.k);
    println!("clans of generation-k particles: {:?}", clans.clan_sizes.iter().filter(|c| **c > 0).collect::<Vec<_>>());
    for (founder, size) in clans.immigrant_clan_sizes.iter().filter(|(_, s)| *s > 0) {
        println!("  immigrant born in generation {} (#{}) leaves {size}", founder.generation, founder.ordinal);
    }
    println!("partition check: {} = {}", clans.total(), forest.final_population());

    let within: f64 = clans.clan_sizes.iter().chain(clans.immigrant_clan_sizes.iter().map(|(_, s)| s)).map(|c| falling2(*c)).sum();
    let ratio = forest.pairwise_ratio_sample(k)?;
    println!("same-clan ordered pairs {within} of {}: ratio {:.4}", falling2(forest.final_population()), ratio.ratio);

    // brute force over all pairs for comparison
    let z = forest.final_population();
    let mut hits = 0usize;
    for a in 0..z {
        for b in a + 1..z {
            hits += usize::from(forest.pair_coalescence(a, b).within(k, n));
        }
    }
    println!("traced pairs with k <= X < n: {:.4}", hits as f64 / (z * (z - 1) / 2) as f64);
    Ok(())
}
