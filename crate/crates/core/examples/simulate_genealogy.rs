//! Simulates one process with immigration, prints the population path and
//! reads the coalescence times off the genealogy.
//!
//! ```text
//! cargo run --example simulate_genealogy -- [n] [seed]
//! ```

use gwpi::rng::stream;
use gwpi::simulator::{simulate_forest, SimulationLimits};
use gwpi::validate_model;

fn main() -> gwpi::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(12, |s| s.parse().expect("n"));
    let seed: u64 = args.next().map_or(3, |s| s.parse().expect("seed"));

    // fair binary splitting, at most one immigrant per generation
    let params = validate_model(&[0.5, 0.0, 0.5], &[0.5, 0.5])?;
    println!("m = {}, sigma2 = {}, beta = {}, gamma = {}", params.m, params.sigma2, params.beta, params.gamma);

    let mut rng = stream(seed, 0);
    let forest = simulate_forest(&params, n, &SimulationLimits::default(), &mut rng)?;
    for g in 0..=n {
        println!("generation {g:>3}: {:>4} particles ({} immigrants)", forest.population(g), forest.immigrant_counts()[g]);
    }
    println!("ancestor set sizes back from generation {n}: {:?}", forest.ancestor_set_sizes());
    println!("total coalescence A_n: {:?}", forest.total_coalescence()?);
    println!("oldest surviving clan born at: {:?}", forest.oldest_clan_birth());
    if forest.final_population() > 1 {
        println!("first two particles coalesce at: {:?}", forest.pair_coalescence(0, 1));
        println!("a random pair coalesces at: {:?}", forest.sample_pairwise_coalescence(&mut rng)?);
    }
    if n <= 6 {
        println!("{}", serde_json::to_string_pretty(&forest.to_json())?);
    }
    Ok(())
}
