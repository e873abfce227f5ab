//! The random objects of the limit laws: the negative binomial clan count,
//! exponential clan masses and the Poisson random measure of immigrant
//! masses, and the limit probabilities computed from them.
//!
//! ```text
//! cargo run --release --example limit_objects
//! ```

use gwpi::distributions::{sample_negative_binomial, WSampler, DEFAULT_EPSILON};
use gwpi::harness::ks_distance;
use gwpi::limits::{gamma_limit_cdf, limit_pairwise, limit_pairwise_finite, limit_tau, sample_composite_mass};
use gwpi::rng::limit_stream;
use gwpi::validate_model;

fn main() -> gwpi::Result<()> {
    let params = validate_model(&[0.5, 0.0, 0.5], &[0.5, 0.5])?;
    let draws = 100_000;
    let mut rng = limit_stream(5, 0);

    let u = 0.5;
    let zeros = (0..draws).filter(|_| sample_negative_binomial(params.gamma, u, &mut rng).unwrap() == 0).count();
    println!("P(N_u = 0) ~ {:.4}, exact (1-u)^gamma = {}", zeros as f64 / draws as f64, limit_tau(u, params.gamma)?);

    let w = WSampler::for_params(&params, DEFAULT_EPSILON)?;
    println!("W above {DEFAULT_EPSILON}: {:.3} atoms on average, dropped mass {:.2e}", w.mean_count(), w.dropped_mass_f());
    let masses: Vec<f64> = (0..draws).map(|_| w.sample(&mut rng).sum_f()).collect();
    let ks = ks_distance(&masses, |t| gamma_limit_cdf(t, &params).unwrap())?;
    println!("<f, W> vs Gamma(gamma, 2/sigma2): KS = {ks:.4}");
    let composite: Vec<f64> = (0..draws).map(|_| sample_composite_mass(u, &params, &w, &mut rng).unwrap()).collect();
    let ks = ks_distance(&composite, |t| gamma_limit_cdf(t, &params).unwrap())?;
    println!("(1-u)(clan masses + <f, W>) vs the same Gamma: KS = {ks:.4}");

    for u in [0.1, 0.25, 0.5, 0.75, 0.9] {
        let e = limit_pairwise(u, &params, 200_000, DEFAULT_EPSILON, &mut rng)?;
        println!("lim P(un <= X < n | Z_n > 1) at u = {u}: {:.4} +- {:.4}", e.estimate.value, e.estimate.stderr);
    }
    let e = limit_pairwise_finite(&params, 200_000, DEFAULT_EPSILON, &mut rng)?;
    println!("lim P(X < inf | Z_n > 1): {:.4} +- {:.4} ({} empty draws redrawn)", e.estimate.value, e.estimate.stderr, e.resample_count);
    Ok(())
}
