//! Large deviations of sample means: empirical SCGF, its Legendre transform
//! against the closed-form rate, and tail decay rates with the exact tail
//! and a prefactor correction alongside.
//!
//! cargo run --release --example rate_functions

use topoinfer::largedev::{
    cramer_rate_analytic, empirical_scgf, ldp_decay_check, legendre_transform, uniform_grid, Distribution, ScgfMethod,
    TailEstimator,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let coin = Distribution::bernoulli(0.5)?;
    let t_grid = uniform_grid(-3.0, 3.0, 0.02);
    for method in [ScgfMethod::SumSamples, ScgfMethod::PositionProduct] {
        let scgf = empirical_scgf(|r| coin.sample(r), 100, &t_grid, 10_000, 1, method, 2)?;
        let rate = legendre_transform(&scgf, &[0.2, 0.35, 0.5, 0.65, 0.8])?;
        println!("{method:?}:");
        for (x, q) in rate.x_grid.iter().zip(&rate.q_hat) {
            println!("  I({x:.2}) ~ {q:.4} (exact {:.4})", cramer_rate_analytic(&coin, *x).value);
        }
    }

    let table = ldp_decay_check(&coin, 0.7, &[20, 50, 100, 200], 200_000, 2, TailEstimator::Direct, 2)?;
    println!("Bernoulli(1/2), x = 0.7, I(x) = {:.4}", table.analytic_rate);
    for row in &table.rows {
        println!(
            "  n = {:>3}: hits {:>6}, rate {:?}, exact-tail rate {:.4}, corrected {:?}",
            row.n, row.hits, row.rate, row.exact_tail_rate, row.prefactor_corrected_rate
        );
    }

    // far tails need tilting: P(mean >= 1) for 50 standard normals is ~1e-12
    let gauss = Distribution::gaussian(0.0, 1.0)?;
    for estimator in [TailEstimator::Direct, TailEstimator::Tilted] {
        let t = ldp_decay_check(&gauss, 1.0, &[50], 20_000, 3, estimator, 2)?;
        let row = &t.rows[0];
        println!("Gaussian, {estimator:?}: p = {:.3e}, rate {:?}, flagged {}", row.p_hat, row.rate, row.flagged);
    }
    Ok(())
}
