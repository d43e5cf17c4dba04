//! Ihara zeta polynomial, loop counts, spanning trees and the radius of
//! convergence for a few small graphs, each checked against an independent
//! computation.
//!
//! cargo run --example zeta_invariants

use topoinfer::graph::{named, Graph};
use topoinfer::zeta::{
    asymptotic_trend, enumerate_prime_loops, euler_product_truncation, kappa_from_zeta, prime_asymptotics_check,
    topological_summary, zeta_reciprocal,
};

const MAX_M: usize = 10;

fn report(name: &str, g: &Graph) -> Result<(), Box<dyn std::error::Error>> {
    let zp = zeta_reciprocal(g)?;
    let summary = topological_summary(g, MAX_M)?;
    println!("{name}: |V| = {}, |E| = {}, circuit rank {}", g.n_vertices(), g.n_edges(), g.circuit_rank());
    let coeffs: Vec<String> = zp.coeffs().iter().map(|c| c.to_string()).collect();
    println!("  1/zeta coefficients: [{}]", coeffs.join(", "));

    // the Euler product over prime loops found by brute force must give
    // the same series
    let census = enumerate_prime_loops(g, MAX_M)?;
    let euler = euler_product_truncation(&census, MAX_M);
    let agrees = (0..=MAX_M).all(|j| zp.coeff(j) == euler[j]);
    println!("  Euler product through u^{MAX_M} agrees: {agrees}");

    let loops: Vec<String> = summary.loop_counts.iter().map(|c| c.to_string()).collect();
    println!("  N_1..N_{MAX_M}: {}", loops.join(" "));
    println!("  primes pi(1..{MAX_M}): {:?} (census {:?})", summary.prime_counts.iter().map(|c| c.to_string()).collect::<Vec<_>>(), &census[1..]);
    if g.circuit_rank() >= 2 {
        println!("  spanning trees: {} (Matrix-Tree), {} (zeta derivative)", summary.spanning_trees, kappa_from_zeta(&zp, g.circuit_rank())?);
    }
    println!("  radius R = {:.10} (+- {:.1e}), Delta = {:?}", summary.radius.value, summary.radius.err, summary.delta);
    let rows = prime_asymptotics_check(&summary, MAX_M)?;
    if let Some(last) = rows.last() {
        println!(
            "  pi({}) = {} vs Delta R^-m / m = {:.1} (relative error {:.3}); trend {:?}",
            last.m,
            last.primes,
            last.leading_term,
            last.relative_error,
            asymptotic_trend(&rows)
        );
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    report("C5", &named::cycle(5))?;
    report("K4", &named::complete(4))?;
    report("K4 minus an edge", &named::k4_minus_edge())?;
    report("Petersen", &named::petersen())?;
    Ok(())
}
