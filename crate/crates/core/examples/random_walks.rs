//! Simple and lazy random walks: exact distributions, two-point
//! correlators, the return-probability versus closed-walk link, and a Monte
//! Carlo occupancy check.
//!
//! cargo run --example random_walks

use topoinfer::graph::named;
use topoinfer::walks::{
    continuum_comparison, diagonal_loop_link, empirical_occupancy, evolve_distribution, two_point_correlator,
    WalkDistribution, WalkKind,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = named::petersen();
    let start = WalkDistribution::point_mass(g.n_vertices(), 0)?;
    for steps in [1, 2, 5, 20] {
        let simple = evolve_distribution(&g, &start, steps, WalkKind::Simple)?;
        let lazy = evolve_distribution(&g, &start, steps, WalkKind::Lazy)?;
        println!(
            "t = {steps:>2}: P(at 0) simple {:.5}, lazy {:.5}; mass {:.15}",
            simple.probs()[0],
            lazy.probs()[0],
            simple.total_mass()
        );
    }

    println!("correlator <0|T^n|1> on Petersen:");
    for n in [1, 2, 3, 10] {
        println!("  n = {n:>2}: {:.6}", two_point_correlator(&g, 0, 1, n)?);
    }

    // on a d-regular graph [T^n]_vv = [A^n]_vv / d^n
    for n in [2, 4, 6] {
        let link = diagonal_loop_link(&g, 0, n)?;
        println!(
            "n = {n}: return probability {:.6}, closed walks {}, ratio {:.6}",
            link.walk_return,
            link.raw_walk_count,
            link.raw_walk_count.to_string().parse::<f64>()? / 3f64.powi(n as i32)
        );
    }

    let freq = empirical_occupancy(&g, 0, 5, 20_000, 7, 2)?;
    let exact = evolve_distribution(&g, &start, 5, WalkKind::Simple)?;
    let worst = freq[5].iter().zip(exact.probs()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("20000 walkers, t = 5: max |empirical - exact| = {worst:.4}");

    println!("2D lattice return probability against the continuum kernel:");
    for row in continuum_comparison(2, &[10, 100, 1000])? {
        println!("  t = {:>4}: lattice {:.6}, kernel {:.6}, ratio {:.4}", row.t, row.lattice_return, row.kernel_diagonal, row.ratio);
    }
    Ok(())
}
