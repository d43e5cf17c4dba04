//! Integer edge weights as lengths: the weighted zeta polynomial is the
//! ordinary one of the graph with each edge subdivided, and its prime loops
//! are counted by total weight.
//!
//! cargo run --example weighted_zeta

use topoinfer::graph::Graph;
use topoinfer::zeta::{enumerate_weighted_prime_loops, euler_product_truncation, weighted_zeta_reciprocal};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // K4 with one edge of length 3 and one of length 2
    let g = Graph::new(4, [(0, 1, 3), (0, 2, 1), (0, 3, 1), (1, 2, 2), (1, 3, 1), (2, 3, 1)])?;
    let inflated = g.inflate();
    println!(
        "weighted K4: {} vertices, {} edges; inflated: {} vertices, {} edges",
        g.n_vertices(),
        g.n_edges(),
        inflated.n_vertices(),
        inflated.n_edges()
    );
    let zp = weighted_zeta_reciprocal(&g)?;
    println!("degree of 1/zeta: {}", zp.degree());

    let max_w = 12;
    let census = enumerate_weighted_prime_loops(&g, max_w)?;
    println!("prime loops by weight 1..{max_w}: {:?}", &census[1..]);
    let euler = euler_product_truncation(&census, max_w);
    for j in 0..=max_w {
        println!("  u^{j:<2} {:>6} {:>6}", zp.coeff(j).to_string(), euler[j].to_string());
    }
    let agrees = (0..=max_w).all(|j| zp.coeff(j) == euler[j]);
    println!("polynomial and weighted Euler product agree: {agrees}");
    Ok(())
}
