//! Return probabilities of the biased walk on the integers, from counting
//! and from the generating function, next to a Monte Carlo estimate.
//!
//! cargo run --example asymmetric_walk

use topoinfer::walks::{asym_return_probs, simulate_asym_returns};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let walks = 100_000;
    for p in [0.1, 0.3, 0.5] {
        let exact = asym_return_probs(p, 40)?;
        let mc = simulate_asym_returns(p, 40, walks, 11, 2)?;
        println!("p = {p}");
        for n in (2..=40).step_by(8) {
            let sigma = (exact.probs[n] * (1.0 - exact.probs[n]) / walks as f64).sqrt();
            println!(
                "  n = {n:>2}: P = {:.3e}, simulated {:.3e} ({:+.2} sigma)",
                exact.probs[n],
                mc[n],
                if sigma > 0.0 { (mc[n] - exact.probs[n]) / sigma } else { 0.0 }
            );
        }
    }
    Ok(())
}
