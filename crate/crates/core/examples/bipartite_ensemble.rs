//! Uniform sampling of (q, r)-biregular bipartite graphs with the switch
//! chain, and Monte Carlo ensemble averages.
//!
//! cargo run --example bipartite_ensemble

use std::collections::BTreeMap;

use topoinfer::ensembles::{ensemble_expectation, observables, sample_biadjacency, EnsembleSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // (3, 3, 2, 2): six matrices, each should appear about 1/6 of the time
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    let samples = 6000;
    for seed in 0..samples {
        let m = sample_biadjacency(3, 3, 2, 2, 1000, seed)?;
        let key: String = (0..3).flat_map(|i| (0..3).map(move |a| (i, a))).map(|(i, a)| if m.get(i, a) { '1' } else { '0' }).collect();
        *counts.entry(key).or_default() += 1;
    }
    for (key, c) in &counts {
        println!("{key}: {:.4}", *c as f64 / samples as f64);
    }

    let spec = EnsembleSpec::BipartiteRegular { n_bits: 12, m_checks: 8, q: 2, r: 3 };
    let edges = ensemble_expectation(&spec, observables::edge_count, 500, 3, 2)?;
    let entry = ensemble_expectation(&spec, observables::biadjacency_entry(12, 0, 0), 2000, 4, 2)?;
    println!("edges: {:.1} (always n q = 24)", edges.mean);
    println!("P(bit 0 in check 0) = {:.4} +- {:.4} (uniform law: q/m = 0.25)", entry.mean, entry.std_error);
    Ok(())
}
