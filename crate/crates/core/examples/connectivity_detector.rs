//! Local connectivity detection: calibrate the overlap threshold on labeled
//! planted-partition and Erdos-Renyi graphs, then run the majority-vote
//! detector on fresh graphs and show how few vertices it touched.
//!
//! cargo run --release --example connectivity_detector

use topoinfer::detector::{calibrate_threshold, default_walk_length, detect, DetectorConfig};
use topoinfer::ensembles::{sample_er, sample_planted_bridge, EnsembleSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 400;
    let p = 2.0 * (n as f64).ln() / n as f64;
    let planted = EnsembleSpec::PlantedBridge { n1: n / 2, n2: n / 2, k: 0, p_intra: p };
    let er = EnsembleSpec::ErdosRenyi { n, p };

    let grid: Vec<DetectorConfig> = [default_walk_length(n), 400, 800]
        .into_iter()
        .map(|t| DetectorConfig::new(8, t, 0.5, 1))
        .collect::<Result<_, _>>()?;
    let cal = calibrate_threshold(&planted, &er, &grid, 200, 1, 2)?;
    println!(
        "calibrated: T = {}, theta = {:.4}, single-trial balanced error {:.3}",
        cal.config.walk_length, cal.config.threshold, cal.balanced_error
    );
    let cfg = cal.config.with_repetitions(11);

    let split = sample_planted_bridge(n / 2, n / 2, 0, p, 99)?;
    let joined = sample_er(n, p, 100)?;
    for (name, g) in [("two blocks, no bridge", &split.graph), ("Erdos-Renyi", &joined)] {
        let v = detect(g, &cfg, 5, 2)?;
        println!(
            "{name}: {:?} ({} of {} trials vote disconnected); touched {} of {} vertices, {} non-incident reads",
            v.decision,
            v.votes_for_disconnected,
            v.trials,
            v.queried_vertices.len(),
            n,
            v.non_incident_accesses
        );
    }
    Ok(())
}
