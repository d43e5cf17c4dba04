//! Detection rate as planted cross edges are added between two blocks,
//! next to the false-positive rate on Erdos-Renyi graphs.
//!
//! cargo run --release --example phase_sweep

use topoinfer::detector::{calibrate_threshold, detection_rate, phase_sweep, DetectorConfig};
use topoinfer::ensembles::EnsembleSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 200;
    let p = 2.0 * (n as f64).ln() / n as f64;
    let planted = EnsembleSpec::PlantedBridge { n1: n / 2, n2: n / 2, k: 0, p_intra: p };
    let er = EnsembleSpec::ErdosRenyi { n, p };
    let cal = calibrate_threshold(&planted, &er, &[DetectorConfig::new(8, 400, 0.5, 1)?], 200, 3, 2)?;
    let cfg = cal.config.with_repetitions(5);
    println!("theta = {:.4}", cfg.threshold);

    let null = detection_rate(&er, &cfg, 200, 4, 2)?;
    println!("ER false-positive rate: {:.3} +- {:.3}", null.detection_rate, null.std_error);
    // k up to the point where the cross density matches the block density
    let k_max = (p * (n / 2) as f64 * (n / 2) as f64).round() as usize;
    let ks = [0, 1, 2, 4, 8, 16, 32, 64, k_max];
    for row in phase_sweep(n, &ks, p, &cfg, 200, 5, 2)? {
        println!(
            "k = {:>3}: detection {:.3} +- {:.3} (structurally disconnected: {})",
            row.k.unwrap_or_default(),
            row.detection_rate,
            row.std_error,
            row.truly_disconnected
        );
    }
    Ok(())
}
