//! Expectations under an interacting diffusion estimated by reweighting
//! free Brownian paths, compared with direct simulation.
//!
//! cargo run --release --example girsanov_reweighting

use topoinfer::largedev::{girsanov_experiment, ou_second_moment, DiffusionSystem, ForceLaw};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ou = DiffusionSystem::ornstein_uhlenbeck(1.0, 1e-3, 1.0)?;
    let cmp = girsanov_experiment(&ou, |s| s[0] * s[0], 20_000, 1, 2)?;
    println!(
        "OU E[eta(1)^2]: reweighted {:.4} +- {:.4}, direct {:.4} +- {:.4}, exact {:.4}, ESS {:.0}",
        cmp.reweighted.mean,
        cmp.reweighted.std_error,
        cmp.direct.mean,
        cmp.direct.std_error,
        ou_second_moment(1.0, 1.0),
        cmp.effective_sample_size
    );

    // two particles pulled together and confined by a cubic force
    let pair = DiffusionSystem::new(vec![1.0, -1.0], ForceLaw::Linear { slope: -0.5 }, ForceLaw::Cubic { coeff: -0.2 }, 1e-3, 1.0)?;
    let cmp = girsanov_experiment(&pair, |s| s.iter().map(|x| x * x).sum(), 20_000, 2, 2)?;
    println!(
        "pair: reweighted {:.4}, direct {:.4}, gap {:.2}%, ESS {:.0}, degenerate {}",
        cmp.reweighted.mean,
        cmp.direct.mean,
        100.0 * cmp.relative_gap,
        cmp.effective_sample_size,
        cmp.degenerate
    );
    Ok(())
}
