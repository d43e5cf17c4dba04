//! Birkhoff averages for an irrational rotation and the doubling map: L2
//! error curves with fitted power laws, and an invariance check.
//!
//! cargo run --release --example ergodic_averages

use topoinfer::ergodic::{birkhoff_average, geometric_grid, invariance_check, l2_error_curve, DynamicalSystem, Observable, Point};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rotation = DynamicalSystem::golden_rotation();
    let doubling = DynamicalSystem::doubling();
    println!("rotation, h(x) = x, n = 1e6: {:.7}", birkhoff_average(&rotation, &Observable::Identity, &Point::from_f64(0.3), 1_000_000));

    let grid = geometric_grid(16, 16_384, 2.0);
    for (name, sys, h) in [
        ("rotation, sin", &rotation, Observable::Sin),
        ("doubling, x", &doubling, Observable::Identity),
        ("doubling, sin", &doubling, Observable::Sin),
    ] {
        let curve = l2_error_curve(sys, &h, &grid, 500, 1, 2)?;
        let fit = curve.fit.expect("positive errors");
        println!("{name}: exponent {:.3}, 95% CI [{:.3}, {:.3}]", fit.exponent, fit.ci95.0, fit.ci95.1);
    }

    let constant = l2_error_curve(&doubling, &Observable::Constant { value: 2.5 }, &grid, 100, 1, 1)?;
    println!("constant observable errors: {:?}", &constant.l2_error[..3]);

    for (name, sys) in [("rotation", &rotation), ("doubling", &doubling), ("squaring", &DynamicalSystem::squaring())] {
        let u = invariance_check(sys, 100_000, 4)?;
        println!("{name}: chi-square {:.1} on {} dof, p = {:.3}", u.chi_square, u.dof, u.p_value);
    }
    Ok(())
}
