use super::*;
use proptest::prelude::*;

fn bern_half() -> Distribution {
    Distribution::bernoulli(0.5).unwrap()
}

fn std_normal() -> Distribution {
    Distribution::gaussian(0.0, 1.0).unwrap()
}

#[test]
fn analytic_rate_examples() {
    let b = bern_half();
    assert_eq!(cramer_rate_analytic(&b, 0.5).value, 0.0);
    assert!((cramer_rate_analytic(&b, 1.0).value - 2f64.ln()).abs() < 1e-15);
    assert!((cramer_rate_analytic(&b, 0.7).value - 0.082_282_878_505_051_85).abs() < 1e-12);
    let out = cramer_rate_analytic(&b, 1.2);
    assert!(!out.attainable && out.value.is_infinite());
    assert_eq!(cramer_rate_analytic(&std_normal(), 2.0).value, 2.0);
    assert_eq!(upper_tail_rate(&b, 0.3).value, 0.0);
    assert!(Distribution::bernoulli(1.0).is_err());
}

#[test]
fn analytic_rate_is_conjugate_of_cumulant() {
    // independent route: numeric sup over a fine t grid
    let t = uniform_grid(-20.0, 20.0, 1e-3);
    for dist in [Distribution::bernoulli(0.3).unwrap(), Distribution::gaussian(1.0, 2.0).unwrap()] {
        let cum: Vec<f64> = t.iter().map(|&s| dist.cumulant(s)).collect();
        for x in [0.1, 0.3, 0.55, 0.9] {
            let (numeric, _) = conjugate_on_grid(&t, &cum, x);
            assert!((numeric - cramer_rate_analytic(&dist, x).value).abs() < 1e-6, "{dist:?} {x}");
        }
    }
}

#[test]
fn log_sum_exp_survives_overflow() {
    assert!((log_sum_exp([1000.0, 1000.0]) - (1000.0 + 2f64.ln())).abs() < 1e-12);
    assert_eq!(log_sum_exp([f64::NEG_INFINITY]), f64::NEG_INFINITY);
}

fn scgf(dist: Distribution, t: &[f64], method: ScgfMethod) -> ScgfEstimate {
    empirical_scgf(move |rng| dist.sample(rng), 100, t, 10_000, 7, method, 1).unwrap()
}

#[test]
fn scgf_is_zero_at_origin_and_convex() {
    let t = uniform_grid(-1.0, 1.0, 0.05);
    for method in [ScgfMethod::SumSamples, ScgfMethod::PositionProduct] {
        let est = scgf(std_normal(), &t, method);
        assert_eq!(est.lambda_hat[20], 0.0);
        assert!(est.second_differences().iter().all(|&d| d >= -1e-3), "{method:?}");
        assert!(est.overflow.iter().all(|&o| !o));
    }
}

#[test]
fn gaussian_scgf_matches_t_squared_over_two() {
    let t = uniform_grid(-1.0, 1.0, 0.1);
    let est = scgf(std_normal(), &t, ScgfMethod::PositionProduct);
    for (&ti, &l) in t.iter().zip(&est.lambda_hat) {
        assert!((l - ti * ti / 2.0).abs() <= 0.05, "t={ti}: {l}");
    }
}

#[test]
fn whole_sum_estimator_collapses_for_large_t() {
    // with Z ~ N(0, 100) the mean of e^{Z} over 1e4 samples is governed by
    // the maximum, far below the true e^{50}
    let est = scgf(std_normal(), &[1.0], ScgfMethod::SumSamples);
    assert!(est.lambda_hat[0] < 0.45, "{}", est.lambda_hat[0]);
}

#[test]
fn bernoulli_scgf_matches_cumulant() {
    let t = uniform_grid(-2.0, 2.0, 0.1);
    let est = scgf(bern_half(), &t, ScgfMethod::PositionProduct);
    for (&ti, &l) in t.iter().zip(&est.lambda_hat) {
        assert!((l - bern_half().cumulant(ti)).abs() <= 0.05, "t={ti}: {l}");
    }
}

#[test]
fn overflow_is_flagged_per_point() {
    let huge = empirical_scgf(|_| 1e300, 1, &[0.0, 1e10], 100, 0, ScgfMethod::SumSamples, 1).unwrap();
    assert_eq!(huge.overflow, vec![false, true]);
    let rate = legendre_transform(&huge, &[0.0]).unwrap();
    assert_eq!(rate.q_hat, vec![0.0]);
    let all_bad = ScgfEstimate { overflow: vec![true, true], ..huge };
    assert!(matches!(legendre_transform(&all_bad, &[0.0]), Err(LdpError::EmptyUsableGrid)));
}

#[test]
fn legendre_of_quadratic() {
    let t = uniform_grid(-2.0, 2.0, 0.01);
    let est = ScgfEstimate {
        lambda_hat: t.iter().map(|s| s * s / 2.0).collect(),
        overflow: vec![false; t.len()],
        t_grid: t.clone(),
        n: 1,
        n_samples: 100,
        method: ScgfMethod::PositionProduct,
    };
    let x = uniform_grid(-0.8, 0.8, 0.01);
    let rate = legendre_transform(&est, &x).unwrap();
    for (&xi, &q) in x.iter().zip(&rate.q_hat) {
        assert!((q - xi * xi / 2.0).abs() <= 0.02);
    }
    assert!(rate.boundary.iter().all(|&b| !b));
    let far = legendre_transform(&est, &[3.0]).unwrap();
    assert!(far.boundary[0]);
    // involution: transforming back recovers t^2/2 in the interior
    for (k, &ti) in t.iter().enumerate().filter(|(_, s)| s.abs() <= 0.7) {
        let (back, _) = conjugate_on_grid(&x, &rate.q_hat, ti);
        assert!((back - est.lambda_hat[k]).abs() <= 0.03);
    }
}

#[test]
fn bernoulli_pipeline_matches_closed_form() {
    let t = uniform_grid(-3.0, 3.0, 0.01);
    let est = scgf(bern_half(), &t, ScgfMethod::PositionProduct);
    let x = uniform_grid(0.2, 0.8, 0.01);
    let rate = legendre_transform(&est, &x).unwrap();
    let sup = x
        .iter()
        .zip(&rate.q_hat)
        .map(|(&xi, &q)| (q - cramer_rate_analytic(&bern_half(), xi).value).abs())
        .fold(0.0, f64::max);
    assert!(sup <= 0.05, "{sup}");
    assert!(rate.q_hat.iter().all(|&q| q >= 0.0));
    assert!(rate.boundary.iter().all(|&b| !b));
    let at_mean = legendre_transform(&est, &[0.5]).unwrap();
    assert!(at_mean.q_hat[0] <= 0.02);
}

#[test]
fn exact_tails() {
    // P(Bin(100, 1/2) >= 70), from an independent evaluation
    let lt = exact_log_tail(&bern_half(), 100, 0.7);
    assert!((lt.exp() - 3.925_069_822_796_783e-5).abs() < 1e-15, "{}", lt.exp());
    let g = exact_log_tail(&std_normal(), 50, 1.0);
    assert!((-g / 50.0 - 0.5).abs() / 0.5 < 0.15);
}

#[test]
fn decay_table_trends_toward_rate() {
    let table = ldp_decay_check(&bern_half(), 0.7, &[20, 50, 100], 200_000, 3, TailEstimator::Direct, 1).unwrap();
    assert!((table.analytic_rate - 0.0823).abs() < 1e-4);
    let mut previous = f64::INFINITY;
    for row in &table.rows {
        let rate = row.rate.unwrap();
        let se = row.rate_std_error.unwrap();
        assert!(rate >= 0.0);
        assert!((rate - row.exact_tail_rate).abs() <= 3.0 * se + 1e-12, "{row:?}");
        assert!(rate <= previous + 3.0 * se);
        assert!(rate >= table.analytic_rate - 3.0 * se);
        previous = rate;
    }
    let last = &table.rows[2];
    let corrected = last.prefactor_corrected_rate.unwrap();
    assert!((corrected - table.analytic_rate).abs() / table.analytic_rate < 0.15, "{corrected}");
}

#[test]
fn tilted_estimator_reaches_rare_tails() {
    let table = ldp_decay_check(&std_normal(), 1.0, &[50], 10_000, 9, TailEstimator::Tilted, 1).unwrap();
    let row = &table.rows[0];
    assert!((row.rate.unwrap() - row.exact_tail_rate).abs() < 0.005, "{row:?}");
    assert!((row.rate.unwrap() - 0.5).abs() / 0.5 < 0.15);
    assert!((row.prefactor_corrected_rate.unwrap() - 0.5).abs() < 0.005);
    let direct = ldp_decay_check(&std_normal(), 1.0, &[50], 10_000, 9, TailEstimator::Direct, 1).unwrap();
    assert!(direct.rows[0].flagged && direct.rows[0].rate.is_none());
}

#[test]
fn decay_at_the_mean_is_near_zero() {
    let table = ldp_decay_check(&bern_half(), 0.5, &[100], 10_000, 1, TailEstimator::Direct, 1).unwrap();
    assert!(table.rows[0].rate.unwrap() < 0.01);
    assert!(ldp_decay_check(&bern_half(), 0.4, &[10], 1000, 1, TailEstimator::Direct, 1).is_err());
}

#[test]
fn brownian_increments_have_variance_dt() {
    let sys = DiffusionSystem::new(vec![0.0], ForceLaw::Zero, ForceLaw::Zero, 0.01, 0.01).unwrap();
    let n = 10_000;
    let incs: Vec<f64> = (0..n).map(|s| simulate_diffusions(&sys, true, s).unwrap().increments[0][0]).collect();
    let var = incs.iter().map(|x| x * x).sum::<f64>() / n as f64;
    // sd of the sample second moment is dt sqrt(2 / n)
    assert!((var - 0.01).abs() <= 3.0 * 0.01 * (2.0 / n as f64).sqrt(), "{var}");
}

#[test]
fn ou_relaxes_to_variance_half() {
    let sys = DiffusionSystem::ornstein_uhlenbeck(0.0, 0.01, 10.0).unwrap();
    let n = 10_000;
    let finals: Vec<f64> = (0..n).map(|s| simulate_diffusions(&sys, true, s).unwrap().final_state()[0]).collect();
    let var = finals.iter().map(|x| x * x).sum::<f64>() / n as f64;
    assert!((var - 0.5).abs() / 0.5 < 0.05, "{var}");
}

#[test]
fn pair_forces_leave_the_centre_of_mass_brownian() {
    let sys = DiffusionSystem::new(vec![1.0, -0.5], ForceLaw::Linear { slope: -1.0 }, ForceLaw::Zero, 0.01, 1.0).unwrap();
    let paths = simulate_diffusions(&sys, true, 4).unwrap();
    let mut centre = 0.5;
    for (k, inc) in paths.increments.iter().enumerate() {
        centre += inc[0] + inc[1];
        let sum = paths.positions[k + 1][0] + paths.positions[k + 1][1];
        assert!((sum - centre).abs() < 1e-12);
    }
}

#[test]
fn reference_paths_and_blow_up() {
    let sys = DiffusionSystem::ornstein_uhlenbeck(1.0, 0.1, 1.0).unwrap();
    let reference = simulate_diffusions(&sys, false, 0).unwrap();
    assert_eq!(reference.positions.len(), 11);
    for k in 0..10 {
        assert!((reference.positions[k + 1][0] - reference.positions[k][0] - reference.increments[k][0]).abs() < 1e-15);
    }
    let interacting = simulate_diffusions(&sys, true, 0).unwrap();
    assert!(matches!(girsanov_log_weight(&interacting, &sys), Err(LdpError::InteractingReference)));
    let wild = DiffusionSystem::new(vec![10.0], ForceLaw::Zero, ForceLaw::Cubic { coeff: 1.0 }, 0.1, 5.0).unwrap();
    assert!(matches!(simulate_diffusions(&wild, true, 0), Err(LdpError::NonFiniteDrift { particle: 0, .. })));
    assert!(DiffusionSystem::new(vec![0.0], ForceLaw::Zero, ForceLaw::Zero, 0.1, 0.05).is_err());
}

#[test]
fn zero_force_gives_unit_weights() {
    let sys = DiffusionSystem::new(vec![0.0, 1.0], ForceLaw::Zero, ForceLaw::Zero, 0.01, 1.0).unwrap();
    let paths: Vec<_> = (0..20).map(|s| simulate_diffusions(&sys, false, s).unwrap()).collect();
    let rw = girsanov_reweight(&paths, &sys).unwrap();
    assert!(rw.weights.iter().all(|&w| w == 1.0));
    assert!(!rw.degenerate);
}

#[test]
fn log_weight_matches_closed_form_for_ou() {
    // for F = -eta: sum F d eta - 1/2 sum F^2 dt, by hand on a short path
    let sys = DiffusionSystem::ornstein_uhlenbeck(1.0, 0.25, 0.5).unwrap();
    let paths = simulate_diffusions(&sys, false, 11).unwrap();
    let (x0, x1) = (paths.positions[0][0], paths.positions[1][0]);
    let (d0, d1) = (paths.increments[0][0], paths.increments[1][0]);
    let by_hand = -x0 * d0 - 0.5 * x0 * x0 * 0.25 - x1 * d1 - 0.5 * x1 * x1 * 0.25;
    assert!((girsanov_log_weight(&paths, &sys).unwrap() - by_hand).abs() < 1e-14);
}

#[test]
fn reweighting_matches_direct_simulation_for_ou() {
    let sys = DiffusionSystem::ornstein_uhlenbeck(1.0, 1e-2, 1.0).unwrap();
    let cmp = girsanov_experiment(&sys, |eta| eta[0] * eta[0], 20_000, 5, 1).unwrap();
    let analytic = ou_second_moment(1.0, 1.0);
    assert!(!cmp.degenerate);
    assert!((cmp.reweighted.mean - analytic).abs() / analytic < 0.05, "{cmp:?}");
    assert!((cmp.direct.mean - analytic).abs() / analytic < 0.05, "{cmp:?}");
}

#[test]
fn flipped_sign_convention_is_detectably_wrong() {
    // a weight exp(-int F d eta - 1/2 int F^2 dt) describes a different law
    let sys = DiffusionSystem::ornstein_uhlenbeck(1.0, 1e-2, 1.0).unwrap();
    let n = 20_000;
    let (mut num, mut den) = (0.0, 0.0);
    for s in 0..n {
        let p = simulate_diffusions(&sys, false, s).unwrap();
        let mut lw = 0.0;
        for (k, d) in p.increments.iter().enumerate() {
            let f = -p.positions[k][0];
            lw += -f * d[0] - 0.5 * f * f * sys.dt;
        }
        let w = lw.exp();
        num += w * p.final_state()[0].powi(2);
        den += w;
    }
    let analytic = ou_second_moment(1.0, 1.0);
    assert!(((num / den) - analytic).abs() / analytic > 0.2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn rate_is_nonnegative_and_zero_at_mean(p in 0.01f64..0.99, x in 0.0f64..=1.0) {
        let d = Distribution::bernoulli(p).unwrap();
        prop_assert!(cramer_rate_analytic(&d, x).value >= 0.0);
        prop_assert!(cramer_rate_analytic(&d, p).value.abs() < 1e-15);
    }

    #[test]
    fn scgf_estimates_are_convex(p in 0.05f64..0.95, seed: u64) {
        let d = Distribution::bernoulli(p).unwrap();
        let t = uniform_grid(-2.0, 2.0, 0.25);
        let est = empirical_scgf(move |rng| d.sample(rng), 10, &t, 200, seed, ScgfMethod::PositionProduct, 1).unwrap();
        prop_assert!(est.second_differences().iter().all(|&v| v >= -1e-12));
        let rate = legendre_transform(&est, &uniform_grid(0.0, 1.0, 0.1)).unwrap();
        prop_assert!(rate.q_hat.iter().all(|&q| q >= 0.0));
    }
}
