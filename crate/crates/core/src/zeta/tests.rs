use num_bigint::BigInt;
use proptest::prelude::*;

use super::*;
use crate::exact::poly_mul;
use crate::graph::named::*;

fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// Expand a product of small integer polynomials.
fn expand(factors: &[(&[i64], u32)]) -> Vec<BigInt> {
    let mut acc = ints(&[1]);
    for (f, k) in factors {
        for _ in 0..*k {
            acc = poly_mul(&acc, &ints(f));
        }
    }
    acc
}

#[test]
fn hashimoto_examples() {
    let b = hashimoto_matrix(&cycle(3)).unwrap();
    assert_eq!(b.dim(), 6);
    assert!(b.row_sums().iter().all(|&s| s == 1));
    let b = hashimoto_matrix(&complete(4)).unwrap();
    assert_eq!(b.dim(), 12);
    assert!(b.row_sums().iter().all(|&s| s == 2));
    let b = hashimoto_matrix(&path(2)).unwrap();
    assert_eq!(b.to_dense(), vec![vec![0, 0], vec![0, 0]]);
    let weighted = Graph::new(2, [(0, 1, 2)]).unwrap();
    assert!(matches!(hashimoto_matrix(&weighted), Err(ZetaError::Weighted)));
}

#[test]
fn k4_reciprocal_matches_symbolic_expansion() {
    let zp = zeta_reciprocal(&complete(4)).unwrap();
    let expect = expand(&[(&[1, 0, -1], 2), (&[1, -1], 1), (&[1, -2], 1), (&[1, 1, 2], 3)]);
    assert_eq!(zp.coeffs(), expect.as_slice());
    assert_eq!(zp.degree(), 12);
}

#[test]
fn cycles_give_squared_binomials() {
    for k in 3..=8 {
        let zp = zeta_reciprocal(&cycle(k)).unwrap();
        let mut factor = vec![0i64; k + 1];
        factor[0] = 1;
        factor[k] = -1;
        assert_eq!(zp.coeffs(), expand(&[(&factor, 2)]).as_slice(), "C_{k}");
    }
    assert_eq!(zeta_reciprocal(&cycle(3)).unwrap().coeffs(), ints(&[1, 0, 0, -2, 0, 0, 1]).as_slice());
}

#[test]
fn weighted_examples() {
    let unit = Graph::new(3, [(0, 1, 1), (1, 2, 1), (2, 0, 1)]).unwrap();
    assert_eq!(weighted_zeta_reciprocal(&unit).unwrap(), zeta_reciprocal(&cycle(3)).unwrap());
    let w211 = Graph::new(3, [(0, 1, 2), (1, 2, 1), (2, 0, 1)]).unwrap();
    assert_eq!(weighted_zeta_reciprocal(&w211).unwrap(), zeta_reciprocal(&cycle(4)).unwrap());
    let w222 = Graph::new(3, [(0, 1, 2), (1, 2, 2), (2, 0, 2)]).unwrap();
    assert_eq!(weighted_zeta_reciprocal(&w222).unwrap(), zeta_reciprocal(&cycle(6)).unwrap());
    assert!(matches!(zeta_reciprocal(&w211), Err(ZetaError::Weighted)));
}

#[test]
fn precondition_errors() {
    assert!(matches!(zeta_reciprocal(&path(4)), Err(ZetaError::LowDegree { vertex: 0, degree: 1 })));
    let two = disjoint_union(&cycle(3), &cycle(4));
    assert!(matches!(zeta_reciprocal(&two), Err(ZetaError::Disconnected)));
    assert!(matches!(zeta_reciprocal(&Graph::new(0, []).unwrap()), Err(ZetaError::Empty)));
}

#[test]
fn loop_count_examples() {
    let k4 = loop_counts(&complete(4), 6).unwrap();
    assert_eq!(k4[2], BigInt::from(24));
    let tri = loop_counts(&cycle(3), 6).unwrap();
    assert_eq!(tri, ints(&[0, 0, 6, 0, 0, 6]));
    let c5 = loop_counts(&cycle(5), 12).unwrap();
    for (i, n) in c5.iter().enumerate() {
        let m = i + 1;
        let expect = if m % 5 == 0 { 10 } else { 0 };
        assert_eq!(*n, BigInt::from(expect), "N_{m}");
    }
}

#[test]
fn spanning_tree_examples() {
    assert_eq!(spanning_tree_count(&cycle(3)).unwrap(), BigInt::from(3));
    assert_eq!(spanning_tree_count(&complete(4)).unwrap(), BigInt::from(16));
    assert_eq!(spanning_tree_count(&path(6)).unwrap(), BigInt::from(1));
    assert_eq!(spanning_tree_count(&petersen()).unwrap(), BigInt::from(2000));
    assert!(matches!(
        spanning_tree_count(&disjoint_union(&path(2), &path(2))),
        Err(ZetaError::Disconnected)
    ));
}

#[test]
fn kappa_identity_examples() {
    let zp = zeta_reciprocal(&complete(4)).unwrap();
    assert_eq!(derivative_at_unity(&zp, 3), BigInt::from(1536));
    assert_eq!(kappa_from_zeta(&zp, 3).unwrap(), BigInt::from(16));

    let c5 = zeta_reciprocal(&cycle(5)).unwrap();
    assert!(matches!(kappa_from_zeta(&c5, 1), Err(ZetaError::IdentityDegenerate { rank: 1 })));

    let g = k4_minus_edge();
    let zp = zeta_reciprocal(&g).unwrap();
    assert_eq!(g.circuit_rank(), 2);
    assert_eq!(kappa_from_zeta(&zp, 2).unwrap(), spanning_tree_count(&g).unwrap());
    assert_eq!(spanning_tree_count(&g).unwrap(), BigInt::from(8));
}

#[test]
fn radius_examples() {
    let r = radius_of_convergence(&complete(4)).unwrap();
    assert!((r.value - 0.5).abs() < 1e-8);
    let r = radius_of_convergence(&petersen()).unwrap();
    assert!((r.value - 0.5).abs() < 1e-8);
    for k in 3..=8 {
        let r = radius_of_convergence(&cycle(k)).unwrap();
        assert!((r.value - 1.0).abs() < 1e-8);
    }
    let k5 = radius_of_convergence(&complete(5)).unwrap();
    assert!((k5.value - 1.0 / 3.0).abs() < 1e-8);
    // irregular: K4 minus an edge, radius strictly between the extremes
    let r = radius_of_convergence(&k4_minus_edge()).unwrap();
    assert!(r.value > 0.5 && r.value < 1.0, "{r:?}");
    assert!(r.err <= 1e-9);
}

#[test]
fn radius_of_irregular_graph_is_a_root_of_the_polynomial() {
    let g = k4_minus_edge();
    let r = radius_of_convergence(&g).unwrap();
    let zp = zeta_reciprocal(&g).unwrap();
    let value: f64 = zp
        .coeffs()
        .iter()
        .enumerate()
        .map(|(j, c)| c.to_string().parse::<f64>().unwrap() * r.value.powi(j as i32))
        .sum();
    assert!(value.abs() < 1e-8, "P(R) = {value}");
}

#[test]
fn asymptotics_examples() {
    let summary = topological_summary(&cycle(5), 10).unwrap();
    assert_eq!(summary.delta, Some(5));
    let rows = prime_asymptotics_check(&summary, 10).unwrap();
    assert_eq!(rows[0].m, 5);
    assert_eq!(rows[0].primes, 2.0);
    assert!((rows[0].leading_term - 1.0).abs() < 1e-9);
    assert!((rows[0].relative_error - 1.0).abs() < 1e-9);

    let k4 = topological_summary(&complete(4), 24).unwrap();
    assert_eq!(k4.delta, Some(1));
    let rows = prime_asymptotics_check(&k4, 24).unwrap();
    let tail: Vec<_> = rows.iter().filter(|r| r.m >= 6).cloned().collect();
    assert!(asymptotic_trend(&tail).unwrap() < 0.0);
    assert!(rows.last().unwrap().relative_error < rows[5].relative_error);

    let mut empty = k4.clone();
    empty.delta = None;
    assert!(matches!(prime_asymptotics_check(&empty, 10), Err(ZetaError::NoPrimeLoops)));
}

#[test]
fn mobius_inversion_matches_census() {
    let g = petersen();
    let summary = topological_summary(&g, 12).unwrap();
    let census = enumerate_prime_loops(&g, 12).unwrap();
    for m in 1..=12 {
        assert_eq!(summary.prime_counts[m - 1], BigInt::from(census[m]), "pi({m})");
    }
}

/// Connected multigraph with minimum degree two: a Hamiltonian cycle plus
/// random chords (possibly parallel).
fn md2_graph() -> impl Strategy<Value = Graph> {
    (3usize..7).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n), 0..4).prop_map(move |chords| {
            let mut pairs: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
            pairs.extend(chords.into_iter().filter(|(u, v)| u != v));
            Graph::from_pairs(n, &pairs).unwrap()
        })
    })
}

fn weighted_md2_graph() -> impl Strategy<Value = Graph> {
    md2_graph().prop_flat_map(|g| {
        prop::collection::vec(1u64..4, g.n_edges()).prop_map(move |w| {
            Graph::new(g.n_vertices(), g.edges().iter().zip(w).map(|(e, w)| (e.u, e.v, w)).collect::<Vec<_>>())
                .unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bass_route_agrees_with_euler_product(g in md2_graph()) {
        let zp = zeta_reciprocal(&g).unwrap();
        prop_assert!(zp.coeffs()[0] == BigInt::from(1));
        prop_assert_eq!(zp.degree(), 2 * g.n_edges());
        let pi = enumerate_prime_loops(&g, 10).unwrap();
        let series = euler_product_truncation(&pi, 10);
        for j in 0..=10 {
            prop_assert_eq!(&zp.coeff(j), &series[j], "u^{}", j);
        }
        // loop_counts errors out if the trace and log-derivative routes differ
        loop_counts(&g, 12).unwrap();
    }

    #[test]
    fn weighted_zeta_agrees_with_weighted_census(g in weighted_md2_graph()) {
        let zp = weighted_zeta_reciprocal(&g).unwrap();
        prop_assert_eq!(&zp, &zeta_reciprocal(&g.inflate()).unwrap());
        let pi = enumerate_weighted_prime_loops(&g, 10).unwrap();
        let series = euler_product_truncation(&pi, 10);
        for j in 0..=10 {
            prop_assert_eq!(&zp.coeff(j), &series[j], "u^{}", j);
        }
    }

    #[test]
    fn kappa_identity_holds(g in md2_graph()) {
        let rank = g.circuit_rank();
        prop_assume!(rank >= 2);
        let zp = zeta_reciprocal(&g).unwrap();
        prop_assert_eq!(kappa_from_zeta(&zp, rank).unwrap(), spanning_tree_count(&g).unwrap());
    }
}
