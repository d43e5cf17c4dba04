//! Ihara zeta function of a finite graph.
//!
//! The reciprocal `1/zeta(u)` of a connected graph with minimum degree two
//! is an integer polynomial of degree `2|E|`:
//!
//! ```text
//! 1/zeta(u) = (1 - u^2)^(|E| - |V|) * det(I - u A + u^2 (D - I))
//! ```
//!
//! The determinant is recovered exactly by evaluating the integer matrix at
//! `2|V| + 1` integer nodes (fraction-free elimination) and interpolating.
//! From the polynomial we read off closed non-backtracking loop counts
//! `N_m`, prime loop counts `pi(m)`, the spanning tree count and the radius
//! of convergence. [`oracle`] holds the exhaustive loop census that checks
//! all of it.

mod hashimoto;
pub mod oracle;

pub use hashimoto::{hashimoto_matrix, HashimotoMatrix};
pub use oracle::{enumerate_prime_loops, enumerate_weighted_prime_loops, euler_product_truncation, MAX_ENUMERATION_LENGTH};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::exact::{
    bareiss_determinant, derivative_at_one, gcd_all, interpolate_integer, poly_derivative, poly_mul, poly_pow,
    series_div, symmetric_nodes,
};
use crate::graph::Graph;

#[derive(Debug, Error)]
pub enum ZetaError {
    #[error("graph has weighted edges; inflate it first")]
    Weighted,
    #[error("graph has no vertices")]
    Empty,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("vertex {vertex} has degree {degree}; minimum degree 2 is required")]
    LowDegree { vertex: usize, degree: usize },
    #[error("loop census limited to length {limit}, requested {max_len}")]
    EnumerationTooLong { max_len: usize, limit: usize },
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
    #[error("spanning tree identity is degenerate at circuit rank {rank} (needs rank >= 2)")]
    IdentityDegenerate { rank: i64 },
    #[error("power iteration did not converge in {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("graph has no prime loops up to the requested length")]
    NoPrimeLoops,
}

pub(crate) fn serialize_bigints<S: Serializer>(values: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(values.iter().map(|v| v.to_string()))
}

pub(crate) fn serialize_bigint<S: Serializer>(value: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&value.to_string())
}

/// Exact coefficients of `1/zeta(u)`; `coeffs[j]` multiplies `u^j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZetaPolynomial {
    #[serde(serialize_with = "serialize_bigints")]
    coeffs: Vec<BigInt>,
}

impl ZetaPolynomial {
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Coefficient of `u^j`, zero beyond the degree.
    pub fn coeff(&self, j: usize) -> BigInt {
        self.coeffs.get(j).cloned().unwrap_or_default()
    }
}

fn check_md2(g: &Graph) -> Result<(), ZetaError> {
    if g.n_vertices() == 0 {
        return Err(ZetaError::Empty);
    }
    if !g.is_unit_weight() {
        return Err(ZetaError::Weighted);
    }
    if !g.is_connected() {
        return Err(ZetaError::Disconnected);
    }
    if let Some(v) = (0..g.n_vertices()).find(|&v| g.degree(v) < 2) {
        return Err(ZetaError::LowDegree { vertex: v, degree: g.degree(v) });
    }
    Ok(())
}

/// `det(I - u A + u^2 (D - I))` as an exact polynomial in `u`.
fn bass_determinant(g: &Graph) -> Result<Vec<BigInt>, ZetaError> {
    let n = g.n_vertices();
    let adj = g.adjacency_counts();
    let nodes = symmetric_nodes(2 * n + 1);
    let values: Vec<BigInt> = nodes
        .iter()
        .map(|u| {
            let u2 = u * u;
            let m: Vec<Vec<BigInt>> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            if i == j {
                                BigInt::one() + &u2 * BigInt::from(g.degree(i) as i64 - 1)
                            } else {
                                -(u * BigInt::from(adj[i][j]))
                            }
                        })
                        .collect()
                })
                .collect();
            bareiss_determinant(m)
        })
        .collect();
    interpolate_integer(&nodes, &values)
        .ok_or_else(|| ZetaError::Inconsistent("determinant interpolation produced non-integer coefficients".into()))
}

/// Reciprocal zeta polynomial of a connected, unit-weight graph with
/// minimum degree two.
pub fn zeta_reciprocal(g: &Graph) -> Result<ZetaPolynomial, ZetaError> {
    check_md2(g)?;
    let det = bass_determinant(g)?;
    let chi = g.euler_characteristic();
    // md2 and connected imply |E| >= |V|
    let one_minus_u2 = [BigInt::one(), BigInt::zero(), -BigInt::one()];
    let mut coeffs = poly_mul(&poly_pow(&one_minus_u2, chi as u32), &det);
    while coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
        coeffs.pop();
    }
    if !coeffs[0].is_one() || coeffs.len() != 2 * g.n_edges() + 1 {
        return Err(ZetaError::Inconsistent(format!(
            "expected constant term 1 and degree {}, got {} and {}",
            2 * g.n_edges(),
            coeffs[0],
            coeffs.len() - 1
        )));
    }
    Ok(ZetaPolynomial { coeffs })
}

/// Weighted zeta: loops are measured by total edge weight. Computed as the
/// unweighted zeta of the inflated graph.
pub fn weighted_zeta_reciprocal(g: &Graph) -> Result<ZetaPolynomial, ZetaError> {
    zeta_reciprocal(&g.inflate())
}

/// `N_1..N_max_m` read off the polynomial: `sum_m N_m u^m = -u P'(u) / P(u)`.
pub fn loop_counts_from_polynomial(zp: &ZetaPolynomial, max_m: usize) -> Vec<BigInt> {
    if max_m == 0 {
        return Vec::new();
    }
    let neg_deriv: Vec<BigInt> = poly_derivative(zp.coeffs()).into_iter().map(|c| -c).collect();
    series_div(&neg_deriv, zp.coeffs(), max_m - 1).expect("constant term is one")
}

/// Closed non-backtracking tailless walk counts `N_1..N_max_m`, computed as
/// Hashimoto traces and as logarithmic-derivative coefficients of the zeta
/// polynomial; the two must agree exactly.
pub fn loop_counts(g: &Graph, max_m: usize) -> Result<Vec<BigInt>, ZetaError> {
    let zp = zeta_reciprocal(g)?;
    let traces = hashimoto_matrix(g)?.trace_powers(max_m);
    let series = loop_counts_from_polynomial(&zp, max_m);
    if let Some(m) = (0..max_m).find(|&i| traces[i] != series[i]) {
        return Err(ZetaError::Inconsistent(format!(
            "N_{} is {} by traces but {} by the zeta polynomial",
            m + 1,
            traces[m],
            series[m]
        )));
    }
    Ok(traces)
}

fn mobius(mut n: usize) -> i64 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Prime loop counts from closed loop counts by Mobius inversion of
/// `N_m = sum_{d | m} d pi(d)`. `loops[i]` is `N_{i+1}`.
pub fn prime_counts_from_loops(loops: &[BigInt]) -> Result<Vec<BigInt>, ZetaError> {
    let mut pi = vec![BigInt::zero()];
    for m in 1..=loops.len() {
        let mut acc = BigInt::zero();
        for d in (1..=m).filter(|d| m % d == 0) {
            acc += &loops[d - 1] * mobius(m / d);
        }
        let (q, r) = acc.div_rem(&BigInt::from(m));
        if !r.is_zero() || q.is_negative() {
            return Err(ZetaError::Inconsistent(format!("pi({m}) is not a non-negative integer")));
        }
        pi.push(q);
    }
    Ok(pi)
}

/// Spanning trees via the Matrix-Tree theorem (parallel edges are distinct
/// edges; weights are ignored).
pub fn spanning_tree_count(g: &Graph) -> Result<BigInt, ZetaError> {
    let n = g.n_vertices();
    if n == 0 {
        return Err(ZetaError::Empty);
    }
    if !g.is_connected() {
        return Err(ZetaError::Disconnected);
    }
    let adj = g.adjacency_counts();
    let minor: Vec<Vec<BigInt>> = (1..n)
        .map(|i| {
            (1..n)
                .map(|j| {
                    if i == j {
                        BigInt::from(g.degree(i))
                    } else {
                        -BigInt::from(adj[i][j])
                    }
                })
                .collect()
        })
        .collect();
    Ok(bareiss_determinant(minor))
}

/// Spanning tree count from the `n`-th derivative of `1/zeta` at `u = 1`,
/// `n` = circuit rank, through `P^(n)(1) = n! (-1)^(n+1) 2^n (n-1) kappa`.
pub fn kappa_from_zeta(zp: &ZetaPolynomial, circuit_rank: i64) -> Result<BigInt, ZetaError> {
    if circuit_rank < 2 {
        return Err(ZetaError::IdentityDegenerate { rank: circuit_rank });
    }
    let n = circuit_rank as usize;
    let value = derivative_at_one(zp.coeffs(), n);
    let factorial: BigInt = (1..=n).map(BigInt::from).product();
    let sign = if n % 2 == 1 { BigInt::one() } else { -BigInt::one() };
    let scale = factorial * sign * (BigInt::one() << n) * BigInt::from(n - 1);
    let (kappa, rem) = value.div_rem(&scale);
    if !rem.is_zero() || !kappa.is_positive() {
        return Err(ZetaError::Inconsistent(format!(
            "derivative {value} is not a positive multiple of {scale}"
        )));
    }
    Ok(kappa)
}

/// Derivative value `P^(n)(1)` used by [`kappa_from_zeta`].
pub fn derivative_at_unity(zp: &ZetaPolynomial, n: usize) -> BigInt {
    derivative_at_one(zp.coeffs(), n)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Radius {
    pub value: f64,
    /// Half-width of the Collatz-Wielandt bracket propagated to `1/lambda`.
    pub err: f64,
    pub perron: f64,
    pub iterations: usize,
}

pub const RADIUS_REL_TOL: f64 = 1e-10;
const RADIUS_MAX_ITER: usize = 200_000;

/// `R_G = 1 / rho(B)` where `B` is the Hashimoto matrix.
pub fn radius_of_convergence(g: &Graph) -> Result<Radius, ZetaError> {
    check_md2(g)?;
    let b = hashimoto_matrix(g)?;
    let (lo, hi, iterations) = b.spectral_radius_bracket(RADIUS_REL_TOL, RADIUS_MAX_ITER)?;
    let perron = 0.5 * (lo + hi);
    Ok(Radius { value: 1.0 / perron, err: 0.5 * (hi - lo) / (lo * lo), perron, iterations })
}

#[derive(Debug, Clone, Serialize)]
pub struct TopologicalSummary {
    /// `N_1..N_M`.
    #[serde(serialize_with = "serialize_bigints")]
    pub loop_counts: Vec<BigInt>,
    #[serde(serialize_with = "serialize_bigint")]
    pub spanning_trees: BigInt,
    pub radius: Radius,
    /// gcd of the lengths `m <= M` with `pi(m) > 0`; `None` if there are none.
    pub delta: Option<u64>,
    /// `pi(1)..pi(M)`.
    #[serde(serialize_with = "serialize_bigints")]
    pub prime_counts: Vec<BigInt>,
}

pub fn topological_summary(g: &Graph, max_m: usize) -> Result<TopologicalSummary, ZetaError> {
    let loops = loop_counts(g, max_m)?;
    let pi = prime_counts_from_loops(&loops)?;
    let delta = gcd_all((1..pi.len()).filter(|&m| pi[m].is_positive()).map(|m| m as u64));
    Ok(TopologicalSummary {
        loop_counts: loops,
        spanning_trees: spanning_tree_count(g)?,
        radius: radius_of_convergence(g)?,
        delta: (delta > 0).then_some(delta),
        prime_counts: pi[1..].to_vec(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticRow {
    pub m: usize,
    pub primes: f64,
    pub leading_term: f64,
    /// `|pi(m) - leading| / leading`.
    pub relative_error: f64,
}

/// Compare `pi(m)` with `Delta R^{-m} / m` at multiples of `Delta` up to
/// `max_m`.
pub fn prime_asymptotics_check(summary: &TopologicalSummary, max_m: usize) -> Result<Vec<AsymptoticRow>, ZetaError> {
    let delta = summary.delta.ok_or(ZetaError::NoPrimeLoops)? as usize;
    let upto = max_m.min(summary.prime_counts.len());
    let r = summary.radius.value;
    Ok((1..=upto)
        .filter(|m| m % delta == 0)
        .map(|m| {
            let primes = summary.prime_counts[m - 1].to_f64().unwrap_or(f64::INFINITY);
            let leading_term = delta as f64 * r.powi(-(m as i32)) / m as f64;
            AsymptoticRow { m, primes, leading_term, relative_error: (primes - leading_term).abs() / leading_term }
        })
        .collect())
}

/// Least-squares slope of `ln(relative_error)` against `m`; negative when
/// the asymptotic regime is being approached.
pub fn asymptotic_trend(rows: &[AsymptoticRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.relative_error > 0.0)
        .map(|r| (r.m as f64, r.relative_error.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests;
