//! Random walks on graphs: exact evolution of walker distributions,
//! two-point correlators, closed-walk counts, trajectory simulation, and the
//! one-dimensional asymmetric walk with its return-probability generating
//! function.
//!
//! The transition operator moves mass from a vertex to each incident edge
//! with equal probability, `P(w -> v) = A[w][v] / deg(w)`. Parallel edges
//! count separately; edge weights are ignored.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::exec::map_indexed;
use crate::graph::Graph;
use crate::seed::{derive_seed, rng_from_seed, stream_rng};

#[derive(Debug, Error)]
pub enum WalkError {
    #[error("vertex {vertex} is out of range for a graph with {n} vertices")]
    InvalidVertex { vertex: usize, n: usize },
    #[error("isolated vertex {vertex} carries probability mass")]
    IsolatedWithMass { vertex: usize },
    #[error("walk is stuck at isolated vertex {vertex} at step {step}")]
    Stuck { vertex: usize, step: usize },
    #[error("distribution is not a probability vector: {0}")]
    NotNormalized(String),
    #[error("probability {0} is outside [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("return series supports at most {limit} steps, requested {requested}")]
    SeriesTooLong { requested: usize, limit: usize },
    #[error("return probabilities disagree at n = {n}: {combinatorial} vs {series}")]
    SeriesMismatch { n: usize, combinatorial: f64, series: f64 },
    #[error("kernel needs t > s (got t = {t}, s = {s})")]
    NonPositiveTime { t: f64, s: f64 },
    #[error("kernel degree d = {0} must be a positive even number")]
    OddDegree(usize),
    #[error("points must have dimension d/2 = {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

pub const MASS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WalkKind {
    #[default]
    Simple,
    /// Holds with probability 1/2 each step: `(I + T) / 2`.
    Lazy,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WalkDistribution {
    probs: Vec<f64>,
    time: usize,
}

impl WalkDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self, WalkError> {
        if let Some(x) = probs.iter().find(|x| !(**x >= 0.0)) {
            return Err(WalkError::NotNormalized(format!("entry {x} is negative or NaN")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(WalkError::NotNormalized(format!("total mass {total}")));
        }
        Ok(Self { probs, time: 0 })
    }

    pub fn point_mass(n: usize, v: usize) -> Result<Self, WalkError> {
        if v >= n {
            return Err(WalkError::InvalidVertex { vertex: v, n });
        }
        let mut probs = vec![0.0; n];
        probs[v] = 1.0;
        Ok(Self { probs, time: 0 })
    }

    pub fn uniform(n: usize) -> Self {
        Self { probs: vec![1.0 / n as f64; n], time: 0 }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn time(&self) -> usize {
        self.time
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.iter().sum()
    }
}

fn step_distribution(g: &Graph, cur: &[f64], next: &mut [f64], kind: WalkKind) {
    next.iter_mut().for_each(|x| *x = 0.0);
    for (w, &mass) in cur.iter().enumerate() {
        if mass == 0.0 {
            continue;
        }
        let (stay, spread) = match kind {
            WalkKind::Simple => (0.0, mass),
            WalkKind::Lazy => (0.5 * mass, 0.5 * mass),
        };
        next[w] += stay;
        let share = spread / g.degree(w) as f64;
        for inc in g.incident(w) {
            next[inc.neighbor] += share;
        }
    }
}

/// Push `p0` forward `steps` times under the walk operator.
pub fn evolve_distribution(
    g: &Graph,
    p0: &WalkDistribution,
    steps: usize,
    kind: WalkKind,
) -> Result<WalkDistribution, WalkError> {
    Ok(evolve_history(g, p0, steps, kind)?.pop().expect("history has the initial state"))
}

/// Every intermediate distribution `p_0, ..., p_steps`.
pub fn evolve_history(
    g: &Graph,
    p0: &WalkDistribution,
    steps: usize,
    kind: WalkKind,
) -> Result<Vec<WalkDistribution>, WalkError> {
    if p0.probs.len() != g.n_vertices() {
        return Err(WalkError::NotNormalized(format!(
            "length {} does not match {} vertices",
            p0.probs.len(),
            g.n_vertices()
        )));
    }
    if let Some(v) = (0..g.n_vertices()).find(|&v| g.degree(v) == 0 && p0.probs[v] > 0.0) {
        return Err(WalkError::IsolatedWithMass { vertex: v });
    }
    let mut history = Vec::with_capacity(steps + 1);
    history.push(p0.clone());
    let mut next = vec![0.0; g.n_vertices()];
    for t in 0..steps {
        step_distribution(g, &history[t].probs, &mut next, kind);
        history.push(WalkDistribution { probs: next.clone(), time: p0.time + t + 1 });
    }
    debug_assert!(history.iter().all(|d| (d.total_mass() - 1.0).abs() <= MASS_TOLERANCE));
    Ok(history)
}

fn transition_matrix(g: &Graph, kind: WalkKind) -> Vec<Vec<f64>> {
    // column w holds the distribution after one step from w
    let n = g.n_vertices();
    let mut t = vec![vec![0.0; n]; n];
    for w in 0..n {
        let d = g.degree(w);
        let move_mass = if kind == WalkKind::Lazy { 0.5 } else { 1.0 };
        if kind == WalkKind::Lazy {
            t[w][w] += 0.5;
        }
        for inc in g.incident(w) {
            t[inc.neighbor][w] += move_mass / d as f64;
        }
    }
    t
}

fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

/// `P(X_n = v | X_0 = w)` from the `n`-th power of the transition matrix
/// (binary exponentiation).
pub fn two_point_correlator(g: &Graph, v: usize, w: usize, n: usize) -> Result<f64, WalkError> {
    let size = g.n_vertices();
    for x in [v, w] {
        if x >= size {
            return Err(WalkError::InvalidVertex { vertex: x, n: size });
        }
    }
    if g.degree(w) == 0 {
        return Err(WalkError::IsolatedWithMass { vertex: w });
    }
    let mut result: Vec<Vec<f64>> = (0..size)
        .map(|i| (0..size).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut base = transition_matrix(g, WalkKind::Simple);
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            result = mat_mul(&base, &result);
        }
        e >>= 1;
        if e > 0 {
            base = mat_mul(&base, &base);
        }
    }
    Ok(result[v][w])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagonalLink {
    /// `[T^n]_{v,v}`: probability that a walker started at `v` is back at
    /// `v` after `n` steps.
    pub walk_return: f64,
    /// `[A^n]_{v,v}`: closed walks of length `n` at `v`, backtracking
    /// allowed. Not the same as the non-backtracking `N_m` of the zeta
    /// module.
    #[serde(serialize_with = "crate::zeta::serialize_bigint")]
    pub raw_walk_count: BigInt,
}

/// Diagonal entries of `T^n` and of the unscaled `A^n` at `v`.
pub fn diagonal_loop_link(g: &Graph, v: usize, n: usize) -> Result<DiagonalLink, WalkError> {
    if v >= g.n_vertices() {
        return Err(WalkError::InvalidVertex { vertex: v, n: g.n_vertices() });
    }
    let walk_return = if g.degree(v) == 0 {
        if n == 0 { 1.0 } else { 0.0 }
    } else {
        let hist = evolve_distribution(g, &WalkDistribution::point_mass(g.n_vertices(), v)?, n, WalkKind::Simple)?;
        hist.probs[v]
    };
    let raw_walk_count = closed_walk_counts(g, v, n)?.pop().expect("counts include n = 0");
    Ok(DiagonalLink { walk_return, raw_walk_count })
}

/// `[A^t]_{v,v}` for `t = 0..=max_n`.
pub fn closed_walk_counts(g: &Graph, v: usize, max_n: usize) -> Result<Vec<BigInt>, WalkError> {
    if v >= g.n_vertices() {
        return Err(WalkError::InvalidVertex { vertex: v, n: g.n_vertices() });
    }
    let mut cur = vec![BigUint::zero(); g.n_vertices()];
    cur[v] = BigUint::one();
    let mut out = vec![BigInt::one()];
    for _ in 0..max_n {
        let mut next = vec![BigUint::zero(); g.n_vertices()];
        for (w, count) in cur.iter().enumerate() {
            if count.is_zero() {
                continue;
            }
            for inc in g.incident(w) {
                next[inc.neighbor] += count;
            }
        }
        cur = next;
        out.push(BigInt::from(cur[v].clone()));
    }
    Ok(out)
}

/// One trajectory of `steps` moves from `v0`; each move picks an incident
/// edge uniformly.
pub fn simulate_walk(g: &Graph, v0: usize, steps: usize, seed: u64) -> Result<Vec<usize>, WalkError> {
    if v0 >= g.n_vertices() {
        return Err(WalkError::InvalidVertex { vertex: v0, n: g.n_vertices() });
    }
    let mut rng = rng_from_seed(seed);
    let mut traj = Vec::with_capacity(steps + 1);
    traj.push(v0);
    let mut cur = v0;
    for step in 0..steps {
        let inc = g.incident(cur);
        if inc.is_empty() {
            return Err(WalkError::Stuck { vertex: cur, step });
        }
        cur = inc[rng.random_range(0..inc.len())].neighbor;
        traj.push(cur);
    }
    Ok(traj)
}

/// Empirical occupancy `freq[t][v]` over `trajectories` walks from `v0`.
/// Trajectory `i` uses seed `derive_seed(seed, i)`.
pub fn empirical_occupancy(
    g: &Graph,
    v0: usize,
    steps: usize,
    trajectories: usize,
    seed: u64,
    workers: usize,
) -> Result<Vec<Vec<f64>>, WalkError> {
    let trajs = map_indexed(trajectories, workers, |i| simulate_walk(g, v0, steps, derive_seed(seed, i as u64)));
    let mut counts = vec![vec![0u64; g.n_vertices()]; steps + 1];
    for traj in trajs {
        for (t, v) in traj?.into_iter().enumerate() {
            counts[t][v] += 1;
        }
    }
    Ok(counts
        .into_iter()
        .map(|row| row.into_iter().map(|c| c as f64 / trajectories as f64).collect())
        .collect())
}

/// Return probabilities `P_0..P_M` of the nearest-neighbour walk on the
/// integers that steps right with probability `p`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReturnSeries {
    pub p: f64,
    pub probs: Vec<f64>,
}

pub const RETURN_SERIES_TOLERANCE: f64 = 1e-12;
pub const MAX_RETURN_STEPS: usize = 1000;

fn central_binomial(k: usize) -> BigUint {
    let mut c = BigUint::one();
    for i in 0..k {
        c = c * BigUint::from(2 * k - i) / BigUint::from(i + 1);
    }
    c
}

/// Coefficients `c_k` of `(1 + y)^alpha = sum_k c_k y^k`.
fn binomial_series(alpha: f64, terms: usize) -> Vec<f64> {
    let mut c = Vec::with_capacity(terms);
    let mut cur = 1.0;
    for k in 0..terms {
        c.push(cur);
        cur *= (alpha - k as f64) / (k + 1) as f64;
    }
    c
}

/// Computes `P_n` twice and requires agreement to 1e-12: by counting,
/// `P_2k = C(2k, k) (pq)^k`, and by expanding the generating function
/// `G(z) = sum_n P_n z^{-(n+1)} = (z^2 - 4pq)^{-1/2}
///       = z^{-1} (1 - 4pq z^{-2})^{-1/2}` in powers of `1/z`.
pub fn asym_return_probs(p: f64, max_n: usize) -> Result<ReturnSeries, WalkError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(WalkError::ProbabilityOutOfRange(p));
    }
    if max_n > MAX_RETURN_STEPS {
        return Err(WalkError::SeriesTooLong { requested: max_n, limit: MAX_RETURN_STEPS });
    }
    let pq = p * (1.0 - p);
    let combinatorial: Vec<f64> = (0..=max_n)
        .map(|n| {
            if n % 2 == 1 {
                0.0
            } else {
                let k = n / 2;
                central_binomial(k).to_f64().unwrap_or(f64::INFINITY) * pq.powi(k as i32)
            }
        })
        .collect();
    let coeffs = binomial_series(-0.5, max_n / 2 + 1);
    let y = -4.0 * pq;
    let series: Vec<f64> = (0..=max_n)
        .map(|n| if n % 2 == 1 { 0.0 } else { coeffs[n / 2] * y.powi((n / 2) as i32) })
        .collect();
    for n in 0..=max_n {
        if (combinatorial[n] - series[n]).abs() > RETURN_SERIES_TOLERANCE {
            return Err(WalkError::SeriesMismatch { n, combinatorial: combinatorial[n], series: series[n] });
        }
    }
    Ok(ReturnSeries { p, probs: combinatorial })
}

/// Monte Carlo frequency of being back at the origin after `n` steps,
/// `n = 0..=max_n`, over `walks` independent asymmetric walks.
pub fn simulate_asym_returns(p: f64, max_n: usize, walks: usize, seed: u64, workers: usize) -> Result<Vec<f64>, WalkError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(WalkError::ProbabilityOutOfRange(p));
    }
    let hits = map_indexed(walks, workers, |i| {
        let mut rng = stream_rng(seed, i as u64);
        let mut pos: i64 = 0;
        let mut at_origin = vec![false; max_n + 1];
        at_origin[0] = true;
        for slot in at_origin.iter_mut().skip(1) {
            pos += if rng.random::<f64>() < p { 1 } else { -1 };
            *slot = pos == 0;
        }
        at_origin
    });
    let mut freq = vec![0.0; max_n + 1];
    for h in &hits {
        for (n, &b) in h.iter().enumerate() {
            if b {
                freq[n] += 1.0;
            }
        }
    }
    freq.iter_mut().for_each(|f| *f /= walks as f64);
    Ok(freq)
}

/// Continuum heat kernel on `R^{d/2}` for a `d`-regular lattice:
/// `((2 pi)^{d/2} * 2 (t - s))^{-1/2} * exp(-|r1 - r2|^2 / (2 (t - s)))`.
/// Reference only; nothing in the crate depends on it.
pub fn gaussian_kernel_reference(d: usize, t: f64, s: f64, r1: &[f64], r2: &[f64]) -> Result<f64, WalkError> {
    if d == 0 || d % 2 == 1 {
        return Err(WalkError::OddDegree(d));
    }
    if !(t > s) {
        return Err(WalkError::NonPositiveTime { t, s });
    }
    let dim = d / 2;
    for r in [r1, r2] {
        if r.len() != dim {
            return Err(WalkError::DimensionMismatch { expected: dim, got: r.len() });
        }
    }
    let dt = t - s;
    let dist2: f64 = r1.iter().zip(r2).map(|(a, b)| (a - b).powi(2)).sum();
    let prefactor = 1.0 / ((2.0 * std::f64::consts::PI).powf(dim as f64) * 2.0 * dt).sqrt();
    Ok(prefactor * (-dist2 / (2.0 * dt)).exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContinuumRow {
    pub t: usize,
    pub lattice_return: f64,
    pub kernel_diagonal: f64,
    pub ratio: f64,
}

/// Exact return probability of the simple walk on `Z^dim` after `t` steps,
/// by exponential-generating-function convolution of the 1D walk, in log
/// space (the factorials leave `f64` range long before `t = 1000`).
fn lattice_return(dim: usize, t: usize) -> f64 {
    let mut ln_fact = vec![0.0; t + 1];
    for i in 1..=t {
        ln_fact[i] = ln_fact[i - 1] + (i as f64).ln();
    }
    // ln e1[k] with e1[k] = P_1(k) / k! = 1 / (4^h h!^2), k = 2h
    let le1: Vec<f64> = (0..=t)
        .map(|k| if k % 2 == 1 { f64::NEG_INFINITY } else { -(k as f64) * 2f64.ln() - 2.0 * ln_fact[k / 2] })
        .collect();
    let mut acc = le1.clone();
    for _ in 1..dim {
        acc = (0..=t)
            .map(|s| crate::largedev::log_sum_exp((0..=s).map(|i| acc[i] + le1[s - i])))
            .collect();
    }
    (acc[t] + ln_fact[t] - t as f64 * (dim as f64).ln()).exp()
}

/// Diagnostic table: rescaled lattice return probabilities against the
/// kernel diagonal for `d`-regular lattices (`Z^{d/2}`).
pub fn continuum_comparison(d: usize, times: &[usize]) -> Result<Vec<ContinuumRow>, WalkError> {
    if d == 0 || d % 2 == 1 {
        return Err(WalkError::OddDegree(d));
    }
    let dim = d / 2;
    let origin = vec![0.0; dim];
    times
        .iter()
        .map(|&t| {
            let lattice = lattice_return(dim, t);
            let kernel = gaussian_kernel_reference(d, t as f64, 0.0, &origin, &origin)?;
            Ok(ContinuumRow { t, lattice_return: lattice, kernel_diagonal: kernel, ratio: lattice / kernel })
        })
        .collect()
}
