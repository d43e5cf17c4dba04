//! Seeded samplers for random graph ensembles and a Monte Carlo estimator
//! of ensemble expectations.
//!
//! Three families are supported: Erdős–Rényi `G(n, p)`, uniformly random
//! bipartite graphs with fixed bit degree `q` and check degree `r`, and a
//! planted near-disconnection model (two dense blocks joined by exactly `k`
//! cross edges).

use std::collections::BTreeSet;
use std::fmt::Display;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::map_indexed;
use crate::graph::Graph;
use crate::seed::{derive_seed, rng_from_seed, stream_rng, SimRng};

#[derive(Debug, Error)]
pub enum EnsembleError {
    #[error("probability {0} is outside [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("ensemble needs at least one vertex")]
    NoVertices,
    #[error("degree sequence infeasible: n*q = {lhs} but m*r = {rhs}")]
    Infeasible { lhs: usize, rhs: usize },
    #[error("degree bound violated: {0}")]
    DegreeBound(String),
    #[error("could not build an initial biadjacency matrix with the requested margins")]
    NoInitialMatrix,
    #[error("{k} cross edges requested but only {max} distinct pairs exist")]
    TooManyBridges { k: usize, max: usize },
    #[error("need at least one sample")]
    NoSamples,
    #[error("observable failed on sample {index}: {message}")]
    Observable { index: usize, message: String },
}

fn check_probability(p: f64) -> Result<(), EnsembleError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(EnsembleError::ProbabilityOutOfRange(p))
    }
}

/// A random graph distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnsembleSpec {
    ErdosRenyi { n: usize, p: f64 },
    BipartiteRegular { n_bits: usize, m_checks: usize, q: usize, r: usize },
    PlantedBridge { n1: usize, n2: usize, k: usize, p_intra: f64 },
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<(), EnsembleError> {
        match *self {
            EnsembleSpec::ErdosRenyi { n, p } => {
                if n == 0 {
                    return Err(EnsembleError::NoVertices);
                }
                check_probability(p)
            }
            EnsembleSpec::BipartiteRegular { n_bits, m_checks, q, r } => {
                check_bipartite(n_bits, m_checks, q, r)
            }
            EnsembleSpec::PlantedBridge { n1, n2, k, p_intra } => {
                if n1 == 0 || n2 == 0 {
                    return Err(EnsembleError::NoVertices);
                }
                if k > n1 * n2 {
                    return Err(EnsembleError::TooManyBridges { k, max: n1 * n2 });
                }
                check_probability(p_intra)
            }
        }
    }

    pub fn n_vertices(&self) -> usize {
        match *self {
            EnsembleSpec::ErdosRenyi { n, .. } => n,
            EnsembleSpec::BipartiteRegular { n_bits, m_checks, .. } => n_bits + m_checks,
            EnsembleSpec::PlantedBridge { n1, n2, .. } => n1 + n2,
        }
    }

    /// Draw one graph. Bipartite samples use the default burn-in.
    pub fn sample(&self, seed: u64) -> Result<Graph, EnsembleError> {
        match *self {
            EnsembleSpec::ErdosRenyi { n, p } => sample_er(n, p, seed),
            EnsembleSpec::BipartiteRegular { n_bits, m_checks, q, r } => {
                sample_bipartite_regular(n_bits, m_checks, q, r, default_burn_in(n_bits, q), seed)
            }
            EnsembleSpec::PlantedBridge { n1, n2, k, p_intra } => {
                sample_planted_bridge(n1, n2, k, p_intra, seed).map(|s| s.graph)
            }
        }
    }
}

/// Edge pairs `(w, v)`, `w < v`, of a `G(n, p)` draw, by geometric skipping
/// over the lexicographic pair order.
fn er_pairs(n: usize, p: f64, rng: &mut SimRng) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    if n < 2 || p <= 0.0 {
        return pairs;
    }
    if p >= 1.0 {
        for v in 1..n {
            for w in 0..v {
                pairs.push((w, v));
            }
        }
        return pairs;
    }
    let log_q = (1.0 - p).ln();
    let mut v = 1usize;
    let mut w: i64 = -1;
    while v < n {
        let r: f64 = rng.random();
        let skip = ((1.0 - r).ln() / log_q).floor();
        w = w.saturating_add(1).saturating_add(skip.min(i64::MAX as f64 / 4.0) as i64);
        while v < n && w >= v as i64 {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            pairs.push((w as usize, v));
        }
    }
    pairs
}

/// `G(n, p)`: every one of the `n(n-1)/2` pairs is an edge independently
/// with probability `p`.
pub fn sample_er(n: usize, p: f64, seed: u64) -> Result<Graph, EnsembleError> {
    EnsembleSpec::ErdosRenyi { n, p }.validate()?;
    let pairs = er_pairs(n, p, &mut rng_from_seed(seed));
    Ok(Graph::from_pairs(n, &pairs).expect("sampled pairs are valid"))
}

fn check_bipartite(n: usize, m: usize, q: usize, r: usize) -> Result<(), EnsembleError> {
    if n == 0 || m == 0 {
        return Err(EnsembleError::NoVertices);
    }
    if n * q != m * r {
        return Err(EnsembleError::Infeasible { lhs: n * q, rhs: m * r });
    }
    if q > m {
        return Err(EnsembleError::DegreeBound(format!("bit degree {q} exceeds {m} checks")));
    }
    if r > n {
        return Err(EnsembleError::DegreeBound(format!("check degree {r} exceeds {n} bits")));
    }
    Ok(())
}

/// Burn-in used when none is given: twenty proposals per edge, about ten
/// accepted switches per edge on sparse matrices.
pub fn default_burn_in(n_bits: usize, q: usize) -> usize {
    20 * n_bits * q
}

/// Dense `n x m` 0/1 matrix; row `i` is bit `i`, column `a` is check `a`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Biadjacency {
    rows: usize,
    cols: usize,
    cells: Vec<bool>,
}

impl Biadjacency {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, cells: vec![false; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, a: usize) -> bool {
        self.cells[i * self.cols + a]
    }

    pub fn set(&mut self, i: usize, a: usize, value: bool) {
        self.cells[i * self.cols + a] = value;
    }

    pub fn row_sums(&self) -> Vec<usize> {
        (0..self.rows).map(|i| (0..self.cols).filter(|&a| self.get(i, a)).count()).collect()
    }

    pub fn col_sums(&self) -> Vec<usize> {
        (0..self.cols).map(|a| (0..self.rows).filter(|&i| self.get(i, a)).count()).collect()
    }

    pub fn has_margins(&self, q: usize, r: usize) -> bool {
        self.row_sums().iter().all(|&s| s == q) && self.col_sums().iter().all(|&s| s == r)
    }

    /// Bits are vertices `0..rows`, checks are `rows..rows + cols`.
    pub fn to_graph(&self) -> Graph {
        let mut pairs = Vec::new();
        for i in 0..self.rows {
            for a in 0..self.cols {
                if self.get(i, a) {
                    pairs.push((i, self.rows + a));
                }
            }
        }
        Graph::from_pairs(self.rows + self.cols, &pairs).expect("bipartite graph")
    }
}

/// Greedy start state: each row takes the `q` columns with the most
/// remaining capacity. For equal row demands this never gets stuck when the
/// margins are feasible.
fn initial_biadjacency(n: usize, m: usize, q: usize, r: usize) -> Result<Biadjacency, EnsembleError> {
    let mut mat = Biadjacency::zeros(n, m);
    let mut capacity = vec![r; m];
    for i in 0..n {
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by_key(|&a| (std::cmp::Reverse(capacity[a]), a));
        for &a in order.iter().take(q) {
            if capacity[a] == 0 {
                return Err(EnsembleError::NoInitialMatrix);
            }
            capacity[a] -= 1;
            mat.set(i, a, true);
        }
    }
    if capacity.iter().any(|&c| c != 0) {
        return Err(EnsembleError::NoInitialMatrix);
    }
    Ok(mat)
}

/// Run `proposals` steps of the checkerboard switch chain in place and
/// return how many switches were accepted.
///
/// Each proposal holds with probability 1/2; otherwise it picks two
/// distinct 1-entries `(i, a)`, `(j, b)` uniformly. If `(i, b)` and `(j, a)`
/// are both 0 the 2x2 submatrix is a checkerboard and is flipped, otherwise
/// the state is kept. The reverse move picks the two new 1-entries, so the
/// proposal is symmetric and the chain is reversible with respect to the
/// uniform law on matrices with these margins; the holding step makes it
/// aperiodic (without it a 2x2 permutation matrix alternates forever).
pub fn run_switch_chain(mat: &mut Biadjacency, proposals: usize, rng: &mut SimRng) -> usize {
    let mut ones: Vec<(usize, usize)> = (0..mat.rows())
        .flat_map(|i| (0..mat.cols()).map(move |a| (i, a)))
        .filter(|&(i, a)| mat.get(i, a))
        .collect();
    if ones.len() < 2 {
        return 0;
    }
    #[cfg(debug_assertions)]
    let margins = (mat.row_sums(), mat.col_sums());
    let mut accepted = 0;
    for _ in 0..proposals {
        if rng.random::<bool>() {
            continue;
        }
        let e = rng.random_range(0..ones.len());
        let mut f = rng.random_range(0..ones.len() - 1);
        if f >= e {
            f += 1;
        }
        let ((i, a), (j, b)) = (ones[e], ones[f]);
        if i == j || a == b || mat.get(i, b) || mat.get(j, a) {
            continue;
        }
        mat.set(i, a, false);
        mat.set(j, b, false);
        mat.set(i, b, true);
        mat.set(j, a, true);
        ones[e] = (i, b);
        ones[f] = (j, a);
        accepted += 1;
        #[cfg(debug_assertions)]
        debug_assert_eq!((mat.row_sums(), mat.col_sums()), margins);
    }
    accepted
}

/// A bipartite 0/1 matrix with row sums `q` and column sums `r`, drawn
/// approximately uniformly by `burn_in` switch-chain proposals.
pub fn sample_biadjacency(
    n: usize,
    m: usize,
    q: usize,
    r: usize,
    burn_in: usize,
    seed: u64,
) -> Result<Biadjacency, EnsembleError> {
    check_bipartite(n, m, q, r)?;
    let mut mat = initial_biadjacency(n, m, q, r)?;
    run_switch_chain(&mut mat, burn_in, &mut rng_from_seed(seed));
    assert!(mat.has_margins(q, r), "switch chain broke the margins");
    Ok(mat)
}

pub fn sample_bipartite_regular(
    n: usize,
    m: usize,
    q: usize,
    r: usize,
    burn_in: usize,
    seed: u64,
) -> Result<Graph, EnsembleError> {
    sample_biadjacency(n, m, q, r, burn_in, seed).map(|mat| mat.to_graph())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlantedLabel {
    /// `k = 0`: the two blocks share no edge.
    Disconnected,
    /// `k >= 1` cross edges.
    NearlyDisconnected,
}

#[derive(Debug, Clone)]
pub struct PlantedSample {
    pub graph: Graph,
    pub label: PlantedLabel,
    /// Edge ids of the planted cross edges.
    pub cross_edges: Vec<usize>,
}

/// Two independent `G(n_i, p_intra)` blocks (vertices `0..n1` and
/// `n1..n1+n2`) plus exactly `k` distinct uniformly random cross edges.
pub fn sample_planted_bridge(
    n1: usize,
    n2: usize,
    k: usize,
    p_intra: f64,
    seed: u64,
) -> Result<PlantedSample, EnsembleError> {
    EnsembleSpec::PlantedBridge { n1, n2, k, p_intra }.validate()?;
    let mut pairs = er_pairs(n1, p_intra, &mut stream_rng(seed, 0));
    pairs.extend(
        er_pairs(n2, p_intra, &mut stream_rng(seed, 1))
            .into_iter()
            .map(|(u, v)| (u + n1, v + n1)),
    );
    let mut rng = stream_rng(seed, 2);
    let mut chosen = BTreeSet::new();
    let mut cross = Vec::with_capacity(k);
    while cross.len() < k {
        let pair = (rng.random_range(0..n1), n1 + rng.random_range(0..n2));
        if chosen.insert(pair) {
            cross.push(pair);
        }
    }
    let first_cross = pairs.len();
    pairs.extend(cross);
    let graph = Graph::from_pairs(n1 + n2, &pairs).expect("planted pairs are valid");
    Ok(PlantedSample {
        graph,
        label: if k == 0 { PlantedLabel::Disconnected } else { PlantedLabel::NearlyDisconnected },
        cross_edges: (first_cross..first_cross + k).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub seed: u64,
}

impl MonteCarloEstimate {
    /// Mean and standard error of the mean, summed in index order.
    pub fn from_values(values: &[f64], seed: u64) -> Self {
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let std_error = if n > 1 {
            let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        Self { mean, std_error, n_samples: n, seed }
    }
}

/// Monte Carlo estimate of `E[f(G)]` over `n_samples` independent draws.
/// Sample `i` uses seed `derive_seed(seed, i)`, so the result does not
/// depend on `workers`.
pub fn ensemble_expectation<F, E>(
    spec: &EnsembleSpec,
    f: F,
    n_samples: usize,
    seed: u64,
    workers: usize,
) -> Result<MonteCarloEstimate, EnsembleError>
where
    F: Fn(&Graph) -> Result<f64, E> + Sync + Send,
    E: Display,
{
    if n_samples == 0 {
        return Err(EnsembleError::NoSamples);
    }
    spec.validate()?;
    let values = map_indexed(n_samples, workers, |i| -> Result<f64, EnsembleError> {
        let g = spec.sample(derive_seed(seed, i as u64))?;
        f(&g).map_err(|e| EnsembleError::Observable { index: i, message: e.to_string() })
    });
    let values = values.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(MonteCarloEstimate::from_values(&values, seed))
}

/// Ready-made graph observables.
pub mod observables {
    use std::convert::Infallible;

    use crate::graph::Graph;

    pub fn edge_count(g: &Graph) -> Result<f64, Infallible> {
        Ok(g.n_edges() as f64)
    }

    /// Number of vertex triples that are pairwise adjacent.
    pub fn triangle_count(g: &Graph) -> Result<f64, Infallible> {
        let a = g.adjacency_counts();
        let n = g.n_vertices();
        let mut count = 0u64;
        for i in 0..n {
            for j in i + 1..n {
                if a[i][j] == 0 {
                    continue;
                }
                for k in j + 1..n {
                    if a[i][k] > 0 && a[j][k] > 0 {
                        count += 1;
                    }
                }
            }
        }
        Ok(count as f64)
    }

    /// Entry `A[bit][check]` of a bipartite sample with `n_bits` bits.
    pub fn biadjacency_entry(n_bits: usize, bit: usize, check: usize) -> impl Fn(&Graph) -> Result<f64, Infallible> + Sync + Send {
        move |g: &Graph| {
            let target = n_bits + check;
            Ok(g.incident(bit).iter().filter(|inc| inc.neighbor == target).count() as f64)
        }
    }
}
