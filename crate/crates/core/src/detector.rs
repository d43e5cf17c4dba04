//! A local, bounded-error test for "connected" versus "disconnected or
//! nearly so".
//!
//! The detector sees the graph only through [`LocalAccess::neighbors`],
//! which returns the edges incident to one vertex and records the query.
//! Besides that it knows the vertex count, so it can pick uniform seeds.
//! A trial launches pairs of random walks from independent uniform seeds
//! and measures how much their occupation measures overlap; walkers stuck
//! on different sides of a (near) cut overlap little. Repeating trials and
//! taking a majority vote drives the error down.

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::ensembles::{EnsembleError, EnsembleSpec};
use crate::exec::map_indexed;
use crate::graph::{Graph, Incidence};
use crate::seed::{derive_seed, rng_from_seed};

#[derive(Debug, Error)]
pub enum DetectorError {
    #[error("vertex {vertex} is out of range for {n} vertices")]
    InvalidVertex { vertex: usize, n: usize },
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("invalid detector configuration: {0}")]
    InvalidConfig(String),
    #[error("calibration needs at least 2 samples per class, got {0}")]
    TooFewCalibrationSamples(usize),
    #[error("every calibration statistic is identical; no threshold separates anything")]
    DegenerateCalibration,
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct AccessLog {
    queried: Vec<bool>,
    pub queries: u64,
    /// Returned edges that do not touch the queried vertex. Zero unless the
    /// access channel itself is broken.
    pub non_incident: u64,
}

impl AccessLog {
    pub fn new(n: usize) -> Self {
        Self { queried: vec![false; n], queries: 0, non_incident: 0 }
    }

    pub fn was_queried(&self, v: usize) -> bool {
        self.queried[v]
    }

    pub fn queried_vertices(&self) -> Vec<usize> {
        (0..self.queried.len()).filter(|&v| self.queried[v]).collect()
    }

    pub fn merge(&mut self, other: &AccessLog) {
        for (a, b) in self.queried.iter_mut().zip(&other.queried) {
            *a |= *b;
        }
        self.queries += other.queries;
        self.non_incident += other.non_incident;
    }
}

/// The detector's only read path into the graph.
pub struct LocalAccess<'g> {
    graph: &'g Graph,
    log: AccessLog,
}

impl<'g> LocalAccess<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        Self { graph, log: AccessLog::new(graph.n_vertices()) }
    }

    pub fn n_vertices(&self) -> usize {
        self.graph.n_vertices()
    }

    /// Edges incident to `v`, logged.
    pub fn neighbors(&mut self, v: usize) -> Result<&'g [Incidence], DetectorError> {
        if v >= self.graph.n_vertices() {
            return Err(DetectorError::InvalidVertex { vertex: v, n: self.graph.n_vertices() });
        }
        let inc = self.graph.incident(v);
        self.log.queried[v] = true;
        self.log.queries += 1;
        self.log.non_incident += inc.iter().filter(|i| !self.graph.edge(i.edge).touches(v)).count() as u64;
        Ok(inc)
    }

    pub fn log(&self) -> &AccessLog {
        &self.log
    }

    pub fn into_log(self) -> AccessLog {
        self.log
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectorConfig {
    pub n_pairs: usize,
    pub walk_length: usize,
    /// A trial votes "disconnected" when its statistic is below this.
    pub threshold: f64,
    pub repetitions: usize,
}

/// `ceil(4 ln(n)^2)`.
pub fn default_walk_length(n: usize) -> usize {
    (4.0 * (n.max(2) as f64).ln().powi(2)).ceil() as usize
}

impl DetectorConfig {
    pub fn new(n_pairs: usize, walk_length: usize, threshold: f64, repetitions: usize) -> Result<Self, DetectorError> {
        let cfg = Self { n_pairs, walk_length, threshold, repetitions };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), DetectorError> {
        if self.n_pairs == 0 || self.walk_length == 0 {
            return Err(DetectorError::InvalidConfig("n_pairs and walk_length must be at least 1".into()));
        }
        if self.repetitions.is_multiple_of(2) {
            return Err(DetectorError::InvalidConfig(format!("repetitions must be odd, got {}", self.repetitions)));
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(DetectorError::InvalidConfig(format!("threshold {} outside [0, 1]", self.threshold)));
        }
        Ok(())
    }

    pub fn with_threshold(self, threshold: f64) -> Self {
        Self { threshold, ..self }
    }

    pub fn with_repetitions(self, repetitions: usize) -> Self {
        Self { repetitions, ..self }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialOutcome {
    /// Mean occupation overlap over the pairs, in `[0, 1]`.
    pub statistic: f64,
    pub vote_disconnected: bool,
    /// Pairs with a walker that started on an isolated vertex; they count
    /// as zero overlap.
    pub stuck_pairs: usize,
}

/// Visit counts of one walk, with the touched vertices for cheap reset.
struct Occupancy {
    counts: Vec<u32>,
    touched: Vec<usize>,
}

impl Occupancy {
    fn new(n: usize) -> Self {
        Self { counts: vec![0; n], touched: Vec::new() }
    }

    fn clear(&mut self) {
        for &v in &self.touched {
            self.counts[v] = 0;
        }
        self.touched.clear();
    }

    fn visit(&mut self, v: usize) {
        if self.counts[v] == 0 {
            self.touched.push(v);
        }
        self.counts[v] += 1;
    }
}

/// Walks `steps` moves from `start`, reading each occupied vertex's edges
/// on arrival. `false` if the start vertex has no edges.
fn run_walk<R: Rng>(
    access: &mut LocalAccess<'_>,
    start: usize,
    steps: usize,
    occ: &mut Occupancy,
    rng: &mut R,
) -> Result<bool, DetectorError> {
    occ.clear();
    let mut cur = start;
    let mut inc = access.neighbors(cur)?;
    if inc.is_empty() {
        return Ok(false);
    }
    occ.visit(cur);
    for _ in 0..steps {
        cur = inc[rng.random_range(0..inc.len())].neighbor;
        occ.visit(cur);
        inc = access.neighbors(cur)?;
    }
    Ok(true)
}

/// `sum_v min(a(v), b(v)) / (T + 1)`.
fn overlap(a: &Occupancy, b: &Occupancy, steps: usize) -> f64 {
    let shared: u64 = a.touched.iter().map(|&v| u64::from(a.counts[v].min(b.counts[v]))).sum();
    shared as f64 / (steps + 1) as f64
}

pub fn single_trial(access: &mut LocalAccess<'_>, cfg: &DetectorConfig, seed: u64) -> Result<TrialOutcome, DetectorError> {
    let n = access.n_vertices();
    if n == 0 {
        return Err(DetectorError::EmptyGraph);
    }
    let mut rng = rng_from_seed(seed);
    let (mut a, mut b) = (Occupancy::new(n), Occupancy::new(n));
    let mut total = 0.0;
    let mut stuck_pairs = 0;
    for _ in 0..cfg.n_pairs {
        let (s1, s2) = (rng.random_range(0..n), rng.random_range(0..n));
        let ok1 = run_walk(access, s1, cfg.walk_length, &mut a, &mut rng)?;
        let ok2 = run_walk(access, s2, cfg.walk_length, &mut b, &mut rng)?;
        if ok1 && ok2 {
            total += overlap(&a, &b, cfg.walk_length);
        } else {
            stuck_pairs += 1;
        }
    }
    let statistic = total / cfg.n_pairs as f64;
    Ok(TrialOutcome { statistic, vote_disconnected: statistic < cfg.threshold, stuck_pairs })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decision {
    Connected,
    SuspectDisconnected,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub decision: Decision,
    pub votes_for_disconnected: usize,
    pub trials: usize,
    pub statistic_trace: Vec<f64>,
    pub stuck_pairs: usize,
    pub queries: u64,
    pub non_incident_accesses: u64,
    /// Vertices whose edge sets were read, in increasing order.
    #[serde(skip)]
    pub queried_vertices: Vec<usize>,
}

/// `R` trials with seeds `derive_seed(seed, r)`, majority vote.
pub fn detect(g: &Graph, cfg: &DetectorConfig, seed: u64, workers: usize) -> Result<Verdict, DetectorError> {
    cfg.validate()?;
    if g.n_vertices() == 0 {
        return Err(DetectorError::EmptyGraph);
    }
    let trials = map_indexed(cfg.repetitions, workers, |r| {
        let mut access = LocalAccess::new(g);
        single_trial(&mut access, cfg, derive_seed(seed, r as u64)).map(|t| (t, access.into_log()))
    });
    let mut log = AccessLog::new(g.n_vertices());
    let mut statistic_trace = Vec::with_capacity(cfg.repetitions);
    let (mut votes, mut stuck) = (0, 0);
    for trial in trials {
        let (t, trial_log) = trial?;
        log.merge(&trial_log);
        votes += usize::from(t.vote_disconnected);
        stuck += t.stuck_pairs;
        statistic_trace.push(t.statistic);
    }
    let decision = if 2 * votes > cfg.repetitions { Decision::SuspectDisconnected } else { Decision::Connected };
    Ok(Verdict {
        decision,
        votes_for_disconnected: votes,
        trials: cfg.repetitions,
        statistic_trace,
        stuck_pairs: stuck,
        queries: log.queries,
        non_incident_accesses: log.non_incident,
        queried_vertices: log.queried_vertices(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RocRow {
    pub config_index: usize,
    pub threshold: f64,
    /// Fraction of positive-class samples voted disconnected.
    pub true_positive_rate: f64,
    /// Fraction of negative-class samples voted disconnected.
    pub false_positive_rate: f64,
    pub balanced_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Calibration {
    /// Best configuration, with its threshold set.
    pub config: DetectorConfig,
    pub config_index: usize,
    pub balanced_error: f64,
    pub roc: Vec<RocRow>,
    /// Per-class single-trial statistics of the chosen configuration.
    pub positive_statistics: Vec<f64>,
    pub negative_statistics: Vec<f64>,
    /// Samples whose structural ground truth disagrees with their class
    /// (negative-class graphs that are in fact disconnected).
    pub mislabeled_negatives: usize,
}

/// Labeled calibration graphs: sample `i` of the positive class uses seed
/// `derive_seed(seed, 2i)`, of the negative class `derive_seed(seed, 2i + 1)`.
pub fn calibration_graphs(
    positive: &EnsembleSpec,
    negative: &EnsembleSpec,
    n_cal: usize,
    seed: u64,
    workers: usize,
) -> Result<(Vec<Graph>, Vec<Graph>), DetectorError> {
    let pos = map_indexed(n_cal, workers, |i| positive.sample(derive_seed(seed, 2 * i as u64)));
    let neg = map_indexed(n_cal, workers, |i| negative.sample(derive_seed(seed, 2 * i as u64 + 1)));
    Ok((pos.into_iter().collect::<Result<_, _>>()?, neg.into_iter().collect::<Result<_, _>>()?))
}

/// Single-trial statistic on each graph; graph `i` uses trial seed
/// `derive_seed(seed, i)`.
pub fn trial_statistics(graphs: &[Graph], cfg: &DetectorConfig, seed: u64, workers: usize) -> Result<Vec<f64>, DetectorError> {
    map_indexed(graphs.len(), workers, |i| {
        single_trial(&mut LocalAccess::new(&graphs[i]), cfg, derive_seed(seed, i as u64)).map(|t| t.statistic)
    })
    .into_iter()
    .collect()
}

fn roc_for(config_index: usize, pos: &[f64], neg: &[f64]) -> Vec<RocRow> {
    let mut all: Vec<f64> = pos.iter().chain(neg).copied().collect();
    all.sort_by(f64::total_cmp);
    all.dedup();
    let mut candidates = vec![all[0] - 1e-9];
    candidates.extend(all.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    candidates.push(all[all.len() - 1] + 1e-9);
    candidates
        .into_iter()
        .map(|threshold| {
            let tpr = pos.iter().filter(|&&s| s < threshold).count() as f64 / pos.len() as f64;
            let fpr = neg.iter().filter(|&&s| s < threshold).count() as f64 / neg.len() as f64;
            RocRow {
                config_index,
                threshold: threshold.clamp(0.0, 1.0),
                true_positive_rate: tpr,
                false_positive_rate: fpr,
                balanced_error: 0.5 * ((1.0 - tpr) + fpr),
            }
        })
        .collect()
}

/// Chooses the configuration and threshold minimizing the single-trial
/// balanced error on `n_cal` labeled graphs per class. Among thresholds
/// tied at the minimum the middle one is returned.
pub fn calibrate_threshold(
    positive: &EnsembleSpec,
    negative: &EnsembleSpec,
    cfg_grid: &[DetectorConfig],
    n_cal: usize,
    seed: u64,
    workers: usize,
) -> Result<Calibration, DetectorError> {
    if n_cal < 2 {
        return Err(DetectorError::TooFewCalibrationSamples(n_cal));
    }
    if cfg_grid.is_empty() {
        return Err(DetectorError::InvalidConfig("empty configuration grid".into()));
    }
    let (pos_graphs, neg_graphs) = calibration_graphs(positive, negative, n_cal, seed, workers)?;
    let mislabeled_negatives = neg_graphs
        .iter()
        .filter(|g| !g.is_connected())
        .count();
    let trial_seed = derive_seed(seed, u64::MAX);
    let mut roc = Vec::new();
    let mut best: Option<(f64, usize, f64, Vec<f64>, Vec<f64>)> = None;
    for (ci, cfg) in cfg_grid.iter().enumerate() {
        cfg.validate()?;
        let pos = trial_statistics(&pos_graphs, cfg, trial_seed, workers)?;
        let neg = trial_statistics(&neg_graphs, cfg, derive_seed(trial_seed, 1), workers)?;
        let first = pos[0];
        if pos.iter().chain(&neg).all(|&s| s == first) {
            continue;
        }
        let rows = roc_for(ci, &pos, &neg);
        let min_err = rows.iter().map(|r| r.balanced_error).fold(f64::INFINITY, f64::min);
        let tied: Vec<&RocRow> = rows.iter().filter(|r| r.balanced_error == min_err).collect();
        let theta = tied[tied.len() / 2].threshold;
        if best.as_ref().is_none_or(|b| min_err < b.0) {
            best = Some((min_err, ci, theta, pos, neg));
        }
        roc.extend(rows);
    }
    let (balanced_error, config_index, theta, positive_statistics, negative_statistics) =
        best.ok_or(DetectorError::DegenerateCalibration)?;
    Ok(Calibration {
        config: cfg_grid[config_index].with_threshold(theta),
        config_index,
        balanced_error,
        roc,
        positive_statistics,
        negative_statistics,
        mislabeled_negatives,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRow {
    pub k: Option<usize>,
    pub n_runs: usize,
    pub detection_rate: f64,
    pub std_error: f64,
    /// Sampled graphs that are structurally disconnected.
    pub truly_disconnected: usize,
    pub non_incident_accesses: u64,
}

/// Fraction of "suspect-disconnected" verdicts over `n_runs` fresh graphs
/// from `spec`. Run `i` samples with `derive_seed(seed, 2i)` and detects
/// with `derive_seed(seed, 2i + 1)`.
pub fn detection_rate(spec: &EnsembleSpec, cfg: &DetectorConfig, n_runs: usize, seed: u64, workers: usize) -> Result<RateRow, DetectorError> {
    let runs = map_indexed(n_runs, workers, |i| -> Result<(bool, bool, u64), DetectorError> {
        let g = spec.sample(derive_seed(seed, 2 * i as u64))?;
        let truth = !g.is_connected();
        let v = detect(&g, cfg, derive_seed(seed, 2 * i as u64 + 1), 1)?;
        Ok((v.decision == Decision::SuspectDisconnected, truth, v.non_incident_accesses))
    });
    let (mut hits, mut disconnected, mut non_incident) = (0usize, 0usize, 0u64);
    for r in runs {
        let (hit, truth, bad) = r?;
        hits += usize::from(hit);
        disconnected += usize::from(truth);
        non_incident += bad;
    }
    let rate = hits as f64 / n_runs as f64;
    Ok(RateRow {
        k: None,
        n_runs,
        detection_rate: rate,
        std_error: (rate * (1.0 - rate) / n_runs as f64).sqrt(),
        truly_disconnected: disconnected,
        non_incident_accesses: non_incident,
    })
}

/// Detection rate on `PlantedBridge(n/2, n - n/2, k, p_intra)` for each
/// `k`; point `j` uses seed `derive_seed(seed, j)`.
pub fn phase_sweep(
    n: usize,
    k_values: &[usize],
    p_intra: f64,
    cfg: &DetectorConfig,
    n_runs: usize,
    seed: u64,
    workers: usize,
) -> Result<Vec<RateRow>, DetectorError> {
    k_values
        .iter()
        .enumerate()
        .map(|(j, &k)| {
            let spec = EnsembleSpec::PlantedBridge { n1: n / 2, n2: n - n / 2, k, p_intra };
            spec.validate()?;
            let mut row = detection_rate(&spec, cfg, n_runs, derive_seed(seed, j as u64), workers)?;
            row.k = Some(k);
            Ok(row)
        })
        .collect()
}
