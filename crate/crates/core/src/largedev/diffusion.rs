//! Interacting diffusions `d eta_i = [sum_{j != i} f(eta_i - eta_j) + g(eta_i)] dt + d xi_i`
//! by Euler–Maruyama, and Girsanov reweighting of driftless reference
//! paths into the interacting law.
//!
//! For a reference path with increments `d eta`, the interacting law has
//! density `exp(sum_i int F_i d eta_i - 1/2 sum_i int F_i^2 dt)`, with the
//! stochastic integral taken at the left endpoint of each step.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::LdpError;
use crate::exec::map_indexed;
use crate::seed::{rng_from_seed, stream_rng, SimRng};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ForceLaw {
    #[default]
    Zero,
    /// `slope * x`
    Linear { slope: f64 },
    /// `coeff * x^3`
    Cubic { coeff: f64 },
}

impl ForceLaw {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            ForceLaw::Zero => 0.0,
            ForceLaw::Linear { slope } => slope * x,
            ForceLaw::Cubic { coeff } => coeff * x * x * x,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ForceLaw::Zero)
            || matches!(self, ForceLaw::Linear { slope } if *slope == 0.0)
            || matches!(self, ForceLaw::Cubic { coeff } if *coeff == 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiffusionSystem {
    /// Starting positions; the particle count is its length.
    pub initial: Vec<f64>,
    pub pair_force: ForceLaw,
    pub self_force: ForceLaw,
    pub dt: f64,
    pub horizon: f64,
}

impl DiffusionSystem {
    pub fn new(initial: Vec<f64>, pair_force: ForceLaw, self_force: ForceLaw, dt: f64, horizon: f64) -> Result<Self, LdpError> {
        if initial.is_empty() {
            return Err(LdpError::InvalidSystem("no particles".into()));
        }
        if !(dt > 0.0) || !(horizon >= dt) || !horizon.is_finite() {
            return Err(LdpError::InvalidSystem(format!("need dt > 0 and horizon >= dt (dt = {dt}, horizon = {horizon})")));
        }
        Ok(Self { initial, pair_force, self_force, dt, horizon })
    }

    /// Single Ornstein–Uhlenbeck particle with `g(eta) = -eta`.
    pub fn ornstein_uhlenbeck(eta0: f64, dt: f64, horizon: f64) -> Result<Self, LdpError> {
        Self::new(vec![eta0], ForceLaw::Zero, ForceLaw::Linear { slope: -1.0 }, dt, horizon)
    }

    pub fn n_particles(&self) -> usize {
        self.initial.len()
    }

    pub fn n_steps(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }

    fn drift_into(&self, eta: &[f64], out: &mut [f64], step: usize) -> Result<(), LdpError> {
        for (i, slot) in out.iter_mut().enumerate() {
            let mut f = self.self_force.eval(eta[i]);
            if !self.pair_force.is_zero() {
                for (j, &other) in eta.iter().enumerate() {
                    if j != i {
                        f += self.pair_force.eval(eta[i] - other);
                    }
                }
            }
            if !f.is_finite() {
                return Err(LdpError::NonFiniteDrift { step, particle: i });
            }
            *slot = f;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiffusionPaths {
    pub interacting: bool,
    pub dt: f64,
    /// `positions[k][i]` is particle `i` after `k` steps.
    pub positions: Vec<Vec<f64>>,
    /// `increments[k][i]` is the Brownian increment of step `k`.
    pub increments: Vec<Vec<f64>>,
}

impl DiffusionPaths {
    pub fn final_state(&self) -> &[f64] {
        self.positions.last().expect("paths include the initial state")
    }
}

/// Streams one path, calling `visit(step, eta_before, increment)` for each
/// step, and returns the final state.
fn run_path(
    sys: &DiffusionSystem,
    interacting: bool,
    rng: &mut SimRng,
    mut visit: impl FnMut(usize, &[f64], &[f64]) -> Result<(), LdpError>,
) -> Result<Vec<f64>, LdpError> {
    let n = sys.n_particles();
    let sqrt_dt = sys.dt.sqrt();
    let mut eta = sys.initial.clone();
    let mut drift = vec![0.0; n];
    let mut dxi = vec![0.0; n];
    for step in 0..sys.n_steps() {
        for x in dxi.iter_mut() {
            *x = sqrt_dt * rng.sample::<f64, _>(StandardNormal);
        }
        visit(step, &eta, &dxi)?;
        if interacting {
            sys.drift_into(&eta, &mut drift, step)?;
        }
        for i in 0..n {
            eta[i] += if interacting { drift[i] * sys.dt } else { 0.0 } + dxi[i];
        }
    }
    Ok(eta)
}

/// Euler–Maruyama paths; with `interacting = false` the drift is dropped
/// and the paths are Brownian from `initial`.
pub fn simulate_diffusions(sys: &DiffusionSystem, interacting: bool, seed: u64) -> Result<DiffusionPaths, LdpError> {
    let mut positions = vec![sys.initial.clone()];
    let mut increments = Vec::with_capacity(sys.n_steps());
    let mut rng = rng_from_seed(seed);
    let last = run_path(sys, interacting, &mut rng, |step, eta, dxi| {
        if step > 0 {
            positions.push(eta.to_vec());
        }
        increments.push(dxi.to_vec());
        Ok(())
    })?;
    if !increments.is_empty() {
        positions.push(last);
    }
    debug_assert_eq!(positions.len(), increments.len() + 1);
    Ok(DiffusionPaths { interacting, dt: sys.dt, positions, increments })
}

/// `ln dP/dP0` along a reference path given step by step.
#[derive(Debug, Default)]
struct LogWeight {
    total: f64,
    drift: Vec<f64>,
}

impl LogWeight {
    fn add_step(&mut self, sys: &DiffusionSystem, step: usize, eta: &[f64], d_eta: &[f64]) -> Result<(), LdpError> {
        self.drift.resize(eta.len(), 0.0);
        sys.drift_into(eta, &mut self.drift, step)?;
        for (f, d) in self.drift.iter().zip(d_eta) {
            self.total += f * d - 0.5 * f * f * sys.dt;
        }
        Ok(())
    }
}

/// Log of the density of the interacting law against the reference law,
/// evaluated on one reference path.
pub fn girsanov_log_weight(paths: &DiffusionPaths, sys: &DiffusionSystem) -> Result<f64, LdpError> {
    if paths.interacting {
        return Err(LdpError::InteractingReference);
    }
    let mut lw = LogWeight::default();
    for (k, d_eta) in paths.increments.iter().enumerate() {
        lw.add_step(sys, k, &paths.positions[k], d_eta)?;
    }
    Ok(lw.total)
}

/// Effective sample size below this fraction of the path count is flagged.
pub const ESS_FLOOR: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reweighting {
    /// Normalized to mean 1.
    pub weights: Vec<f64>,
    pub effective_sample_size: f64,
    pub degenerate: bool,
}

fn normalize_log_weights(log_weights: &[f64]) -> Reweighting {
    let m = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let raw: Vec<f64> = log_weights.iter().map(|l| (l - m).exp()).collect();
    let mean = raw.iter().sum::<f64>() / raw.len() as f64;
    let weights: Vec<f64> = raw.iter().map(|w| w / mean).collect();
    let sum_sq: f64 = weights.iter().map(|w| w * w).sum();
    let count = weights.len() as f64;
    let effective_sample_size = count * count / sum_sq;
    Reweighting { weights, effective_sample_size, degenerate: effective_sample_size < ESS_FLOOR * count }
}

pub fn girsanov_reweight(reference: &[DiffusionPaths], sys: &DiffusionSystem) -> Result<Reweighting, LdpError> {
    if reference.is_empty() {
        return Err(LdpError::TooFew { what: "reference paths", min: 1, got: 0 });
    }
    let log_weights = reference.iter().map(|p| girsanov_log_weight(p, sys)).collect::<Result<Vec<_>, _>>()?;
    Ok(normalize_log_weights(&log_weights))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathEstimate {
    pub mean: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GirsanovComparison {
    pub n_paths: usize,
    pub seed: u64,
    /// Self-normalized weighted mean over reference paths.
    pub reweighted: PathEstimate,
    /// Plain mean over interacting paths.
    pub direct: PathEstimate,
    pub effective_sample_size: f64,
    pub degenerate: bool,
    pub relative_gap: f64,
}

/// Estimates `E[obs(eta(T))]` under the interacting law two ways: directly
/// (stream `2i + 1` for path `i`) and by reweighting reference paths
/// (stream `2i`). Paths are streamed; only final states and log-weights
/// are kept.
pub fn girsanov_experiment<O>(
    sys: &DiffusionSystem,
    observable: O,
    n_paths: usize,
    seed: u64,
    workers: usize,
) -> Result<GirsanovComparison, LdpError>
where
    O: Fn(&[f64]) -> f64 + Sync,
{
    if n_paths < 2 {
        return Err(LdpError::TooFew { what: "n_paths", min: 2, got: n_paths });
    }
    let results = map_indexed(n_paths, workers, |i| -> Result<(f64, f64, f64), LdpError> {
        let mut lw = LogWeight::default();
        let mut rng = stream_rng(seed, 2 * i as u64);
        let reference = run_path(sys, false, &mut rng, |k, eta, d| lw.add_step(sys, k, eta, d))?;
        let mut rng = stream_rng(seed, 2 * i as u64 + 1);
        let direct = run_path(sys, true, &mut rng, |_, _, _| Ok(()))?;
        Ok((observable(&reference), lw.total, observable(&direct)))
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    let count = n_paths as f64;
    let direct_vals: Vec<f64> = results.iter().map(|r| r.2).collect();
    let direct_mean = direct_vals.iter().sum::<f64>() / count;
    let direct_var = direct_vals.iter().map(|v| (v - direct_mean).powi(2)).sum::<f64>() / (count - 1.0);

    let log_weights: Vec<f64> = results.iter().map(|r| r.1).collect();
    let rw = normalize_log_weights(&log_weights);
    let reweighted_mean = rw.weights.iter().zip(&results).map(|(w, r)| w * r.0).sum::<f64>() / count;
    // delta-method error of the self-normalized estimator
    let reweighted_var = rw.weights.iter().zip(&results).map(|(w, r)| (w * (r.0 - reweighted_mean)).powi(2)).sum::<f64>() / count;

    Ok(GirsanovComparison {
        n_paths,
        seed,
        reweighted: PathEstimate { mean: reweighted_mean, std_error: (reweighted_var / count).sqrt() },
        direct: PathEstimate { mean: direct_mean, std_error: (direct_var / count).sqrt() },
        effective_sample_size: rw.effective_sample_size,
        degenerate: rw.degenerate,
        relative_gap: (reweighted_mean - direct_mean).abs() / direct_mean.abs(),
    })
}

/// `E[eta(T)^2]` for the Ornstein–Uhlenbeck process `d eta = -eta dt + d xi`
/// started at `eta0`.
pub fn ou_second_moment(eta0: f64, horizon: f64) -> f64 {
    let decay = (-2.0 * horizon).exp();
    eta0 * eta0 * decay + (1.0 - decay) / 2.0
}
