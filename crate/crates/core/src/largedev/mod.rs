//! Large deviations for sample means: closed-form Cramér rates, empirical
//! scaled cumulant generating functions, grid Legendre transforms, and
//! tail-decay checks. Interacting diffusions with path reweighting live in
//! [`diffusion`].

pub mod diffusion;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::factorial::ln_binomial;
use thiserror::Error;

use crate::exec::map_indexed;
use crate::seed::{stream_rng, SimRng};

pub use diffusion::*;

#[derive(Debug, Error)]
pub enum LdpError {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("{what} must be at least {min}, got {got}")]
    TooFew { what: &'static str, min: usize, got: usize },
    #[error("grid is empty or contains non-finite values")]
    BadGrid,
    #[error("no usable points on the SCGF grid")]
    EmptyUsableGrid,
    #[error("threshold {x} is not above the mean {mean}")]
    NotAboveMean { x: f64, mean: f64 },
    #[error("non-finite drift at step {step}, particle {particle}")]
    NonFiniteDrift { step: usize, particle: usize },
    #[error("invalid diffusion system: {0}")]
    InvalidSystem(String),
    #[error("reference paths must be simulated without interaction")]
    InteractingReference,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Distribution {
    Bernoulli { p: f64 },
    Gaussian { mu: f64, sigma: f64 },
}

impl Distribution {
    pub fn bernoulli(p: f64) -> Result<Self, LdpError> {
        if !(p > 0.0 && p < 1.0) {
            return Err(LdpError::InvalidDistribution(format!("Bernoulli p = {p} must lie in (0, 1)")));
        }
        Ok(Distribution::Bernoulli { p })
    }

    pub fn gaussian(mu: f64, sigma: f64) -> Result<Self, LdpError> {
        if !(sigma > 0.0) || !mu.is_finite() || !sigma.is_finite() {
            return Err(LdpError::InvalidDistribution(format!("Gaussian({mu}, {sigma})")));
        }
        Ok(Distribution::Gaussian { mu, sigma })
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Distribution::Bernoulli { p } => p,
            Distribution::Gaussian { mu, .. } => mu,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Distribution::Bernoulli { p } => f64::from(u8::from(rng.random::<f64>() < p)),
            Distribution::Gaussian { mu, sigma } => mu + sigma * rng.sample::<f64, _>(StandardNormal),
        }
    }

    /// `ln E[e^{tX}]`.
    pub fn cumulant(&self, t: f64) -> f64 {
        match *self {
            Distribution::Bernoulli { p } => {
                // ln(1 - p + p e^t), stable for large |t|
                if t > 0.0 {
                    t + ((1.0 - p) * (-t).exp() + p).ln()
                } else {
                    (1.0 - p + p * t.exp()).ln()
                }
            }
            Distribution::Gaussian { mu, sigma } => mu * t + 0.5 * sigma * sigma * t * t,
        }
    }

    /// Exponentially tilted law `dQ/dP = e^{theta X - cumulant(theta)}`.
    pub fn tilted(&self, theta: f64) -> Distribution {
        match *self {
            Distribution::Bernoulli { p } => {
                let q = p * theta.exp();
                Distribution::Bernoulli { p: q / (1.0 - p + q) }
            }
            Distribution::Gaussian { mu, sigma } => Distribution::Gaussian { mu: mu + sigma * sigma * theta, sigma },
        }
    }

    /// Tilt at which the tilted mean equals `x`.
    pub fn saddle_point(&self, x: f64) -> f64 {
        match *self {
            Distribution::Bernoulli { p } => (x * (1.0 - p) / (p * (1.0 - x))).ln(),
            Distribution::Gaussian { mu, sigma } => (x - mu) / (sigma * sigma),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateValue {
    pub value: f64,
    /// False when `x` cannot be reached by sample means; `value` is then
    /// `+inf`.
    pub attainable: bool,
}

/// Two-sided Cramér rate `sup_t [t x - ln E e^{tX}]` in closed form. The
/// Bernoulli endpoints `x = 0, 1` take their finite limits.
pub fn cramer_rate_analytic(dist: &Distribution, x: f64) -> RateValue {
    match *dist {
        Distribution::Bernoulli { p } => {
            if !(0.0..=1.0).contains(&x) {
                return RateValue { value: f64::INFINITY, attainable: false };
            }
            let term = |a: f64, b: f64| if a == 0.0 { 0.0 } else { a * (a / b).ln() };
            RateValue { value: term(x, p) + term(1.0 - x, 1.0 - p), attainable: true }
        }
        Distribution::Gaussian { mu, sigma } => {
            RateValue { value: (x - mu).powi(2) / (2.0 * sigma * sigma), attainable: x.is_finite() }
        }
    }
}

/// One-sided rate `sup_{t > 0} [t x - ln E e^{tX}]` governing the upper
/// tail `P(mean >= x)`: the two-sided rate above the mean, 0 below it.
pub fn upper_tail_rate(dist: &Distribution, x: f64) -> RateValue {
    if x <= dist.mean() {
        RateValue { value: 0.0, attainable: true }
    } else {
        cramer_rate_analytic(dist, x)
    }
}

/// `ln sum exp(v)`, shifted by the maximum.
pub fn log_sum_exp(values: impl IntoIterator<Item = f64> + Clone) -> f64 {
    let m = values.clone().into_iter().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + values.into_iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScgfMethod {
    /// `n^{-1} ln mean_i exp(t Z_i)` over whole sums `Z_i`. Dominated by
    /// the largest sample once `t^2 n Var X` is more than a few units.
    SumSamples,
    /// `n^{-1} sum_j ln mean_i exp(t X_ij)`: the product over positions of
    /// per-position moment estimates. Uses the same `n x n_samples` draws
    /// and also estimates `E e^{t Z_n}` without bias, with far lower
    /// variance for i.i.d. summands.
    #[default]
    PositionProduct,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScgfEstimate {
    pub t_grid: Vec<f64>,
    pub lambda_hat: Vec<f64>,
    /// Points whose estimate overflowed or is otherwise non-finite.
    pub overflow: Vec<bool>,
    pub n: usize,
    pub n_samples: usize,
    pub method: ScgfMethod,
}

impl ScgfEstimate {
    /// Second differences `L(t_{k-1}) - 2 L(t_k) + L(t_{k+1})` on a uniform
    /// grid; all non-negative for a convex estimate.
    pub fn second_differences(&self) -> Vec<f64> {
        self.lambda_hat.windows(3).map(|w| w[0] - 2.0 * w[1] + w[2]).collect()
    }
}

fn check_grid(grid: &[f64]) -> Result<(), LdpError> {
    if grid.is_empty() || grid.iter().any(|t| !t.is_finite()) {
        return Err(LdpError::BadGrid);
    }
    Ok(())
}

/// Estimates `Lambda_n(t) = n^{-1} ln E[e^{t Z_n}]`, `Z_n` a sum of `n`
/// draws. Sample `i` reads its `n` draws from stream `i` of `seed`.
pub fn empirical_scgf<S>(
    sampler: S,
    n: usize,
    t_grid: &[f64],
    n_samples: usize,
    seed: u64,
    method: ScgfMethod,
    workers: usize,
) -> Result<ScgfEstimate, LdpError>
where
    S: Fn(&mut SimRng) -> f64 + Sync,
{
    if n_samples < 100 {
        return Err(LdpError::TooFew { what: "n_samples", min: 100, got: n_samples });
    }
    if n == 0 {
        return Err(LdpError::TooFew { what: "n", min: 1, got: 0 });
    }
    check_grid(t_grid)?;
    let draws: Vec<Vec<f64>> = map_indexed(n_samples, workers, |i| {
        let mut rng = stream_rng(seed, i as u64);
        (0..n).map(|_| sampler(&mut rng)).collect()
    });
    let ln_count = (n_samples as f64).ln();
    let lambda_hat: Vec<f64> = map_indexed(t_grid.len(), workers, |k| {
        let t = t_grid[k];
        if t == 0.0 {
            return 0.0;
        }
        match method {
            ScgfMethod::SumSamples => {
                let sums = draws.iter().map(|row| t * row.iter().sum::<f64>());
                (log_sum_exp(sums) - ln_count) / n as f64
            }
            ScgfMethod::PositionProduct => {
                let total: f64 = (0..n).map(|j| log_sum_exp(draws.iter().map(|row| t * row[j])) - ln_count).sum();
                total / n as f64
            }
        }
    });
    let overflow = lambda_hat.iter().map(|v| !v.is_finite()).collect();
    Ok(ScgfEstimate { t_grid: t_grid.to_vec(), lambda_hat, overflow, n, n_samples, method })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateFunction {
    pub x_grid: Vec<f64>,
    pub q_hat: Vec<f64>,
    /// The maximizing `t` sat on the edge of the usable grid, so the true
    /// supremum may be larger.
    pub boundary: Vec<bool>,
}

/// `sup_k [x s_k - f_k]` over a finite grid, with the maximizing index.
pub fn conjugate_on_grid(s: &[f64], f: &[f64], x: f64) -> (f64, usize) {
    let mut best = (f64::NEG_INFINITY, 0);
    for (k, (&sk, &fk)) in s.iter().zip(f).enumerate() {
        let v = x * sk - fk;
        if v > best.0 {
            best = (v, k);
        }
    }
    best
}

/// `Q(x) = max_t [x t - Lambda(t)]` over the non-overflowed grid points.
pub fn legendre_transform(scgf: &ScgfEstimate, x_grid: &[f64]) -> Result<RateFunction, LdpError> {
    check_grid(x_grid)?;
    let (t, l): (Vec<f64>, Vec<f64>) = scgf
        .t_grid
        .iter()
        .zip(&scgf.lambda_hat)
        .zip(&scgf.overflow)
        .filter(|(_, bad)| !**bad)
        .map(|((&t, &l), _)| (t, l))
        .unzip();
    if t.is_empty() {
        return Err(LdpError::EmptyUsableGrid);
    }
    let (mut q_hat, mut boundary) = (Vec::with_capacity(x_grid.len()), Vec::with_capacity(x_grid.len()));
    for &x in x_grid {
        let (q, k) = conjugate_on_grid(&t, &l, x);
        q_hat.push(q);
        boundary.push(k == 0 || k + 1 == t.len());
    }
    Ok(RateFunction { x_grid: x_grid.to_vec(), q_hat, boundary })
}

/// `[lo, lo + step, ..., hi]` computed from integer offsets.
pub fn uniform_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let count = ((hi - lo) / step).round() as usize;
    (0..=count).map(|k| if k == count { hi } else { lo + k as f64 * step }).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TailEstimator {
    /// Fraction of plain samples whose mean reaches `x`.
    #[default]
    Direct,
    /// Samples from the law tilted to have mean `x`, weighted back by
    /// `exp(-theta S + n cumulant(theta))`; observes tails far below
    /// `1 / n_samples`.
    Tilted,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayRow {
    pub n: usize,
    /// Samples that reached the threshold.
    pub hits: usize,
    pub p_hat: f64,
    pub p_std_error: f64,
    /// `-n^{-1} ln p_hat`; `None` when no sample reached the threshold.
    pub rate: Option<f64>,
    pub rate_std_error: Option<f64>,
    /// `-n^{-1} ln P(mean >= x)` from the exact tail.
    pub exact_tail_rate: f64,
    /// `-n^{-1} ln(p_hat / c_n)` with `c_n` the Bahadur–Rao prefactor,
    /// which removes the `O(ln n / n)` bias of the raw rate.
    pub prefactor_corrected_rate: Option<f64>,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayTable {
    pub distribution: Distribution,
    pub x: f64,
    pub analytic_rate: f64,
    pub estimator: TailEstimator,
    pub n_samples: usize,
    pub seed: u64,
    pub rows: Vec<DecayRow>,
}

const THRESHOLD_SLACK: f64 = 1e-9;

fn lattice_threshold(n: usize, x: f64) -> usize {
    (n as f64 * x - THRESHOLD_SLACK).ceil().max(0.0) as usize
}

/// `ln P(mean of n draws >= x)`, exactly.
pub fn exact_log_tail(dist: &Distribution, n: usize, x: f64) -> f64 {
    match *dist {
        Distribution::Bernoulli { p } => {
            let k0 = lattice_threshold(n, x);
            if k0 > n {
                return f64::NEG_INFINITY;
            }
            let (lp, lq) = (p.ln(), (1.0 - p).ln());
            log_sum_exp((k0..=n).map(|k| ln_binomial(n as u64, k as u64) + k as f64 * lp + (n - k) as f64 * lq))
        }
        Distribution::Gaussian { mu, sigma } => {
            let z = (x - mu) * (n as f64).sqrt() / sigma;
            Normal::new(0.0, 1.0).expect("standard normal").sf(z).ln()
        }
    }
}

/// Bahadur–Rao prefactor `c_n` in `P(mean >= x) ~ c_n e^{-n I(x)}`.
pub fn bahadur_rao_prefactor(dist: &Distribution, n: usize, x: f64) -> f64 {
    let tau = dist.saddle_point(x);
    let root = (2.0 * std::f64::consts::PI * n as f64).sqrt();
    match *dist {
        Distribution::Bernoulli { .. } => {
            // lattice of span 1; the threshold is rounded up to an integer
            let overshoot = lattice_threshold(n, x) as f64 - n as f64 * x;
            let sigma = (x * (1.0 - x)).sqrt();
            (-tau * overshoot).exp() / ((1.0 - (-tau).exp()) * sigma * root)
        }
        Distribution::Gaussian { sigma, .. } => 1.0 / (tau * sigma * root),
    }
}

/// Empirical decay rates of `P(mean >= x)` for each `n`, next to the exact
/// tail and the closed-form rate. Row `r` uses stream `r` of `seed`;
/// sample `i` within it uses the derived stream `i`.
pub fn ldp_decay_check(
    dist: &Distribution,
    x: f64,
    n_list: &[usize],
    n_samples: usize,
    seed: u64,
    estimator: TailEstimator,
    workers: usize,
) -> Result<DecayTable, LdpError> {
    if x < dist.mean() {
        return Err(LdpError::NotAboveMean { x, mean: dist.mean() });
    }
    if n_samples < 100 {
        return Err(LdpError::TooFew { what: "n_samples", min: 100, got: n_samples });
    }
    let analytic_rate = upper_tail_rate(dist, x).value;
    let at_mean = x == dist.mean();
    let theta = if at_mean { 0.0 } else { dist.saddle_point(x) };
    let proposal = match estimator {
        TailEstimator::Direct => *dist,
        TailEstimator::Tilted => dist.tilted(theta),
    };
    let mut rows = Vec::with_capacity(n_list.len());
    for (r, &n) in n_list.iter().enumerate() {
        let row_seed = crate::seed::derive_seed(seed, r as u64);
        let threshold = n as f64 * x - THRESHOLD_SLACK;
        let log_norm = n as f64 * dist.cumulant(theta);
        let contributions = map_indexed(n_samples, workers, |i| {
            let mut rng = stream_rng(row_seed, i as u64);
            let s: f64 = (0..n).map(|_| proposal.sample(&mut rng)).sum();
            if s < threshold {
                return (false, 0.0);
            }
            let w = match estimator {
                TailEstimator::Direct => 1.0,
                TailEstimator::Tilted => (-theta * s + log_norm).exp(),
            };
            (true, w)
        });
        let hits = contributions.iter().filter(|c| c.0).count();
        let count = n_samples as f64;
        let p_hat = contributions.iter().map(|c| c.1).sum::<f64>() / count;
        let second = contributions.iter().map(|c| c.1 * c.1).sum::<f64>() / count;
        let p_std_error = ((second - p_hat * p_hat).max(0.0) / count).sqrt();
        let exact_tail_rate = -exact_log_tail(dist, n, x) / n as f64;
        let (rate, rate_std_error, corrected) = if hits == 0 {
            (None, None, None)
        } else {
            let rate = -p_hat.ln() / n as f64;
            let corrected = if at_mean { None } else { Some(-(p_hat / bahadur_rao_prefactor(dist, n, x)).ln() / n as f64) };
            (Some(rate), Some(p_std_error / p_hat / n as f64), corrected)
        };
        rows.push(DecayRow {
            n,
            hits,
            p_hat,
            p_std_error,
            rate,
            rate_std_error,
            exact_tail_rate,
            prefactor_corrected_rate: corrected,
            flagged: hits == 0,
        });
    }
    Ok(DecayTable { distribution: *dist, x, analytic_rate, estimator, n_samples, seed, rows })
}

#[cfg(test)]
mod tests;
