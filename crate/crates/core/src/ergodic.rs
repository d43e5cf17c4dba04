//! Birkhoff averages along measure-preserving maps of `[0, 1)`, empirical
//! L² convergence curves, and a uniformity check on pushed-forward samples.
//!
//! Orbits are computed without floating-point drift. A rotation point is a
//! 64-bit binary fraction and `T^k(x) = x + k α` wraps exactly. A doubling
//! point is a finite bit string and `T^k(x)` is the window starting at bit
//! `k`, so long orbits keep their randomness instead of collapsing to 0.

use rand::Rng;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF, StudentsT};
use thiserror::Error;

use crate::exec::map_indexed;
use crate::seed::stream_rng;

#[derive(Debug, Error)]
pub enum ErgodicError {
    #[error("{0} must be at least {1}")]
    TooFew(&'static str, usize),
    #[error("n_grid must be strictly increasing and start at 1 or more")]
    BadGrid,
    #[error("rotation angle {0} must lie in (0, 1)")]
    BadAngle(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapKind {
    Rotation { alpha: f64 },
    Doubling,
    /// `x -> x^2`: not measure-preserving, kept as a negative control.
    Squaring,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DynamicalSystem {
    map: MapKind,
    alpha_fixed: u64,
}

const TWO_POW_64: f64 = 18_446_744_073_709_551_616.0;

fn to_fixed(x: f64) -> u64 {
    let frac = x - x.floor();
    (frac * TWO_POW_64) as u64
}

fn from_fixed(w: u64) -> f64 {
    (w >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

impl DynamicalSystem {
    pub fn rotation(alpha: f64) -> Result<Self, ErgodicError> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(ErgodicError::BadAngle(alpha));
        }
        Ok(Self { map: MapKind::Rotation { alpha }, alpha_fixed: to_fixed(alpha) })
    }

    pub fn golden_rotation() -> Self {
        Self::rotation((5f64.sqrt() - 1.0) / 2.0).expect("golden angle is in (0, 1)")
    }

    pub fn doubling() -> Self {
        Self { map: MapKind::Doubling, alpha_fixed: 0 }
    }

    pub fn squaring() -> Self {
        Self { map: MapKind::Squaring, alpha_fixed: 0 }
    }

    pub fn map(&self) -> MapKind {
        self.map
    }

    /// Uniform random point carrying enough bits for `n` iterates.
    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Point {
        let words = match self.map {
            MapKind::Doubling => n / 64 + 2,
            _ => 1,
        };
        Point { bits: (0..words).map(|_| rng.random()).collect() }
    }

    /// `T^k(x)` as an `f64` in `[0, 1)`.
    pub fn iterate(&self, x: &Point, k: usize) -> f64 {
        match self.map {
            MapKind::Rotation { .. } => from_fixed(x.bits[0].wrapping_add(self.alpha_fixed.wrapping_mul(k as u64))),
            MapKind::Doubling => from_fixed(x.window(k)),
            MapKind::Squaring => {
                let mut v = x.value();
                for _ in 0..k {
                    v *= v;
                }
                v
            }
        }
    }
}

/// Binary expansion `0.b_0 b_1 b_2 ...`, most significant bit first;
/// bits past the end are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Point {
    bits: Vec<u64>,
}

impl Point {
    pub fn from_f64(x: f64) -> Self {
        Self { bits: vec![to_fixed(x)] }
    }

    pub fn value(&self) -> f64 {
        from_fixed(self.bits[0])
    }

    fn word(&self, i: usize) -> u64 {
        self.bits.get(i).copied().unwrap_or(0)
    }

    fn window(&self, k: usize) -> u64 {
        let (i, off) = (k / 64, k % 64);
        if off == 0 {
            self.word(i)
        } else {
            (self.word(i) << off) | (self.word(i + 1) >> (64 - off))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Observable {
    Constant { value: f64 },
    Identity,
    /// `sin(2 pi x)`
    Sin,
}

impl Observable {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Observable::Constant { value } => value,
            Observable::Identity => x,
            Observable::Sin => (2.0 * std::f64::consts::PI * x).sin(),
        }
    }

    /// Lebesgue integral over `[0, 1)`.
    pub fn space_average(&self) -> f64 {
        match *self {
            Observable::Constant { value } => value,
            Observable::Identity => 0.5,
            Observable::Sin => 0.0,
        }
    }
}

/// `(1/n) sum_{k=1}^{n} h(T^k x0)`.
pub fn birkhoff_average(sys: &DynamicalSystem, h: &Observable, x0: &Point, n: usize) -> f64 {
    assert!(n >= 1, "Birkhoff average needs n >= 1");
    if let Observable::Constant { value } = *h {
        return value;
    }
    let sum: f64 = (1..=n).map(|k| h.eval(sys.iterate(x0, k))).sum();
    sum / n as f64
}

/// Running averages `h_n` at each `n` of an increasing grid, in one pass.
fn birkhoff_along_grid(sys: &DynamicalSystem, h: &Observable, x0: &Point, n_grid: &[usize]) -> Vec<f64> {
    if let Observable::Constant { value } = *h {
        return vec![value; n_grid.len()];
    }
    let mut out = Vec::with_capacity(n_grid.len());
    let mut sum = 0.0;
    let mut k = 0;
    for &n in n_grid {
        while k < n {
            k += 1;
            sum += h.eval(sys.iterate(x0, k));
        }
        out.push(sum / n as f64);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub std_error: f64,
    pub ci95: (f64, f64),
}

/// Least-squares slope of `ln y` against `ln x`. `None` if any `y` is not
/// positive or fewer than three points.
pub fn fit_power_law(x: &[usize], y: &[f64]) -> Option<PowerLawFit> {
    if x.len() < 3 || x.len() != y.len() || y.iter().any(|&v| !(v > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|&v| (v as f64).ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let m = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / m, ly.iter().sum::<f64>() / m);
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let rss: f64 = lx.iter().zip(&ly).map(|(a, b)| (b - my - slope * (a - mx)).powi(2)).sum();
    let dof = m - 2.0;
    let std_error = (rss / dof / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, dof).ok()?.inverse_cdf(0.975);
    Some(PowerLawFit { exponent: slope, std_error, ci95: (slope - t * std_error, slope + t * std_error) })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceCurve {
    pub n_grid: Vec<usize>,
    pub l2_error: Vec<f64>,
    /// `None` when the error is identically zero or the grid is too short.
    pub fit: Option<PowerLawFit>,
}

/// Empirical L² error of `h_n` against the space average, over `n_points`
/// uniform initial points. Point `i` is drawn from stream `i` of `seed`.
pub fn l2_error_curve(
    sys: &DynamicalSystem,
    h: &Observable,
    n_grid: &[usize],
    n_points: usize,
    seed: u64,
    workers: usize,
) -> Result<ConvergenceCurve, ErgodicError> {
    if n_points < 100 {
        return Err(ErgodicError::TooFew("n_points", 100));
    }
    if n_grid.is_empty() || n_grid[0] == 0 || n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ErgodicError::BadGrid);
    }
    let n_max = *n_grid.last().expect("grid is non-empty");
    let target = h.space_average();
    let per_point = map_indexed(n_points, workers, |i| {
        let x0 = sys.random_point(&mut stream_rng(seed, i as u64), n_max);
        birkhoff_along_grid(sys, h, &x0, n_grid)
    });
    let l2_error: Vec<f64> = (0..n_grid.len())
        .map(|j| {
            let ms: f64 = per_point.iter().map(|avgs| (avgs[j] - target).powi(2)).sum::<f64>() / n_points as f64;
            ms.sqrt()
        })
        .collect();
    let fit = fit_power_law(n_grid, &l2_error);
    Ok(ConvergenceCurve { n_grid: n_grid.to_vec(), l2_error, fit })
}

/// `[n0, n0 * ratio, n0 * ratio^2, ...]` up to `n_max`, deduplicated.
pub fn geometric_grid(n0: usize, n_max: usize, ratio: f64) -> Vec<usize> {
    let mut grid: Vec<usize> = Vec::new();
    let mut x = n0 as f64;
    while x <= n_max as f64 + 0.5 {
        let n = x.round() as usize;
        if grid.last() != Some(&n) {
            grid.push(n);
        }
        x *= ratio;
    }
    grid
}

pub const INVARIANCE_BINS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UniformityTest {
    pub chi_square: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pushes `n_samples` uniform points through one application of the map
/// and tests the images for uniformity with a 64-bin chi-square.
pub fn invariance_check(sys: &DynamicalSystem, n_samples: usize, seed: u64) -> Result<UniformityTest, ErgodicError> {
    if n_samples < 10_000 {
        return Err(ErgodicError::TooFew("n_samples", 10_000));
    }
    let mut rng = stream_rng(seed, 0);
    let mut counts = [0u64; INVARIANCE_BINS];
    for _ in 0..n_samples {
        let x = sys.random_point(&mut rng, 1);
        let y = sys.iterate(&x, 1);
        counts[((y * INVARIANCE_BINS as f64) as usize).min(INVARIANCE_BINS - 1)] += 1;
    }
    let expected = n_samples as f64 / INVARIANCE_BINS as f64;
    let chi_square: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let dof = INVARIANCE_BINS - 1;
    let p_value = ChiSquared::new(dof as f64).expect("positive dof").sf(chi_square);
    Ok(UniformityTest { chi_square, dof, p_value })
}
