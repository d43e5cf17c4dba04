use num_bigint::BigInt;
use num_traits::Zero;

use super::ZetaError;
use crate::graph::{ArcIndex, Graph};

/// Non-backtracking arc operator: `B[a][b] = 1` iff `head(a) = tail(b)` and
/// `b` is not the reverse of `a`. Stored as successor lists.
#[derive(Debug, Clone)]
pub struct HashimotoMatrix {
    arcs: ArcIndex,
    successors: Vec<Vec<usize>>,
}

pub fn hashimoto_matrix(g: &Graph) -> Result<HashimotoMatrix, ZetaError> {
    if !g.is_unit_weight() {
        return Err(ZetaError::Weighted);
    }
    let arcs = ArcIndex::new(g);
    let successors = (0..arcs.len())
        .map(|a| arcs.non_backtracking_successors(a).collect())
        .collect();
    Ok(HashimotoMatrix { arcs, successors })
}

impl HashimotoMatrix {
    pub fn dim(&self) -> usize {
        self.successors.len()
    }

    pub fn arcs(&self) -> &ArcIndex {
        &self.arcs
    }

    pub fn successors(&self, a: usize) -> &[usize] {
        &self.successors[a]
    }

    pub fn entry(&self, a: usize, b: usize) -> u8 {
        u8::from(self.successors[a].contains(&b))
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        (0..self.dim())
            .map(|a| (0..self.dim()).map(|b| self.entry(a, b)).collect())
            .collect()
    }

    pub fn row_sums(&self) -> Vec<usize> {
        self.successors.iter().map(Vec::len).collect()
    }

    /// `trace(B^m)` for `m = 1..=max_m`, exactly.
    pub fn trace_powers(&self, max_m: usize) -> Vec<BigInt> {
        let d = self.dim();
        let mut traces = vec![BigInt::zero(); max_m];
        let mut cur = vec![BigInt::zero(); d];
        let mut next = vec![BigInt::zero(); d];
        for start in 0..d {
            cur.iter_mut().for_each(|x| x.set_zero());
            cur[start] = BigInt::from(1);
            for trace in traces.iter_mut() {
                next.iter_mut().for_each(|x| x.set_zero());
                for (a, count) in cur.iter().enumerate() {
                    if count.is_zero() {
                        continue;
                    }
                    for &b in &self.successors[a] {
                        next[b] += count;
                    }
                }
                std::mem::swap(&mut cur, &mut next);
                *trace += &cur[start];
            }
        }
        traces
    }

    /// Perron eigenvalue bracket `(lower, upper)` by power iteration on
    /// `B + I`, using the Collatz-Wielandt bounds
    /// `min_a (Bx)_a / x_a <= rho(B) <= max_a (Bx)_a / x_a` for positive `x`.
    pub fn spectral_radius_bracket(&self, rel_tol: f64, max_iter: usize) -> Result<(f64, f64, usize), ZetaError> {
        let d = self.dim();
        if d == 0 {
            return Err(ZetaError::NoConvergence { iterations: 0 });
        }
        let mut x = vec![1.0f64; d];
        let mut bx = vec![0.0f64; d];
        for it in 0..max_iter {
            for (a, out) in bx.iter_mut().enumerate() {
                *out = self.successors[a].iter().map(|&b| x[b]).sum();
            }
            let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
            for a in 0..d {
                let r = bx[a] / x[a];
                lo = lo.min(r);
                hi = hi.max(r);
            }
            if hi - lo <= rel_tol * hi {
                return Ok((lo, hi, it + 1));
            }
            let mut norm = 0.0f64;
            for a in 0..d {
                x[a] += bx[a];
                norm = norm.max(x[a]);
            }
            x.iter_mut().for_each(|v| *v /= norm);
        }
        Err(ZetaError::NoConvergence { iterations: max_iter })
    }
}
