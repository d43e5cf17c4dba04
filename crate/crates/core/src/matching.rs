//! Perfect matchings on rectangular grids via a Kasteleyn (Pfaffian)
//! orientation, with an exhaustive counter as oracle.

use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

use crate::exact::{determinant_i64, exact_sqrt};
use crate::graph::Graph;

#[derive(Debug, Error)]
pub enum MatchingError {
    #[error("grid dimensions must be at least 1x1 (got {rows}x{cols})")]
    EmptyGrid { rows: usize, cols: usize },
    #[error("exhaustive counting supports at most {limit} vertices, graph has {n}")]
    TooLarge { n: usize, limit: usize },
    #[error("det K = {0} is not a perfect square; orientation is not Pfaffian")]
    NotPerfectSquare(BigInt),
}

pub const BRUTE_FORCE_LIMIT: usize = 20;

/// Grid with vertex `r * cols + c` and every edge oriented.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrientedGrid {
    rows: usize,
    cols: usize,
    arcs: Vec<(usize, usize)>,
    skew: Vec<Vec<i64>>,
}

impl OrientedGrid {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn n_vertices(&self) -> usize {
        self.rows * self.cols
    }

    /// Oriented edges `(tail, head)`.
    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    /// `K[u][v] = 1` for an arc `u -> v`, `-1` for `v -> u`, else 0.
    pub fn skew_matrix(&self) -> &[Vec<i64>] {
        &self.skew
    }

    fn vertex(&self, r: usize, c: usize) -> usize {
        r * self.cols + c
    }

    /// Number of clockwise-oriented edges on the unit face whose top-left
    /// corner is `(r, c)`, walking the boundary clockwise.
    pub fn clockwise_count(&self, r: usize, c: usize) -> usize {
        let corners = [
            self.vertex(r, c),
            self.vertex(r, c + 1),
            self.vertex(r + 1, c + 1),
            self.vertex(r + 1, c),
        ];
        (0..4).filter(|&i| self.skew[corners[i]][corners[(i + 1) % 4]] == 1).count()
    }

    /// Top-left corners of faces with an even clockwise count.
    pub fn failing_faces(&self) -> Vec<(usize, usize)> {
        let mut bad = Vec::new();
        for r in 0..self.rows.saturating_sub(1) {
            for c in 0..self.cols.saturating_sub(1) {
                if self.clockwise_count(r, c).is_multiple_of(2) {
                    bad.push((r, c));
                }
            }
        }
        bad
    }

    pub fn to_graph(&self) -> Graph {
        crate::graph::named::grid(self.rows, self.cols)
    }
}

/// Horizontal edges point right. Vertical edges point down in even columns
/// and up in odd columns, so each unit face has one or three clockwise
/// edges.
pub fn kasteleyn_orient(rows: usize, cols: usize) -> Result<OrientedGrid, MatchingError> {
    if rows == 0 || cols == 0 {
        return Err(MatchingError::EmptyGrid { rows, cols });
    }
    let n = rows * cols;
    let mut arcs = Vec::with_capacity(2 * n);
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                arcs.push((v, v + 1));
            }
            if r + 1 < rows {
                let below = v + cols;
                arcs.push(if c % 2 == 0 { (v, below) } else { (below, v) });
            }
        }
    }
    let mut skew = vec![vec![0i64; n]; n];
    for &(a, b) in &arcs {
        skew[a][b] = 1;
        skew[b][a] = -1;
    }
    assert!((0..n).all(|i| (0..n).all(|j| skew[i][j] == -skew[j][i])), "K must be antisymmetric");
    let og = OrientedGrid { rows, cols, arcs, skew };
    debug_assert!(og.failing_faces().is_empty());
    Ok(og)
}

/// `sqrt(det K)` by exact fraction-free elimination. Odd vertex counts
/// return 0 without touching the determinant.
pub fn count_matchings_fkt(og: &OrientedGrid) -> Result<BigInt, MatchingError> {
    if og.n_vertices() % 2 == 1 {
        return Ok(BigInt::from(0));
    }
    let det = determinant_i64(&og.skew);
    exact_sqrt(&det).ok_or(MatchingError::NotPerfectSquare(det))
}

/// Exhaustive count: match the lowest unmatched vertex along each of its
/// edges in turn. Parallel edges count as distinct matchings.
pub fn brute_force_matchings(g: &Graph) -> Result<u128, MatchingError> {
    let n = g.n_vertices();
    if n > BRUTE_FORCE_LIMIT {
        return Err(MatchingError::TooLarge { n, limit: BRUTE_FORCE_LIMIT });
    }
    if n % 2 == 1 {
        return Ok(0);
    }
    fn recurse(g: &Graph, matched: u32, full: u32) -> u128 {
        if matched == full {
            return 1;
        }
        let v = (!matched).trailing_zeros() as usize;
        g.incident(v)
            .iter()
            .filter(|inc| matched & (1 << inc.neighbor) == 0)
            .map(|inc| recurse(g, matched | (1 << v) | (1 << inc.neighbor), full))
            .sum()
    }
    let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    Ok(recurse(g, 0, full))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::{complete, cycle, path};

    #[test]
    fn orientation_examples() {
        let one = kasteleyn_orient(1, 2).unwrap();
        assert_eq!(one.skew_matrix(), &[vec![0, 1], vec![-1, 0]]);
        let square = kasteleyn_orient(2, 2).unwrap();
        assert_eq!(square.clockwise_count(0, 0) % 2, 1);
        let g = kasteleyn_orient(3, 4).unwrap();
        assert!(g.failing_faces().is_empty());
        assert_eq!(g.arcs().len(), g.to_graph().n_edges());
        assert!(kasteleyn_orient(0, 3).is_err());
    }

    #[test]
    fn row_parity_alternation_breaks_the_face_condition() {
        // verticals alternating by row instead of by column
        let (rows, cols) = (3, 3);
        let mut og = kasteleyn_orient(rows, cols).unwrap();
        for r in 0..rows - 1 {
            for c in 0..cols {
                let (a, b) = (r * cols + c, (r + 1) * cols + c);
                let s = if r % 2 == 0 { 1 } else { -1 };
                og.skew[a][b] = s;
                og.skew[b][a] = -s;
            }
        }
        assert_eq!(og.failing_faces().len(), 4);
    }

    #[test]
    fn fkt_examples() {
        let count = |r, c| count_matchings_fkt(&kasteleyn_orient(r, c).unwrap()).unwrap();
        assert_eq!(count(2, 2), BigInt::from(2));
        assert_eq!(count(2, 3), BigInt::from(3));
        assert_eq!(count(4, 4), BigInt::from(36));
        assert_eq!(count(3, 3), BigInt::from(0));
        assert_eq!(count(8, 8), BigInt::from(12_988_816));
    }

    #[test]
    fn brute_force_examples() {
        assert_eq!(brute_force_matchings(&cycle(3)).unwrap(), 0);
        assert_eq!(brute_force_matchings(&path(2)).unwrap(), 1);
        assert_eq!(brute_force_matchings(&complete(4)).unwrap(), 3);
        assert_eq!(brute_force_matchings(&cycle(6)).unwrap(), 2);
        let doubled = Graph::from_pairs(2, &[(0, 1), (0, 1)]).unwrap();
        assert_eq!(brute_force_matchings(&doubled).unwrap(), 2);
        assert!(brute_force_matchings(&complete(22)).is_err());
    }

    #[test]
    fn fkt_agrees_with_brute_force_up_to_4x5() {
        for rows in 1..=4 {
            for cols in 1..=5 {
                let og = kasteleyn_orient(rows, cols).unwrap();
                assert!(og.failing_faces().is_empty());
                let fkt = count_matchings_fkt(&og).unwrap();
                let brute = brute_force_matchings(&og.to_graph()).unwrap();
                assert_eq!(fkt, BigInt::from(brute), "{rows}x{cols}");
            }
        }
    }
}
