//! Brute-force references for the zeta pipeline. The loop census walks
//! graph edges directly and shares no code with the Bass determinant route.

use num_bigint::BigInt;
use num_traits::One;

use super::ZetaError;
use crate::graph::Graph;

/// Longest loop length the exhaustive census accepts.
pub const MAX_ENUMERATION_LENGTH: usize = 14;

fn is_lyndon(word: &[usize]) -> bool {
    let m = word.len();
    (1..m).all(|shift| {
        for i in 0..m {
            let (a, b) = (word[i], word[(i + shift) % m]);
            if a != b {
                return a < b;
            }
        }
        false
    })
}

/// Visit the Lyndon representative of every prime loop with at most
/// `max_len` edges. Directed edge `2e` runs `u -> v` along edge `e`, `2e + 1`
/// runs back.
///
/// A prime loop is a cyclic sequence of directed edges with no immediate
/// reversal anywhere (including across the wrap-around), that is not a
/// power of a shorter sequence. Rotations are identified; a loop and its
/// reversal are different loops.
fn for_each_prime_loop(g: &Graph, max_len: usize, mut visit: impl FnMut(&[usize])) {
    let m = g.n_edges();
    let tail = |a: usize| {
        let e = g.edge(a / 2);
        if a.is_multiple_of(2) { e.u } else { e.v }
    };
    let head = |a: usize| {
        let e = g.edge(a / 2);
        if a.is_multiple_of(2) { e.v } else { e.u }
    };
    let mut out_arcs = vec![Vec::new(); g.n_vertices()];
    for a in 0..2 * m {
        out_arcs[tail(a)].push(a);
    }
    let follows = |prev: usize, next: usize| head(prev) == tail(next) && next / 2 != prev / 2;

    let mut word = Vec::with_capacity(max_len);
    let mut cursor: Vec<usize> = Vec::with_capacity(max_len);
    for start in 0..2 * m {
        word.clear();
        cursor.clear();
        word.push(start);
        cursor.push(0);
        while let Some(&last) = word.last() {
            let len = word.len();
            let idx = *cursor.last().unwrap();
            if idx == 0 && len >= 2 && follows(last, start) && is_lyndon(&word) {
                visit(&word);
            }
            let candidates = &out_arcs[head(last)];
            if len < max_len && idx < candidates.len() {
                *cursor.last_mut().unwrap() += 1;
                let next = candidates[idx];
                if next >= start && follows(last, next) {
                    word.push(next);
                    cursor.push(0);
                }
            } else {
                word.pop();
                cursor.pop();
            }
        }
    }
}

/// `pi[m]` = number of prime loops of length `m` for `m = 0..=max_len`
/// (`pi[0] = 0`), by exhaustive search over directed edge sequences.
pub fn enumerate_prime_loops(g: &Graph, max_len: usize) -> Result<Vec<u64>, ZetaError> {
    if max_len > MAX_ENUMERATION_LENGTH {
        return Err(ZetaError::EnumerationTooLong { max_len, limit: MAX_ENUMERATION_LENGTH });
    }
    if !g.is_unit_weight() {
        return Err(ZetaError::Weighted);
    }
    let mut pi = vec![0u64; max_len + 1];
    for_each_prime_loop(g, max_len, |word| pi[word.len()] += 1);
    Ok(pi)
}

/// Like [`enumerate_prime_loops`] but loops are bucketed by total edge
/// weight, for weights up to `max_weight`.
pub fn enumerate_weighted_prime_loops(g: &Graph, max_weight: usize) -> Result<Vec<u64>, ZetaError> {
    if max_weight > MAX_ENUMERATION_LENGTH {
        return Err(ZetaError::EnumerationTooLong { max_len: max_weight, limit: MAX_ENUMERATION_LENGTH });
    }
    let mut pi = vec![0u64; max_weight + 1];
    for_each_prime_loop(g, max_weight, |word| {
        let w: u64 = word.iter().map(|&a| g.edge(a / 2).weight).sum();
        if w as usize <= max_weight {
            pi[w as usize] += 1;
        }
    });
    Ok(pi)
}

/// Coefficients of `prod_m (1 - u^m)^{pi[m]}` through `u^max_degree`, the
/// truncated Euler product for `1 / zeta`.
pub fn euler_product_truncation(prime_counts: &[u64], max_degree: usize) -> Vec<BigInt> {
    let mut series = vec![BigInt::default(); max_degree + 1];
    series[0] = BigInt::one();
    for (len, &count) in prime_counts.iter().enumerate().skip(1) {
        if len > max_degree {
            break;
        }
        for _ in 0..count {
            for j in (len..=max_degree).rev() {
                let carry = series[j - len].clone();
                series[j] -= carry;
            }
        }
    }
    series
}
