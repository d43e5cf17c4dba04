//! Exact integer linear algebra and dense integer polynomials.
//!
//! Shared by the zeta pipeline (Bass determinant, Matrix-Tree counts) and
//! the Pfaffian matching counter. Nothing in here touches floating point.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Determinant of a square integer matrix by fraction-free (Bareiss)
/// elimination with row pivoting. Every intermediate division is exact.
pub fn bareiss_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    debug_assert!(m.iter().all(|row| row.len() == n), "matrix must be square");
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Convenience wrapper for small signed matrices.
pub fn determinant_i64(m: &[Vec<i64>]) -> BigInt {
    bareiss_determinant(
        m.iter()
            .map(|row| row.iter().map(|&x| BigInt::from(x)).collect())
            .collect(),
    )
}

/// Product of two dense polynomials (coefficient of `u^j` at index `j`).
pub fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Product truncated to terms of degree `<= max_degree`.
pub fn poly_mul_trunc(a: &[BigInt], b: &[BigInt], max_degree: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); max_degree + 1];
    for (i, x) in a.iter().enumerate().take(max_degree + 1) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(max_degree + 1 - i) {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn poly_pow(base: &[BigInt], exp: u32) -> Vec<BigInt> {
    let mut acc = vec![BigInt::one()];
    for _ in 0..exp {
        acc = poly_mul(&acc, base);
    }
    acc
}

/// Coefficients of `p(u) / q(u)` as a power series through `u^max_degree`.
/// Requires `q(0) = ±1` so the quotient stays integral.
pub fn series_div(p: &[BigInt], q: &[BigInt], max_degree: usize) -> Option<Vec<BigInt>> {
    let q0 = q.first()?;
    if !(q0.is_one() || (-q0).is_one()) {
        return None;
    }
    let mut out = vec![BigInt::zero(); max_degree + 1];
    for k in 0..=max_degree {
        let mut acc = p.get(k).cloned().unwrap_or_default();
        for j in 1..=k.min(q.len().saturating_sub(1)) {
            acc -= &q[j] * &out[k - j];
        }
        out[k] = acc * q0;
    }
    Some(out)
}

/// Formal derivative.
pub fn poly_derivative(p: &[BigInt]) -> Vec<BigInt> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(j, c)| c * BigInt::from(j))
        .collect()
}

pub fn poly_eval(p: &[BigInt], x: &BigInt) -> BigInt {
    p.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
}

/// `k`-th derivative evaluated at `u = 1`: `sum_j c_j * j!/(j-k)!`.
pub fn derivative_at_one(p: &[BigInt], k: usize) -> BigInt {
    let mut total = BigInt::zero();
    for (j, c) in p.iter().enumerate().skip(k) {
        let falling: BigInt = (j - k + 1..=j).map(BigInt::from).product();
        total += c * falling;
    }
    total
}

/// Interpolation nodes `0, 1, -1, 2, -2, ...`.
pub fn symmetric_nodes(count: usize) -> Vec<BigInt> {
    (0..count)
        .map(|i| {
            let k = i.div_ceil(2) as i64;
            BigInt::from(if i % 2 == 1 { k } else { -k })
        })
        .collect()
}

/// Newton interpolation through `(nodes[i], values[i])`, returned in the
/// monomial basis. `None` if any coefficient is not an integer.
pub fn interpolate_integer(nodes: &[BigInt], values: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(nodes.len(), values.len());
    let n = nodes.len();
    if n == 0 {
        return Some(Vec::new());
    }
    let xs: Vec<BigRational> = nodes.iter().cloned().map(BigRational::from_integer).collect();
    let mut dd: Vec<BigRational> = values.iter().cloned().map(BigRational::from_integer).collect();
    for level in 1..n {
        for i in (level..n).rev() {
            let num = &dd[i] - &dd[i - 1];
            let den = &xs[i] - &xs[i - level];
            dd[i] = num / den;
        }
    }
    // Horner on the Newton form: p = dd[n-1]; p = p * (u - x_i) + dd[i].
    let mut coeffs = vec![dd[n - 1].clone()];
    for i in (0..n - 1).rev() {
        let mut next = vec![BigRational::zero(); coeffs.len() + 1];
        for (j, c) in coeffs.iter().enumerate() {
            next[j + 1] += c;
            next[j] -= c * &xs[i];
        }
        next[0] += &dd[i];
        coeffs = next;
    }
    while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
        coeffs.pop();
    }
    coeffs
        .into_iter()
        .map(|c| c.is_integer().then(|| c.to_integer()))
        .collect()
}

/// Integer square root if `x` is a perfect square.
pub fn exact_sqrt(x: &BigInt) -> Option<BigInt> {
    if x.is_negative() {
        return None;
    }
    let r = x.sqrt();
    (&r * &r == *x).then_some(r)
}

/// gcd over a sequence, zero for an empty one.
pub fn gcd_all(values: impl IntoIterator<Item = u64>) -> u64 {
    values.into_iter().fold(0, |acc, v| acc.gcd(&v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn bareiss_matches_cofactor_on_small_cases() {
        assert_eq!(determinant_i64(&[vec![2, 1], vec![1, 3]]), BigInt::from(5));
        assert_eq!(
            determinant_i64(&[vec![0, 1, 2], vec![1, 0, 3], vec![4, -3, 8]]),
            BigInt::from(-2)
        );
        // pivot needed at the very first step
        assert_eq!(determinant_i64(&[vec![0, 1], vec![1, 0]]), BigInt::from(-1));
        assert_eq!(determinant_i64(&[vec![1, 2], vec![2, 4]]), BigInt::zero());
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        let p = big(&[1, 0, -2, 0, 0, 0, 1]);
        let nodes = symmetric_nodes(7);
        let values: Vec<BigInt> = nodes.iter().map(|x| poly_eval(&p, x)).collect();
        assert_eq!(interpolate_integer(&nodes, &values).unwrap(), p);
    }

    #[test]
    fn series_division_inverts_multiplication() {
        let q = big(&[1, -3, 2]);
        let p = big(&[1, 4, 0, 7]);
        let prod = poly_mul(&p, &q);
        let back = series_div(&prod, &q, 6).unwrap();
        assert_eq!(back, big(&[1, 4, 0, 7, 0, 0, 0]));
    }

    #[test]
    fn derivative_at_one_of_cube() {
        // (1-u)^3 has third derivative -6 everywhere
        let p = poly_pow(&big(&[1, -1]), 3);
        assert_eq!(derivative_at_one(&p, 3), BigInt::from(-6));
        assert_eq!(derivative_at_one(&p, 1), BigInt::zero());
    }

    #[test]
    fn perfect_squares() {
        assert_eq!(exact_sqrt(&BigInt::from(1296)), Some(BigInt::from(36)));
        assert_eq!(exact_sqrt(&BigInt::from(1297)), None);
        assert_eq!(gcd_all([6, 9, 15]), 3);
    }
}
