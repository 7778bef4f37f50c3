//! Exact integer determinants by fraction-free (Bareiss) elimination.

use num_bigint::BigInt;
use num_traits::{CheckedMul, CheckedSub, One, Zero};

use crate::complex::TriangleSet;

/// Bareiss elimination over any exact ring; `None` means an intermediate
/// overflowed the representation.
fn bareiss<T>(mut m: Vec<Vec<T>>) -> Option<T>
where
    T: Clone + Zero + One + CheckedMul + CheckedSub + std::ops::Div<Output = T> + std::ops::Neg<Output = T>,
{
    let n = m.len();
    if n == 0 {
        return Some(T::one());
    }
    let mut negate = false;
    let mut prev = T::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return Some(T::zero());
            };
            m.swap(k, swap);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let a = m[i][j].checked_mul(&m[k][k])?;
                let b = m[i][k].checked_mul(&m[k][j])?;
                // exact division by construction
                m[i][j] = a.checked_sub(&b)? / prev.clone();
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    Some(if negate { -det } else { det })
}

/// Exact determinant of a small integer matrix.
pub fn determinant(m: &[Vec<i64>]) -> BigInt {
    let small: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    if let Some(d) = bareiss(small) {
        return BigInt::from(d);
    }
    let big: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    bareiss(big).expect("big integers do not overflow")
}

/// `A * A^T` for the vertex-triangle incidence matrix `A`: entry `(u, v)`
/// counts the triangles containing both `u` and `v`.
pub fn incidence_gram(c: &TriangleSet) -> Vec<Vec<i64>> {
    let n = c.n();
    let mut m = vec![vec![0i64; n]; n];
    for t in c.triangles() {
        let vs = t.vertices().map(|v| v as usize - 1);
        for &a in &vs {
            for &b in &vs {
                m[a][b] += 1;
            }
        }
    }
    m
}

/// The Altshuler-Steinberg determinant `det(A * A^T)`.
pub fn as_determinant(c: &TriangleSet) -> BigInt {
    determinant(&incidence_gram(c))
}
