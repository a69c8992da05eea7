//! Gram matrices of the orbit basis used by the clique-chain (CCS) star solutions.
//!
//! Basis over branch coordinates `-q1..=q2`: `e₀ = δ₀`, `e_j = (δ_j - δ_{j-1})/√2` for
//! `j > 0` and `e_{-j} = (δ_{-j} - δ_{-j+1})/√2`. Row/column `i` of the returned matrices
//! holds index `i - q1` (see [`two_branch_index`]).

use crate::error::{Error, Result};
use crate::scalar::{from_usize, real, Real};
use nalgebra::DMatrix;

/// Matrix position of basis index `j ∈ -q1..=q2`.
pub fn two_branch_index(q1: usize, j: i64) -> usize {
    (j + q1 as i64) as usize
}

fn basis_gram<T: Real>(q1: usize, q2: usize) -> DMatrix<T> {
    let dim = q1 + q2 + 1;
    let h = T::one() / real::<T>(2.0).sqrt();
    let mut v = DMatrix::<T>::zeros(dim, dim);
    v[(q1, q1)] = T::one();
    for j in 1..=q2 {
        v[(q1 + j, q1 + j)] = h;
        v[(q1 + j, q1 + j - 1)] = -h;
    }
    for j in 1..=q1 {
        v[(q1 - j, q1 - j)] = h;
        v[(q1 - j, q1 - j + 1)] = -h;
    }
    &v * v.transpose()
}

/// `(q+1)×(q+1)` Gram matrix of the single-branch basis: unit diagonal, `-1/√2` between
/// indices 0 and 1, `-1/2` between consecutive branch indices.
pub fn gram_matrix_ccs<T: Real>(q: usize) -> DMatrix<T> {
    basis_gram(0, q)
}

/// Closed-form inverse of [`gram_matrix_ccs`]: `(0,0) = q+1`, `(0,j) = √2(q-j+1)`,
/// `(i,j) = 2·min(q-i+1, q-j+1)`.
pub fn gram_inverse_ccs<T: Real>(q: usize) -> DMatrix<T> {
    let s2 = real::<T>(2.0).sqrt();
    DMatrix::from_fn(q + 1, q + 1, |i, j| match (i, j) {
        (0, 0) => from_usize::<T>(q + 1),
        (0, k) | (k, 0) => s2 * from_usize::<T>(q - k + 1),
        (a, b) => real::<T>(2.0) * from_usize::<T>((q - a + 1).min(q - b + 1)),
    })
}

/// Gram matrix of the two-branch basis, indices `-q1..=q2`. Besides the single-branch
/// pattern it has `+1/2` between indices `-1` and `1`.
pub fn gram_matrix_two_branch<T: Real>(q1: usize, q2: usize) -> DMatrix<T> {
    basis_gram(q1, q2)
}

/// `2D / ((p-1)G⁻¹₀₀ + 2√(p(p-1)) Σ_{i≠0} G⁻¹₀ᵢ + p Σ_{i,j≠0} G⁻¹ᵢⱼ)`; `zero` is the matrix
/// position of index 0.
fn lambda2_from_inverse<T: Real>(inv: &DMatrix<T>, zero: usize, p: usize, d: T) -> T {
    let pf = from_usize::<T>(p);
    let root = (pf * (pf - T::one())).sqrt();
    let mut row = T::zero();
    let mut block = T::zero();
    for i in 0..inv.nrows() {
        if i == zero {
            continue;
        }
        row += inv[(zero, i)];
        for j in 0..inv.ncols() {
            if j != zero {
                block += inv[(i, j)];
            }
        }
    }
    let denom = (pf - T::one()) * inv[(zero, zero)] + real::<T>(2.0) * root * row + pf * block;
    real::<T>(2.0) * d / denom
}

/// Optimal `λ₂` of the CCS star from the inverse Gram matrix.
pub fn gram_lambda2_ccs<T: Real>(p: usize, q: usize, d: T) -> T {
    lambda2_from_inverse(&gram_inverse_ccs::<T>(q), 0, p, d)
}

pub(crate) fn two_branch_inverse<T: Real>(q1: usize, q2: usize) -> Result<DMatrix<T>> {
    gram_matrix_two_branch::<T>(q1, q2)
        .try_inverse()
        .ok_or_else(|| Error::Numerical(format!("two-branch Gram matrix ({q1},{q2}) is singular")))
}

/// Optimal `λ₂` of the two-branch CCS star from the (numerically inverted) Gram matrix.
pub fn gram_lambda2_two_branch<T: Real>(p: usize, q1: usize, q2: usize, d: T) -> Result<T> {
    let inv = two_branch_inverse::<T>(q1, q2)?;
    Ok(lambda2_from_inverse(&inv, q1, p, d))
}

/// Orbit weights `(w₀, w_j)` from an inverse Gram matrix at scale `s = λ₂`. Index `k` of the
/// result is matrix position `k`.
pub(crate) fn weights_from_inverse<T: Real>(
    inv: &DMatrix<T>,
    zero: usize,
    p: usize,
    s: T,
) -> Vec<T> {
    let pf = from_usize::<T>(p);
    let root = (pf * (pf - T::one())).sqrt();
    let off_zero = |r: usize| {
        (0..inv.ncols())
            .filter(|&i| i != zero)
            .fold(T::zero(), |acc, i| acc + inv[(r, i)])
    };
    (0..inv.nrows())
        .map(|r| {
            if r == zero {
                s * ((pf - T::one()) * inv[(zero, zero)] + root * off_zero(zero))
                    / (pf * (pf - T::one()))
            } else {
                s * (root * inv[(r, zero)] + pf * off_zero(r)) / (real::<T>(2.0) * pf)
            }
        })
        .collect()
}
