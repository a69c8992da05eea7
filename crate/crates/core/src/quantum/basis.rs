//! Generalized Gell-Mann matrices and swap operators.

use crate::error::{Error, Result};
use crate::scalar::{from_usize, real, Real};
use nalgebra::DMatrix;
use num_complex::Complex;

pub type CMatrix<T> = DMatrix<Complex<T>>;

pub(crate) fn c<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

/// `λ₀ = √(2/d)·I` followed by the `d²-1` generators. For `1 ≤ k < j ≤ d` the symmetric
/// off-diagonal `Θ_j^k` sits at `(j-1)² + 2(k-1)`, the antisymmetric `β_j^k` at
/// `(j-1)² + 2k - 1` and the diagonal `η_{j-1}` at `j² - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GellMannBasis<T: Real> {
    d: usize,
    matrices: Vec<CMatrix<T>>,
}

impl<T: Real> GellMannBasis<T> {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn matrix(&self, mu: usize) -> &CMatrix<T> {
        &self.matrices[mu]
    }

    pub fn matrices(&self) -> &[CMatrix<T>] {
        &self.matrices
    }
}

pub fn gell_mann_basis<T: Real>(d: usize) -> Result<GellMannBasis<T>> {
    if d < 2 {
        return Err(Error::Domain(format!("qudit dimension {d} < 2")));
    }
    let zero = CMatrix::<T>::zeros(d, d);
    let mut matrices = vec![zero.clone(); d * d];
    matrices[0] = CMatrix::identity(d, d) * c((real::<T>(2.0) / from_usize::<T>(d)).sqrt());
    // 1-based (j, k) as in the index formulas; e_j^k has its one at row k, column j
    for j in 2..=d {
        for k in 1..j {
            let (r, col) = (k - 1, j - 1);
            let mut theta = zero.clone();
            theta[(r, col)] = c(T::one());
            theta[(col, r)] = c(T::one());
            let mut beta = zero.clone();
            beta[(r, col)] = Complex::new(T::zero(), -T::one());
            beta[(col, r)] = Complex::new(T::zero(), T::one());
            matrices[(j - 1) * (j - 1) + 2 * (k - 1)] = theta;
            matrices[(j - 1) * (j - 1) + 2 * k - 1] = beta;
        }
        let rr = j - 1;
        let rf = from_usize::<T>(rr);
        let scale = (real::<T>(2.0) / (rf * (rf + T::one()))).sqrt();
        let mut eta = zero.clone();
        for i in 0..rr {
            eta[(i, i)] = c(scale);
        }
        eta[(rr, rr)] = c(-scale * rf);
        matrices[j * j - 1] = eta;
    }
    Ok(GellMannBasis { d, matrices })
}

/// `d^n`, or a resource error past `limit`.
pub(crate) fn hilbert_dim(d: usize, n: usize, limit: usize) -> Result<usize> {
    let mut dim = 1usize;
    for _ in 0..n {
        dim = dim
            .checked_mul(d)
            .filter(|&x| x <= limit)
            .ok_or_else(|| Error::Resource(format!("d^N = {d}^{n} exceeds {limit}")))?;
    }
    Ok(dim)
}

/// Base-`d` digits of a basis index, site 1 most significant.
pub(crate) fn digits(mut a: usize, d: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    for slot in out.iter_mut().rev() {
        *slot = a % d;
        a /= d;
    }
    out
}

pub(crate) fn undigits(ds: &[usize], d: usize) -> usize {
    ds.iter().fold(0, |acc, &x| acc * d + x)
}

/// Basis index permutation for a site permutation: digit `i` of the image is digit
/// `perm[i]` of the source.
pub(crate) fn permute_index(a: usize, d: usize, n: usize, perm: &[usize]) -> usize {
    let ds = digits(a, d, n);
    let image: Vec<usize> = perm.iter().map(|&p| ds[p]).collect();
    undigits(&image, d)
}

fn check_sites(n: usize, j: usize, k: usize) -> Result<()> {
    if j == k {
        return Err(Error::Domain(format!("swap of site {j} with itself")));
    }
    if j == 0 || k == 0 || j > n || k > n {
        return Err(Error::Domain(format!("sites ({j},{k}) outside 1..={n}")));
    }
    Ok(())
}

/// Permutation matrix exchanging tensor factors `j` and `k` (1-based).
pub fn swap_operator<T: Real>(d: usize, n: usize, j: usize, k: usize) -> Result<CMatrix<T>> {
    check_sites(n, j, k)?;
    let dim = hilbert_dim(d, n, 1 << 16)?;
    let mut perm: Vec<usize> = (0..n).collect();
    perm.swap(j - 1, k - 1);
    let mut u = CMatrix::zeros(dim, dim);
    for a in 0..dim {
        u[(permute_index(a, d, n, &perm), a)] = c(T::one());
    }
    Ok(u)
}

/// `½ Σ_{μ≥start} λ_μ⊗λ_μ` placed on sites `j`, `k` plus `I/d`. With `start = 1` this is the
/// swap; `start = 0` adds a spurious `I/d`.
pub fn swap_from_gell_mann<T: Real>(
    basis: &GellMannBasis<T>,
    n: usize,
    j: usize,
    k: usize,
    start: usize,
) -> Result<CMatrix<T>> {
    check_sites(n, j, k)?;
    let d = basis.d();
    let dim = hilbert_dim(d, n, 1 << 12)?;
    let id = CMatrix::<T>::identity(d, d);
    let half = c(real::<T>(0.5));
    let mut sum = CMatrix::zeros(dim, dim);
    for lambda in &basis.matrices()[start..] {
        let mut term = CMatrix::<T>::identity(1, 1);
        for site in 1..=n {
            let factor = if site == j || site == k { lambda } else { &id };
            term = term.kronecker(factor);
        }
        sum += term * half;
    }
    Ok(sum + CMatrix::identity(dim, dim) * c(T::one() / from_usize::<T>(d)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::ComplexField;

    fn max_dev(a: &CMatrix<f64>, b: &CMatrix<f64>) -> f64 {
        (a - b).iter().map(|z| z.modulus()).fold(0.0, f64::max)
    }

    fn trace(m: &CMatrix<f64>) -> Complex<f64> {
        m.trace()
    }

    #[test]
    fn qubit_basis_is_pauli() {
        let b = gell_mann_basis::<f64>(2).unwrap();
        let i = Complex::new(0.0, 1.0);
        let o = Complex::new(0.0, 0.0);
        let one = Complex::new(1.0, 0.0);
        let x = CMatrix::from_row_slice(2, 2, &[o, one, one, o]);
        let y = CMatrix::from_row_slice(2, 2, &[o, -i, i, o]);
        let z = CMatrix::from_row_slice(2, 2, &[one, o, o, -one]);
        assert!(max_dev(b.matrix(0), &CMatrix::identity(2, 2)) < 1e-15);
        assert!(max_dev(b.matrix(1), &x) < 1e-15);
        assert!(max_dev(b.matrix(2), &y) < 1e-15);
        assert!(max_dev(b.matrix(3), &z) < 1e-15);
    }

    #[test]
    fn trace_orthogonality() {
        for d in 2..=4 {
            let b = gell_mann_basis::<f64>(d).unwrap();
            assert_eq!(b.len(), d * d);
            for (mu, lm) in b.matrices().iter().enumerate() {
                assert!(max_dev(lm, &lm.adjoint()) < 1e-14);
                for (nu, ln) in b.matrices().iter().enumerate() {
                    let t = trace(&(lm * ln));
                    let expect = if mu == nu { 2.0 } else { 0.0 };
                    assert!(
                        (t - Complex::new(expect, 0.0)).norm() < 1e-13,
                        "d={d} ({mu},{nu})"
                    );
                }
            }
        }
    }

    #[test]
    fn rejects_small_dimension() {
        assert!(gell_mann_basis::<f64>(1).is_err());
    }

    #[test]
    fn two_qubit_swap() {
        let u = swap_operator::<f64>(2, 2, 1, 2).unwrap();
        let re: Vec<f64> = u.transpose().iter().map(|z| z.re).collect();
        assert_eq!(
            re,
            vec![1., 0., 0., 0., 0., 0., 1., 0., 0., 1., 0., 0., 0., 0., 0., 1.]
        );
    }

    #[test]
    fn swap_is_involution() {
        for (d, n, j, k) in [(2, 3, 1, 3), (3, 2, 1, 2), (2, 4, 2, 4)] {
            let u = swap_operator::<f64>(d, n, j, k).unwrap();
            let dim = u.nrows();
            assert!(max_dev(&(&u * &u), &CMatrix::identity(dim, dim)) < 1e-15);
        }
        assert!(matches!(
            swap_operator::<f64>(2, 3, 2, 2),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn gell_mann_sum_from_one_is_swap() {
        for (d, n, j, k) in [(2, 2, 1, 2), (3, 2, 1, 2), (2, 3, 1, 3), (3, 3, 2, 3)] {
            let b = gell_mann_basis::<f64>(d).unwrap();
            let u = swap_operator::<f64>(d, n, j, k).unwrap();
            let from_sum = swap_from_gell_mann(&b, n, j, k, 1).unwrap();
            assert!(max_dev(&u, &from_sum) < 1e-13, "d={d} n={n}");
        }
    }

    #[test]
    fn gell_mann_sum_from_zero_double_counts_identity() {
        let b = gell_mann_basis::<f64>(2).unwrap();
        let u = swap_operator::<f64>(2, 2, 1, 2).unwrap();
        let printed = swap_from_gell_mann(&b, 2, 1, 2, 0).unwrap();
        let excess = &printed - &u;
        assert!(max_dev(&excess, &(CMatrix::identity(4, 4) * Complex::new(0.5, 0.0))) < 1e-15);
    }
}
