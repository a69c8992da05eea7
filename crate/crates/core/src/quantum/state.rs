//! Density matrices and their Gell-Mann coefficient tensors.

use super::basis::{c, gell_mann_basis, hilbert_dim, CMatrix};
use crate::error::{Error, Result};
use crate::scalar::{from_usize, real, to_f64, Real};
use nalgebra::{ComplexField, SymmetricEigen};
use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

/// Largest Hilbert-space dimension a state may have.
pub const MAX_DIM: usize = 1024;

/// Real coefficients `ρ_{μ₁..μ_N}`, lexicographic in `μ` with site 1 most significant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientTensor<T> {
    pub d: usize,
    pub n: usize,
    pub coefficients: Vec<T>,
}

impl<T: Copy> CoefficientTensor<T> {
    pub fn index_of(&self, word: &[usize]) -> usize {
        let s = self.d * self.d;
        word.iter().fold(0, |acc, &m| acc * s + m)
    }

    pub fn word_of(&self, index: usize) -> Vec<usize> {
        super::basis::digits(index, self.d * self.d, self.n)
    }

    pub fn get(&self, word: &[usize]) -> T {
        self.coefficients[self.index_of(word)]
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }
}

/// Hermitian, positive semidefinite, unit-trace operator on `N` qudits.
#[derive(Debug, Clone)]
pub struct DensityState<T: Real> {
    d: usize,
    n: usize,
    matrix: CMatrix<T>,
    coefficients: OnceLock<CoefficientTensor<T>>,
}

/// JSON form: row-major `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityJson {
    pub d: usize,
    pub n: usize,
    pub entries: Vec<[f64; 2]>,
}

fn tolerance<T: Real>() -> T {
    real::<T>(1e-10).max(T::default_epsilon() * real(1e3))
}

impl<T: Real> DensityState<T> {
    pub fn new(d: usize, n: usize, matrix: CMatrix<T>) -> Result<Self> {
        let state = Self::unchecked(d, n, matrix)?;
        state.validate()?;
        Ok(state)
    }

    /// Shape checks only; used for intermediate results that are states up to roundoff.
    pub(crate) fn unchecked(d: usize, n: usize, matrix: CMatrix<T>) -> Result<Self> {
        if d < 2 || n == 0 {
            return Err(Error::Domain(format!(
                "need d ≥ 2 and N ≥ 1, got d={d} N={n}"
            )));
        }
        let dim = hilbert_dim(d, n, MAX_DIM)?;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::Domain(format!(
                "matrix is {}x{}, expected {dim}x{dim}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self {
            d,
            n,
            matrix,
            coefficients: OnceLock::new(),
        })
    }

    fn validate(&self) -> Result<()> {
        let tol = tolerance::<T>();
        let m = &self.matrix;
        let scale = m.iter().fold(T::one(), |acc, z| acc.max(z.modulus()));
        for i in 0..m.nrows() {
            for j in 0..=i {
                if (m[(i, j)] - m[(j, i)].conj()).modulus() > tol * scale {
                    return Err(Error::Domain(format!("not Hermitian at ({i},{j})")));
                }
            }
        }
        let tr = m.trace();
        if (tr - c(T::one())).modulus() > tol {
            return Err(Error::Domain(format!("trace {} is not 1", to_f64(tr.re))));
        }
        let low = self.min_eigenvalue()?;
        if low < -tol {
            return Err(Error::Domain(format!(
                "negative eigenvalue {}",
                to_f64(low)
            )));
        }
        Ok(())
    }

    pub fn min_eigenvalue(&self) -> Result<T> {
        let herm = (&self.matrix + self.matrix.adjoint()) * c(real::<T>(0.5));
        let dim = herm.nrows();
        let eig = SymmetricEigen::try_new(herm, T::default_epsilon(), 1000 * dim)
            .ok_or_else(|| Error::Numerical("Hermitian eigensolver did not converge".into()))?;
        Ok(eig
            .eigenvalues
            .iter()
            .fold(T::max_value().unwrap(), |a, &b| a.min(b)))
    }

    pub fn maximally_mixed(d: usize, n: usize) -> Result<Self> {
        let dim = hilbert_dim(d, n, MAX_DIM)?;
        Self::new(
            d,
            n,
            CMatrix::identity(dim, dim) * c(T::one() / from_usize::<T>(dim)),
        )
    }

    /// `|a⟩⟨a|` for the product basis state with the given digits (site 1 first).
    pub fn basis_state(d: usize, sites: &[usize]) -> Result<Self> {
        let n = sites.len();
        let dim = hilbert_dim(d, n, MAX_DIM)?;
        if sites.iter().any(|&s| s >= d) {
            return Err(Error::Domain(format!(
                "basis digits {sites:?} outside 0..{d}"
            )));
        }
        let a = super::basis::undigits(sites, d);
        let mut m = CMatrix::zeros(dim, dim);
        m[(a, a)] = c(T::one());
        Self::new(d, n, m)
    }

    /// `A·A†/Tr(A·A†)` with `A` a complex Gaussian matrix drawn from ChaCha8 at `seed`.
    pub fn random(d: usize, n: usize, seed: u64) -> Result<Self> {
        let dim = hilbert_dim(d, n, MAX_DIM)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || {
            let x: f64 = StandardNormal.sample(&mut rng);
            real::<T>(x)
        };
        let a = CMatrix::from_fn(dim, dim, |_, _| Complex::new(draw(), draw()));
        let m = &a * a.adjoint();
        let tr = m.trace().re;
        Self::new(d, n, m * c(T::one() / tr))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn trace(&self) -> Complex<T> {
        self.matrix.trace()
    }

    /// Largest `|ρ_ab - conj(ρ_ba)|`.
    pub fn hermiticity_error(&self) -> T {
        (&self.matrix - self.matrix.adjoint())
            .iter()
            .fold(T::zero(), |a, z| a.max(z.modulus()))
    }

    /// Frobenius distance.
    pub fn distance(&self, other: &Self) -> T {
        (&self.matrix - &other.matrix)
            .iter()
            .fold(T::zero(), |a, z| a + z.modulus_squared())
            .sqrt()
    }

    pub fn coefficients(&self) -> &CoefficientTensor<T> {
        self.coefficients.get_or_init(|| compute_coefficients(self))
    }

    pub fn to_json_form(&self) -> DensityJson {
        DensityJson {
            d: self.d,
            n: self.n,
            entries: self
                .matrix
                .transpose()
                .iter()
                .map(|z| [to_f64(z.re), to_f64(z.im)])
                .collect(),
        }
    }

    pub fn from_json_form(form: &DensityJson) -> Result<Self> {
        let dim = hilbert_dim(form.d, form.n, MAX_DIM)?;
        if form.entries.len() != dim * dim {
            return Err(Error::Parse(format!(
                "{} entries for a {dim}x{dim} matrix",
                form.entries.len()
            )));
        }
        let m = CMatrix::from_fn(dim, dim, |i, j| {
            let [re, im] = form.entries[i * dim + j];
            Complex::new(real::<T>(re), real::<T>(im))
        });
        Self::new(form.d, form.n, m)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_form()).expect("density serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let form: DensityJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json_form(&form)
    }
}

/// Contracts mode `mode` of an `n`-mode tensor with side `s` against `mat` (`s×s`).
fn apply_mode<T: Real>(
    data: &[Complex<T>],
    s: usize,
    n: usize,
    mode: usize,
    mat: &CMatrix<T>,
) -> Vec<Complex<T>> {
    let right = s.pow((n - mode - 1) as u32);
    let left = s.pow(mode as u32);
    let mut out = vec![c(T::zero()); data.len()];
    for l in 0..left {
        for r in 0..right {
            for i in 0..s {
                let mut acc = c(T::zero());
                for j in 0..s {
                    acc += mat[(i, j)] * data[(l * s + j) * right + r];
                }
                out[(l * s + i) * right + r] = acc;
            }
        }
    }
    out
}

/// Flat pair-tensor index `(p_1..p_N)`, `p_i = a_i·d + b_i`, of matrix entry `(a, b)`.
fn pair_index(a: usize, b: usize, d: usize, n: usize) -> usize {
    let da = super::basis::digits(a, d, n);
    let db = super::basis::digits(b, d, n);
    da.iter()
        .zip(&db)
        .fold(0, |acc, (&x, &y)| acc * d * d + x * d + y)
}

fn compute_coefficients<T: Real>(rho: &DensityState<T>) -> CoefficientTensor<T> {
    let (d, n, dim) = (rho.d, rho.n, rho.dim());
    let s = d * d;
    let basis = gell_mann_basis::<T>(d).expect("d ≥ 2 checked at construction");
    // ρ_μ = Σ_ab ρ_ab Π_i (λ_{μ_i})_{b_i a_i}
    let m = CMatrix::from_fn(s, s, |mu, p| basis.matrix(mu)[(p % d, p / d)]);
    let mut data = vec![c(T::zero()); s.pow(n as u32)];
    for a in 0..dim {
        for b in 0..dim {
            data[pair_index(a, b, d, n)] = rho.matrix[(a, b)];
        }
    }
    for mode in 0..n {
        data = apply_mode(&data, s, n, mode, &m);
    }
    CoefficientTensor {
        d,
        n,
        coefficients: data.iter().map(|z| z.re).collect(),
    }
}

pub fn expand_density<T: Real>(rho: &DensityState<T>) -> CoefficientTensor<T> {
    rho.coefficients().clone()
}

/// `ρ = 2^{-N} Σ_μ ρ_μ λ_{μ₁}⊗…⊗λ_{μ_N}`, validated as a state.
pub fn reconstruct<T: Real>(coeffs: &[T], d: usize, n: usize) -> Result<DensityState<T>> {
    let dim = hilbert_dim(d, n, MAX_DIM)?;
    let s = d * d;
    if coeffs.len() != s.pow(n as u32) {
        return Err(Error::Domain(format!(
            "{} coefficients for d={d} N={n}",
            coeffs.len()
        )));
    }
    let basis = gell_mann_basis::<T>(d)?;
    let half = c(real::<T>(0.5));
    let k = CMatrix::from_fn(s, s, |p, mu| basis.matrix(mu)[(p / d, p % d)] * half);
    let mut data: Vec<Complex<T>> = coeffs.iter().map(|&x| c(x)).collect();
    for mode in 0..n {
        data = apply_mode(&data, s, n, mode, &k);
    }
    let m = CMatrix::from_fn(dim, dim, |a, b| data[pair_index(a, b, d, n)]);
    DensityState::new(d, n, m)
}
