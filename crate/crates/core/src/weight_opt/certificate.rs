//! Dual certificate for optimal weights.
//!
//! At an optimum there is `Z = V Y Vᵀ ⪰ 0` with `tr Z = 1`, `V` spanning the `λ₂`
//! eigenspace, such that `g_e = (Z_ii + Z_jj − 2Z_ij)` equals `ν = λ₂ / Σw` on every edge
//! of positive weight and does not exceed it on zero-weight edges. `Y` is searched in
//! `svec` coordinates (off-diagonals scaled by √2, so the Frobenius norm is Euclidean).

use super::{budget_of, OptimalResult};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::scalar::{real, to_f64, Real};
use crate::spectral::eigen_sym;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

/// Acceptance threshold on [`CertificateReport::max_violation`].
pub const CERTIFICATE_TOLERANCE: f64 = 1e-6;

const DYKSTRA_CYCLES: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport<T> {
    pub accepted: bool,
    pub max_violation: T,
    /// Worst `|g_e − ν| / ν` over positive edges, together with `|tr Y − 1|`.
    pub equality_residual: T,
    /// Worst `(g_e − ν) / ν` over zero-weight edges, floored at zero.
    pub inequality_excess: T,
    /// Magnitude of the most negative eigenvalue of `Y`.
    pub psd_violation: T,
    /// Relative gap between the reported and the recomputed `λ₂`.
    pub lambda2_mismatch: T,
    /// `|Σw − D| / D`.
    pub budget_error: T,
    pub eigenspace_dim: usize,
    pub nu: T,
}

struct Violations {
    equality: f64,
    inequality: f64,
    psd: f64,
}

impl Violations {
    fn max(&self) -> f64 {
        self.equality.max(self.inequality).max(self.psd)
    }
}

struct System {
    r: usize,
    /// One row per edge: `g_e = row · y`.
    rows: Vec<DVector<f64>>,
    positive: Vec<bool>,
    trace: DVector<f64>,
    nu: f64,
}

fn svec_pairs(r: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(r * (r + 1) / 2);
    for i in 0..r {
        for j in i..r {
            out.push((i, j));
        }
    }
    out
}

fn unsvec(r: usize, y: &DVector<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(r, r);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for (k, (i, j)) in svec_pairs(r).into_iter().enumerate() {
        if i == j {
            m[(i, i)] = y[k];
        } else {
            m[(i, j)] = y[k] * h;
            m[(j, i)] = y[k] * h;
        }
    }
    m
}

fn svec(m: &DMatrix<f64>) -> DVector<f64> {
    let pairs = svec_pairs(m.nrows());
    let s2 = std::f64::consts::SQRT_2;
    DVector::from_iterator(
        pairs.len(),
        pairs
            .iter()
            .map(|&(i, j)| if i == j { m[(i, i)] } else { s2 * m[(i, j)] }),
    )
}

/// Moore-Penrose inverse through the eigen-decomposition of `BᵀB`, dropping directions
/// whose squared singular value is below `1e-13` of the largest.
fn pseudo_inverse(b: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(b.transpose() * b);
    let top = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let inv = eig
        .eigenvalues
        .map(|v| if v > 1e-13 * top { 1.0 / v } else { 0.0 });
    &eig.eigenvectors * DMatrix::from_diagonal(&inv) * eig.eigenvectors.transpose() * b.transpose()
}

fn psd_part(y: &DVector<f64>, r: usize) -> DVector<f64> {
    let eig = SymmetricEigen::new(unsvec(r, y));
    let clipped = eig.eigenvalues.map(|v| v.max(0.0));
    svec(&(&eig.eigenvectors * DMatrix::from_diagonal(&clipped) * eig.eigenvectors.transpose()))
}

impl System {
    fn violations(&self, y: &DVector<f64>) -> Violations {
        let mut equality = (self.trace.dot(y) - 1.0).abs();
        let mut inequality: f64 = 0.0;
        for (row, &pos) in self.rows.iter().zip(&self.positive) {
            let g = row.dot(y);
            if pos {
                equality = equality.max((g - self.nu).abs() / self.nu);
            } else {
                inequality = inequality.max((g - self.nu) / self.nu);
            }
        }
        let eig = SymmetricEigen::new(unsvec(self.r, y));
        let lmin = eig
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        Violations {
            equality,
            inequality,
            psd: (-lmin).max(0.0),
        }
    }

    fn equality_matrix(&self) -> (DMatrix<f64>, DVector<f64>) {
        let mut rows: Vec<&DVector<f64>> = self
            .rows
            .iter()
            .zip(&self.positive)
            .filter(|(_, &p)| p)
            .map(|(r, _)| r)
            .collect();
        rows.push(&self.trace);
        let dim = self.trace.len();
        let b = DMatrix::from_fn(rows.len(), dim, |i, j| rows[i][j]);
        let mut rhs = DVector::from_element(rows.len(), self.nu);
        rhs[rows.len() - 1] = 1.0;
        (b, rhs)
    }

    fn solve(&self) -> DVector<f64> {
        let (b, rhs) = self.equality_matrix();
        let pinv = pseudo_inverse(&b);
        let start = &pinv * &rhs;
        if self.violations(&start).max() <= 1e-12 {
            return start;
        }
        self.dykstra(start, &b, &rhs, &pinv)
    }

    /// Alternating projections with Dykstra corrections onto the equality set, the PSD
    /// cone and each zero-edge half-space.
    fn dykstra(
        &self,
        start: DVector<f64>,
        b: &DMatrix<f64>,
        rhs: &DVector<f64>,
        pinv: &DMatrix<f64>,
    ) -> DVector<f64> {
        let half: Vec<&DVector<f64>> = self
            .rows
            .iter()
            .zip(&self.positive)
            .filter(|(_, &p)| !p)
            .map(|(r, _)| r)
            .collect();
        let sets = 2 + half.len();
        let mut corr = vec![DVector::zeros(start.len()); sets];
        let mut y = start;
        let mut best = (self.violations(&y).max(), y.clone());
        for cycle in 0..DYKSTRA_CYCLES {
            for (k, c) in corr.iter_mut().enumerate() {
                let z = &y + &*c;
                let p = match k {
                    0 => &z - pinv * (b * &z - rhs),
                    1 => psd_part(&z, self.r),
                    _ => {
                        let a = half[k - 2];
                        let excess = a.dot(&z) - self.nu;
                        if excess > 0.0 {
                            &z - a * (excess / a.norm_squared())
                        } else {
                            z.clone()
                        }
                    }
                };
                *c = &z - &p;
                y = p;
            }
            if cycle % 25 == 0 {
                let v = self.violations(&y).max();
                if v < best.0 {
                    best = (v, y.clone());
                }
                if v <= 1e-10 {
                    break;
                }
            }
        }
        let v = self.violations(&y).max();
        if v < best.0 {
            best = (v, y);
        }
        best.1
    }
}

/// Checks optimality of `result`'s weights on `g` at budget `d` by constructing the dual
/// certificate. Violations are relative; the report is accepted when none exceeds
/// [`CERTIFICATE_TOLERANCE`].
pub fn dual_certificate<T: Real>(
    g: &WeightedGraph<T>,
    result: &OptimalResult<T>,
    d: T,
) -> Result<CertificateReport<T>> {
    let d = to_f64(d);
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::Domain(format!("budget must be positive, got {d}")));
    }
    let weighted = result.weighted_graph(g)?.map_weights(to_f64);
    let used = to_f64(budget_of(g, &result.weights_by_orbit));
    if used <= 0.0 {
        return Err(Error::Domain("weights spend no budget".into()));
    }
    let (values, vectors) = eigen_sym(&weighted.laplacian())?;
    let n = values.len();
    if n < 2 {
        return Err(Error::CertificateUnavailable("single vertex".into()));
    }
    let lambda2 = values[1];
    let scale = values[n - 1].abs().max(f64::MIN_POSITIVE);
    if lambda2 <= 1e-12 * scale {
        return Err(Error::CertificateUnavailable(
            "λ₂ is numerically zero; the weighted graph is disconnected".into(),
        ));
    }
    let cluster: Vec<usize> = (1..n)
        .filter(|&k| values[k] - lambda2 <= 1e-6 * lambda2)
        .collect();
    let r = cluster.len();
    let v = DMatrix::from_fn(n, r, |i, j| vectors[(i, cluster[j])]);
    let nu = lambda2 / used;
    let pairs = svec_pairs(r);
    let s2 = std::f64::consts::SQRT_2;
    let edge_count = weighted.edge_count() as f64;
    let zero_cut = 1e-7 * d / edge_count;
    let rows: Vec<DVector<f64>> = weighted
        .edges()
        .iter()
        .map(|&(i, j)| {
            let diff: Vec<f64> = (0..r).map(|k| v[(i, k)] - v[(j, k)]).collect();
            DVector::from_iterator(
                pairs.len(),
                pairs.iter().map(|&(a, b)| {
                    if a == b {
                        diff[a] * diff[a]
                    } else {
                        s2 * diff[a] * diff[b]
                    }
                }),
            )
        })
        .collect();
    let positive = weighted.weights().iter().map(|&w| w > zero_cut).collect();
    let trace = DVector::from_iterator(pairs.len(), pairs.iter().map(|&(a, b)| f64::from(a == b)));
    let system = System {
        r,
        rows,
        positive,
        trace,
        nu,
    };
    let y = system.solve();
    let viol = system.violations(&y);
    let lambda2_mismatch = (to_f64(result.lambda2) - lambda2).abs() / lambda2;
    let budget_error = (used - d).abs() / d;
    let max_violation = viol.max().max(lambda2_mismatch).max(budget_error);
    Ok(CertificateReport {
        accepted: max_violation <= CERTIFICATE_TOLERANCE,
        max_violation: real(max_violation),
        equality_residual: real(viol.equality),
        inequality_excess: real(viol.inequality),
        psd_violation: real(viol.psd),
        lambda2_mismatch: real(lambda2_mismatch),
        budget_error: real(budget_error),
        eigenspace_dim: r,
        nu: real(nu),
    })
}
