//! Swap master equation, its consensus limit, and the classical CTC integrator.

use super::basis::{c, hilbert_dim, permute_index, CMatrix};
use super::state::DensityState;
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::scalar::{from_usize, Real};
use crate::spectral::eigen_sym;
use nalgebra::{DMatrix, DVector};

/// Largest `d^N` the master-equation integrator accepts.
pub const MAX_QCME_DIM: usize = 64;
/// Largest `N` for the permutation average.
pub const MAX_CONSENSUS_SITES: usize = 5;

fn check_time<T: Real>(t: T) -> Result<()> {
    if !(t >= T::zero()) || !t.is_finite() {
        return Err(Error::Domain("time must be finite and nonnegative".into()));
    }
    Ok(())
}

/// `exp(-L t)` applied through a stored eigendecomposition.
#[derive(Debug, Clone)]
pub struct CtcPropagator<T> {
    values: Vec<T>,
    vectors: DMatrix<T>,
}

impl<T: Real> CtcPropagator<T> {
    pub fn new(l: &DMatrix<T>) -> Result<Self> {
        let (values, vectors) = eigen_sym(l)?;
        Ok(Self { values, vectors })
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.values
    }

    pub fn apply(&self, x0: &DVector<T>, t: T) -> Result<DVector<T>> {
        check_time(t)?;
        if x0.len() != self.values.len() {
            return Err(Error::Domain(format!(
                "vector of length {} for a {}-vertex Laplacian",
                x0.len(),
                self.values.len()
            )));
        }
        if t == T::zero() {
            return Ok(x0.clone());
        }
        let mut y = self.vectors.tr_mul(x0);
        for (yi, &v) in y.iter_mut().zip(&self.values) {
            *yi *= (-v * t).exp();
        }
        Ok(&self.vectors * y)
    }
}

/// `x(t) = exp(-L t)·x0`.
pub fn ctc_integrate<T: Real>(l: &DMatrix<T>, x0: &DVector<T>, t: T) -> Result<DVector<T>> {
    CtcPropagator::new(l)?.apply(x0, t)
}

/// One connected class of matrix entries under the swap action.
#[derive(Debug, Clone)]
struct EntryClass<T> {
    entries: Vec<usize>,
    propagator: CtcPropagator<T>,
}

/// Solution operator of `dρ/dt = Σ w_jk (U_jk ρ U_jk† - ρ)`.
///
/// Conjugation by a swap permutes matrix entries, so the generator is a weighted graph
/// Laplacian on the `d^{2N}` entries; it splits into small classes that are diagonalized
/// once.
#[derive(Debug, Clone)]
pub struct QcmePropagator<T> {
    d: usize,
    n: usize,
    dim: usize,
    classes: Vec<EntryClass<T>>,
}

impl<T: Real> QcmePropagator<T> {
    pub fn new(g: &WeightedGraph<T>, d: usize) -> Result<Self> {
        let n = g.n_vertices();
        if d < 2 {
            return Err(Error::Domain(format!("qudit dimension {d} < 2")));
        }
        let dim = hilbert_dim(d, n, MAX_QCME_DIM)?;
        let entries = dim * dim;
        let swaps: Vec<(Vec<usize>, T)> = g
            .edges()
            .iter()
            .zip(g.weights())
            .filter(|(_, &w)| w != T::zero())
            .map(|(&(j, k), &w)| {
                let perm: Vec<usize> = (0..dim)
                    .map(|a| {
                        let mut sites: Vec<usize> = (0..n).collect();
                        sites.swap(j, k);
                        permute_index(a, d, n, &sites)
                    })
                    .collect();
                (perm, w)
            })
            .collect();
        let image = |e: usize, perm: &[usize]| perm[e / dim] * dim + perm[e % dim];

        let mut parent: Vec<usize> = (0..entries).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (perm, _) in &swaps {
            for e in 0..entries {
                let (a, b) = (find(&mut parent, e), find(&mut parent, image(e, perm)));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); entries];
        for e in 0..entries {
            let root = find(&mut parent, e);
            members[root].push(e);
        }
        let mut classes = Vec::new();
        for list in members.into_iter().filter(|m| m.len() > 1) {
            let pos = |e: usize| list.binary_search(&e).expect("class closed under swaps");
            let mut l = DMatrix::<T>::zeros(list.len(), list.len());
            for (perm, w) in &swaps {
                for (i, &e) in list.iter().enumerate() {
                    let j = pos(image(e, perm));
                    if i != j {
                        l[(i, i)] += *w;
                        l[(i, j)] -= *w;
                    }
                }
            }
            classes.push(EntryClass {
                propagator: CtcPropagator::new(&l)?,
                entries: list,
            });
        }
        Ok(Self { d, n, dim, classes })
    }

    pub fn evolve(&self, rho0: &DensityState<T>, t: T) -> Result<DensityState<T>> {
        check_time(t)?;
        if rho0.d() != self.d || rho0.n() != self.n {
            return Err(Error::Domain(format!(
                "state on d={} N={} for a propagator on d={} N={}",
                rho0.d(),
                rho0.n(),
                self.d,
                self.n
            )));
        }
        if t == T::zero() {
            return Ok(rho0.clone());
        }
        let dim = self.dim;
        let src = rho0.matrix();
        let mut out: CMatrix<T> = src.clone();
        for class in &self.classes {
            let at = |e: usize| src[(e / dim, e % dim)];
            let re = DVector::from_iterator(
                class.entries.len(),
                class.entries.iter().map(|&e| at(e).re),
            );
            let im = DVector::from_iterator(
                class.entries.len(),
                class.entries.iter().map(|&e| at(e).im),
            );
            let re = class.propagator.apply(&re, t)?;
            let im = class.propagator.apply(&im, t)?;
            for (k, &e) in class.entries.iter().enumerate() {
                out[(e / dim, e % dim)] = num_complex::Complex::new(re[k], im[k]);
            }
        }
        DensityState::unchecked(self.d, self.n, out)
    }
}

/// `ρ(t)` under the swap master equation on `g`.
pub fn qcme_integrate<T: Real>(
    g: &WeightedGraph<T>,
    rho0: &DensityState<T>,
    t: T,
) -> Result<DensityState<T>> {
    if rho0.n() != g.n_vertices() {
        return Err(Error::Domain(format!(
            "{}-site state on a {}-vertex graph",
            rho0.n(),
            g.n_vertices()
        )));
    }
    QcmePropagator::new(g, rho0.d())?.evolve(rho0, t)
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut p: Vec<usize> = (0..n).collect();
    let mut out = vec![p.clone()];
    loop {
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return out;
        };
        let j = (i..n)
            .rev()
            .find(|&j| p[j] > p[i - 1])
            .expect("pivot has a successor");
        p.swap(i - 1, j);
        p[i..].reverse();
        out.push(p.clone());
    }
}

/// `ρ* = (1/N!) Σ_π U_π ρ U_π†`.
pub fn consensus_state<T: Real>(rho0: &DensityState<T>) -> Result<DensityState<T>> {
    let (d, n, dim) = (rho0.d(), rho0.n(), rho0.dim());
    if n > MAX_CONSENSUS_SITES {
        return Err(Error::Resource(format!(
            "N = {n} exceeds {MAX_CONSENSUS_SITES} for the permutation average"
        )));
    }
    let perms = permutations(n);
    let scale = c(T::one() / from_usize::<T>(perms.len()));
    let src = rho0.matrix();
    let mut out = CMatrix::<T>::zeros(dim, dim);
    for perm in &perms {
        let map: Vec<usize> = (0..dim).map(|a| permute_index(a, d, n, perm)).collect();
        for a in 0..dim {
            for b in 0..dim {
                out[(a, b)] += src[(map[a], map[b])];
            }
        }
    }
    DensityState::unchecked(d, n, out * scale)
}
