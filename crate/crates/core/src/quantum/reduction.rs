//! Checks that the master equation acts on coefficient tensors as independent classical
//! consensus problems, one per induced graph.

use super::basis::hilbert_dim;
use super::dynamics::{consensus_state, CtcPropagator, QcmePropagator, MAX_QCME_DIM};
use super::state::DensityState;
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::induced::induced_graph;
use crate::partition::{enumerate_partitions, Partition, Tabloid};
use crate::scalar::{real, Real};
use crate::spectral::spectral_gap;
use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

pub const MAX_REDUCTION_SITES: usize = 4;
pub const REDUCTION_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockDeviation<T> {
    pub partition: Partition,
    /// Number of coefficient classes (symbol multisets) of this shape.
    pub classes: usize,
    pub max_deviation: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionReport<T> {
    pub d: usize,
    pub n: usize,
    pub times: Vec<T>,
    /// Largest deviation at each sampled time.
    pub deviation_by_time: Vec<T>,
    pub blocks: Vec<BlockDeviation<T>>,
    pub max_deviation: T,
    /// Largest change of a coefficient `ρ_{μ..μ}` over the sampled times.
    pub trivial_block_drift: T,
    pub passed: bool,
}

struct Class {
    shape: usize,
    /// Coefficient index of each tabloid of the shape, in induced-graph vertex order.
    indices: Vec<usize>,
}

/// Symbol multisets as sorted words over `0..s`.
fn multisets(s: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut word = vec![0usize; n];
    loop {
        out.push(word.clone());
        let Some(i) = (0..n).rev().find(|&i| word[i] + 1 < s) else {
            return out;
        };
        let v = word[i] + 1;
        for x in &mut word[i..] {
            *x = v;
        }
    }
}

/// Rows of a multiset: symbols ordered by multiplicity (descending), then by value.
fn row_symbols(sorted: &[usize]) -> (Partition, Vec<usize>) {
    let mut counts: Vec<(usize, usize)> = Vec::new();
    for &m in sorted {
        match counts.last_mut() {
            Some((sym, k)) if *sym == m => *k += 1,
            _ => counts.push((m, 1)),
        }
    }
    counts.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let shape =
        Partition::new(counts.iter().map(|&(_, k)| k).collect()).expect("counts are positive");
    (shape, counts.into_iter().map(|(sym, _)| sym).collect())
}

fn coefficient_index(word: &[usize], s: usize) -> usize {
    word.iter().fold(0, |acc, &m| acc * s + m)
}

pub fn verify_reduction<T: Real>(
    g: &WeightedGraph<T>,
    d: usize,
    rho0: &DensityState<T>,
    t_samples: &[T],
) -> Result<ReductionReport<T>> {
    let n = g.n_vertices();
    if n > MAX_REDUCTION_SITES {
        return Err(Error::Resource(format!(
            "N = {n} exceeds {MAX_REDUCTION_SITES} for the reduction check"
        )));
    }
    hilbert_dim(d, n, MAX_QCME_DIM)?;
    if rho0.d() != d || rho0.n() != n {
        return Err(Error::Domain(format!(
            "state on d={} N={}, expected d={d} N={n}",
            rho0.d(),
            rho0.n()
        )));
    }
    let s = d * d;
    let shapes = enumerate_partitions(n)?;
    let mut vertices: Vec<Vec<Tabloid>> = Vec::new();
    let mut propagators = Vec::new();
    for shape in &shapes {
        let ig = induced_graph(g, shape)?;
        propagators.push(CtcPropagator::new(&ig.laplacian())?);
        vertices.push(ig.vertices().to_vec());
    }
    let classes: Vec<Class> = multisets(s, n)
        .into_iter()
        .map(|sorted| {
            let (shape, symbols) = row_symbols(&sorted);
            let k = shapes
                .iter()
                .position(|p| *p == shape)
                .expect("shape enumerated");
            let indices = vertices[k]
                .iter()
                .map(|t| {
                    let word: Vec<usize> = t.yamanouchi.iter().map(|&r| symbols[r - 1]).collect();
                    coefficient_index(&word, s)
                })
                .collect();
            Class { shape: k, indices }
        })
        .collect();

    let qcme = QcmePropagator::new(g, d)?;
    let c0 = &rho0.coefficients().coefficients;
    let trivial: Vec<usize> = (0..s).map(|m| coefficient_index(&vec![m; n], s)).collect();

    // per time: deviation per shape, and the trivial-block drift
    let per_time: Vec<(Vec<T>, T)> = t_samples
        .par_iter()
        .map(|&t| -> Result<(Vec<T>, T)> {
            let rho_t = qcme.evolve(rho0, t)?;
            let ct = &rho_t.coefficients().coefficients;
            let mut dev = vec![T::zero(); shapes.len()];
            for class in &classes {
                let x0 = DVector::from_iterator(
                    class.indices.len(),
                    class.indices.iter().map(|&i| c0[i]),
                );
                let xt = propagators[class.shape].apply(&x0, t)?;
                for (k, &i) in class.indices.iter().enumerate() {
                    dev[class.shape] = dev[class.shape].max((xt[k] - ct[i]).abs());
                }
            }
            let drift = trivial
                .iter()
                .fold(T::zero(), |a, &i| a.max((ct[i] - c0[i]).abs()));
            Ok((dev, drift))
        })
        .collect::<Result<_>>()?;

    let blocks: Vec<BlockDeviation<T>> = shapes
        .iter()
        .enumerate()
        .map(|(k, shape)| BlockDeviation {
            partition: shape.clone(),
            classes: classes.iter().filter(|c| c.shape == k).count(),
            max_deviation: per_time.iter().fold(T::zero(), |a, (dev, _)| a.max(dev[k])),
        })
        .collect();
    let deviation_by_time: Vec<T> = per_time
        .iter()
        .map(|(dev, _)| dev.iter().fold(T::zero(), |a, &b| a.max(b)))
        .collect();
    let max_deviation = deviation_by_time.iter().fold(T::zero(), |a, &b| a.max(b));
    let trivial_block_drift = per_time.iter().fold(T::zero(), |a, &(_, b)| a.max(b));
    let tol = real::<T>(REDUCTION_TOLERANCE);
    Ok(ReductionReport {
        d,
        n,
        times: t_samples.to_vec(),
        deviation_by_time,
        blocks,
        max_deviation,
        trivial_block_drift,
        passed: max_deviation <= tol && trivial_block_drift <= tol,
    })
}

/// `λ₂` of the `(N-1,1)` induced graph, which governs the consensus rate.
pub fn consensus_rate<T: Real>(g: &WeightedGraph<T>) -> Result<T> {
    let ig = induced_graph(g, &Partition::standard(g.n_vertices())?)?;
    spectral_gap(&ig.laplacian())
}

/// Slope of `log ‖ρ(t) - ρ*‖_F` between `t1` and `t2`.
pub fn decay_slope<T: Real>(
    g: &WeightedGraph<T>,
    rho0: &DensityState<T>,
    t1: T,
    t2: T,
) -> Result<T> {
    if !(t2 > t1) {
        return Err(Error::Domain("decay slope needs t2 > t1".into()));
    }
    let prop = QcmePropagator::new(g, rho0.d())?;
    let star = consensus_state(rho0)?;
    let e1 = prop.evolve(rho0, t1)?.distance(&star);
    let e2 = prop.evolve(rho0, t2)?.distance(&star);
    if e1 <= T::zero() || e2 <= T::zero() {
        return Err(Error::Numerical("state already at consensus".into()));
    }
    Ok((e2.ln() - e1.ln()) / (t2 - t1))
}
