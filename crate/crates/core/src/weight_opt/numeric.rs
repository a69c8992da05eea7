//! Numeric maximization of `λ₂` over per-orbit weights.
//!
//! Works on `A_k = Qᵀ L_k Q` where `L_k` is the unit Laplacian of orbit `k` and `Q` an
//! orthonormal basis of `𝟙⊥`, so `λ₂(L(w)) = λ_min(Σ w_k A_k)`. The budget is normalized to
//! one and the result rescaled.
//!
//! 1. multi-start projected supergradient ascent on the weighted simplex,
//! 2. log-barrier Newton refinement of `max s  s.t.  Σ w_k A_k ⪰ s I, w ≥ 0, cᵀw = 1`,
//! 3. pairwise budget transfers as a final local search.

use super::{check_budget, Method, OptimalResult};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::scalar::{real, Real};
use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::cmp::Ordering;
use std::collections::BTreeMap;

pub const MAX_ORBITS: usize = 8;

const CENTERING_STEPS: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct NumericOptions {
    /// Ascent starts; start 0 is the uniform edge weighting.
    pub starts: usize,
    pub ascent_iterations: usize,
    /// Start `i` draws from `seed + i`.
    pub seed: u64,
    pub barrier_iterations: usize,
    pub polish_rounds: usize,
}

impl Default for NumericOptions {
    fn default() -> Self {
        Self {
            starts: 8,
            ascent_iterations: 300,
            seed: 0,
            barrier_iterations: 400,
            polish_rounds: 60,
        }
    }
}

pub fn maximize_gap_numeric<T: Real>(g: &WeightedGraph<T>, d: T) -> Result<OptimalResult<T>> {
    maximize_gap_numeric_with(g, d, &NumericOptions::default())
}

pub fn maximize_gap_numeric_with<T: Real>(
    g: &WeightedGraph<T>,
    d: T,
    opts: &NumericOptions,
) -> Result<OptimalResult<T>> {
    check_budget(d)?;
    if g.edge_count() == 0 {
        return Err(Error::EmptyInput("graph has no edges".into()));
    }
    let unit = g.map_weights(|_| 1.0f64);
    if !unit.is_connected() {
        return Err(Error::Domain("graph is disconnected".into()));
    }
    let sizes = g.orbit_sizes();
    if sizes.len() > MAX_ORBITS {
        return Err(Error::Domain(format!(
            "{} orbits exceed the numeric maximizer's limit of {MAX_ORBITS}",
            sizes.len()
        )));
    }
    let problem = Problem::new(&unit, &sizes);
    let (w, converged) = if problem.m() == 1 {
        (vec![1.0 / problem.c[0]], true)
    } else {
        problem.solve(opts)?
    };
    let spent: f64 = w.iter().zip(&problem.c).map(|(x, c)| x * c).sum();
    let weights_by_orbit: BTreeMap<i32, T> = problem
        .labels
        .iter()
        .zip(&w)
        .map(|(&o, &x)| (o, d * real::<T>(x / spent)))
        .collect();
    let mut result = OptimalResult::evaluate(g, weights_by_orbit, Method::Numeric)?;
    result.converged = converged;
    Ok(result)
}

struct Problem {
    labels: Vec<i32>,
    c: Vec<f64>,
    a: Vec<DMatrix<f64>>,
    dim: usize,
}

fn helmert(n: usize) -> DMatrix<f64> {
    let mut q = DMatrix::zeros(n, n - 1);
    for k in 1..n {
        let norm = ((k * (k + 1)) as f64).sqrt();
        for i in 0..k {
            q[(i, k - 1)] = 1.0 / norm;
        }
        q[(k, k - 1)] = -(k as f64) / norm;
    }
    q
}

fn min_eigen(s: &DMatrix<f64>) -> Result<(f64, Vec<DVector<f64>>)> {
    let n = s.nrows();
    let eig = SymmetricEigen::try_new(s.clone(), f64::EPSILON, 1000 * n.max(1))
        .ok_or_else(|| Error::Numerical("eigensolver did not converge".into()))?;
    let lmin = eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let scale = eig.eigenvalues.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let vecs = (0..n)
        .filter(|&k| eig.eigenvalues[k] - lmin <= 1e-8 * scale)
        .map(|k| eig.eigenvectors.column(k).into_owned())
        .collect();
    Ok((lmin, vecs))
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

impl Problem {
    fn new(unit: &WeightedGraph<f64>, sizes: &BTreeMap<i32, usize>) -> Self {
        let n = unit.n_vertices();
        let q = helmert(n);
        let labels: Vec<i32> = sizes.keys().copied().collect();
        let c = sizes.values().map(|&s| s as f64).collect();
        let a = labels
            .iter()
            .map(|&o| {
                let m = q.transpose() * unit.orbit_laplacian(o) * &q;
                (&m + m.transpose()) * 0.5
            })
            .collect();
        Self {
            labels,
            c,
            a,
            dim: n - 1,
        }
    }

    fn m(&self) -> usize {
        self.labels.len()
    }

    fn assemble(&self, w: &[f64]) -> DMatrix<f64> {
        let mut s = DMatrix::zeros(self.dim, self.dim);
        for (ak, &wk) in self.a.iter().zip(w) {
            s += ak * wk;
        }
        s
    }

    fn value(&self, w: &[f64]) -> Result<f64> {
        Ok(min_eigen(&self.assemble(w))?.0)
    }

    fn uniform(&self) -> Vec<f64> {
        let total: f64 = self.c.iter().sum();
        vec![1.0 / total; self.m()]
    }

    /// Euclidean projection onto `{w ≥ 0, cᵀw = 1}`: `w = max(0, y − τc)` with `τ` found
    /// on the active set.
    fn project(&self, y: &[f64]) -> Vec<f64> {
        let mut active: Vec<bool> = vec![true; y.len()];
        loop {
            let (mut num, mut den) = (-1.0, 0.0);
            for k in 0..y.len() {
                if active[k] {
                    num += self.c[k] * y[k];
                    den += self.c[k] * self.c[k];
                }
            }
            let tau = num / den;
            let mut changed = false;
            for k in 0..y.len() {
                if active[k] && y[k] - tau * self.c[k] <= 0.0 {
                    active[k] = false;
                    changed = true;
                }
            }
            if !changed || !active.iter().any(|&a| a) {
                return (0..y.len())
                    .map(|k| {
                        if active[k] {
                            (y[k] - tau * self.c[k]).max(0.0)
                        } else {
                            0.0
                        }
                    })
                    .collect();
            }
        }
    }

    fn ascend(&self, start: Vec<f64>, iterations: usize) -> Result<(f64, Vec<f64>)> {
        let mut w = self.project(&start);
        let mut best = (self.value(&w)?, w.clone());
        let radius = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        for t in 0..iterations {
            let (lmin, vecs) = min_eigen(&self.assemble(&w))?;
            if lmin > best.0 {
                best = (lmin, w.clone());
            }
            let grad: Vec<f64> = self
                .a
                .iter()
                .map(|ak| vecs.iter().map(|v| v.dot(&(ak * v))).sum::<f64>() / vecs.len() as f64)
                .collect();
            let norm = grad.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                break;
            }
            let step = 0.5 * radius / ((t + 1) as f64).sqrt();
            let y: Vec<f64> = w
                .iter()
                .zip(&grad)
                .map(|(x, g)| x + step * g / norm)
                .collect();
            w = self.project(&y);
        }
        let last = self.value(&w)?;
        if last > best.0 {
            best = (last, w);
        }
        Ok(best)
    }

    fn starts(&self, opts: &NumericOptions) -> Vec<Vec<f64>> {
        (0..opts.starts.max(1))
            .map(|i| {
                if i == 0 {
                    return self.uniform();
                }
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(i as u64));
                let raw: Vec<f64> = self
                    .c
                    .iter()
                    .map(|&c| rng.gen_range(0.05..1.0) / c)
                    .collect();
                let total: f64 = raw.iter().zip(&self.c).map(|(x, c)| x * c).sum();
                raw.into_iter().map(|x| x / total).collect()
            })
            .collect()
    }

    fn solve(&self, opts: &NumericOptions) -> Result<(Vec<f64>, bool)> {
        let runs = self
            .starts(opts)
            .into_par_iter()
            .map(|s| self.ascend(s, opts.ascent_iterations))
            .collect::<Result<Vec<_>>>()?;
        let mut best = runs
            .into_iter()
            .reduce(|a, b| {
                if (a.0 - b.0).abs() <= 1e-12 * a.0.abs().max(1.0) {
                    if lex_cmp(&b.1, &a.1).is_lt() {
                        b
                    } else {
                        a
                    }
                } else if b.0 > a.0 {
                    b
                } else {
                    a
                }
            })
            .expect("at least one start");

        let mut converged = false;
        let uniform = self.uniform();
        let seed: Vec<f64> = best
            .1
            .iter()
            .zip(&uniform)
            .map(|(b, u)| 0.8 * b + 0.2 * u)
            .collect();
        if let Some((w, ok)) = self.barrier(seed, opts.barrier_iterations)? {
            let v = self.value(&w)?;
            converged = ok;
            if v >= best.0 {
                best = (v, w);
            }
        }
        let w = self.polish(best.1, best.0, opts.polish_rounds)?;
        Ok((w, converged))
    }

    /// Returns the refined weights and whether the barrier reached its duality-gap target.
    fn barrier(&self, w0: Vec<f64>, max_steps: usize) -> Result<Option<(Vec<f64>, bool)>> {
        let m = self.m();
        let lmin = self.value(&w0)?;
        if lmin <= 0.0 {
            return Ok(None);
        }
        let mut x: Vec<f64> = w0;
        x.push(0.5 * lmin);
        let dof = (self.dim + m) as f64;
        let mut t = dof / lmin;
        let mut steps = 0;
        loop {
            // centering
            for _ in 0..CENTERING_STEPS {
                if steps >= max_steps {
                    return Ok(Some((x[..m].to_vec(), false)));
                }
                steps += 1;
                let Some((grad, hess)) = self.newton_system(&x, t) else {
                    return Ok(Some((x[..m].to_vec(), false)));
                };
                let k = m + 2;
                let mut kkt = DMatrix::zeros(k, k);
                let mut rhs = DVector::zeros(k);
                for i in 0..=m {
                    for j in 0..=m {
                        kkt[(i, j)] = hess[(i, j)];
                    }
                    rhs[i] = -grad[i];
                }
                for i in 0..m {
                    kkt[(i, m + 1)] = self.c[i];
                    kkt[(m + 1, i)] = self.c[i];
                }
                let Some(sol) = kkt.lu().solve(&rhs) else {
                    return Ok(Some((x[..m].to_vec(), false)));
                };
                let dx: Vec<f64> = sol.iter().take(m + 1).copied().collect();
                let slope: f64 = grad.iter().zip(&dx).map(|(g, d)| g * d).sum();
                if -slope / 2.0 < 1e-9 {
                    break;
                }
                let f0 = self
                    .barrier_value(&x, t)
                    .expect("current point is feasible");
                let mut alpha = 1.0;
                let mut moved = false;
                while alpha > 1e-14 {
                    let trial: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + alpha * b).collect();
                    if let Some(f) = self.barrier_value(&trial, t) {
                        if f <= f0 + 0.25 * alpha * slope {
                            x = trial;
                            moved = true;
                            break;
                        }
                    }
                    alpha *= 0.5;
                }
                if !moved {
                    break;
                }
            }
            if dof / t <= 1e-9 * x[m].abs().max(1e-300) {
                return Ok(Some((x[..m].to_vec(), true)));
            }
            t *= 8.0;
        }
    }

    fn slack(&self, x: &[f64]) -> DMatrix<f64> {
        let m = self.m();
        let mut s = self.assemble(&x[..m]);
        for i in 0..self.dim {
            s[(i, i)] -= x[m];
        }
        s
    }

    /// `-t·s - log det S - Σ log w_k`, or `None` outside the domain.
    fn barrier_value(&self, x: &[f64], t: f64) -> Option<f64> {
        let m = self.m();
        if x[..m].iter().any(|&w| w <= 0.0) {
            return None;
        }
        let chol = Cholesky::new(self.slack(x))?;
        let logdet: f64 = chol.l_dirty().diagonal().iter().map(|v| 2.0 * v.ln()).sum();
        Some(-t * x[m] - logdet - x[..m].iter().map(|w| w.ln()).sum::<f64>())
    }

    fn newton_system(&self, x: &[f64], t: f64) -> Option<(Vec<f64>, DMatrix<f64>)> {
        let m = self.m();
        let sinv = Cholesky::new(self.slack(x))?.inverse();
        let b: Vec<DMatrix<f64>> = self.a.iter().map(|a| &sinv * a).collect();
        let mut grad = vec![0.0; m + 1];
        let mut hess = DMatrix::zeros(m + 1, m + 1);
        for k in 0..m {
            grad[k] = -b[k].trace() - 1.0 / x[k];
            for l in 0..=k {
                let v = b[k].component_mul(&b[l].transpose()).sum();
                hess[(k, l)] = v;
                hess[(l, k)] = v;
            }
            hess[(k, k)] += 1.0 / (x[k] * x[k]);
            let cross = -b[k].component_mul(&sinv).sum();
            hess[(k, m)] = cross;
            hess[(m, k)] = cross;
        }
        grad[m] = -t + sinv.trace();
        hess[(m, m)] = sinv.norm_squared();
        Some((grad, hess))
    }

    /// Moves budget between pairs of orbits while that raises `λ_min`.
    fn polish(&self, mut w: Vec<f64>, mut value: f64, rounds: usize) -> Result<Vec<f64>> {
        let m = self.m();
        let mut delta: f64 = 1e-3;
        for _ in 0..rounds {
            let mut improved = false;
            for k in 0..m {
                for l in 0..m {
                    if k == l || w[k] <= 0.0 {
                        continue;
                    }
                    let all = w[k] * self.c[k];
                    for amount in [delta.min(all), all] {
                        let mut trial = w.clone();
                        trial[k] = (w[k] - amount / self.c[k]).max(0.0);
                        trial[l] += amount / self.c[l];
                        let v = self.value(&trial)?;
                        if v > value {
                            w = trial;
                            value = v;
                            improved = true;
                            break;
                        }
                    }
                }
            }
            if !improved {
                delta *= 0.1;
                if delta < 1e-13 {
                    break;
                }
            }
        }
        // Orbits left with a sliver of budget are dropped when that costs at most a
        // relative 1e-10 of λ₂.
        for k in 0..m {
            if w[k] == 0.0 || w[k] * self.c[k] > 1e-6 {
                continue;
            }
            let mut trial = w.clone();
            trial[k] = 0.0;
            let rest = 1.0 - w[k] * self.c[k];
            trial.iter_mut().for_each(|x| *x /= rest);
            let v = self.value(&trial)?;
            if v >= value * (1.0 - 1e-10) {
                w = trial;
                value = v;
            }
        }
        Ok(w)
    }
}
