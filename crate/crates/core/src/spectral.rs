//! Symmetric eigenvalues, the spectral gap, and the dominance-order checks on induced graphs.

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::induced::induced_graph;
use crate::partition::{enumerate_partitions, hasse_diagram, Category, Partition};
use crate::scalar::{real, Real};
use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

/// Ascending eigenvalues with the solver's accuracy bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum<T> {
    pub eigenvalues: Vec<T>,
    pub tolerance: T,
}

fn max_abs<T: Real>(m: &DMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, x| acc.max(x.abs()))
}

fn check_symmetric<T: Real>(m: &DMatrix<T>) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Domain(format!(
            "matrix is {}x{}, not square",
            m.nrows(),
            m.ncols()
        )));
    }
    let scale = max_abs(m);
    let tol = real::<T>(1e-12).max(T::default_epsilon() * real(16.0)) * scale;
    for i in 0..m.nrows() {
        for j in 0..i {
            if (m[(i, j)] - m[(j, i)]).abs() > tol {
                return Err(Error::Domain(format!(
                    "matrix is not symmetric at ({i},{j})"
                )));
            }
        }
    }
    Ok(())
}

fn decompose<T: Real>(m: &DMatrix<T>) -> Result<SymmetricEigen<T, nalgebra::Dyn>> {
    check_symmetric(m)?;
    let n = m.nrows();
    SymmetricEigen::try_new(m.clone(), T::default_epsilon(), 1000 * n.max(1)).ok_or_else(|| {
        Error::Numerical(format!("symmetric eigensolver did not converge on {n}x{n}"))
    })
}

fn error_bound<T: Real>(m: &DMatrix<T>) -> T {
    let n = real::<T>(m.nrows().max(1) as f64);
    n * T::default_epsilon() * m.norm()
}

pub fn eigenvalues_sym<T: Real>(m: &DMatrix<T>) -> Result<Spectrum<T>> {
    let eig = decompose(m)?;
    let mut eigenvalues: Vec<T> = eig.eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(Spectrum {
        eigenvalues,
        tolerance: error_bound(m),
    })
}

/// Eigenpairs sorted by eigenvalue; column `k` of the matrix belongs to value `k`.
pub fn eigen_sym<T: Real>(m: &DMatrix<T>) -> Result<(Vec<T>, DMatrix<T>)> {
    let eig = decompose(m)?;
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .expect("finite eigenvalues")
    });
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((values, vectors))
}

/// Second-smallest eigenvalue; zero for a single vertex.
pub fn spectral_gap<T: Real>(l: &DMatrix<T>) -> Result<T> {
    if l.nrows() < 2 {
        check_symmetric(l)?;
        return Ok(T::zero());
    }
    Ok(eigenvalues_sym(l)?.eigenvalues[1])
}

/// Spectral connectivity test: `λ₂ ≥ 1e-9 · max degree`.
pub fn is_connected_spectral<T: Real>(g: &WeightedGraph<T>) -> Result<bool> {
    if g.n_vertices() == 1 {
        return Ok(true);
    }
    let gap = spectral_gap(&g.laplacian())?;
    Ok(gap >= real::<T>(1e-9) * g.max_degree() && gap > T::zero())
}

fn require_connected<T: Real>(g: &WeightedGraph<T>) -> Result<()> {
    if is_connected_spectral(g)? {
        Ok(())
    } else {
        Err(Error::Domain("base graph is disconnected".into()))
    }
}

/// Greedy sorted matching of `small` into `large`; returns the worst matched distance, or
/// `None` when some eigenvalue has no partner within `tol`.
pub fn spectrum_included<T: Real>(small: &[T], large: &[T], tol: T) -> Option<T> {
    let mut j = 0;
    let mut worst = T::zero();
    for &a in small {
        while j < large.len() && large[j] < a - tol {
            j += 1;
        }
        if j == large.len() || (large[j] - a).abs() > tol {
            return None;
        }
        worst = worst.max((large[j] - a).abs());
        j += 1;
    }
    Some(worst)
}

#[derive(Debug, Clone, Serialize)]
pub struct HassePair<T> {
    pub dominant: Partition,
    pub dominated: Partition,
    pub category: Category,
    /// `None` for the single-vertex induced graph of `(N)`.
    pub gap_dominant: Option<T>,
    pub gap_dominated: T,
    pub ordering_ok: bool,
    pub inclusion_ok: bool,
    pub inclusion_error: Option<T>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HasseReport<T> {
    pub n: usize,
    pub tolerance: T,
    pub pairs: Vec<HassePair<T>>,
    pub passed: bool,
}

/// Checks `λ₂(n') ≤ λ₂(n) + tol` and spectrum inclusion for every cover pair.
pub fn verify_hasse_ordering<T: Real>(g: &WeightedGraph<T>) -> Result<HasseReport<T>> {
    require_connected(g)?;
    let n = g.n_vertices();
    let h = hasse_diagram(n)?;
    let tol = real::<T>(1e-8) * g.max_weight().max(T::one());
    let spectra = h
        .nodes
        .par_iter()
        .map(|part| eigenvalues_sym(&induced_graph(g, part)?.laplacian()))
        .collect::<Result<Vec<_>>>()?;
    let mut pairs = Vec::new();
    for e in &h.cover_edges {
        let (sa, sb) = (&spectra[e.dominant], &spectra[e.dominated]);
        let gap_dominant = (sa.eigenvalues.len() > 1).then(|| sa.eigenvalues[1]);
        let gap_dominated = sb.eigenvalues.get(1).copied().unwrap_or(T::zero());
        let ordering_ok = match gap_dominant {
            Some(ga) => gap_dominated <= ga + tol,
            None => true,
        };
        let inclusion_error = spectrum_included(&sa.eigenvalues, &sb.eigenvalues, tol);
        pairs.push(HassePair {
            dominant: h.nodes[e.dominant].clone(),
            dominated: h.nodes[e.dominated].clone(),
            category: e.category,
            gap_dominant,
            gap_dominated,
            ordering_ok,
            inclusion_ok: inclusion_error.is_some(),
            inclusion_error,
        });
    }
    let passed = pairs.iter().all(|p| p.ordering_ok && p.inclusion_ok);
    Ok(HasseReport {
        n,
        tolerance: tol,
        pairs,
        passed,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AldousReport<T> {
    pub n: usize,
    pub tolerance: T,
    /// `λ₂` per partition, `(N)` excluded, in dominance-first order.
    pub gaps: Vec<(Partition, T)>,
    pub common_gap: T,
    pub max_deviation: T,
    pub passed: bool,
}

/// Largest `N` accepted by [`verify_aldous_extension`].
pub const ALDOUS_MAX_N: usize = 7;

/// Checks that all partitions except `(N)` share the spectral gap.
pub fn verify_aldous_extension<T: Real>(g: &WeightedGraph<T>) -> Result<AldousReport<T>> {
    let n = g.n_vertices();
    if n > ALDOUS_MAX_N {
        return Err(Error::Resource(format!(
            "Aldous check limited to N <= {ALDOUS_MAX_N} vertices, got {n}"
        )));
    }
    if n < 2 {
        return Err(Error::Domain(
            "Aldous check needs at least two vertices".into(),
        ));
    }
    require_connected(g)?;
    let parts: Vec<Partition> = enumerate_partitions(n)?
        .into_iter()
        .filter(|p| !p.is_trivial())
        .collect();
    let gaps = parts
        .par_iter()
        .map(|p| Ok((p.clone(), spectral_gap(&induced_graph(g, p)?.laplacian())?)))
        .collect::<Result<Vec<_>>>()?;
    let common_gap = gaps[0].1;
    let max_deviation = gaps
        .iter()
        .fold(T::zero(), |m, (_, x)| m.max((*x - common_gap).abs()));
    let tolerance = real::<T>(1e-8) * g.max_weight().max(T::one());
    Ok(AldousReport {
        n,
        tolerance,
        gaps,
        common_gap,
        max_deviation,
        passed: max_deviation <= tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_topology, catalog_up_to, TopologySpec};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit(spec: TopologySpec) -> WeightedGraph<f64> {
        build_topology(&spec).unwrap()
    }

    // Power sums tr(A^k), k = 1..n, determine the eigenvalue multiset.
    fn power_sums_match(m: &DMatrix<f64>, eig: &[f64]) {
        let n = m.nrows();
        let mut pw = DMatrix::identity(n, n);
        for k in 1..=n {
            pw = &pw * m;
            let tr: f64 = pw.trace();
            let s: f64 = eig.iter().map(|x| x.powi(k as i32)).sum();
            assert!(
                (tr - s).abs() <= 1e-9 * (1.0 + tr.abs()),
                "k={k}: {tr} vs {s}"
            );
        }
    }

    // Faddeev-LeVerrier coefficients and Durand-Kerner roots; independent of the eigensolver.
    fn char_poly_roots(m: &DMatrix<f64>) -> Vec<f64> {
        let n = m.nrows();
        let mut c = vec![0.0; n + 1];
        c[n] = 1.0;
        let mut mk = DMatrix::<f64>::zeros(n, n);
        for k in 1..=n {
            let am = m * &mk;
            mk = &am + DMatrix::identity(n, n) * c[n - k + 1];
            c[n - k] = -(m * &mk).trace() / k as f64;
        }
        use num_complex::Complex64;
        let eval = |z: Complex64| {
            c.iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
        };
        let mut roots: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new(0.4, 0.9).powu(i as u32))
            .collect();
        for _ in 0..500 {
            for i in 0..n {
                let mut denom = Complex64::new(1.0, 0.0);
                for j in 0..n {
                    if i != j {
                        denom *= roots[i] - roots[j];
                    }
                }
                let step = eval(roots[i]) / denom;
                roots[i] -= step;
            }
        }
        let mut out: Vec<f64> = roots.iter().map(|z| z.re).collect();
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out
    }

    #[test]
    fn documented_spectra() {
        let s = eigenvalues_sym(&unit(TopologySpec::Path { n: 4 }).laplacian()).unwrap();
        let r2 = 2f64.sqrt();
        for (a, b) in s.eigenvalues.iter().zip([0.0, 2.0 - r2, 2.0, 2.0 + r2]) {
            assert!((a - b).abs() < 1e-12);
        }
        let z = eigenvalues_sym(&DMatrix::<f64>::zeros(3, 3)).unwrap();
        assert_eq!(z.eigenvalues, vec![0.0; 3]);
        let k4 = eigenvalues_sym(&unit(TopologySpec::Complete { n: 4 }).laplacian()).unwrap();
        for (a, b) in k4.eigenvalues.iter().zip([0.0, 4.0, 4.0, 4.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(eigenvalues_sym(&bad), Err(Error::Domain(_))));
    }

    #[test]
    fn small_matrices_match_characteristic_polynomial() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=4 {
            for _ in 0..25 {
                let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-2.0..2.0));
                let m = &a + a.transpose();
                let s = eigenvalues_sym(&m).unwrap();
                power_sums_match(&m, &s.eigenvalues);
                let roots = char_poly_roots(&m);
                let scale = m.norm();
                for (x, y) in s.eigenvalues.iter().zip(&roots) {
                    assert!((x - y).abs() <= 1e-7 * (1.0 + scale), "{x} vs {y}");
                }
            }
        }
    }

    #[test]
    fn gap_examples() {
        let g = spectral_gap(&unit(TopologySpec::Path { n: 4 }).laplacian()).unwrap();
        assert!((g - (2.0 - 2f64.sqrt())).abs() < 1e-12);
        let edgeless = WeightedGraph::<f64>::unit(3, vec![], vec![]).unwrap();
        assert!(spectral_gap(&edgeless.laplacian()).unwrap().abs() < 1e-15);
        for n in 2..=6 {
            let g = spectral_gap(&unit(TopologySpec::Complete { n }).laplacian()).unwrap();
            assert!((g - n as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn catalog_spectra_are_psd_and_bounded() {
        for spec in catalog_up_to(12) {
            let g = unit(spec.clone());
            let s = eigenvalues_sym(&g.laplacian()).unwrap();
            assert_eq!(s.eigenvalues.len(), g.n_vertices());
            assert!(s.eigenvalues[0] >= -1e-10, "{spec}");
            assert!(s.eigenvalues[0].abs() <= 1e-10, "{spec}");
            let top = *s.eigenvalues.last().unwrap();
            assert!(top <= 2.0 * g.max_degree() + 1e-10, "{spec}");
            assert!(is_connected_spectral(&g).unwrap());
        }
    }

    #[test]
    fn disconnected_graph_has_zero_gap() {
        let g = WeightedGraph::<f64>::unit(5, vec![(0, 1), (1, 2), (3, 4)], vec![0, 0, 0]).unwrap();
        assert!(!is_connected_spectral(&g).unwrap());
        assert!(!g.is_connected());
        assert!(matches!(verify_hasse_ordering(&g), Err(Error::Domain(_))));
        assert!(matches!(verify_aldous_extension(&g), Err(Error::Domain(_))));
    }

    #[test]
    fn cartesian_spectrum_is_pairwise_sums() {
        let g1 = unit(TopologySpec::Path { n: 3 })
            .with_weights(vec![0.7, 1.9])
            .unwrap();
        let g2 = unit(TopologySpec::Paw)
            .with_weights(vec![1.0, 2.0, 0.5, 0.25, 3.0])
            .unwrap();
        let prod = crate::graph::cartesian_product(&g1, &g2);
        let s1 = eigenvalues_sym(&g1.laplacian()).unwrap().eigenvalues;
        let s2 = eigenvalues_sym(&g2.laplacian()).unwrap().eigenvalues;
        let mut sums: Vec<f64> = s1
            .iter()
            .flat_map(|a| s2.iter().map(move |b| a + b))
            .collect();
        sums.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let got = eigenvalues_sym(&prod.laplacian()).unwrap().eigenvalues;
        for (a, b) in got.iter().zip(&sums) {
            assert!((a - b).abs() <= 1e-10);
        }
    }

    #[test]
    fn aldous_examples() {
        let r = verify_aldous_extension(&unit(TopologySpec::Path { n: 3 })).unwrap();
        assert!(r.passed);
        assert!((r.common_gap - 1.0).abs() < 1e-12);
        assert_eq!(r.gaps.len(), 2);
        let r = verify_aldous_extension(&unit(TopologySpec::Path { n: 4 })).unwrap();
        assert!(r.passed);
        assert_eq!(r.gaps.len(), 4);
        for (_, g) in &r.gaps {
            assert!((g - (2.0 - 2f64.sqrt())).abs() < 1e-9);
        }
        let r = verify_aldous_extension(&unit(TopologySpec::Path { n: 2 })).unwrap();
        assert_eq!(r.gaps.len(), 1);
        assert!((r.common_gap - 2.0).abs() < 1e-12);
        let big = unit(TopologySpec::Path { n: 8 });
        assert!(matches!(
            verify_aldous_extension(&big),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn aldous_on_catalog() {
        for spec in catalog_up_to(6) {
            let r = verify_aldous_extension(&unit(spec.clone())).unwrap();
            assert!(r.passed, "{spec}: {}", r.max_deviation);
        }
    }

    #[test]
    fn aldous_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let mut done = 0;
        while done < 20 {
            let n = rng.gen_range(2..=5);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.6) {
                        edges.push((u, v));
                    }
                }
            }
            let weights = edges.iter().map(|_| rng.gen_range(0.1..3.0)).collect();
            let orbits = vec![0; edges.len()];
            let g = WeightedGraph::<f64>::new(n, edges, weights, orbits).unwrap();
            if !g.is_connected() {
                continue;
            }
            let r = verify_aldous_extension(&g).unwrap();
            assert!(r.passed, "{:?}", r.gaps);
            done += 1;
        }
    }

    #[test]
    fn hasse_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let w = (0..3).map(|_| rng.gen_range(0.1..2.0)).collect();
        let g = unit(TopologySpec::Path { n: 4 }).with_weights(w).unwrap();
        assert!(verify_hasse_ordering(&g).unwrap().passed);
        assert!(
            verify_hasse_ordering(&unit(TopologySpec::Star { n: 4 }))
                .unwrap()
                .passed
        );
        let r = verify_hasse_ordering(&unit(TopologySpec::Path { n: 2 })).unwrap();
        assert_eq!(r.pairs.len(), 1);
        assert_eq!(r.pairs[0].gap_dominant, None);
        assert!((r.pairs[0].gap_dominated - 2.0).abs() < 1e-12);
        assert!(r.passed);
    }

    #[test]
    fn inclusion_matching() {
        assert_eq!(
            spectrum_included(&[0.0, 1.0], &[0.0, 0.5, 1.0], 1e-9),
            Some(0.0)
        );
        assert_eq!(spectrum_included(&[1.0, 1.0], &[0.0, 1.0, 2.0], 1e-9), None);
        assert!(spectrum_included(&[1.0, 1.0], &[1.0, 1.0 + 1e-10], 1e-9).is_some());
    }

    #[test]
    fn f32_gap() {
        let g: WeightedGraph<f32> = build_topology(&TopologySpec::Path { n: 4 }).unwrap();
        let gap = spectral_gap(&g.laplacian()).unwrap();
        assert!((gap - (2.0 - 2f32.sqrt())).abs() < 1e-5);
    }

    proptest! {
        #[test]
        fn gap_invariant_under_relabeling(
            weights in proptest::collection::vec(0.05f64..4.0, 5),
            perm_seed in 0u64..1000,
        ) {
            let g = unit(TopologySpec::Paw).with_weights(weights).unwrap();
            let mut perm: Vec<usize> = (0..4).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(perm_seed);
            for i in (1..4).rev() {
                perm.swap(i, rng.gen_range(0..=i));
            }
            let a = spectral_gap(&g.laplacian()).unwrap();
            let b = spectral_gap(&g.relabel(&perm).unwrap().laplacian()).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a));
        }

        #[test]
        fn spectrum_inclusion_on_random_star(weights in proptest::collection::vec(0.05f64..4.0, 4)) {
            let g = unit(TopologySpec::Star { n: 5 }).with_weights(weights).unwrap();
            let r = verify_hasse_ordering(&g).unwrap();
            prop_assert!(r.passed);
        }
    }
}
