use super::gram::{two_branch_inverse, weights_from_inverse};
use super::{budget_of, check_budget, Method, OptimalResult};
use crate::error::{Error, Result};
use crate::graph::TopologySpec;
use crate::scalar::{from_usize, real, Real};
use std::collections::BTreeMap;

fn nat<T: Real>(x: usize) -> T {
    from_usize(x)
}

type Solution<T> = (BTreeMap<i32, T>, T);

/// Optimal weights of a catalog topology at budget `d`.
///
/// Keys of `weights_by_orbit` are the orbit labels of [`TopologySpec::build`]. Orbit labels
/// that do not occur in the built graph are dropped.
pub fn closed_form<T: Real>(spec: &TopologySpec, d: T) -> Result<OptimalResult<T>> {
    check_budget(d)?;
    if let TopologySpec::CartesianProduct { factors } = spec {
        return lp_cartesian(factors, d);
    }
    let g = spec.build::<T>()?;
    let (weights, lambda2) = solve(spec, d)?;
    let sizes = g.orbit_sizes();
    let weights_by_orbit: BTreeMap<i32, T> = weights
        .into_iter()
        .filter(|(o, _)| sizes.contains_key(o))
        .collect();
    let budget_used = budget_of(&g, &weights_by_orbit);
    Ok(OptimalResult {
        weights_by_orbit,
        lambda2,
        budget_used,
        method: Method::ClosedForm,
        converged: true,
        certificate: None,
    })
}

fn solve<T: Real>(spec: &TopologySpec, d: T) -> Result<Solution<T>> {
    let two = real::<T>(2.0);
    match *spec {
        TopologySpec::Path { n } => path(n, d),
        TopologySpec::Cycle { n } => {
            let nf = nat::<T>(n);
            let cos = (two * T::pi() / nf).cos();
            Ok((
                BTreeMap::from([(0, d / nf)]),
                two * (T::one() - cos) * d / nf,
            ))
        }
        TopologySpec::Star { n } => {
            if n == 2 {
                return Ok((BTreeMap::from([(0, d)]), two * d));
            }
            let w = d / nat::<T>(n - 1);
            Ok((BTreeMap::from([(0, w)]), w))
        }
        TopologySpec::Complete { n } => {
            if n < 2 {
                return Err(Error::Unsupported(
                    "complete graph on one vertex has no edges".into(),
                ));
            }
            let nf = nat::<T>(n);
            let w = two * d / (nf * (nf - T::one()));
            Ok((BTreeMap::from([(0, w)]), nf * w))
        }
        TopologySpec::Paw => {
            let rim = d / real::<T>(4.0);
            Ok((BTreeMap::from([(0, T::zero()), (1, rim)]), two * rim))
        }
        TopologySpec::Lollipop { p, q } => lollipop(p, q, d),
        TopologySpec::CcsStar { p, q } => Ok(ccs_star(p, q, d)),
        TopologySpec::CcsTwoBranch { p, q1, q2 } => ccs_two_branch(p, q1, q2, d),
        TopologySpec::SymmetricStar { p, q } => Ok(symmetric_star(p, q, d)),
        TopologySpec::Palm { p, q } => Ok(palm(p, q, d)),
        TopologySpec::CoupledComplete { n1, n2, n3 } => coupled_complete(n1, n2, n3, d),
        TopologySpec::CartesianProduct { .. } => unreachable!("handled by lp_cartesian"),
    }
}

fn path<T: Real>(n: usize, d: T) -> Result<Solution<T>> {
    if n < 2 {
        return Err(Error::Parameter(format!("path needs n >= 2, got {n}")));
    }
    if n == 2 {
        return Ok((BTreeMap::from([(0, d)]), real::<T>(2.0) * d));
    }
    if n % 2 == 1 {
        return Ok(symmetric_star(2, n / 2, d));
    }
    // Even path: middle edge 0, orbit j at distance j from it.
    let q = n / 2 - 1;
    let three = real::<T>(3.0);
    let (a, b, c) = (nat::<T>(q + 1), nat::<T>(2 * q + 1), nat::<T>(2 * q + 3));
    let mut w = BTreeMap::new();
    w.insert(0, three * d * a / (c * b));
    for j in 1..=q {
        let jf = nat::<T>(j);
        w.insert(j as i32, three * d * (a * a - jf * jf) / (a * b * c));
    }
    Ok((w, real::<T>(6.0) * d / (a * b * c)))
}

fn symmetric_star<T: Real>(p: usize, q: usize, d: T) -> Solution<T> {
    let (pf, qf) = (nat::<T>(p), nat::<T>(q));
    let poly = pf * qf * (qf + T::one()) * (real::<T>(2.0) * qf + T::one());
    let w = (1..=q)
        .map(|j| {
            let jf = nat::<T>(j);
            (
                j as i32,
                real::<T>(3.0) * d * (qf + jf) * (qf - jf + T::one()) / poly,
            )
        })
        .collect();
    (w, real::<T>(6.0) * d / poly)
}

fn ccs_star<T: Real>(p: usize, q: usize, d: T) -> Solution<T> {
    let (pf, qf) = (nat::<T>(p), nat::<T>(q));
    let (one, two, three) = (T::one(), real::<T>(2.0), real::<T>(3.0));
    let r = (two * pf * (pf - one)).sqrt();
    let mut w = BTreeMap::new();
    w.insert(
        0,
        three * d * (two * pf - two + qf * r)
            / (pf
                * (pf - one)
                * (three * pf - three + three * qf * r + two * pf * qf * qf + pf * qf)),
    );
    let denom = three * pf * (qf + one) * (pf - one + qf * r)
        + pf * pf * qf * (qf + one) * (two * qf + one);
    for j in 1..=q {
        let jf = nat::<T>(j);
        let k = qf - jf + one;
        w.insert(j as i32, three * d * (r * k + pf * k * (qf + jf)) / denom);
    }
    let lambda2 = real::<T>(6.0) * d
        / (three * (pf - one) * (qf + one)
            + three * r * qf * (qf + one)
            + pf * qf * (qf + one) * (two * qf + one));
    (w, lambda2)
}

fn ccs_two_branch<T: Real>(p: usize, q1: usize, q2: usize, d: T) -> Result<Solution<T>> {
    if p < 2 || q1 == 0 || q2 == 0 {
        return Err(Error::Parameter(format!(
            "ccs_two_branch needs p >= 2, q1 >= 1, q2 >= 1, got p={p}, q1={q1}, q2={q2}"
        )));
    }
    let (pf, one, two, three) = (nat::<T>(p), T::one(), real::<T>(2.0), real::<T>(3.0));
    let sum = |f: &dyn Fn(T) -> T| f(nat(q1)) + f(nat(q2));
    let d1 = sum(&|q| q * (q + one));
    let d2 = sum(&|q| q * (q + one) * (two * q + one));
    let s = real::<T>(6.0) * d
        / (three * (pf - one) * nat::<T>(q1 + q2 + 1)
            + three * (two * pf * (pf - one)).sqrt() * d1
            + pf * d2);
    let inv = two_branch_inverse::<T>(q1, q2)?;
    let raw = weights_from_inverse(&inv, q1, p, s);
    let tol = real::<T>(1e-12) * s;
    if let Some(k) = raw.iter().position(|&x| x < -tol) {
        return Err(Error::Unsupported(format!(
            "ccs_two_branch(p={p},q1={q1},q2={q2}) has no nonnegative closed form (orbit {} \
             would be negative); use the numeric method",
            k as i64 - q1 as i64
        )));
    }
    let w = raw
        .into_iter()
        .enumerate()
        .map(|(k, x)| (k as i32 - q1 as i32, x.max(T::zero())))
        .collect();
    Ok((w, s))
}

/// Leaves orbit 0, tail orbits `1..=q`.
fn palm<T: Real>(p: usize, q: usize, d: T) -> Solution<T> {
    let (pf, qf, one, two) = (nat::<T>(p), nat::<T>(q), T::one(), real::<T>(2.0));
    let mut w = BTreeMap::new();
    if q * (q + 1) <= 2 * p {
        let s = real::<T>(6.0) * d / (real::<T>(6.0) * pf + qf * (qf + one) * (two * qf + one));
        w.insert(0, s);
        for j in 1..=q {
            let jf = nat::<T>(j);
            w.insert(j as i32, s * (qf + jf) * (qf - jf + one) / two);
        }
        (w, s)
    } else {
        let m = nat::<T>(p + q + 1);
        let s = real::<T>(12.0) * d * m
            / ((qf + one)
                * (qf + two)
                * (real::<T>(6.0) * pf + qf * (qf + real::<T>(4.0) * pf + one)));
        w.insert(0, s * (qf + one) * (qf + two) / (two * m));
        for j in 1..=q {
            let jf = nat::<T>(j);
            w.insert(
                j as i32,
                s * (qf - jf + one) * (pf * (qf + jf + two) + jf * (qf + one)) / (two * m),
            );
        }
        (w, s)
    }
}

/// Clique orbit -1, bridge orbit 0, tail orbits `1..=q`.
fn lollipop<T: Real>(p: usize, q: usize, d: T) -> Result<Solution<T>> {
    if p < 2 || q == 0 {
        return Err(Error::Parameter(format!(
            "lollipop needs p >= 2, q >= 1, got p={p}, q={q}"
        )));
    }
    let (pf, qf, one, two) = (nat::<T>(p), nat::<T>(q), T::one(), real::<T>(2.0));
    let six = real::<T>(6.0);
    let r = (two * pf * (pf + one)).sqrt();
    if qf * (qf + one) > r {
        let (mut w, s) = palm(p, q, d);
        w.insert(-1, T::zero());
        return Ok((w, s));
    }
    let m = nat::<T>(p + q + 1);
    let a = six * (pf - one) * m
        + (qf + one)
            * (six * (pf + one)
                + six * qf * r
                + two * pf * qf * (two * qf + one)
                + qf * (qf + one) * (qf + two));
    let s = real::<T>(12.0) * d * m / a;
    let w0 = s * (qf + one) * (two * (pf + one) + qf * r) / (two * m * (pf + one));
    let mut w = BTreeMap::new();
    w.insert(-1, (s - w0) / pf);
    w.insert(0, w0);
    for j in 1..=q {
        let jf = nat::<T>(j);
        w.insert(
            j as i32,
            s * (qf - jf + one) * (r + pf * (qf + jf) + jf * (qf + one)) / (two * m),
        );
    }
    Ok((w, s))
}

fn coupled_complete<T: Real>(n1: usize, n2: usize, n3: usize, d: T) -> Result<Solution<T>> {
    if n1 != n3 {
        return Err(Error::Unsupported(format!(
            "coupled_complete({n1},{n2},{n3}) is not symmetric; only n1 == n3 has a closed \
             form, use the numeric method"
        )));
    }
    let (a, b, two) = (nat::<T>(n1), nat::<T>(n2), real::<T>(2.0));
    let mut w = BTreeMap::new();
    if 2 * n1 < n2 {
        let s = two * b * d / (real::<T>(4.0) * a * b + (b - T::one()) * (b - two * a));
        w.insert(-2, T::zero());
        w.insert(-1, s / b);
        w.insert(0, s * (b - two * a) / (b * b));
        w.insert(1, s / b);
        w.insert(2, T::zero());
        Ok((w, s))
    } else {
        let x = d / (two * a * b);
        w.insert(-2, T::zero());
        w.insert(-1, x);
        w.insert(0, T::zero());
        w.insert(1, x);
        w.insert(2, T::zero());
        Ok((w, d / (two * a)))
    }
}

/// Vertex count, edge count and unit-weight `λ₂` of an edge-transitive factor.
fn factor_data<T: Real>(spec: &TopologySpec) -> Result<(usize, usize, T)> {
    let two = real::<T>(2.0);
    match *spec {
        TopologySpec::Complete { n } if n >= 2 => Ok((n, n * (n - 1) / 2, nat(n))),
        TopologySpec::Cycle { n } if n >= 3 => {
            let cos = (two * T::pi() / nat::<T>(n)).cos();
            Ok((n, n, two * (T::one() - cos)))
        }
        TopologySpec::Path { n: 2 } | TopologySpec::Star { n: 2 } => Ok((2, 1, two)),
        TopologySpec::Path { n: 3 } => Ok((3, 2, T::one())),
        TopologySpec::Star { n } if n >= 3 => Ok((n, n - 1, T::one())),
        _ => Err(Error::Unsupported(format!(
            "{spec} is not an edge-transitive factor; use the numeric method"
        ))),
    }
}

/// Equalization LP for a Cartesian product of edge-transitive factors: every factor gets
/// `w_i = s / λ_{i,2}` with the common `s` fixed by the budget. Factor `i` is orbit `i + 1`.
pub fn lp_cartesian<T: Real>(factors: &[TopologySpec], d: T) -> Result<OptimalResult<T>> {
    check_budget(d)?;
    if factors.is_empty() {
        return Err(Error::EmptyInput(
            "cartesian product needs at least one factor".into(),
        ));
    }
    let data = factors
        .iter()
        .map(factor_data::<T>)
        .collect::<Result<Vec<_>>>()?;
    let total: usize = data.iter().map(|x| x.0).product();
    let cost = data.iter().fold(T::zero(), |acc, &(n, e, lam)| {
        acc + nat::<T>(total) * nat::<T>(e) / (nat::<T>(n) * lam)
    });
    let s = d / cost;
    let weights_by_orbit: BTreeMap<i32, T> = data
        .iter()
        .enumerate()
        .map(|(i, &(_, _, lam))| (i as i32 + 1, s / lam))
        .collect();
    let g = TopologySpec::CartesianProduct {
        factors: factors.to_vec(),
    }
    .build::<T>()?;
    let budget_used = budget_of(&g, &weights_by_orbit);
    Ok(OptimalResult {
        weights_by_orbit,
        lambda2: s,
        budget_used,
        method: Method::LpEqualization,
        converged: true,
        certificate: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::catalog_up_to;
    use crate::spectral::spectral_gap;
    use proptest::prelude::*;

    fn cf(spec: TopologySpec) -> OptimalResult<f64> {
        closed_form(&spec, 1.0).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn gap_of(spec: &TopologySpec, r: &OptimalResult<f64>) -> f64 {
        let g = spec.build::<f64>().unwrap();
        spectral_gap(&r.weighted_graph(&g).unwrap().laplacian()).unwrap()
    }

    #[test]
    fn path_four() {
        let r = cf(TopologySpec::Path { n: 4 });
        assert!(close(r.weights_by_orbit[&0], 0.4, 1e-15));
        assert!(close(r.weights_by_orbit[&1], 0.3, 1e-15));
        assert!(close(r.lambda2, 0.2, 1e-15));
    }

    #[test]
    fn ccs_star_two_one_is_path_four() {
        let a = cf(TopologySpec::CcsStar { p: 2, q: 1 });
        let b = cf(TopologySpec::Path { n: 4 });
        for k in [0, 1] {
            assert!(close(a.weights_by_orbit[&k], b.weights_by_orbit[&k], 1e-12));
        }
        assert!(close(a.lambda2, b.lambda2, 1e-12));
    }

    #[test]
    fn small_catalog_values() {
        let star = cf(TopologySpec::Star { n: 4 });
        assert!(close(star.weights_by_orbit[&0], 1.0 / 3.0, 1e-15));
        assert!(close(star.lambda2, 1.0 / 3.0, 1e-15));
        let k4 = cf(TopologySpec::Complete { n: 4 });
        assert!(close(k4.weights_by_orbit[&0], 1.0 / 6.0, 1e-15));
        assert!(close(k4.lambda2, 2.0 / 3.0, 1e-15));
        let c4 = cf(TopologySpec::Cycle { n: 4 });
        assert!(close(c4.weights_by_orbit[&0], 0.25, 1e-15));
        assert!(close(c4.lambda2, 0.5, 1e-15));
        let paw = cf(TopologySpec::Paw);
        assert_eq!(paw.weights_by_orbit[&0], 0.0);
        assert!(close(paw.lambda2, 0.5, 1e-15));
        let edge = cf(TopologySpec::Path { n: 2 });
        assert_eq!(edge.weights_by_orbit[&0], 1.0);
        assert_eq!(edge.lambda2, 2.0);
    }

    #[test]
    fn lollipop_four_is_printed_tuple_rescaled() {
        let r = cf(TopologySpec::Lollipop { p: 2, q: 1 });
        let s3 = 3f64.sqrt();
        let scale = (9.0 - s3) / 6.0;
        assert!(close(
            r.weights_by_orbit[&-1] * scale,
            (2.0 - s3) / 6.0,
            1e-12
        ));
        assert!(close(r.weights_by_orbit[&0] * scale, 1.0 / 3.0, 1e-12));
        assert!(close(r.weights_by_orbit[&1] * scale, 0.5, 1e-12));
        assert!(close(r.lambda2 * scale, 1.0 - 1.0 / s3, 1e-12));
        let at_printed = closed_form(&TopologySpec::Lollipop { p: 2, q: 1 }, scale).unwrap();
        assert!(close(at_printed.lambda2, 1.0 - 1.0 / s3, 1e-12));
    }

    #[test]
    fn lp_two_by_three() {
        let r = lp_cartesian(
            &[
                TopologySpec::Complete { n: 2 },
                TopologySpec::Complete { n: 3 },
            ],
            1.0,
        )
        .unwrap();
        assert!(close(r.lambda2, 2.0 / 7.0, 1e-15));
        assert!(close(r.weights_by_orbit[&1], 1.0 / 7.0, 1e-15));
        assert!(close(r.weights_by_orbit[&2], 2.0 / 21.0, 1e-15));
        assert!(close(r.budget_used, 1.0, 1e-14));
    }

    #[test]
    fn lp_complete_pairs_formula() {
        for (a, b) in [(2usize, 3usize), (3, 3), (2, 5), (4, 6)] {
            let r = lp_cartesian(
                &[
                    TopologySpec::Complete { n: a },
                    TopologySpec::Complete { n: b },
                ],
                1.0,
            )
            .unwrap();
            let expected = 2.0 / (2.0 * (a * b) as f64 - a as f64 - b as f64);
            assert!(close(r.lambda2, expected, 1e-14));
        }
    }

    #[test]
    fn lp_single_factor_is_complete() {
        let r = lp_cartesian(&[TopologySpec::Complete { n: 5 }], 1.0).unwrap();
        let k = cf(TopologySpec::Complete { n: 5 });
        assert!(close(r.lambda2, k.lambda2, 1e-15));
        assert!(close(r.weights_by_orbit[&1], k.weights_by_orbit[&0], 1e-15));
    }

    #[test]
    fn lp_rejects_non_transitive_factor() {
        let err = lp_cartesian(&[TopologySpec::Path { n: 4 }], 1.0).unwrap_err();
        assert!(matches!(err, Error::Unsupported(_)));
    }

    #[test]
    fn asymmetric_coupled_complete_is_unsupported() {
        let err = closed_form(
            &TopologySpec::CoupledComplete {
                n1: 1,
                n2: 3,
                n3: 2,
            },
            1.0,
        );
        assert!(matches!(err, Err(Error::Unsupported(_))));
    }

    #[test]
    fn catalog_budget_and_gap_invariants() {
        for spec in catalog_up_to(12) {
            let r = match closed_form::<f64>(&spec, 1.0) {
                Ok(r) => r,
                Err(Error::Unsupported(_)) => continue,
                Err(e) => panic!("{spec}: {e}"),
            };
            assert!(
                close(r.budget_used, 1.0, 1e-10),
                "{spec}: budget {}",
                r.budget_used
            );
            assert!(r.weights_by_orbit.values().all(|&w| w >= 0.0), "{spec}");
            let gap = gap_of(&spec, &r);
            assert!(
                close(gap, r.lambda2, 1e-8),
                "{spec}: gap {gap} vs {}",
                r.lambda2
            );
        }
    }

    #[test]
    fn fiedler_substitution() {
        for q in 1..=5usize {
            let d = (2 * q + 1) as f64;
            let r = closed_form(&TopologySpec::Path { n: 2 * (q + 1) }, d).unwrap();
            let ccs = closed_form(&TopologySpec::CcsStar { p: 2, q }, d).unwrap();
            let expected = 6.0 / (((q + 1) * (2 * q + 3)) as f64);
            assert!(close(r.lambda2, expected, 1e-12), "q={q}");
            assert!(close(ccs.lambda2, expected, 1e-12), "q={q}");
        }
    }

    #[test]
    fn regime_boundaries_are_continuous() {
        // palm: 2p = q(q+1) at (3,2), (6,3), (10,4)
        for (p, q) in [(3usize, 2usize), (6, 3), (10, 4)] {
            let m = nat::<f64>(p + q + 1);
            let (pf, qf) = (p as f64, q as f64);
            let first = 6.0 / (6.0 * pf + qf * (qf + 1.0) * (2.0 * qf + 1.0));
            let second =
                12.0 * m / ((qf + 1.0) * (qf + 2.0) * (6.0 * pf + qf * (qf + 4.0 * pf + 1.0)));
            assert!(close(first, second, 1e-12), "palm ({p},{q})");
        }
        // lollipop: q(q+1) = √(2p(p+1)); solve for real p at q = 2, 3 and compare with palm.
        for q in [2.0f64, 3.0] {
            let target = (q * (q + 1.0)).powi(2) / 2.0;
            let p = (-1.0 + (1.0 + 4.0 * target).sqrt()) / 2.0;
            let r = (2.0 * p * (p + 1.0)).sqrt();
            let m = p + q + 1.0;
            let a = 6.0 * (p - 1.0) * m
                + (q + 1.0)
                    * (6.0 * (p + 1.0)
                        + 6.0 * q * r
                        + 2.0 * p * q * (2.0 * q + 1.0)
                        + q * (q + 1.0) * (q + 2.0));
            let lolli = 12.0 * m / a;
            // q(q+1) = R < 2p here, so palm is in its first regime
            let palm_s = 6.0 / (6.0 * p + q * (q + 1.0) * (2.0 * q + 1.0));
            assert!(close(lolli, palm_s, 1e-10), "q={q}: {lolli} vs {palm_s}");
        }
    }

    #[test]
    fn lollipop_general_at_two_one() {
        let d = (9.0 - 3f64.sqrt()) / 6.0;
        let r = closed_form(&TopologySpec::Lollipop { p: 2, q: 1 }, d).unwrap();
        assert!(close(r.lambda2, 1.0 - 1.0 / 3f64.sqrt(), 1e-10));
    }

    #[test]
    fn ccs_star_matches_gram_weights() {
        for (p, q) in [(3usize, 2usize), (5, 3), (2, 4)] {
            let r = cf(TopologySpec::CcsStar { p, q });
            let inv = crate::weight_opt::gram_inverse_ccs::<f64>(q);
            let w = weights_from_inverse(&inv, 0, p, r.lambda2);
            for (k, x) in w.iter().enumerate() {
                assert!(
                    close(r.weights_by_orbit[&(k as i32)], *x, 1e-12),
                    "({p},{q}) w{k}"
                );
            }
        }
    }

    #[test]
    fn f32_closed_form() {
        let r = closed_form::<f32>(&TopologySpec::Path { n: 4 }, 1.0).unwrap();
        assert!((r.lambda2 - 0.2).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn homogeneous_in_budget(idx in 0usize..200, d in prop::sample::select(vec![1.0, 2.5, 10.0])) {
            let catalog = catalog_up_to(10);
            let spec = &catalog[idx % catalog.len()];
            if let (Ok(a), Ok(b)) = (closed_form::<f64>(spec, 1.0), closed_form::<f64>(spec, d)) {
                prop_assert!(close(b.lambda2, d * a.lambda2, 1e-12 * d));
                for (k, w) in &a.weights_by_orbit {
                    prop_assert!(close(b.weights_by_orbit[k], d * w, 1e-12 * d));
                }
            }
        }
    }
}
