use qconsensus::graph::{catalog_up_to, TopologySpec};
use qconsensus::weight_opt::{
    closed_form, dual_certificate, lp_cartesian, maximize_gap_numeric, Method, OptimalResult,
    MAX_ORBITS,
};
use qconsensus::{Error, Graph};
use std::collections::BTreeMap;

fn numeric(spec: &TopologySpec, d: f64) -> OptimalResult<f64> {
    maximize_gap_numeric(&spec.build::<f64>().unwrap(), d).unwrap()
}

#[test]
fn closed_forms_agree_with_numeric_on_small_catalog() {
    let mut checked = 0;
    for spec in catalog_up_to(12) {
        let g: Graph = spec.build().unwrap();
        let cf = match closed_form::<f64>(&spec, 1.0) {
            Ok(r) => r,
            Err(Error::Unsupported(_)) => continue,
            Err(e) => panic!("{spec}: {e}"),
        };
        let cert = dual_certificate(&g, &cf, 1.0).unwrap();
        assert!(cert.accepted, "{spec}: {cert:?}");
        if g.orbit_sizes().len() > MAX_ORBITS {
            continue;
        }
        let num = maximize_gap_numeric(&g, 1.0).unwrap();
        assert!(
            (cf.lambda2 - num.lambda2).abs() <= 1e-5,
            "{spec}: closed {} numeric {}",
            cf.lambda2,
            num.lambda2
        );
        assert!((num.budget_used - 1.0).abs() <= 1e-10, "{spec}");
        checked += 1;
    }
    assert!(checked > 100, "only {checked} topologies compared");
}

#[test]
fn numeric_is_homogeneous_in_budget() {
    for spec in [
        TopologySpec::Path { n: 5 },
        TopologySpec::Lollipop { p: 3, q: 2 },
        TopologySpec::CoupledComplete {
            n1: 1,
            n2: 3,
            n3: 2,
        },
    ] {
        let base = numeric(&spec, 1.0);
        for d in [2.5, 10.0] {
            let r = numeric(&spec, d);
            assert!(
                (r.lambda2 - d * base.lambda2).abs() <= 1e-6 * d,
                "{spec} at {d}"
            );
            assert!((r.budget_used - d).abs() <= 1e-10 * d);
        }
    }
}

#[test]
fn zero_weight_orbits_found_numerically() {
    let paw = numeric(&TopologySpec::Paw, 1.0);
    assert!(paw.weights_by_orbit[&0] <= 1e-5);
    // q(q+1) > √(2p(p+1)) puts these lollipops in the palm regime
    for (p, q) in [(2usize, 2usize), (3, 2), (2, 3), (5, 3)] {
        let r = numeric(&TopologySpec::Lollipop { p, q }, 1.0);
        assert!(
            r.weights_by_orbit[&-1] <= 1e-4,
            "lollipop({p},{q}): {:?}",
            r.weights_by_orbit
        );
        let palm = closed_form::<f64>(&TopologySpec::Palm { p, q }, 1.0).unwrap();
        assert!((r.lambda2 - palm.lambda2).abs() <= 1e-6);
    }
}

#[test]
fn asymmetric_coupled_complete_needs_numeric() {
    let spec = TopologySpec::CoupledComplete {
        n1: 1,
        n2: 3,
        n3: 2,
    };
    assert!(matches!(
        closed_form::<f64>(&spec, 1.0),
        Err(Error::Unsupported(_))
    ));
    let r = numeric(&spec, 1.0);
    assert_eq!(r.method, Method::Numeric);
    assert!(r.lambda2 > 0.0);
    // the symmetric neighbours bracket it
    let lo = closed_form::<f64>(
        &TopologySpec::CoupledComplete {
            n1: 2,
            n2: 3,
            n3: 2,
        },
        1.0,
    )
    .unwrap()
    .lambda2;
    assert!(r.lambda2 > lo);
}

#[test]
fn cartesian_lp_matches_numeric() {
    for (a, b) in [(2usize, 3usize), (3, 3), (2, 5)] {
        let factors = vec![
            TopologySpec::Complete { n: a },
            TopologySpec::Complete { n: b },
        ];
        let lp = lp_cartesian::<f64>(&factors, 1.0).unwrap();
        let num = numeric(&TopologySpec::CartesianProduct { factors }, 1.0);
        assert!((lp.lambda2 - num.lambda2).abs() <= 1e-5, "K{a}xK{b}");
        for (k, w) in &lp.weights_by_orbit {
            assert!((num.weights_by_orbit[k] - w).abs() <= 1e-5);
        }
    }
}

#[test]
fn uniform_weights_are_rejected_where_suboptimal() {
    for spec in [
        TopologySpec::Path { n: 4 },
        TopologySpec::Lollipop { p: 2, q: 1 },
    ] {
        let g: Graph = spec.build().unwrap();
        let w = 1.0 / g.edge_count() as f64;
        let by_orbit: BTreeMap<i32, f64> = g.orbit_sizes().keys().map(|&o| (o, w)).collect();
        let uniform = OptimalResult::evaluate(&g, by_orbit, Method::Numeric).unwrap();
        let best = closed_form::<f64>(&spec, 1.0).unwrap();
        assert!(uniform.lambda2 <= 0.98 * best.lambda2, "{spec}");
        assert!(
            !dual_certificate(&g, &uniform, 1.0).unwrap().accepted,
            "{spec}"
        );
    }
}

#[test]
fn optimal_result_serializes_with_integer_orbit_keys() {
    let r = closed_form::<f64>(&TopologySpec::Lollipop { p: 2, q: 1 }, 1.0).unwrap();
    let v: serde_json::Value = serde_json::to_value(&r).unwrap();
    assert!(v["weights_by_orbit"]["-1"].is_number());
    assert_eq!(v["method"], "closed_form");
}
