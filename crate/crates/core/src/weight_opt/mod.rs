//! Optimal edge weights for the fastest consensus rate: closed forms for the topology
//! catalog, the equalization LP for Cartesian products, a numeric maximizer of `λ₂` over
//! orbit weights, and the dual (complementary slackness) certificate.

mod certificate;
mod closed_form;
mod gram;
mod numeric;

pub use certificate::{dual_certificate, CertificateReport, CERTIFICATE_TOLERANCE};
pub use closed_form::{closed_form, lp_cartesian};
pub use gram::{
    gram_inverse_ccs, gram_lambda2_ccs, gram_lambda2_two_branch, gram_matrix_ccs,
    gram_matrix_two_branch, two_branch_index,
};
pub use numeric::{maximize_gap_numeric, maximize_gap_numeric_with, NumericOptions, MAX_ORBITS};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::scalar::{from_usize, Real};
use crate::spectral::spectral_gap;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    LpEqualization,
    Numeric,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::ClosedForm => "closed_form",
            Method::LpEqualization => "lp_equalization",
            Method::Numeric => "numeric",
        })
    }
}

/// Optimal weight per orbit label and the resulting spectral gap.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalResult<T> {
    pub weights_by_orbit: BTreeMap<i32, T>,
    pub lambda2: T,
    pub budget_used: T,
    pub method: Method,
    /// False only when the numeric maximizer stopped at its iteration cap.
    pub converged: bool,
    pub certificate: Option<CertificateReport<T>>,
}

impl<T: Real> OptimalResult<T> {
    /// Applies `weights_by_orbit` to `g` and measures the gap and the budget it spends.
    pub fn evaluate(
        g: &WeightedGraph<T>,
        weights_by_orbit: BTreeMap<i32, T>,
        method: Method,
    ) -> Result<Self> {
        let weighted = g.with_orbit_weights(&weights_by_orbit)?;
        let lambda2 = spectral_gap(&weighted.laplacian())?;
        let budget_used = budget_of(g, &weights_by_orbit);
        Ok(Self {
            weights_by_orbit,
            lambda2,
            budget_used,
            method,
            converged: true,
            certificate: None,
        })
    }

    /// The graph `g` carrying these weights.
    pub fn weighted_graph(&self, g: &WeightedGraph<T>) -> Result<WeightedGraph<T>> {
        g.with_orbit_weights(&self.weights_by_orbit)
    }

    pub fn weight(&self, orbit: i32) -> Option<T> {
        self.weights_by_orbit.get(&orbit).copied()
    }
}

/// `Σ (orbit size) · (orbit weight)`.
pub fn budget_of<T: Real>(g: &WeightedGraph<T>, weights_by_orbit: &BTreeMap<i32, T>) -> T {
    g.orbit_sizes()
        .iter()
        .map(|(o, &c)| from_usize::<T>(c) * weights_by_orbit.get(o).copied().unwrap_or(T::zero()))
        .fold(T::zero(), |a, b| a + b)
}

fn check_budget<T: Real>(d: T) -> Result<()> {
    if d > T::zero() && d.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "budget must be positive and finite, got {d:?}"
        )))
    }
}
