//! Desk-scale simulation of the swap master equation in the generalized Gell-Mann basis.
//!
//! States are dense `d^N × d^N` matrices. Expansion coefficients use
//! `ρ = 2^{-N} Σ_μ ρ_μ λ_{μ₁}⊗…⊗λ_{μ_N}`, so `ρ_μ = Tr(ρ λ_{μ₁}⊗…⊗λ_{μ_N})` and
//! `ρ_{0..0} = (2/d)^{N/2}`, which is one for qubits.

mod basis;
mod dynamics;
mod reduction;
mod state;

pub use basis::{gell_mann_basis, swap_from_gell_mann, swap_operator, CMatrix, GellMannBasis};
pub use dynamics::{
    consensus_state, ctc_integrate, permutations, qcme_integrate, CtcPropagator, QcmePropagator,
    MAX_CONSENSUS_SITES, MAX_QCME_DIM,
};
pub use reduction::{
    consensus_rate, decay_slope, verify_reduction, BlockDeviation, ReductionReport,
    MAX_REDUCTION_SITES, REDUCTION_TOLERANCE,
};
pub use state::{
    expand_density, reconstruct, CoefficientTensor, DensityJson, DensityState, MAX_DIM,
};
