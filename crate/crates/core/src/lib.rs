//! Induced (Schreier) graphs of continuous-time quantum consensus, optimal edge weights for
//! the fastest consensus rate, and a small Gell-Mann basis simulator of the swap master
//! equation.
//!
//! The combinatorial layers (`partition`, `graph`, `induced`) are generic over [`Scalar`],
//! which includes exact rationals. Eigen-based layers (`spectral`, `weight_opt`, `quantum`)
//! need a floating [`Real`].

pub mod error;
pub mod graph;
pub mod induced;
pub mod partition;
pub mod quantum;
pub mod scalar;
pub mod spectral;
pub mod weight_opt;

pub use error::{Error, Result};
pub use graph::{TopologySpec, WeightedGraph};
pub use partition::{Partition, Tabloid};
pub use scalar::{Real, Scalar};

pub use num_rational::Rational64;

/// Dense matrix over `f64`.
pub type Matrix = nalgebra::DMatrix<f64>;
/// Weighted graph with `f64` weights.
pub type Graph = graph::WeightedGraph<f64>;
/// Weighted graph with exact rational weights.
pub type ExactGraph = graph::WeightedGraph<Rational64>;
pub type Induced = induced::InducedGraph<f64>;
pub type ExactInduced = induced::InducedGraph<Rational64>;

pub type Optimal = weight_opt::OptimalResult<f64>;
pub type Certificate = weight_opt::CertificateReport<f64>;
pub type Basis = quantum::GellMannBasis<f64>;
pub type Density = quantum::DensityState<f64>;
