//! Scalar traits shared by the exact and floating layers.

use nalgebra::{ClosedAddAssign, ClosedMulAssign, ClosedSubAssign, RealField};
use num_traits::{FromPrimitive, One, ToPrimitive, Zero};
use std::ops::Neg;

/// Entry type for graphs, Laplacians and projection products.
///
/// Covers `f32`, `f64` and `num_rational::Rational64`; with rationals the
/// intertwining residual cancels exactly.
pub trait Scalar:
    nalgebra::Scalar
    + Copy
    + Zero
    + One
    + Neg<Output = Self>
    + PartialOrd
    + FromPrimitive
    + ClosedAddAssign
    + ClosedSubAssign
    + ClosedMulAssign
    + Send
    + Sync
{
}

impl<T> Scalar for T where
    T: nalgebra::Scalar
        + Copy
        + Zero
        + One
        + Neg<Output = T>
        + PartialOrd
        + FromPrimitive
        + ClosedAddAssign
        + ClosedSubAssign
        + ClosedMulAssign
        + Send
        + Sync
{
}

/// Floating scalar for everything that needs eigen-decompositions.
pub trait Real: Scalar + RealField + ToPrimitive {}

impl Real for f32 {}
impl Real for f64 {}

/// Absolute value usable with exact scalars.
pub fn abs<T: Scalar>(x: T) -> T {
    if x < T::zero() {
        -x
    } else {
        x
    }
}

pub fn from_usize<T: Scalar>(n: usize) -> T {
    T::from_usize(n).expect("integer not representable")
}

pub fn from_i64<T: Scalar>(n: i64) -> T {
    T::from_i64(n).expect("integer not representable")
}

/// Lossy conversion of an `f64` constant into `T`.
pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("constant not representable")
}

pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
