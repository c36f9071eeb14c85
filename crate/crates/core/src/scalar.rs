//! Scalar abstraction for the numeric core.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar the engine is generic over (`f32` or `f64`).
///
/// Tolerances throughout the crate are calibrated for `f64`; `f32` works for
/// the coarse operations (classification, closed-form equilibria at reduced
/// precision) but the default solver tolerances sit below `f32::EPSILON`.
pub trait Scalar:
    Float
    + FromPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum<Self>
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
}

impl<T> Scalar for T where
    T: Float
        + FromPrimitive
        + AddAssign
        + SubAssign
        + MulAssign
        + DivAssign
        + Sum<T>
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

/// Converts an `f64` literal (tolerances, defaults) into the working scalar.
#[inline]
pub fn lit<S: Scalar>(v: f64) -> S {
    S::from_f64(v).expect("f64 literal must convert into the scalar type")
}

/// Absolute tolerance (kW) for capability and game-type boundary comparisons.
pub const CLASSIFY_EPS: f64 = 1e-9;
