//! Scalar abstractions.
//!
//! The curvature of a triangular frame is a rational function of its entries,
//! so everything on that path only needs field operations and is written
//! against [`Scalar`]. That covers `f32`/`f64`, exact [`BigRational`]
//! arithmetic, [`Dual`] numbers (forward-mode derivatives) and
//! [`DoubleDouble`] (extended precision for polishing degenerate roots).
//!
//! Routines that need square roots or magnitude-based pivoting (Cholesky,
//! LU, the standard matrices) use the narrower [`Real`] bound.
//!
//! [`BigRational`]: num_rational::BigRational

mod double_double;
mod dual;

pub use double_double::DoubleDouble;
pub use dual::Dual;

use num_traits::{Float, FromPrimitive, Num, ToPrimitive};
use std::fmt::Debug;
use std::ops::Neg;

/// Field-like scalar: exact or floating, with conversions to and from primitives.
pub trait Scalar:
    Num + Neg<Output = Self> + Clone + PartialOrd + Debug + FromPrimitive + ToPrimitive
{
}

impl<T> Scalar for T where
    T: Num + Neg<Output = Self> + Clone + PartialOrd + Debug + FromPrimitive + ToPrimitive
{
}

/// IEEE floating point scalar (`f32` or `f64`).
pub trait Real: Scalar + Float + Send + Sync + 'static {}

impl<T> Real for T where T: Scalar + Float + Send + Sync + 'static {}

/// Small integer constant in any scalar type.
#[inline]
pub fn lit<T: Scalar>(v: i64) -> T {
    T::from_i64(v).expect("integer literal representable in scalar type")
}

/// `f64` value converted into `T`; exact for rationals, rounded for `f32`.
#[inline]
pub fn from_f64<T: Scalar>(v: f64) -> T {
    T::from_f64(v).expect("finite f64 representable in scalar type")
}

#[inline]
pub fn to_f64<T: Scalar>(v: &T) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

#[inline]
pub(crate) fn abs<T: Scalar>(v: T) -> T {
    if v < T::zero() {
        -v
    } else {
        v
    }
}
