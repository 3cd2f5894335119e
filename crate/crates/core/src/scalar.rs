//! Scalar abstraction: every coefficient-carrying type in this crate is
//! generic over [`Real`], with `f64` as the production instantiation and
//! `f32` available for quick low-precision scans.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::{Product, Sum};

use nalgebra::RealField;
use num_traits::{FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar usable for coefficients, bounds and dense matrices.
///
/// `RealField` supplies field arithmetic and transcendentals usable from
/// `nalgebra`, the `num-traits` bounds supply constants and conversions.
pub trait Real:
    RealField
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Copy
    + Default
    + Sum
    + Product
    + Display
    + LowerExp
    + Debug
    + serde::Serialize
    + Send
    + Sync
    + 'static
{
}

impl<T> Real for T where
    T: RealField
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + Copy
        + Default
        + Sum
        + Product
        + Display
        + LowerExp
        + Debug
        + serde::Serialize
        + Send
        + Sync
        + 'static
{
}

/// Shorthand conversion from an `f64` literal into the working scalar.
#[inline]
pub fn r64<R: Real>(v: f64) -> R {
    R::from_f64(v).expect("f64 literal must be representable in the scalar type")
}

/// ln(n!) by direct compensated summation of logarithms.
///
/// Truncation orders stay below a few hundred, so the direct sum is both
/// exact enough (relative error near machine precision) and cheap.
pub fn ln_factorial<R: Real>(n: usize) -> R {
    let mut sum = crate::summation::KahanSum::<R>::new();
    for k in 2..=n {
        sum.add(r64::<R>(k as f64).ln());
    }
    sum.value()
}
