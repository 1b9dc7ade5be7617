//! Floating-point abstraction shared by every numeric module.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar used throughout the crate: `f32` or `f64`.
pub trait Scalar:
    'static
    + Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
{
    /// Converts an `f64` literal. Panics only if `Self` cannot represent finite `f64`s,
    /// which never happens for the two implementors.
    #[inline(always)]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline(always)]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Large finite value used to make diverged candidates lose comparisons.
    fn sentinel() -> Self;
}

impl Scalar for f32 {
    #[inline(always)]
    fn sentinel() -> Self {
        1.0e30
    }
}

impl Scalar for f64 {
    #[inline(always)]
    fn sentinel() -> Self {
        1.0e100
    }
}

/// Wraps an angle into `(-pi, pi]`.
#[inline]
pub fn wrap_angle<T: Scalar>(a: T) -> T {
    let two_pi = T::PI() + T::PI();
    let mut r = a % two_pi;
    if r > T::PI() {
        r -= two_pi;
    } else if r <= -T::PI() {
        r += two_pi;
    }
    r
}

/// Linear interpolation between `a` and `b`.
#[inline]
pub fn lerp<T: Scalar>(a: T, b: T, w: T) -> T {
    a + (b - a) * w
}
