//! Scalar abstraction shared by the numeric modules.
//!
//! Training and similarity code is written once against [`Scalar`] and
//! instantiated for `f32` and `f64`. Archives always store `f32`; values are
//! widened (or kept) when a [`crate::TrainSet`] is built from a layer.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point type usable by the probe trainer and the analysis code.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Lossless-where-possible conversion from an `f64` constant.
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("f64 literal representable")
    }

    /// Conversion from a stored `f32` representation value.
    fn from_stored(value: f32) -> Self;

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {
    fn from_stored(value: f32) -> Self {
        value
    }
}

impl Scalar for f64 {
    fn from_stored(value: f32) -> Self {
        f64::from(value)
    }
}

/// Dot product with a fixed left-to-right reduction order.
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

pub fn norm_inf<T: Scalar>(a: &[T]) -> T {
    a.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
}
