//! Scalar abstraction shared by weights, bandwidths, times and metrics.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point type used for edge weights, bandwidths and communication times.
///
/// Implemented for every type satisfying the bounds, in practice `f32` and `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Display + Debug + FromStr + Default + Send + Sync + 'static
{
    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).unwrap_or_else(Self::infinity)
    }

    /// True when the value has no fractional part.
    #[inline]
    fn is_integral(self) -> bool {
        self.is_finite() && self.fract() == Self::zero()
    }
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + ToPrimitive + Sum + Display + Debug + FromStr + Default + Send + Sync + 'static
{
}

/// Total order on a scalar that is known not to be NaN.
pub(crate) fn cmp<W: Scalar>(a: W, b: W) -> std::cmp::Ordering {
    a.partial_cmp(&b).expect("NaN in scalar comparison")
}
