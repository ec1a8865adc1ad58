use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point scalar the numeric routines are written against: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossless-enough conversion from a literal or a count.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable in scalar")
    }

    fn count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar")
    }

    fn hundred() -> Self {
        Self::lit(100.0)
    }
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
}
