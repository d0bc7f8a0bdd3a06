use std::fmt;
use std::iter;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar the toolkit is generic over: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + iter::Sum + fmt::Debug + fmt::Display + fmt::LowerExp + 'static
{
    /// Shorthand for bringing an `f64` literal into the scalar type.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("literal not representable in scalar type")
    }
}

impl<T> Scalar for T where
    T: Float + FloatConst + FromPrimitive + iter::Sum + fmt::Debug + fmt::Display + fmt::LowerExp + 'static
{
}
