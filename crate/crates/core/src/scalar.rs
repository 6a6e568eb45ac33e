use std::fmt::Debug;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar the core math is generic over: `f32` or `f64`.
pub trait Scalar: Float + FloatConst + FromPrimitive + Debug + Default + 'static {
    /// Shorthand conversion from an `f64` literal.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    /// Conversion from a `usize` count.
    fn of_usize(v: usize) -> Self {
        Self::from_usize(v).expect("count representable in scalar type")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
