//! Scalar abstraction for the pipeline math: `f32` or `f64`.

use std::fmt;
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssignOps, ToPrimitive};
use rustfft::FftNum;

/// Floating-point scalar every numeric routine in this crate is generic over.
///
/// `f64` is the default throughout the CLI and the benchmark harness; `f32`
/// satisfies the same contracts at reduced precision.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssignOps
    + Sum<Self>
    + FftNum
    + fmt::Display
    + fmt::LowerExp
    + 'static
{
    /// Lossless-enough conversion from `f64` for constants and coordinates.
    fn from_f64_c(v: f64) -> Self {
        Self::from_f64(v).expect("f64 constant representable")
    }

    /// Conversion from `usize` counts and indices.
    fn from_usize_c(v: usize) -> Self {
        Self::from_usize(v).expect("usize representable")
    }

    /// Widening to `f64` for serialization and mixed-precision internals.
    fn to_f64_c(self) -> f64 {
        self.to_f64().expect("finite scalar")
    }
}

impl Real for f32 {}
impl Real for f64 {}
