//! Scalar abstraction: every algorithm in this crate is generic over the
//! underlying real float type.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real scalar type the whole crate is generic over.
///
/// Implemented for `f32` and `f64`. The bound collects what the numerics
/// need: IEEE float operations, π-style constants, lossless construction
/// from small integers/literals, and assignment operators.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Default + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` constant into `Self` (rounding for `f32`).
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64 constant")
    }

    /// Converts a `usize` into `Self`.
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize fits in float")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Returns true when both parts of `z` are finite.
pub fn is_finite_c<T: Real>(z: Complex<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}
