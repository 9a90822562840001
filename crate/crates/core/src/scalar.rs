use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real scalar the numerical core is generic over (`f32`, `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal. Never fails for the float types we support.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn from_i64_lossy(n: i64) -> Self {
        Self::from_i64(n).expect("integer representable in scalar type")
    }

    /// `x` folded into the half-open interval `[-period/2, period/2)`.
    fn wrap_centered(self, period: Self) -> Self {
        let half = period / Self::lit(2.0);
        let mut r = (self + half) % period;
        if r < Self::zero() {
            r += period;
        }
        r - half
    }
}

impl Real for f32 {}
impl Real for f64 {}
