//! Scalar abstraction for the numerical core.

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Floating-point scalar the numerical routines are generic over.
///
/// Implemented by `f32` and `f64`. [`nalgebra::RealField`] supplies the
/// field operations and elementary functions, the `num-traits` conversion
/// traits bridge to counts and exact literals.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive {
    /// Lossy conversion from `f64`, for literals and tolerances.
    fn from_f64_lossy(value: f64) -> Self {
        <Self as FromPrimitive>::from_f64(value).expect("finite f64 converts to any Real")
    }

    /// Conversion from a count.
    fn from_usize_lossy(value: usize) -> Self {
        <Self as FromPrimitive>::from_usize(value).expect("usize converts to any Real")
    }

    /// Lossy view as `f64`, for reporting and serialization.
    fn to_f64_lossy(self) -> f64 {
        <Self as ToPrimitive>::to_f64(&self).expect("any Real converts to f64")
    }
}

impl<T> Real for T where T: RealField + Copy + FromPrimitive + ToPrimitive {}
