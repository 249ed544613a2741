//! Scalar abstraction: the whole numerical core is generic over the real
//! scalar type, with `f64` as the production instantiation (see the type
//! aliases at the crate root).

use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar the simulator is generic over.
///
/// `nalgebra::RealField` supplies the elementary functions and the SVD;
/// the `num_traits` conversions bridge literals and report formatting.
pub trait Real: nalgebra::RealField + FromPrimitive + ToPrimitive + Copy {}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into the working scalar.
#[inline]
pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("finite f64 literal")
}

/// Converts the working scalar to `f64` for reporting.
#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().expect("scalar representable as f64")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_through_f64() {
        assert_eq!(real::<f64>(0.25), 0.25);
        assert_eq!(to_f64(real::<f32>(0.5)), 0.5);
    }
}
