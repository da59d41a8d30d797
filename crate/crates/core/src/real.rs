//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point scalar the library is generic over: `f32` or `f64`.
///
/// Physical results need `f64`; `f32` is supported for the pure kernels
/// (amplitudes, entropies of short vectors) where single precision is enough.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal or constant into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Converts a count into `Self`.
    #[inline]
    fn count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    /// Lossy conversion back to `f64`, for diagnostics and I/O.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Compensated (Neumaier) sum in index order. Every reduction in the crate
/// goes through an ordered fold so results do not depend on thread scheduling.
pub fn ordered_sum<T: Real, I: IntoIterator<Item = T>>(values: I) -> T {
    let mut sum = T::zero();
    let mut c = T::zero();
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c = c + ((sum - t) + v);
        } else {
            c = c + ((v - t) + sum);
        }
        sum = t;
    }
    sum + c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lit_round_trips_for_both_widths() {
        assert_eq!(f64::lit(0.25), 0.25);
        assert_eq!(f32::lit(0.25), 0.25f32);
        assert_eq!(f64::count(7), 7.0);
    }

    #[test]
    fn ordered_sum_recovers_lost_low_bits() {
        let v = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(ordered_sum(v), 2.0);
        let n = 100_000;
        let s: f64 = ordered_sum(std::iter::repeat_n(0.1, n));
        assert!((s - 10_000.0).abs() < 1e-11);
    }
}
