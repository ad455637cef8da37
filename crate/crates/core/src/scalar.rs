//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar the estimators are generic over (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Converts an `f64` literal into `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    /// Converts a count into `Self`.
    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    /// Lossless-enough conversion to `f64` for reporting.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Arithmetic mean; `NaN` for an empty slice.
pub fn mean<F: Real>(xs: &[F]) -> F {
    if xs.is_empty() {
        return F::nan();
    }
    xs.iter().copied().sum::<F>() / F::from_count(xs.len())
}

/// Inner product of two equal-length slices.
pub fn dot<F: Real>(a: &[F], b: &[F]) -> F {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Euclidean norm computed with scaling to avoid overflow.
pub fn norm<F: Real>(xs: &[F]) -> F {
    let scale = xs.iter().fold(F::zero(), |m, &x| m.max(x.abs()));
    if scale == F::zero() || !scale.is_finite() {
        return scale;
    }
    let ss: F = xs.iter().map(|&x| (x / scale) * (x / scale)).sum();
    scale * ss.sqrt()
}

/// Rounds half away from zero to `digits` decimal places.
pub fn round_half_away(x: f64, digits: i32) -> f64 {
    let p = 10f64.powi(digits);
    let scaled = x * p;
    let r = scaled.abs().floor() + if scaled.abs().fract() >= 0.5 { 1.0 } else { 0.0 };
    r.copysign(scaled) / p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_is_half_away_from_zero() {
        assert_eq!(round_half_away(0.0125, 3), 0.013);
        assert_eq!(round_half_away(-0.0125, 3), -0.013);
        assert_eq!(round_half_away(2.5, 0), 3.0);
        assert_eq!(round_half_away(-2.5, 0), -3.0);
        assert_eq!(round_half_away(1.2344, 3), 1.234);
    }

    #[test]
    fn norm_handles_large_values() {
        let v = [3e200_f64, 4e200];
        assert!((norm(&v) / 5e200 - 1.0).abs() < 1e-15);
        assert_eq!(norm::<f64>(&[]), 0.0);
    }

    #[test]
    fn mean_of_f32() {
        assert_eq!(mean(&[1.0f32, 2.0, 3.0]), 2.0);
        assert!(mean::<f64>(&[]).is_nan());
    }
}
