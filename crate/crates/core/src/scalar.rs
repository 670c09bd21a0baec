//! Scalar types the tensor and physics code is generic over.
//!
//! [`Scalar`] covers ordered fields: `f32`, `f64` and exact [`BigRational`].
//! Anything that needs square roots, trigonometry or exponentials is bounded
//! on [`Real`] instead, which only the floating point types implement.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, Num, Signed, ToPrimitive};

/// An ordered field usable as tensor component type.
pub trait Scalar:
    Num + Signed + PartialOrd + FromPrimitive + ToPrimitive + Clone + Debug + Send + Sync + 'static
{
    /// True when arithmetic is exact, so zero checks can demand literal zero.
    const EXACT: bool;

    /// Converts an exact rational. Floating types round to nearest.
    fn from_ratio(r: &BigRational) -> Self;

    /// Exact conversion of an `f64` for rational types, identity for floats.
    fn from_f64_lossless(x: f64) -> Self {
        Self::from_f64(x).expect("finite f64")
    }

    /// The decimal number `x` prints as (its shortest round-trip form).
    /// Exact scalars get that decimal exactly, so `0.6` becomes `3/5`
    /// rather than the nearest binary fraction.
    fn from_decimal_f64(x: f64) -> Self {
        Self::from_f64_lossless(x)
    }

    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("integer fits scalar")
    }

    fn approx_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// `|self| <= tol * scale`; for exact scalars only literal zero qualifies.
    fn negligible(&self, scale: &Self, tol: f64) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.abs().approx_f64() <= tol * scale.abs().approx_f64()
        }
    }

    fn max_of(a: Self, b: Self) -> Self {
        if a >= b {
            a
        } else {
            b
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_ratio(r: &BigRational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn from_ratio(r: &BigRational) -> Self {
        r.to_f32().unwrap_or(f32::NAN)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_decimal_f64(x: f64) -> Self {
        decimal_rational(x)
    }

    fn from_ratio(r: &BigRational) -> Self {
        r.clone()
    }
}

/// Floating point scalars.
pub trait Real: Scalar + Float + FloatConst {}

impl Real for f64 {}
impl Real for f32 {}

/// `num / den` as an exact rational.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact rational value of the shortest decimal representation of `x`.
pub fn decimal_rational(x: f64) -> BigRational {
    assert!(x.is_finite(), "non-finite value has no decimal form");
    let text = format!("{x:e}");
    let (mantissa, exponent) = text.split_once('e').expect("LowerExp always has an exponent");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits: BigInt = format!("{int_part}{frac_part}").parse().expect("decimal digits");
    let shift = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    if shift >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, shift as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-shift) as usize))
    }
}

pub(crate) fn two<S: Scalar>() -> S {
    S::one() + S::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Zero};

    #[test]
    fn exactness_flags() {
        assert!(!<f64 as Scalar>::EXACT);
        assert!(!<f32 as Scalar>::EXACT);
        assert!(<BigRational as Scalar>::EXACT);
    }

    #[test]
    fn rational_from_f64_is_exact() {
        let x = 0.1_f64;
        let q = BigRational::from_f64_lossless(x);
        assert_eq!(q.to_f64().unwrap(), x);
        assert_ne!(q, ratio(1, 10));
    }

    #[test]
    fn decimal_conversion() {
        assert_eq!(decimal_rational(0.6), ratio(3, 5));
        assert_eq!(decimal_rational(-1.25e-3), ratio(-1, 800));
        assert_eq!(decimal_rational(1.5e3), ratio(1500, 1));
        assert_eq!(decimal_rational(0.0), ratio(0, 1));
        let e = decimal_rational(1.602176634e-19);
        assert_eq!(e * BigRational::from_integer(BigInt::from(10).pow(28)), ratio(1_602_176_634, 1));
        assert_eq!(<f64 as Scalar>::from_decimal_f64(0.1), 0.1);
    }

    #[test]
    fn negligible_respects_exactness() {
        let tiny = BigRational::from_f64_lossless(1e-300);
        assert!(!tiny.negligible(&BigRational::one(), 1e-10));
        assert!(1e-300_f64.negligible(&1.0, 1e-10));
        assert!(0.0_f64.negligible(&0.0, 1e-10));
        assert!(BigRational::zero().negligible(&BigRational::zero(), 0.0));
    }
}
