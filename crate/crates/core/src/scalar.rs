//! Coefficient fields the algebra is generic over.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// A field of coefficients: binary32/binary64 reals, binary64 complex pairs,
/// or exact rationals.
///
/// `is_zero_within` is the only place where exact and floating fields
/// diverge: exact scalars compare against zero exactly and ignore the
/// tolerance.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// `true` when the field is exact (no rounding).
    const EXACT: bool;

    fn from_f64(v: f64) -> Self;

    fn from_i64(v: i64) -> Self;

    fn to_c64(&self) -> Complex64;

    /// Magnitude used for tolerance tests.
    fn magnitude(&self) -> f64 {
        self.to_c64().norm()
    }

    /// Report form: a number, an `[re, im]` pair, or `"p/q"` for exact values.
    fn to_json(&self) -> serde_json::Value {
        let z = self.to_c64();
        if z.im == 0.0 {
            serde_json::json!(z.re)
        } else {
            serde_json::json!([z.re, z.im])
        }
    }

    fn is_zero_within(&self, tol: f64) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.magnitude() <= tol
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    fn from_f64(v: f64) -> Self {
        v
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(*self, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;
    fn from_f64(v: f64) -> Self {
        v as f32
    }
    fn from_i64(v: i64) -> Self {
        v as f32
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(*self as f64, 0.0)
    }
}

impl Scalar for Complex64 {
    const EXACT: bool = false;
    fn from_f64(v: f64) -> Self {
        Complex64::new(v, 0.0)
    }
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;
    /// Exact binary value of `v`; non-finite input maps to zero.
    fn from_f64(v: f64) -> Self {
        BigRational::from_float(v).unwrap_or_else(BigRational::zero)
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(self.to_string())
    }
}

/// Rational with the smallest denominator (up to `1e9`) reproducing `v` to
/// binary64 precision; falls back to the exact binary value.
pub fn nearest_rational(v: f64) -> BigRational {
    if !v.is_finite() {
        return BigRational::zero();
    }
    // continued-fraction convergents
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut x = v;
    for _ in 0..64 {
        let a = x.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let (h2, k2) = (ai * h1 + h0, ai * k1 + k0);
        if k2 > 1_000_000_000 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if ((h1 as f64) / (k1 as f64) - v).abs() <= f64::EPSILON * v.abs() {
            return BigRational::new(BigInt::from(h1), BigInt::from(k1));
        }
        let frac = x - a;
        if frac == 0.0 {
            break;
        }
        x = 1.0 / frac;
    }
    BigRational::from_f64(v)
}

/// Exact rational from a numerator/denominator pair.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_zero_ignores_tolerance() {
        let tiny = ratio(1, 1_000_000_000_000);
        assert!(!tiny.is_zero_within(1.0));
        assert!(1e-13f64.is_zero_within(1e-12));
    }

    #[test]
    fn nearest_rational_recovers_decimals() {
        assert_eq!(nearest_rational(0.1), ratio(1, 10));
        assert_eq!(nearest_rational(-2.5), ratio(-5, 2));
        assert_eq!(nearest_rational(1.0 / 3.0), ratio(1, 3));
        assert_eq!(nearest_rational(0.0), ratio(0, 1));
    }

    #[test]
    fn rational_from_float_is_exact() {
        assert_eq!(BigRational::from_f64(0.5), ratio(1, 2));
        assert_eq!(BigRational::from_f64(-3.0), ratio(-3, 1));
    }
}
