use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::poly::Polynomial;
use super::AlgebraError;
use crate::scalar::Scalar;

/// Expansion point of a [`LaurentSeries`].
#[derive(Debug, Clone, PartialEq)]
pub enum Center<S> {
    Finite(S),
    Infinity,
}

/// Truncated Laurent series `sum_{k = valuation}^{precision - 1} a_k u^k + O(u^precision)`
/// in the local parameter `u = x - c` (finite center) or `u = 1/x` (infinity).
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentSeries<S> {
    center: Center<S>,
    valuation: i32,
    coeffs: Vec<S>,
    precision: i32,
}

impl<S: Scalar> LaurentSeries<S> {
    /// Builds a series from raw local coefficients starting at `valuation`.
    pub fn from_coeffs(center: Center<S>, valuation: i32, coeffs: Vec<S>, precision: i32) -> Result<Self, AlgebraError> {
        if precision <= valuation {
            return Err(AlgebraError::Truncation { valuation, precision });
        }
        let mut coeffs = coeffs;
        coeffs.resize((precision - valuation) as usize, S::zero());
        Ok(Self { center, valuation, coeffs, precision })
    }

    /// Expansion of a polynomial, exact up to `O(u^precision)`.
    pub fn from_polynomial(p: &Polynomial<S>, center: Center<S>, precision: i32) -> Result<Self, AlgebraError> {
        match &center {
            Center::Finite(c) => {
                let shifted = p.shift(c);
                Self::from_coeffs(center.clone(), 0, shifted.into_coeffs(), precision.max(1))
            }
            Center::Infinity => {
                let deg = p.degree().unwrap_or(0) as i32;
                let coeffs: Vec<S> = (0..=deg).rev().map(|k| p.coeff(k as usize)).collect();
                Self::from_coeffs(center.clone(), -deg, coeffs, precision.max(-deg + 1))
            }
        }
    }

    /// Expansion of `num / den` at `center`.
    pub fn from_rational(num: &Polynomial<S>, den: &Polynomial<S>, center: Center<S>, precision: i32, tol: f64) -> Result<Self, AlgebraError> {
        // Pad the operand precision so the quotient reaches `precision`.
        let pad = den.degree().unwrap_or(0) as i32 + num.degree().unwrap_or(0) as i32 + 2;
        let n = Self::from_polynomial(num, center.clone(), precision + pad)?;
        let d = Self::from_polynomial(den, center, precision + pad)?;
        let q = n.div(&d, tol)?;
        Ok(q.truncate(precision))
    }

    pub fn center(&self) -> &Center<S> {
        &self.center
    }

    pub fn valuation(&self) -> i32 {
        self.valuation
    }

    pub fn precision(&self) -> i32 {
        self.precision
    }

    /// Coefficient of `u^k` (zero below the valuation).
    ///
    /// Panics when `k` is at or beyond the truncation order.
    pub fn coeff(&self, k: i32) -> S {
        assert!(k < self.precision, "coefficient u^{k} is beyond truncation order {}", self.precision);
        if k < self.valuation {
            S::zero()
        } else {
            self.coeffs[(k - self.valuation) as usize].clone()
        }
    }

    /// Coefficient of `x^k` for an expansion at infinity.
    pub fn coeff_of_x_power(&self, k: i32) -> S {
        debug_assert!(matches!(self.center, Center::Infinity));
        self.coeff(-k)
    }

    /// Residue of `f dx`: coefficient of `(x - c)^-1`, or at infinity
    /// minus the coefficient of `1/x`.
    pub fn residue(&self) -> S {
        match self.center {
            Center::Finite(_) => self.coeff(-1),
            Center::Infinity => -self.coeff(1),
        }
    }

    pub fn truncate(&self, precision: i32) -> Self {
        let precision = precision.min(self.precision).max(self.valuation + 1);
        let mut coeffs = self.coeffs.clone();
        coeffs.truncate((precision - self.valuation) as usize);
        Self { center: self.center.clone(), valuation: self.valuation, coeffs, precision }
    }

    /// Drops leading coefficients that vanish within `tol` (relative to the
    /// largest coefficient), moving the valuation up.
    fn normalized(&self, tol: f64) -> Result<Self, AlgebraError> {
        let scale = self.coeffs.iter().map(Scalar::magnitude).fold(0.0, f64::max);
        let skip = self
            .coeffs
            .iter()
            .take_while(|c| c.is_zero_within(tol * scale))
            .count();
        if skip == self.coeffs.len() {
            return Err(AlgebraError::ZeroSeries);
        }
        Ok(Self {
            center: self.center.clone(),
            valuation: self.valuation + skip as i32,
            coeffs: self.coeffs[skip..].to_vec(),
            precision: self.precision,
        })
    }

    /// Multiplicative inverse; the leading coefficient must not vanish.
    pub fn inverse(&self, tol: f64) -> Result<Self, AlgebraError> {
        let a = self.normalized(tol)?;
        let n = a.coeffs.len();
        let a0 = a.coeffs[0].clone();
        let mut b = vec![S::zero(); n];
        b[0] = S::one() / a0.clone();
        for k in 1..n {
            let mut acc = S::zero();
            for j in 1..=k {
                acc = acc + a.coeffs[j].clone() * b[k - j].clone();
            }
            b[k] = -acc / a0.clone();
        }
        let valuation = -a.valuation;
        Self::from_coeffs(a.center, valuation, b, valuation + n as i32)
    }

    pub fn div(&self, rhs: &Self, tol: f64) -> Result<Self, AlgebraError> {
        Ok(self.clone() * rhs.inverse(tol)?)
    }

    pub fn scale(&self, c: &S) -> Self {
        Self {
            center: self.center.clone(),
            valuation: self.valuation,
            coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect(),
            precision: self.precision,
        }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> LaurentSeries<T> {
        LaurentSeries {
            center: match &self.center {
                Center::Finite(c) => Center::Finite(f(c)),
                Center::Infinity => Center::Infinity,
            },
            valuation: self.valuation,
            coeffs: self.coeffs.iter().map(&f).collect(),
            precision: self.precision,
        }
    }
}

impl LaurentSeries<Complex64> {
    /// Square root with the principal branch on the leading coefficient.
    /// The (normalized) valuation must be even.
    pub fn sqrt(&self, tol: f64) -> Result<Self, AlgebraError> {
        let a = self.normalized(tol)?;
        if a.valuation % 2 != 0 {
            return Err(AlgebraError::OddValuation(a.valuation));
        }
        let n = a.coeffs.len();
        let mut b = vec![Complex64::new(0.0, 0.0); n];
        b[0] = a.coeffs[0].sqrt();
        for k in 1..n {
            let mut acc = a.coeffs[k];
            for j in 1..k {
                acc -= b[j] * b[k - j];
            }
            b[k] = acc / (2.0 * b[0]);
        }
        let valuation = a.valuation / 2;
        Self::from_coeffs(a.center, valuation, b, valuation + n as i32)
    }
}

impl<S: Scalar> Add for LaurentSeries<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let valuation = self.valuation.min(rhs.valuation);
        let precision = self.precision.min(rhs.precision);
        let coeffs = (valuation..precision.max(valuation + 1))
            .map(|k| {
                let a = if k < self.precision { self.coeff(k) } else { S::zero() };
                let b = if k < rhs.precision { rhs.coeff(k) } else { S::zero() };
                a + b
            })
            .collect();
        Self { center: self.center, valuation, coeffs, precision: precision.max(valuation + 1) }
    }
}

impl<S: Scalar> Neg for LaurentSeries<S> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(&-S::one())
    }
}

impl<S: Scalar> Sub for LaurentSeries<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<S: Scalar> Mul for LaurentSeries<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let valuation = self.valuation + rhs.valuation;
        let precision = (self.precision + rhs.valuation).min(rhs.precision + self.valuation);
        let n = (precision - valuation).max(1) as usize;
        let mut coeffs = vec![S::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if i + j < n {
                    coeffs[i + j] = coeffs[i + j].clone() + a.clone() * b.clone();
                }
            }
        }
        Self { center: self.center, valuation, coeffs, precision: valuation + n as i32 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn semicircle_resolvent_expansion() {
        // W = (x - sqrt(x^2 - 4)) / 2 = 1/x + 1/x^3 + 2/x^5 + ...
        let x = Polynomial::new(vec![c(0.0), c(1.0)]);
        let disc = Polynomial::new(vec![c(-4.0), c(0.0), c(1.0)]);
        let xs = LaurentSeries::from_polynomial(&x, Center::Infinity, 8).unwrap();
        let root = LaurentSeries::from_polynomial(&disc, Center::Infinity, 8).unwrap().sqrt(1e-14).unwrap();
        let w = (xs - root).scale(&c(0.5));
        assert!((w.coeff_of_x_power(-1) - c(1.0)).norm() < 1e-14);
        assert!((w.coeff_of_x_power(-3) - c(1.0)).norm() < 1e-14);
        assert!((w.coeff_of_x_power(-5) - c(2.0)).norm() < 1e-14);
        assert!(w.coeff_of_x_power(0).norm() < 1e-14);
    }

    #[test]
    fn residue_at_infinity_sign() {
        // f = x - t/x with t = 3: Res_inf f dx = t
        let num = Polynomial::new(vec![c(-3.0), c(0.0), c(1.0)]);
        let den = Polynomial::new(vec![c(0.0), c(1.0)]);
        let s = LaurentSeries::from_rational(&num, &den, Center::Infinity, 4, 1e-14).unwrap();
        assert!((s.residue() - c(3.0)).norm() < 1e-14);
    }

    #[test]
    fn truncation_invariant() {
        assert!(LaurentSeries::<f64>::from_coeffs(Center::Infinity, 2, vec![], 2).is_err());
    }
}
