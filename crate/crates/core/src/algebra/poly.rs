use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::scalar::Scalar;

/// Dense univariate polynomial, coefficients in ascending degree.
///
/// The zero polynomial has an empty coefficient vector. Every constructor
/// strips exact trailing zeros; floating callers that want to drop
/// round-off use [`Polynomial::trimmed`].
#[derive(Clone, PartialEq)]
pub struct Polynomial<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> Polynomial<S> {
    pub fn new(mut coeffs: Vec<S>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(S::one())
    }

    pub fn constant(c: S) -> Self {
        Self::new(vec![c])
    }

    /// The identity polynomial `x`.
    pub fn x() -> Self {
        Self::new(vec![S::zero(), S::one()])
    }

    /// `c * x^k`.
    pub fn monomial(c: S, k: usize) -> Self {
        let mut coeffs = vec![S::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    /// `prod (x - r)`.
    pub fn from_roots(roots: &[S]) -> Self {
        roots.iter().fold(Self::one(), |acc, r| {
            acc * Self::new(vec![-r.clone(), S::one()])
        })
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.coeffs
    }

    /// Coefficient of `x^k`, zero past the degree.
    pub fn coeff(&self, k: usize) -> S {
        self.coeffs.get(k).cloned().unwrap_or_else(S::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&S> {
        self.coeffs.last()
    }

    /// Drops trailing coefficients below `tol` relative to the largest one.
    pub fn trimmed(&self, tol: f64) -> Self {
        let scale = self
            .coeffs
            .iter()
            .map(Scalar::magnitude)
            .fold(0.0, f64::max);
        let mut coeffs = self.coeffs.clone();
        while coeffs
            .last()
            .is_some_and(|c| c.is_zero_within(tol * scale))
        {
            coeffs.pop();
        }
        Self::new(coeffs)
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &S) -> S {
        self.coeffs
            .iter()
            .rev()
            .fold(S::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.clone() * S::from_i64(k as i64))
                .collect(),
        )
    }

    /// Antiderivative vanishing at zero.
    pub fn antiderivative(&self) -> Self {
        let mut coeffs = vec![S::zero()];
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c.clone() / S::from_i64(k as i64 + 1)),
        );
        Self::new(coeffs)
    }

    pub fn pow(&self, k: usize) -> Self {
        (0..k).fold(Self::one(), |acc, _| acc * self.clone())
    }

    /// `self(inner(x))`.
    pub fn compose(&self, inner: &Self) -> Self {
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(), |acc, c| acc * inner.clone() + Self::constant(c.clone()))
    }

    /// Euclidean division `self = q * d + r` with `deg r < deg d`.
    ///
    /// Panics if `d` is the zero polynomial.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead = d.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![S::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].clone() / lead.clone();
            for (j, dc) in d.coeffs.iter().enumerate() {
                rem[k + j] = rem[k + j].clone() - c.clone() * dc.clone();
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    /// Taylor coefficients at `c`: `self(c + u) = sum_k out[k] u^k`.
    pub fn shift(&self, c: &S) -> Self {
        self.compose(&Self::new(vec![c.clone(), S::one()]))
    }

    /// Divided-difference kernel `Q(x, m)` with `P(x) - P(m) = (x - m) Q(x, m)`,
    /// returned as a polynomial in `m` for a fixed `x`.
    ///
    /// `Q(x, m) = sum_r c_r sum_{j<r} x^{r-1-j} m^j`; its degree in `m` is
    /// `deg P - 1`, and it vanishes for constant `P`.
    pub fn divided_kernel(&self, x: &S) -> Self {
        let n = self.coeffs.len();
        if n <= 1 {
            return Self::zero();
        }
        // coefficient of m^j is sum_{r>j} c_r x^{r-1-j}, a Horner tail
        let mut out = vec![S::zero(); n - 1];
        let mut acc = S::zero();
        for j in (0..n - 1).rev() {
            acc = acc * x.clone() + self.coeffs[j + 1].clone();
            out[j] = acc.clone();
        }
        Self::new(out)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Polynomial<T> {
        Polynomial::new(self.coeffs.iter().map(f).collect())
    }

    pub fn to_complex(&self) -> Polynomial<Complex64> {
        self.map(Scalar::to_c64)
    }
}

impl<S: Scalar> Default for Polynomial<S> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<S: Scalar> Add for Polynomial<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<S: Scalar> Sub for Polynomial<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl<S: Scalar> Neg for Polynomial<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl<S: Scalar> Mul for Polynomial<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut out = vec![S::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }
}

impl<S: fmt::Debug> fmt::Debug for Polynomial<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            match k {
                0 => write!(f, "({c:?})")?,
                1 => write!(f, "({c:?})x")?,
                _ => write!(f, "({c:?})x^{k}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use num_rational::BigRational;

    fn q(v: &[i64]) -> Polynomial<BigRational> {
        Polynomial::new(v.iter().map(|&c| ratio(c, 1)).collect())
    }

    #[test]
    fn kernel_of_square_is_x_plus_m() {
        // u^2 -> x + m, evaluated at x = 3: 3 + m
        let k = q(&[0, 0, 1]).divided_kernel(&ratio(3, 1));
        assert_eq!(k, q(&[3, 1]));
    }

    #[test]
    fn kernel_of_cube() {
        // x^2 + x m + m^2 at x = 2
        let k = q(&[0, 0, 0, 1]).divided_kernel(&ratio(2, 1));
        assert_eq!(k, q(&[4, 2, 1]));
    }

    #[test]
    fn kernel_of_constant_vanishes() {
        assert!(q(&[7]).divided_kernel(&ratio(5, 1)).is_zero());
    }

    #[test]
    fn long_division() {
        // x^3 = (x - 1)(x^2 + x + 1) + 1
        let (quot, rem) = q(&[0, 0, 0, 1]).div_rem(&q(&[-1, 1]));
        assert_eq!(quot, q(&[1, 1, 1]));
        assert_eq!(rem, q(&[1]));
    }

    #[test]
    fn degree_of_product_adds() {
        let a = q(&[1, 2, 3]);
        let b = q(&[0, 5]);
        assert_eq!((a * b).degree(), Some(3));
    }

    #[test]
    fn shift_gives_taylor_coefficients() {
        // x^2 at 1 + u: 1 + 2u + u^2
        assert_eq!(q(&[0, 0, 1]).shift(&ratio(1, 1)), q(&[1, 2, 1]));
    }
}
