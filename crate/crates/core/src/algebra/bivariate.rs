use num_complex::Complex64;

use super::poly::Polynomial;
use crate::scalar::Scalar;

/// Dense bivariate polynomial `sum c[i][j] x^i y^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bivariate<S> {
    coeffs: Vec<Vec<S>>,
}

impl<S: Scalar> Bivariate<S> {
    /// Zero polynomial with room for degrees `(dx, dy)`.
    pub fn zeros(dx: usize, dy: usize) -> Self {
        Self { coeffs: vec![vec![S::zero(); dy + 1]; dx + 1] }
    }

    pub fn from_coeffs(coeffs: Vec<Vec<S>>) -> Self {
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Vec<S>] {
        &self.coeffs
    }

    pub fn degree_x(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn degree_y(&self) -> usize {
        self.coeffs.first().map_or(0, |r| r.len().saturating_sub(1))
    }

    pub fn get(&self, i: usize, j: usize) -> S {
        self.coeffs
            .get(i)
            .and_then(|r| r.get(j))
            .cloned()
            .unwrap_or_else(S::zero)
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.coeffs[i][j] = v;
    }

    pub fn eval(&self, x: &S, y: &S) -> S {
        self.coeffs.iter().rev().fold(S::zero(), |acc, row| {
            let inner = row
                .iter()
                .rev()
                .fold(S::zero(), |a, c| a * y.clone() + c.clone());
            acc * x.clone() + inner
        })
    }

    /// Product of two univariate polynomials `a(x) b(y)`.
    pub fn outer(a: &Polynomial<S>, b: &Polynomial<S>) -> Self {
        let dx = a.degree().unwrap_or(0);
        let dy = b.degree().unwrap_or(0);
        let mut out = Self::zeros(dx, dy);
        for i in 0..=dx {
            for j in 0..=dy {
                out.coeffs[i][j] = a.coeff(i) * b.coeff(j);
            }
        }
        out
    }

    /// `(x, y) -> (y, x)`.
    pub fn transposed(&self) -> Self {
        let (dx, dy) = (self.degree_x(), self.degree_y());
        let mut out = Self::zeros(dy, dx);
        for i in 0..=dx {
            for j in 0..=dy {
                out.coeffs[j][i] = self.coeffs[i][j].clone();
            }
        }
        out
    }

    pub fn to_complex(&self) -> Bivariate<Complex64> {
        Bivariate {
            coeffs: self
                .coeffs
                .iter()
                .map(|r| r.iter().map(Scalar::to_c64).collect())
                .collect(),
        }
    }
}
