//! One point of the eigenvalue/angle integration: `M1 = diag(x)`,
//! `M2 = U diag(y) U^*`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::words::{Letter, TraceWord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub x: Vec<f64>,
    /// Empty for the one-matrix model.
    pub y: Vec<f64>,
    /// Relative unitary, `0 x 0` for the one-matrix model.
    pub u: DMatrix<Complex64>,
}

impl Config {
    pub fn one_matrix(x: Vec<f64>) -> Self {
        Self { x, y: Vec::new(), u: DMatrix::zeros(0, 0) }
    }

    pub fn two_matrix(x: Vec<f64>, y: Vec<f64>, u: DMatrix<Complex64>) -> Self {
        Self { x, y, u }
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn has_m2(&self) -> bool {
        !self.y.is_empty()
    }

    /// `|U_ab|^2`.
    pub fn overlap(&self, a: usize, b: usize) -> f64 {
        self.u[(a, b)].norm_sqr()
    }

    /// `Tr f(M1) g(M2) = sum_ab f(x_a) g(y_b) |U_ab|^2`.
    pub fn bilinear(&self, f: &[Complex64], g: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, fa) in f.iter().enumerate() {
            let mut row = Complex64::new(0.0, 0.0);
            for (b, gb) in g.iter().enumerate() {
                row += gb * self.overlap(a, b);
            }
            acc += fa * row;
        }
        acc
    }

    pub fn m1(&self) -> DMatrix<Complex64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(self.n(), self.x.iter().map(|&v| Complex64::new(v, 0.0))))
    }

    pub fn m2(&self) -> DMatrix<Complex64> {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(self.y.len(), self.y.iter().map(|&v| Complex64::new(v, 0.0))));
        &self.u * d * self.u.adjoint()
    }

    /// `Tr` of a word. Pure `M1` (or pure `M2`) words skip the matrix products.
    pub fn trace_word(&self, w: &TraceWord) -> Complex64 {
        let k1 = w.count(Letter::M1);
        let k2 = w.count(Letter::M2);
        if k2 == 0 {
            return Complex64::new(self.x.iter().map(|v| v.powi(k1 as i32)).sum(), 0.0);
        }
        assert!(self.has_m2(), "word {w} needs M2 but the configuration has none");
        if k1 == 0 {
            return Complex64::new(self.y.iter().map(|v| v.powi(k2 as i32)).sum(), 0.0);
        }
        let (m1, m2) = (self.m1(), self.m2());
        let mut acc = DMatrix::<Complex64>::identity(self.n(), self.n());
        for l in w.letters() {
            acc = match l {
                Letter::M1 => acc * &m1,
                Letter::M2 => acc * &m2,
            };
        }
        acc.trace()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rot(theta: f64) -> DMatrix<Complex64> {
        let (c, s) = (theta.cos(), theta.sin());
        DMatrix::from_row_slice(2, 2, &[c, s, -s, c]).map(|v| Complex64::new(v, 0.0))
    }

    #[test]
    fn bilinear_matches_matrix_trace() {
        let cfg = Config::two_matrix(vec![0.3, -1.2], vec![2.0, 0.7], rot(0.4));
        let w: TraceWord = "12".parse().unwrap();
        let f: Vec<Complex64> = cfg.x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let g: Vec<Complex64> = cfg.y.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        assert!((cfg.trace_word(&w) - cfg.bilinear(&f, &g)).norm() < 1e-14);
    }

    #[test]
    fn pure_words_and_identity() {
        let cfg = Config::two_matrix(vec![1.0, 2.0], vec![3.0, -1.0], rot(1.1));
        assert_eq!(cfg.trace_word(&TraceWord::identity()).re, 2.0);
        assert_eq!(cfg.trace_word(&"11".parse().unwrap()).re, 5.0);
        assert_eq!(cfg.trace_word(&"222".parse().unwrap()).re, 26.0);
        let full = cfg.trace_word(&"1212".parse().unwrap());
        let m = cfg.m1() * cfg.m2();
        assert!((full - (&m * &m).trace()).norm() < 1e-13);
    }
}
