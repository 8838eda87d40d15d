//! Model data evaluated pointwise: potentials, edge polynomials and the
//! divided-difference kernels acting on single eigenvalues.

use num_complex::Complex64;

use crate::algebra::{Polynomial, RationalFunction};
use crate::model::ModelSpec;

#[derive(Debug, Clone)]
pub struct Context {
    pub v1: RationalFunction<Complex64>,
    pub v2: RationalFunction<Complex64>,
    /// `V' = V'1 - x` in the one-matrix reading.
    pub v: RationalFunction<Complex64>,
    pub s: Polynomial<Complex64>,
    pub st: Polynomial<Complex64>,
    pub n: usize,
    pub t: f64,
    pub one_matrix: bool,
}

const KERNEL_GAP: f64 = 1e-9;

impl Context {
    pub fn new(model: &ModelSpec) -> Self {
        Self {
            v1: model.v1_prime.clone(),
            v2: model.v2_prime.clone(),
            v: model.one_matrix_v_prime(),
            s: model.s(),
            st: model.s_tilde(),
            n: model.n,
            t: model.t,
            one_matrix: model.is_one_matrix(),
        }
    }

    /// `t/N`.
    pub fn tau(&self) -> f64 {
        self.t / self.n as f64
    }

    /// `K1`, `K2`.
    pub fn degrees(&self) -> (usize, usize) {
        (self.s.degree().unwrap_or(0), self.st.degree().unwrap_or(0))
    }

    pub fn s_coeff(&self, r: usize) -> Complex64 {
        self.s.coeff(r)
    }

    pub fn st_coeff(&self, r: usize) -> Complex64 {
        self.st.coeff(r)
    }
}

pub fn eval_rational(f: &RationalFunction<Complex64>, z: Complex64) -> Complex64 {
    f.numerator().eval(&z) / f.denominator().eval(&z)
}

/// `(f(z) - f(m)) / (z - m)`, switching to `f'(z)` when the points merge.
pub fn kernel(f: &RationalFunction<Complex64>, z: Complex64, m: Complex64) -> Complex64 {
    if (z - m).norm() <= KERNEL_GAP * (1.0 + z.norm()) {
        return eval_rational(&f.derivative(), z);
    }
    (eval_rational(f, z) - eval_rational(f, m)) / (z - m)
}

pub fn poly_kernel(p: &Polynomial<Complex64>, z: Complex64, m: Complex64) -> Complex64 {
    if (z - m).norm() <= KERNEL_GAP * (1.0 + z.norm()) {
        return p.derivative().eval(&z);
    }
    (p.eval(&z) - p.eval(&m)) / (z - m)
}

/// `(z^i - m^i)/(z - m) = sum_{k<i} z^k m^(i-1-k)`.
pub fn power_kernel(i: usize, z: Complex64, m: Complex64) -> Complex64 {
    (0..i).map(|k| z.powu(k as u32) * m.powu((i - 1 - k) as u32)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::real_poly;

    #[test]
    fn kernels_agree() {
        let p = real_poly(&[1.0, -2.0, 0.0, 3.0]);
        let r = RationalFunction::polynomial(p.clone());
        let (z, m) = (Complex64::new(0.3, 1.1), Complex64::new(-0.7, 0.0));
        assert!((kernel(&r, z, m) - poly_kernel(&p, z, m)).norm() < 1e-13);
        assert!((power_kernel(3, z, m) - (z.powu(3) - m.powu(3)) / (z - m)).norm() < 1e-13);
        assert!((kernel(&r, z, z) - p.derivative().eval(&z)).norm() < 1e-13);
        assert_eq!(power_kernel(0, z, m), Complex64::new(0.0, 0.0));
    }
}
