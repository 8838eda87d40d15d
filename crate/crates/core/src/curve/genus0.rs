//! Genus-zero two-matrix curves with polynomial potentials:
//! `x(z) = g z + sum_k a_k z^-k`, `y(z) = g/z + sum_k b_k z^k`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::hyperelliptic::jacobi_integral;
use super::solver::{solve, NewtonOptions};
use super::CurveError;
use crate::algebra::{roots, Polynomial};
use crate::model::ModelSpec;

type C = Complex64;

/// Laurent polynomial `sum_k c[k] z^(lo + k)` with real coefficients.
#[derive(Debug, Clone, PartialEq)]
struct Laurent {
    lo: i32,
    c: Vec<f64>,
}

impl Laurent {
    fn constant(a: f64) -> Self {
        Self { lo: 0, c: vec![a] }
    }

    fn coeff(&self, k: i32) -> f64 {
        let i = k - self.lo;
        if i < 0 || i as usize >= self.c.len() {
            0.0
        } else {
            self.c[i as usize]
        }
    }

    fn hi(&self) -> i32 {
        self.lo + self.c.len() as i32 - 1
    }

    fn add(&self, o: &Self) -> Self {
        let lo = self.lo.min(o.lo);
        let hi = self.hi().max(o.hi());
        Self { lo, c: (lo..=hi).map(|k| self.coeff(k) + o.coeff(k)).collect() }
    }

    fn mul(&self, o: &Self) -> Self {
        let mut c = vec![0.0; self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self { lo: self.lo + o.lo, c }
    }

    /// `p(self)` by Horner.
    fn compose_into(&self, p: &Polynomial<f64>) -> Self {
        let mut acc = Self::constant(0.0);
        for a in p.coeffs().iter().rev() {
            acc = acc.mul(self).add(&Self::constant(*a));
        }
        acc
    }

    fn eval(&self, z: C) -> C {
        self.c.iter().enumerate().map(|(i, a)| z.powi(self.lo + i as i32) * a).sum()
    }

    fn derivative_at(&self, z: C) -> C {
        self.c.iter().enumerate().map(|(i, a)| {
            let k = self.lo + i as i32;
            z.powi(k - 1) * (*a * k as f64)
        }).sum()
    }
}

fn real_polynomial(model_poly: &Polynomial<C>, what: &str) -> Result<Polynomial<f64>, CurveError> {
    if model_poly.coeffs().iter().any(|c| c.im.abs() > 1e-12 * (1.0 + c.re.abs())) {
        return Err(CurveError::Unsupported(format!("{what} has complex coefficients")));
    }
    Ok(Polynomial::new(model_poly.coeffs().iter().map(|c| c.re).collect()))
}

/// Solved rational curve.
#[derive(Debug, Clone)]
pub struct RationalCurve {
    pub v1: Polynomial<f64>,
    pub v2: Polynomial<f64>,
    pub t: f64,
    pub gamma: f64,
    /// `a_0 ..= a_d2`
    pub alpha: Vec<f64>,
    /// `b_0 ..= b_d1`
    pub beta: Vec<f64>,
    /// `P(x, y)` coefficients, `p[i][j]` of `x^i y^j`.
    pub p: Vec<Vec<f64>>,
}

fn x_series(gamma: f64, alpha: &[f64]) -> Laurent {
    let d2 = alpha.len() as i32 - 1;
    let mut c = vec![0.0; alpha.len() + 1];
    for (k, a) in alpha.iter().enumerate() {
        c[(d2 - k as i32) as usize] = *a;
    }
    c[alpha.len()] = gamma;
    Laurent { lo: -d2, c }
}

fn y_series(gamma: f64, beta: &[f64]) -> Laurent {
    let mut c = vec![gamma];
    c.extend_from_slice(beta);
    Laurent { lo: -1, c }
}

/// Starting point from a real extremum `(x0, y0)`.
pub fn seed(v1: &Polynomial<f64>, v2: &Polynomial<f64>, t: f64, x0: f64, y0: f64) -> (f64, Vec<f64>, Vec<f64>) {
    let d1 = v1.degree().unwrap_or(0);
    let d2 = v2.degree().unwrap_or(0);
    let a = v1.derivative().eval(&x0);
    let b = v2.derivative().eval(&y0);
    let gamma = if a * b > 1.0 { (t / (a * b - 1.0)).sqrt() } else { t.sqrt() };
    let mut alpha = vec![0.0; d2 + 1];
    let mut beta = vec![0.0; d1 + 1];
    alpha[0] = x0;
    beta[0] = y0;
    if d2 >= 1 {
        alpha[1] = b * gamma;
    }
    if d1 >= 1 {
        beta[1] = a * gamma;
    }
    (gamma, alpha, beta)
}

fn residuals(v1: &Polynomial<f64>, v2: &Polynomial<f64>, t: f64, gamma: f64, alpha: &[f64], beta: &[f64]) -> Vec<f64> {
    let x = x_series(gamma, alpha);
    let y = y_series(gamma, beta);
    let vx = x.compose_into(v1);
    let vy = y.compose_into(v2);
    let mut out = Vec::with_capacity(alpha.len() + beta.len() + 2);
    for (k, b) in beta.iter().enumerate() {
        out.push(vx.coeff(k as i32) - b);
    }
    out.push(vx.coeff(-1) - gamma - t / gamma);
    for (k, a) in alpha.iter().enumerate() {
        out.push(vy.coeff(-(k as i32)) - a);
    }
    out.push(vy.coeff(1) - gamma - t / gamma);
    out
}

impl RationalCurve {
    /// Solves the genus-zero conditions from the extremum `(x0, y0)`.
    pub fn solve(model: &ModelSpec, x0: f64, y0: f64, opts: NewtonOptions) -> Result<Self, CurveError> {
        if !model.hard_edges_x.is_empty() || !model.hard_edges_y.is_empty() {
            return Err(CurveError::Unsupported("genus-zero parametrization with hard edges".into()));
        }
        let v1 = real_polynomial(&model.v1_prime.as_polynomial().ok_or_else(|| CurveError::Unsupported("rational V'1".into()))?, "V'1")?;
        let v2 = real_polynomial(&model.v2_prime.as_polynomial().ok_or_else(|| CurveError::Unsupported("rational V'2".into()))?, "V'2")?;
        let (d1, d2) = (v1.degree().unwrap_or(0), v2.degree().unwrap_or(0));
        if d1 == 0 || d2 == 0 {
            return Err(CurveError::Unsupported("constant V'".into()));
        }
        let t = model.t;
        let (g0, a0, b0) = seed(&v1, &v2, t, x0, y0);
        let mut start = vec![g0];
        start.extend(a0);
        start.extend(b0);
        let split = |p: &DVector<f64>| (p[0], p.as_slice()[1..d2 + 2].to_vec(), p.as_slice()[d2 + 2..].to_vec());
        let f = |p: &DVector<f64>| {
            let (g, a, b) = split(p);
            if g.abs() < 1e-14 {
                return Err(CurveError::NewtonDivergence { iterations: 0, residual: f64::INFINITY });
            }
            Ok(DVector::from_vec(residuals(&v1, &v2, t, g, &a, &b)))
        };
        let sol = solve(f, DVector::from_vec(start), opts)?;
        let (mut gamma, mut alpha, mut beta) = split(&sol.x);
        if gamma < 0.0 {
            // z -> -z
            gamma = -gamma;
            alpha.iter_mut().enumerate().for_each(|(k, a)| if k % 2 == 1 { *a = -*a });
            beta.iter_mut().enumerate().for_each(|(k, b)| if k % 2 == 1 { *b = -*b });
        }
        let mut curve = Self { v1, v2, t, gamma, alpha, beta, p: Vec::new() };
        curve.p = curve.fit_p()?;
        Ok(curve)
    }

    pub fn x_of_z(&self, z: C) -> C {
        x_series(self.gamma, &self.alpha).eval(z)
    }

    pub fn y_of_z(&self, z: C) -> C {
        y_series(self.gamma, &self.beta).eval(z)
    }

    fn head(&self, x: C, y: C) -> C {
        (self.v2.to_complex().eval(&y) - x) * (self.v1.to_complex().eval(&x) - y)
    }

    /// Least-squares fit of `P` from `P = (V'2(y) - x)(V'1(x) - y) + t` on
    /// the curve, with the top coefficient pinned to `t lc1 lc2`.
    fn fit_p(&self) -> Result<Vec<Vec<f64>>, CurveError> {
        let d1 = self.v1.degree().unwrap();
        let d2 = self.v2.degree().unwrap();
        let top = self.t * self.v1.leading().unwrap() * self.v2.leading().unwrap();
        let unknowns: Vec<(usize, usize)> = (0..d1).flat_map(|i| (0..d2).map(move |j| (i, j))).filter(|&(i, j)| (i, j) != (d1 - 1, d2 - 1)).collect();
        let samples = 4 * (d1 * d2 + 4);
        let mut rows = DMatrix::zeros(2 * samples, unknowns.len());
        let mut rhs = DVector::zeros(2 * samples);
        for s in 0..samples {
            let z = C::from_polar(1.0, 2.0 * std::f64::consts::PI * (s as f64 + 0.37) / samples as f64);
            let (x, y) = (self.x_of_z(z), self.y_of_z(z));
            let target = self.head(x, y) + self.t - x.powu((d1 - 1) as u32) * y.powu((d2 - 1) as u32) * top;
            rhs[2 * s] = target.re;
            rhs[2 * s + 1] = target.im;
            for (k, &(i, j)) in unknowns.iter().enumerate() {
                let m = x.powu(i as u32) * y.powu(j as u32);
                rows[(2 * s, k)] = m.re;
                rows[(2 * s + 1, k)] = m.im;
            }
        }
        let mut p = vec![vec![0.0; d2]; d1];
        p[d1 - 1][d2 - 1] = top;
        if !unknowns.is_empty() {
            let sol = rows.svd(true, true).solve(&rhs, 1e-13).map_err(|e| CurveError::Unsupported(e.to_string()))?;
            for (k, &(i, j)) in unknowns.iter().enumerate() {
                p[i][j] = sol[k];
            }
        }
        Ok(p)
    }

    pub fn p_at(&self, x: C, y: C) -> C {
        let mut acc = C::new(0.0, 0.0);
        for (i, row) in self.p.iter().enumerate() {
            for (j, a) in row.iter().enumerate() {
                acc += x.powu(i as u32) * y.powu(j as u32) * a;
            }
        }
        acc
    }

    /// `E(x, y) = (V'2(y) - x)(V'1(x) - y) - P(x, y) + t`.
    pub fn e(&self, x: C, y: C) -> C {
        self.head(x, y) - self.p_at(x, y) + self.t
    }

    fn newton_z(&self, x: C, mut z: C) -> Option<C> {
        let xs = x_series(self.gamma, &self.alpha);
        for _ in 0..60 {
            let f = xs.eval(z) - x;
            let step = f / xs.derivative_at(z);
            z -= step;
            if step.norm() < 1e-15 * (1.0 + z.norm()) {
                return Some(z);
            }
        }
        let ok = (xs.eval(z) - x).norm() < 1e-10 * (1.0 + x.norm());
        ok.then_some(z)
    }

    fn scale(&self) -> f64 {
        1.0 + self.alpha.iter().chain(&self.beta).fold(self.gamma, |m, a| m.max(a.abs()))
    }

    /// Physical-sheet preimage of `x`, continued vertically from far away on
    /// the side of `Im x` (from above for real `x`).
    pub fn z_of_x(&self, x: C) -> Result<C, CurveError> {
        let side = if x.im < 0.0 { -1.0 } else { 1.0 };
        let far = 20.0 * self.scale() * (1.0 + x.re.abs());
        const STEPS: usize = 200;
        let start = C::new(x.re, side * far.max(x.im.abs()));
        let mut z = self.newton_z(start, start / self.gamma).ok_or(CurveError::NewtonDivergence { iterations: 60, residual: f64::NAN })?;
        for k in 1..=STEPS {
            let u = k as f64 / STEPS as f64;
            // geometric approach to the target keeps steps small near the axis
            let target = x + (start - x) * (1.0 - u).powi(3);
            z = self.newton_z(target, z).ok_or(CurveError::NewtonDivergence { iterations: k, residual: f64::NAN })?;
        }
        Ok(z)
    }

    pub fn w(&self, x: C) -> Result<C, CurveError> {
        let z = self.z_of_x(x)?;
        Ok(self.v1.to_complex().eval(&x) - self.y_of_z(z))
    }

    pub fn y(&self, x: C) -> Result<C, CurveError> {
        Ok(self.y_of_z(self.z_of_x(x)?))
    }

    /// Zeros of `x'(z)`.
    pub fn critical_points(&self) -> Vec<C> {
        let d2 = self.alpha.len() - 1;
        // g z^(d2+1) - sum_k k a_k z^(d2-k)
        let mut c = vec![C::new(0.0, 0.0); d2 + 2];
        c[d2 + 1] = C::new(self.gamma, 0.0);
        for k in 1..=d2 {
            c[d2 - k] -= self.alpha[k] * k as f64;
        }
        roots(&Polynomial::new(c))
    }

    /// Real cut `[x(z-), x(z+)]` bounded by the outermost real critical points.
    pub fn cut(&self) -> Result<(f64, f64), CurveError> {
        let crit: Vec<f64> = self.critical_points().into_iter().filter(|z| z.im.abs() < 1e-9).map(|z| z.re).collect();
        let pos = crit.iter().copied().filter(|z| *z > 0.0).fold(f64::NAN, f64::max);
        let neg = crit.iter().copied().filter(|z| *z < 0.0).fold(f64::NAN, f64::min);
        if pos.is_nan() || neg.is_nan() {
            return Err(CurveError::Unsupported("no real one-cut support".into()));
        }
        let (a, b) = (self.x_of_z(C::new(neg, 0.0)).re, self.x_of_z(C::new(pos, 0.0)).re);
        Ok((a.min(b), a.max(b)))
    }

    /// `rho(x) = -Im W(x + i0)/(pi t)`.
    pub fn density_at(&self, x: f64) -> Result<f64, CurveError> {
        Ok(-self.w(C::new(x, 0.0))?.im / (std::f64::consts::PI * self.t))
    }

    pub fn moment(&self, f: impl Fn(f64) -> f64) -> Result<f64, CurveError> {
        let (l, r) = self.cut()?;
        let err = std::cell::RefCell::new(None);
        let v = jacobi_integral(l, r, 0.5, 0.5, |x| match self.density_at(x) {
            Ok(rho) => rho * f(x),
            Err(e) => {
                *err.borrow_mut() = Some(e);
                0.0
            }
        });
        match err.into_inner() {
            Some(e) => Err(e),
            None => Ok(v),
        }
    }
}

/// Curve-side residuals for tests and reports: zero on a solution.
pub fn condition_residuals(curve: &RationalCurve) -> Vec<f64> {
    residuals(&curve.v1, &curve.v2, curve.t, curve.gamma, &curve.alpha, &curve.beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::real_poly;

    #[test]
    fn gaussian_two_matrix_closed_form() {
        // V'1 = a x, V'2 = b y: g^2 (ab - 1) = t
        let m = ModelSpec::two_matrix(real_poly(&[0.0, 2.0]), real_poly(&[0.0, 3.0]), 1.0, 1);
        let c = RationalCurve::solve(&m, 0.0, 0.0, NewtonOptions::default()).unwrap();
        assert!((c.gamma - 0.2f64.sqrt()).abs() < 1e-12);
        assert!((c.alpha[1] - 3.0 * c.gamma).abs() < 1e-12);
        assert!(condition_residuals(&c).iter().all(|r| r.abs() < 1e-12));
        // P = t lc1 lc2 for linear potentials
        assert!((c.p[0][0] - 6.0).abs() < 1e-12);
    }

    #[test]
    fn one_matrix_gaussian_matches_semicircle() {
        let m = ModelSpec::two_matrix(real_poly(&[0.0, 2.0]), real_poly(&[0.0, 1.0]), 1.0, 1);
        let c = RationalCurve::solve(&m, 0.0, 0.0, NewtonOptions::default()).unwrap();
        let (l, r) = c.cut().unwrap();
        assert!((l + 2.0).abs() < 1e-10 && (r - 2.0).abs() < 1e-10);
        let x = C::new(0.7, 1.3);
        let exact = (x - (x * x - 4.0).sqrt()) / 2.0;
        assert!((c.w(x).unwrap() - exact).norm() < 1e-12);
        assert!((c.moment(|_| 1.0).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn quartic_curve_vanishes_on_parametrization() {
        let m = ModelSpec::two_matrix(real_poly(&[0.0, 1.0, 0.0, 0.5]), real_poly(&[0.0, 1.5, 0.0, 0.3]), 0.5, 1);
        let c = RationalCurve::solve(&m, 0.0, 0.0, NewtonOptions::default()).unwrap();
        for k in 0..7 {
            let z = C::from_polar(1.3, 0.9 * k as f64);
            assert!(c.e(c.x_of_z(z), c.y_of_z(z)).norm() < 1e-9);
        }
    }
}
