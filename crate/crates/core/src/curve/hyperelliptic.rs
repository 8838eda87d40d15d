//! One-matrix curves in endpoint form: `y = V'/2 - W = h(x) sqrt(S(x)) / D(x)`
//! with `S = prod (x - e)` over all cut endpoints, `D = Q s` and `h` a
//! polynomial fixed by the behaviour at infinity, at the poles of `V'` and at
//! inactive hard edges.

use std::sync::OnceLock;

use gauss_quad::GaussJacobi;
use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use super::solver::{solve, NewtonOptions};
use super::CurveError;
use crate::algebra::{roots, Polynomial};
use crate::model::ModelSpec;

type C = Complex64;

const JACOBI_NODES: usize = 96;
const IMAG_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Endpoint {
    Hard(f64),
    /// Free endpoint; the value is the starting guess, or the solution.
    Soft(f64),
}

impl Endpoint {
    pub fn value(&self) -> f64 {
        match *self {
            Endpoint::Hard(a) | Endpoint::Soft(a) => a,
        }
    }

    pub fn is_hard(&self) -> bool {
        matches!(self, Endpoint::Hard(_))
    }

    fn exponent(&self) -> f64 {
        if self.is_hard() {
            -0.5
        } else {
            0.5
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cut {
    pub left: Endpoint,
    pub right: Endpoint,
}

/// Conditions closing the system beyond the pole behaviours.
#[derive(Debug, Clone, PartialEq)]
pub enum CutConditions {
    /// Mass of every cut but the last.
    Masses(Vec<f64>),
    /// Vanishing real period between consecutive cuts.
    RealPeriods,
}

/// Real one-matrix data: `V' = A/Q`, edge polynomial `s`.
#[derive(Debug, Clone)]
pub struct OneMatrixData {
    pub a: Polynomial<f64>,
    pub q: Polynomial<f64>,
    pub s: Polynomial<f64>,
    pub edges: Vec<f64>,
    pub poles: Vec<C>,
    pub t: f64,
    /// Real intervals of the eigenvalue contour.
    pub domain: Vec<(f64, f64)>,
}

fn real_poly(p: &Polynomial<C>, what: &str) -> Result<Polynomial<f64>, CurveError> {
    if p.coeffs().iter().any(|c| c.im.abs() > IMAG_TOL * (1.0 + c.re.abs())) {
        return Err(CurveError::Unsupported(format!("{what} has complex coefficients")));
    }
    Ok(Polynomial::new(p.coeffs().iter().map(|c| c.re).collect()))
}

impl OneMatrixData {
    pub fn new(model: &ModelSpec) -> Result<Self, CurveError> {
        if !model.is_one_matrix() {
            return Err(CurveError::Unsupported("hyperelliptic curves need V'2(y) = y".into()));
        }
        let v = model.one_matrix_v_prime();
        let a = real_poly(v.numerator(), "V'")?;
        let q = real_poly(v.denominator(), "V'")?;
        let mut edges = Vec::new();
        for e in &model.hard_edges_x {
            if e.im.abs() > IMAG_TOL {
                return Err(CurveError::Unsupported(format!("complex hard edge {e}")));
            }
            edges.push(e.re);
        }
        let s = Polynomial::new(model.s().coeffs().iter().map(|c| c.re).collect());
        let poles = if q.degree().unwrap_or(0) > 0 { roots(&q.to_complex()) } else { Vec::new() };
        let mut domain = Vec::new();
        for seg in &model.contours1 {
            domain.push(seg.real_bounds().ok_or_else(|| CurveError::Unsupported("contour off the real axis".into()))?);
        }
        Ok(Self { a, q, s, edges, poles, t: model.t, domain })
    }

    pub fn d(&self) -> Polynomial<f64> {
        self.q.clone() * self.s.clone()
    }

    pub fn f(&self) -> Polynomial<f64> {
        (self.a.clone() * self.s.clone()).scale(&0.5)
    }

    pub fn v_prime(&self, x: C) -> C {
        self.a.to_complex().eval(&x) / self.q.to_complex().eval(&x)
    }
}

fn jacobi(alpha: f64, beta: f64) -> &'static GaussJacobi {
    static RULES: [OnceLock<GaussJacobi>; 4] = [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
    let k = usize::from(alpha > 0.0) * 2 + usize::from(beta > 0.0);
    RULES[k].get_or_init(|| {
        GaussJacobi::new(JACOBI_NODES.try_into().unwrap(), alpha.try_into().unwrap(), beta.try_into().unwrap())
    })
}

/// `int_l^r f(x) dx` where `f(x) (r - x)^-alpha (x - l)^-beta` is smooth.
pub(crate) fn jacobi_integral(l: f64, r: f64, alpha: f64, beta: f64, f: impl Fn(f64) -> f64) -> f64 {
    let half = 0.5 * (r - l);
    let mid = 0.5 * (r + l);
    let rule = jacobi(alpha, beta);
    let mut acc = 0.0;
    for &(xi, w) in rule.as_node_weight_pairs() {
        let x = mid + half * xi;
        acc += w * f(x) / ((r - x).powf(alpha) * (x - l).powf(beta));
    }
    acc * half.powf(1.0 + alpha + beta)
}

/// Coefficients of `prod_e (1 - e u)^(-1/2)` up to `u^(order-1)`.
fn inverse_sqrt_series(endpoints: &[f64], order: usize) -> Vec<f64> {
    let mut out = vec![0.0; order];
    out[0] = 1.0;
    for &e in endpoints {
        // binomial series of (1 - e u)^(-1/2)
        let mut b = vec![0.0; order];
        b[0] = 1.0;
        for k in 1..order {
            b[k] = b[k - 1] * e * (2 * k - 1) as f64 / (2 * k) as f64;
        }
        let mut next = vec![0.0; order];
        for i in 0..order {
            for j in 0..order - i {
                next[i + j] += out[i] * b[j];
            }
        }
        out = next;
    }
    out
}

/// A solved, or trial, one-matrix curve.
#[derive(Debug, Clone)]
pub struct HyperellipticCurve {
    pub data: OneMatrixData,
    pub cuts: Vec<Cut>,
    pub h: Polynomial<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Shape {
    n_cuts: usize,
    m: i64,
    n_soft: usize,
}

impl HyperellipticCurve {
    pub fn endpoints(&self) -> Vec<f64> {
        self.cuts.iter().flat_map(|c| [c.left.value(), c.right.value()]).collect()
    }

    pub fn cut_bounds(&self) -> Vec<(f64, f64)> {
        self.cuts.iter().map(|c| (c.left.value(), c.right.value())).collect()
    }

    /// `sqrt(S(x))` as a product of principal roots: analytic off the cuts
    /// and `~ x^n` at infinity.
    pub fn sqrt_s(&self, x: C) -> C {
        self.endpoints().iter().map(|&e| (x - e).sqrt()).product()
    }

    /// `V'(x)/2 - W(x)` on the physical sheet.
    pub fn half_y(&self, x: C) -> C {
        self.h.to_complex().eval(&x) * self.sqrt_s(x) / self.data.d().to_complex().eval(&x)
    }

    pub fn w(&self, x: C) -> C {
        self.data.v_prime(x) * 0.5 - self.half_y(x)
    }

    /// `Y(x) = V'1(x) - W(x)` with `V'1 = V' + x`.
    pub fn y(&self, x: C) -> C {
        self.data.v_prime(x) + x - self.w(x)
    }

    /// Density on cut `k` at real `x` inside it, normalized to total mass 1.
    pub fn density_at(&self, k: usize, x: f64) -> f64 {
        let n = self.cuts.len();
        let sign = if (n - 1 - k).is_multiple_of(2) { 1.0 } else { -1.0 };
        let prod: f64 = self.endpoints().iter().map(|&e| (x - e).abs().sqrt()).product();
        self.h.eval(&x) * sign * prod / (std::f64::consts::PI * self.data.t * self.data.d().eval(&x))
    }

    /// `int rho f` over cut `k`.
    pub fn cut_integral(&self, k: usize, f: impl Fn(f64) -> f64) -> f64 {
        let cut = &self.cuts[k];
        let (l, r) = (cut.left.value(), cut.right.value());
        jacobi_integral(l, r, cut.right.exponent(), cut.left.exponent(), |x| self.density_at(k, x) * f(x))
    }

    pub fn cut_mass(&self, k: usize) -> f64 {
        self.cut_integral(k, |_| 1.0)
    }

    /// `int rho f` over the whole support.
    pub fn moment(&self, f: impl Fn(f64) -> f64 + Copy) -> f64 {
        (0..self.cuts.len()).map(|k| self.cut_integral(k, f)).sum()
    }

    /// `int y dx` across the gap between cuts `k` and `k + 1` (real there).
    pub fn gap_integral(&self, k: usize) -> Result<f64, CurveError> {
        let (a, b) = (self.cuts[k].right, self.cuts[k + 1].left);
        let (l, r) = (a.value(), b.value());
        for p in &self.data.poles {
            if p.im.abs() < IMAG_TOL && p.re > l && p.re < r {
                return Err(CurveError::Unsupported(format!("pole of V' at {} between cuts", p.re)));
            }
        }
        let n = self.cuts.len();
        let sign = if (n - 1 - k).is_multiple_of(2) { 1.0 } else { -1.0 };
        let d = self.data.d();
        let ends = self.endpoints();
        Ok(jacobi_integral(l, r, b.exponent(), a.exponent(), |x| {
            let prod: f64 = ends.iter().map(|&e| (x - e).abs().sqrt()).product();
            self.h.eval(&x) * sign * prod / d.eval(&x)
        }))
    }

    /// `R(x)` of the curve `s(x) (y - x)(V'(x) + x - y) = R(x)/Q(x)^2`, i.e.
    /// `R = s A^2/4 - h^2 S/s`.
    pub fn r_polynomial(&self) -> Result<Polynomial<f64>, CurveError> {
        let mut s_poly = Polynomial::one();
        for e in self.endpoints() {
            s_poly = s_poly * Polynomial::new(vec![-e, 1.0]);
        }
        let h2s = self.h.clone() * self.h.clone() * s_poly;
        let (quot, rem) = h2s.div_rem(&self.data.s);
        let scale = h2s.coeffs().iter().fold(0.0f64, |m, c| m.max(c.abs())).max(1.0);
        if rem.coeffs().iter().any(|c| c.abs() > 1e-8 * scale) {
            return Err(CurveError::Unsupported("edge polynomial does not divide h^2 S".into()));
        }
        let sa2 = (self.data.s.clone() * self.data.a.clone() * self.data.a.clone()).scale(&0.25);
        Ok((sa2 - quot).trimmed(1e-13 * scale))
    }

    /// `E(x, y) = (y - x)(V'(x) + x - y) - R(x)/(s(x) Q(x)^2)`.
    pub fn e(&self, x: C, y: C) -> Result<C, CurveError> {
        let r = self.r_polynomial()?.to_complex().eval(&x);
        let q = self.data.q.to_complex().eval(&x);
        let s = self.data.s.to_complex().eval(&x);
        Ok((y - x) * (self.data.v_prime(x) + x - y) - r / (s * q * q))
    }
}

/// Builds `h` from the soft endpoints and free low coefficients, and returns
/// the pole-behaviour equations it leaves unsatisfied.
fn assemble(data: &OneMatrixData, topology: &[Cut], params: &[f64]) -> Result<(HyperellipticCurve, Vec<f64>), CurveError> {
    let shape = shape(data, topology);
    let mut cuts = topology.to_vec();
    let mut k = 0;
    for cut in cuts.iter_mut() {
        for end in [&mut cut.left, &mut cut.right] {
            if let Endpoint::Soft(_) = end {
                *end = Endpoint::Soft(params[k]);
                k += 1;
            }
        }
    }
    let ends: Vec<f64> = cuts.iter().flat_map(|c| [c.left.value(), c.right.value()]).collect();
    if ends.windows(2).any(|w| w[1] <= w[0]) || ends.iter().any(|e| !e.is_finite()) {
        return Err(CurveError::BranchCollision(C::new(ends[0], 0.0)));
    }
    let f = data.f();
    let d = data.d();
    let n = shape.n_cuts as i64;
    let deg_f = f.degree().unwrap_or(0) as i64;
    let deg_h = deg_f - n;
    let m = shape.m;
    let lowest = m.min(0);
    // coefficient of x^p in F / sqrt(S): sum_j f_j T_(j - n - p)
    let order = (deg_f - n - lowest + 1).max(1) as usize;
    let series = inverse_sqrt_series(&ends, order);
    let coeff = |p: i64| -> f64 {
        (0..=deg_f)
            .filter(|&j| j - n - p >= 0)
            .map(|j| f.coeff(j as usize) * series[(j - n - p) as usize])
            .sum()
    };
    let lc_d = *d.leading().unwrap_or(&1.0);
    let top = deg_h.max(m);
    let mut h = vec![0.0; (top + 1).max(1) as usize];
    for p in 0..=top {
        h[p as usize] = if p > m {
            coeff(p)
        } else if p == m {
            coeff(p) - data.t * lc_d
        } else {
            params[shape.n_soft + p as usize]
        };
    }
    let mut eqs = Vec::new();
    for p in (m + 1)..0 {
        eqs.push(coeff(p));
    }
    if m < 0 {
        eqs.push(coeff(m) - data.t * lc_d);
    }
    let curve = HyperellipticCurve { data: data.clone(), cuts, h: Polynomial::new(h) };
    let hc = curve.h.to_complex();
    let fc = f.to_complex();
    for z in inactive_zeros(data, topology) {
        let r = fc.eval(&z) - hc.eval(&z) * curve.sqrt_s(z);
        eqs.push(r.re);
        if z.im.abs() > IMAG_TOL {
            eqs.push(r.im);
        }
    }
    Ok((curve, eqs))
}

/// Zeros of `D` that are not cut endpoints: poles of `V'` and hard edges
/// that the support does not reach. Complex-conjugate pairs appear once.
fn inactive_zeros(data: &OneMatrixData, topology: &[Cut]) -> Vec<C> {
    let active: Vec<f64> = topology.iter().flat_map(|c| [c.left, c.right]).filter(|e| e.is_hard()).map(|e| e.value()).collect();
    let mut out: Vec<C> = data.poles.iter().copied().filter(|p| p.im >= -IMAG_TOL).collect();
    for &e in &data.edges {
        if !active.iter().any(|a| (a - e).abs() < 1e-12) {
            out.push(C::new(e, 0.0));
        }
    }
    out
}

fn shape(data: &OneMatrixData, topology: &[Cut]) -> Shape {
    let n_cuts = topology.len();
    let deg_d = data.d().degree().unwrap_or(0) as i64;
    let n_soft = topology.iter().flat_map(|c| [c.left, c.right]).filter(|e| !e.is_hard()).count();
    Shape { n_cuts, m: deg_d - 1 - n_cuts as i64, n_soft }
}

fn count_equations(data: &OneMatrixData, topology: &[Cut]) -> (usize, usize) {
    let sh = shape(data, topology);
    let unknowns = sh.n_soft + sh.m.max(0) as usize;
    let asymptotic = if sh.m < 0 { (-sh.m) as usize } else { 0 };
    let zeros: usize = inactive_zeros(data, topology).iter().map(|z| if z.im.abs() > IMAG_TOL { 2 } else { 1 }).sum();
    (unknowns, asymptotic + zeros + sh.n_cuts.saturating_sub(1))
}

/// Solves for the soft endpoints of `topology` under `conditions`.
pub fn solve_topology(data: &OneMatrixData, topology: &[Cut], conditions: &CutConditions, opts: NewtonOptions) -> Result<HyperellipticCurve, CurveError> {
    if topology.is_empty() {
        return Err(CurveError::Unsupported("empty cut topology".into()));
    }
    let (unknowns, equations) = count_equations(data, topology);
    if unknowns != equations {
        return Err(CurveError::ConditionCountMismatch { free: unknowns, conditions: equations });
    }
    if let CutConditions::Masses(m) = conditions {
        if m.len() != topology.len() {
            return Err(CurveError::ConditionCountMismatch { free: topology.len(), conditions: m.len() });
        }
    }
    let sh = shape(data, topology);
    let mut x0: Vec<f64> = topology.iter().flat_map(|c| [c.left, c.right]).filter(|e| !e.is_hard()).map(|e| e.value()).collect();
    x0.extend(std::iter::repeat_n(0.0, sh.m.max(0) as usize));
    let residual = |p: &DVector<f64>| -> Result<DVector<f64>, CurveError> {
        let (curve, mut eqs) = assemble(data, topology, p.as_slice())?;
        match conditions {
            CutConditions::Masses(target) => {
                for k in 0..topology.len() - 1 {
                    eqs.push(curve.cut_mass(k) - target[k]);
                }
            }
            CutConditions::RealPeriods => {
                for k in 0..topology.len() - 1 {
                    eqs.push(curve.gap_integral(k)?);
                }
            }
        }
        Ok(DVector::from_vec(eqs))
    };
    let sol = solve(residual, DVector::from_vec(x0), opts)?;
    Ok(assemble(data, topology, sol.x.as_slice())?.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::RationalFunction;
    use crate::model::{real_poly as rp, ContourSegment};

    fn gaussian() -> OneMatrixData {
        OneMatrixData::new(&ModelSpec::one_matrix(RationalFunction::polynomial(rp(&[0.0, 1.0])), 1.0, 1)).unwrap()
    }

    #[test]
    fn inverse_sqrt_series_matches_binomial() {
        let s = inverse_sqrt_series(&[2.0, -2.0], 5);
        // (1 - 4u^2)^(-1/2) = 1 + 2u^2 + 6u^4
        assert!((s[0] - 1.0).abs() < 1e-15 && s[1].abs() < 1e-15 && (s[2] - 2.0).abs() < 1e-14 && (s[4] - 6.0).abs() < 1e-13);
    }

    #[test]
    fn gaussian_cut_is_semicircle() {
        let topo = [Cut { left: Endpoint::Soft(-1.0), right: Endpoint::Soft(1.5) }];
        let c = solve_topology(&gaussian(), &topo, &CutConditions::RealPeriods, NewtonOptions::default()).unwrap();
        let e = c.endpoints();
        assert!((e[0] + 2.0).abs() < 1e-10 && (e[1] - 2.0).abs() < 1e-10);
        assert!((c.cut_mass(0) - 1.0).abs() < 1e-12);
        let rho = c.density_at(0, 0.3);
        assert!((rho - (4.0f64 - 0.09).sqrt() / (2.0 * std::f64::consts::PI)).abs() < 1e-12);
    }

    #[test]
    fn hard_box_has_no_unknowns() {
        let m = ModelSpec::one_matrix(RationalFunction::polynomial(rp(&[0.0, 0.2])), 1.0, 1).with_contours1(vec![ContourSegment::interval(-1.0, 1.0)]);
        let data = OneMatrixData::new(&m).unwrap();
        let topo = [Cut { left: Endpoint::Hard(-1.0), right: Endpoint::Hard(1.0) }];
        assert_eq!(count_equations(&data, &topo), (0, 0));
        let c = solve_topology(&data, &topo, &CutConditions::RealPeriods, NewtonOptions::default()).unwrap();
        assert!((c.cut_mass(0) - 1.0).abs() < 1e-12);
    }
}
