//! Residue checks on a solved curve, and the exchange symmetry check.

use num_complex::Complex64;
use serde::Serialize;

use super::ansatz::build_ansatz;
use super::periods::{period, Cycle, CycleKind};
use super::solved::{solve_convergent, CurveKind, SolvedCurve};
use super::CurveError;
use crate::algebra::{Center, Polynomial};
use crate::check::context::power_kernel;
use crate::model::ModelSpec;

type C = Complex64;

const HARD_EDGE_TOL: f64 = 1e-6;
const POLE_TOL: f64 = 1e-8;
const INFINITY_TOL: f64 = 1e-10;
const BOUNDED_DELTAS: [f64; 7] = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8];

/// `Res Y^2 dx` at a hard edge: from the curve, and from the factorized
/// moment expression.
#[derive(Debug, Clone, Serialize)]
pub struct HardEdgeCheck {
    pub edge: f64,
    pub active: bool,
    pub from_curve: f64,
    pub from_moments: f64,
    pub abs_diff: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PoleCheck {
    pub pole: C,
    pub from_contour: C,
    pub expected: C,
    pub abs_diff: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct InfinityCheck {
    pub value: C,
    pub expected: f64,
    pub abs_diff: f64,
    pub pass: bool,
}

/// `|Y(a + d i) sqrt(d i)|` for shrinking `d`.
#[derive(Debug, Clone, Serialize)]
pub struct BoundednessCheck {
    pub edge: f64,
    pub samples: Vec<(f64, f64)>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidueReport {
    pub hard_edges: Vec<HardEdgeCheck>,
    pub poles: Vec<PoleCheck>,
    pub infinity: InfinityCheck,
    pub boundedness: Vec<BoundednessCheck>,
    /// Both sides of the hard-edge relation use large-N factorized moments.
    pub factorized_moments: bool,
}

impl ResidueReport {
    pub fn passes(&self) -> bool {
        self.infinity.pass
            && self.hard_edges.iter().all(|c| c.pass)
            && self.poles.iter().all(|c| c.pass)
            && self.boundedness.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// `Res Y dx` at infinity against `t` plus the residue of `V'1 dx` there,
/// which vanishes for polynomial `V'1`.
fn infinity_check(curve: &SolvedCurve, model: &ModelSpec) -> Result<InfinityCheck, CurveError> {
    let far = curve.singular_points().iter().fold(1.0f64, |m, p| m.max(p.norm()));
    // clockwise at infinity: 2 pi i Res
    let value = period(curve, &Cycle::at_infinity(4.0 * far))? / C::new(0.0, 2.0 * std::f64::consts::PI);
    let t = curve.t();
    let expected = t + model.v1_prime.residue_at(&Center::Infinity)?.re;
    let abs_diff = (value - expected).norm();
    Ok(InfinityCheck { value, expected, abs_diff, pass: abs_diff <= INFINITY_TOL * t.max(1.0) })
}

fn pole_checks(curve: &SolvedCurve, model: &ModelSpec) -> Result<Vec<PoleCheck>, CurveError> {
    let CurveKind::Hyperelliptic(h) = &curve.kind else {
        return Ok(Vec::new());
    };
    let singular = curve.singular_points();
    let mut out = Vec::new();
    for &xi in &h.data.poles {
        let room = singular.iter().filter(|p| (*p - xi).norm() > 1e-12).map(|p| (p - xi).norm()).fold(1.0f64, f64::min);
        // also stay clear of the real axis where the cuts live
        let room = if xi.im.abs() > 1e-12 { room.min(xi.im.abs()) } else { room };
        let cycle = Cycle::circle(xi, 0.4 * room, 128, false, CycleKind::PoleLoop, "pole");
        let from_contour = period(curve, &cycle)? / C::new(0.0, 2.0 * std::f64::consts::PI);
        let expected = model.v1_prime.residue_at(&Center::Finite(xi))?;
        let abs_diff = (from_contour - expected).norm();
        out.push(PoleCheck { pole: xi, from_contour, expected, abs_diff, pass: abs_diff <= POLE_TOL * (1.0 + expected.norm()) });
    }
    Ok(out)
}

fn hard_edge_checks(curve: &SolvedCurve) -> Vec<(HardEdgeCheck, Option<BoundednessCheck>)> {
    let CurveKind::Hyperelliptic(h) = &curve.kind else {
        return Vec::new();
    };
    let t = h.data.t;
    let s = &h.data.s;
    let ends = h.endpoints();
    let active_edges: Vec<f64> = h.cuts.iter().flat_map(|c| [c.left, c.right]).filter(|e| e.is_hard()).map(|e| e.value()).collect();
    let mut out = Vec::new();
    for &a in &h.data.edges {
        let active = active_edges.iter().any(|e| (e - a).abs() < 1e-12);
        let from_curve = if active {
            let sigma_hat: f64 = ends.iter().filter(|e| (*e - a).abs() > 1e-12).map(|e| a - e).product();
            let d_prime = h.data.d().derivative().eval(&a);
            h.h.eval(&a).powi(2) * sigma_hat / (d_prime * d_prime)
        } else {
            0.0
        };
        let vp = |x: f64| h.data.v_prime(C::new(x, 0.0)).re;
        let mut bracket = t * h.moment(|l| s.eval(&l) * vp(l) / (a - l));
        let k1 = s.degree().unwrap_or(0);
        for r in 2..=k1 {
            for l in 1..r {
                let m1 = t * h.moment(|x| x.powi((r - 1 - l) as i32));
                let m2 = t * h.moment(|x| power_kernel(l, C::new(a, 0.0), C::new(x, 0.0)).re);
                bracket += s.coeff(r) * m1 * m2;
            }
        }
        let from_moments = bracket / s.derivative().eval(&a);
        let abs_diff = (from_curve - from_moments).abs();
        let edge = HardEdgeCheck { edge: a, active, from_curve, from_moments, abs_diff, pass: abs_diff <= HARD_EDGE_TOL * (1.0 + from_curve.abs()) };
        let bounded = active.then(|| boundedness(curve, a));
        out.push((edge, bounded));
    }
    out
}

fn boundedness(curve: &SolvedCurve, a: f64) -> BoundednessCheck {
    let samples: Vec<(f64, f64)> = BOUNDED_DELTAS
        .iter()
        .map(|&d| {
            let dx = C::new(0.0, d);
            let v = curve.y(C::new(a, 0.0) + dx).map(|y| (y * dx.sqrt()).norm()).unwrap_or(f64::INFINITY);
            (d, v)
        })
        .collect();
    let vals: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let (lo, hi) = vals.iter().fold((f64::INFINITY, 0.0f64), |(l, h), v| (l.min(*v), h.max(*v)));
    let last = &vals[vals.len() - 3..];
    let settled = last.iter().all(|v| (v - last[2]).abs() <= 1e-2 * last[2].max(1e-12));
    BoundednessCheck { edge: a, samples, pass: hi.is_finite() && hi <= 2.0 * lo.max(1e-300) + 1.0 && settled }
}

pub fn residue_report(curve: &SolvedCurve, model: &ModelSpec) -> Result<ResidueReport, CurveError> {
    let mut hard_edges = Vec::new();
    let mut boundedness = Vec::new();
    for (e, b) in hard_edge_checks(curve) {
        hard_edges.push(e);
        boundedness.extend(b);
    }
    Ok(ResidueReport {
        factorized_moments: !hard_edges.is_empty(),
        hard_edges,
        poles: pole_checks(curve, model)?,
        infinity: infinity_check(curve, model)?,
        boundedness,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DualityReport {
    /// `max |E(x, y) - E_swapped(y, x)|` on the probe grid.
    pub max_deviation: f64,
    /// `max |x - X(Y(x))|` over sampled points of the solved curve.
    pub max_inverse_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn grid() -> Vec<C> {
    (0..5).map(|k| C::new(-1.5 + 0.75 * k as f64, 0.3)).collect()
}

/// Solves the model and its exchange independently and compares curves.
pub fn duality_check(model: &ModelSpec, tolerance: f64) -> Result<DualityReport, CurveError> {
    let direct = first_solution(model)?;
    let swapped_model = model.swapped();
    let swapped = first_solution(&swapped_model)?;
    let mut max_deviation = 0.0f64;
    for &x in &grid() {
        for &y in &grid() {
            let d = (direct.e(x, y)? - swapped.e(y, x)?).norm();
            max_deviation = max_deviation.max(d);
        }
    }
    // X(Y(x)) = x: on the curve, (x, Y(x)) solves the exchanged equation
    let mut max_inverse_error = 0.0f64;
    let far = direct.singular_points().iter().fold(1.0f64, |m, p| m.max(p.norm()));
    for k in 0..8 {
        let x = C::from_polar(2.0 * far, 0.3 + 0.7 * k as f64);
        let y = direct.y(x)?;
        let residual = swapped.e(y, x)?.norm() / (1.0 + direct.e(x, C::new(0.0, 0.0))?.norm());
        max_inverse_error = max_inverse_error.max(residual);
    }
    Ok(DualityReport { max_deviation, max_inverse_error, tolerance, pass: max_deviation <= tolerance && max_inverse_error <= tolerance })
}

fn first_solution(model: &ModelSpec) -> Result<SolvedCurve, CurveError> {
    let ansatz = build_ansatz(model)?;
    let mut found = solve_convergent(&ansatz)?;
    Ok(found.solutions.swap_remove(0))
}

/// Polynomial `s` of a one-matrix curve, for callers that only hold the model.
pub fn edge_polynomial(model: &ModelSpec) -> Polynomial<f64> {
    Polynomial::new(model.s().coeffs().iter().map(|c| c.re).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::RationalFunction;
    use crate::curve::ansatz::build_ansatz;
    use crate::curve::hyperelliptic::{Cut, CutConditions, Endpoint};
    use crate::curve::solved::{solve_formal, solve_with_topology};
    use crate::model::{real_poly, ContourSegment};

    #[test]
    fn gaussian_reports_t_at_infinity() {
        let m = ModelSpec::one_matrix(RationalFunction::polynomial(real_poly(&[0.0, 1.0])), 1.3, 1);
        let c = solve_formal(&build_ansatz(&m).unwrap(), &[1.0]).unwrap();
        let r = residue_report(&c, &m).unwrap();
        assert!(r.hard_edges.is_empty() && r.poles.is_empty());
        assert!(r.infinity.pass, "{:?}", r.infinity);
    }

    #[test]
    fn box_edge_residues_agree() {
        let m = ModelSpec::one_matrix(RationalFunction::polynomial(real_poly(&[0.0, 0.2])), 1.0, 1)
            .with_contours1(vec![ContourSegment::interval(-1.0, 1.0)]);
        let cuts = [Cut { left: Endpoint::Hard(-1.0), right: Endpoint::Hard(1.0) }];
        let c = solve_with_topology(&build_ansatz(&m).unwrap(), &cuts, &CutConditions::RealPeriods).unwrap();
        let r = residue_report(&c, &m).unwrap();
        assert_eq!(r.hard_edges.len(), 2);
        assert!((r.hard_edges[0].from_curve + r.hard_edges[1].from_curve).abs() < 1e-12);
        assert!(r.passes(), "{r:?}");
    }

    #[test]
    fn symmetric_pair_is_self_dual() {
        let m = ModelSpec::two_matrix(real_poly(&[0.0, 1.0, 0.0, 0.2]), real_poly(&[0.0, 1.0, 0.0, 0.2]), 0.5, 1);
        let r = duality_check(&m, 1e-8).unwrap();
        assert!(r.pass, "{r:?}");
    }
}
