//! Contour integrals of `Y dx` along closed polylines with the square-root
//! branch followed continuously from the physical sheet.

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::solved::{CurveKind, SolvedCurve};
use super::CurveError;

type C = Complex64;

const LEGENDRE_NODES: usize = 12;
const MAX_DEPTH: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CycleKind {
    ACycle,
    BCycle,
    PoleLoop,
}

/// Closed polyline; the first point lies on the physical sheet.
#[derive(Debug, Clone, Serialize)]
pub struct Cycle {
    pub kind: CycleKind,
    pub path: Vec<C>,
    pub label: String,
}

impl Cycle {
    /// Clockwise rectangle around the real segment `[l, r]` at distance `margin`.
    pub fn around_cut(l: f64, r: f64, margin: f64, label: impl Into<String>) -> Self {
        let d = margin;
        let path = vec![
            C::new(l - d, 0.0),
            C::new(l - d, d),
            C::new(r + d, d),
            C::new(r + d, -d),
            C::new(l - d, -d),
        ];
        Self { kind: CycleKind::ACycle, path, label: label.into() }
    }

    /// Circle of `points` vertices; clockwise when `clockwise`.
    pub fn circle(center: C, radius: f64, points: usize, clockwise: bool, kind: CycleKind, label: impl Into<String>) -> Self {
        let sign = if clockwise { -1.0 } else { 1.0 };
        let path = (0..points).map(|k| center + C::from_polar(radius, sign * 2.0 * std::f64::consts::PI * k as f64 / points as f64)).collect();
        Self { kind, path, label: label.into() }
    }

    /// Clockwise loop at infinity: `2 pi i t`.
    pub fn at_infinity(radius: f64) -> Self {
        Self::circle(C::new(0.0, 0.0), radius, 256, true, CycleKind::PoleLoop, "infinity")
    }

    /// From the middle of cut `a` above the axis to the middle of cut `b`,
    /// through cut `b` to the second sheet, and back below the axis.
    pub fn between_cuts(a: (f64, f64), b: (f64, f64), height: f64, label: impl Into<String>) -> Self {
        let (ma, mb) = (0.5 * (a.0 + a.1), 0.5 * (b.0 + b.1));
        let path = vec![C::new(ma, height), C::new(mb, height), C::new(mb, -height), C::new(ma, -height)];
        Self { kind: CycleKind::BCycle, path, label: label.into() }
    }
}

/// Continuation state for one sheet of `Y`.
enum Tracker<'a> {
    Root { curve: &'a super::hyperelliptic::HyperellipticCurve, last: C },
    Uniformizer { curve: &'a super::genus0::RationalCurve, z: C },
}

impl Tracker<'_> {
    fn y(&mut self, x: C) -> Result<C, CurveError> {
        match self {
            Tracker::Root { curve, last } => {
                let p = curve.sqrt_s(x);
                let root = if (p - *last).norm() <= (p + *last).norm() { p } else { -p };
                *last = root;
                let d = curve.data.d().to_complex().eval(&x);
                let half = curve.h.to_complex().eval(&x) * root / d;
                Ok(half + curve.data.v_prime(x) * 0.5 + x)
            }
            Tracker::Uniformizer { curve, z } => {
                let mut w = *z;
                for _ in 0..50 {
                    let f = curve.x_of_z(w) - x;
                    let h = 1e-7 * (1.0 + w.norm());
                    let df = (curve.x_of_z(w + h) - curve.x_of_z(w - h)) / (2.0 * h);
                    let step = f / df;
                    w -= step;
                    if step.norm() < 1e-15 * (1.0 + w.norm()) {
                        break;
                    }
                }
                if (curve.x_of_z(w) - x).norm() > 1e-9 * (1.0 + x.norm()) {
                    return Err(CurveError::NewtonDivergence { iterations: 50, residual: (curve.x_of_z(w) - x).norm() });
                }
                *z = w;
                Ok(curve.y_of_z(w))
            }
        }
    }
}

fn distance_to_segment(p: C, a: C, b: C) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let u = (((p - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + ab * u)).norm()
}

struct Integrator<'a> {
    singular: Vec<C>,
    margin: f64,
    max_step: f64,
    rule: &'a [(f64, f64)],
}

impl Integrator<'_> {
    fn segment(&self, tracker: &mut Tracker, a: C, b: C, depth: usize) -> Result<C, CurveError> {
        let nearest = self
            .singular
            .iter()
            .map(|&p| (p, distance_to_segment(p, a, b)))
            .fold((C::new(f64::NAN, 0.0), f64::INFINITY), |m, v| if v.1 < m.1 { v } else { m });
        if nearest.1 < self.margin {
            return Err(CurveError::BranchCollision(nearest.0));
        }
        let len = (b - a).norm();
        if depth < MAX_DEPTH && (len > 0.5 * nearest.1 || len > self.max_step) {
            let mid = 0.5 * (a + b);
            return Ok(self.segment(tracker, a, mid, depth + 1)? + self.segment(tracker, mid, b, depth + 1)?);
        }
        let half = 0.5 * (b - a);
        let center = 0.5 * (a + b);
        let mut acc = C::new(0.0, 0.0);
        for &(xi, w) in self.rule {
            acc += tracker.y(center + half * xi)? * w;
        }
        Ok(acc * half)
    }
}

/// Legendre nodes in increasing order, so tracking moves along the path.
fn legendre() -> &'static [(f64, f64)] {
    static RULE: std::sync::OnceLock<Vec<(f64, f64)>> = std::sync::OnceLock::new();
    RULE.get_or_init(|| {
        let mut pairs = GaussLegendre::new(LEGENDRE_NODES.try_into().unwrap()).as_node_weight_pairs().to_vec();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        pairs
    })
}

/// `oint Y dx` along `cycle`, refusing paths within `margin` of a branch
/// point or pole.
pub fn period_with_margin(curve: &SolvedCurve, cycle: &Cycle, margin: f64) -> Result<C, CurveError> {
    let start = cycle.path[0];
    let singular = curve.singular_points();
    let scale = singular.iter().fold(1.0f64, |m, p| m.max(p.norm()));
    let mut tracker = match &curve.kind {
        CurveKind::Hyperelliptic(h) => Tracker::Root { curve: h, last: h.sqrt_s(start) },
        CurveKind::Rational(r) => Tracker::Uniformizer { curve: r, z: r.z_of_x(start)? },
    };
    let extent = cycle.path.iter().fold(scale, |m, p| m.max(p.norm()));
    let integ = Integrator { singular, margin, max_step: 0.05 * extent, rule: legendre() };
    let n = cycle.path.len();
    let mut acc = C::new(0.0, 0.0);
    for k in 0..n {
        acc += integ.segment(&mut tracker, cycle.path[k], cycle.path[(k + 1) % n], 0)?;
    }
    Ok(acc)
}

pub const DEFAULT_MARGIN: f64 = 1e-6;

pub fn period(curve: &SolvedCurve, cycle: &Cycle) -> Result<C, CurveError> {
    period_with_margin(curve, cycle, DEFAULT_MARGIN)
}

/// Several periods in parallel.
pub fn periods(curve: &SolvedCurve, cycles: &[Cycle]) -> Vec<Result<C, CurveError>> {
    cycles.par_iter().map(|c| period(curve, c)).collect()
}

/// Standard cycles: one clockwise loop per cut, one loop between each pair
/// of consecutive cuts, and the loop at infinity.
pub fn standard_cycles(curve: &SolvedCurve) -> Result<Vec<Cycle>, CurveError> {
    let cuts = curve.cuts()?;
    let singular = curve.singular_points();
    let mut out = Vec::new();
    for (k, &(l, r)) in cuts.iter().enumerate() {
        let others = singular.iter().filter(|p| !((p.re - l).abs() < 1e-12 || (p.re - r).abs() < 1e-12) || p.im.abs() > 1e-12);
        let room = others.map(|p| distance_to_segment(*p, C::new(l, 0.0), C::new(r, 0.0))).fold(1.0f64, f64::min);
        out.push(Cycle::around_cut(l, r, (0.25 * room).min(0.1 * (r - l)).max(1e-3), format!("A{}", k + 1)));
    }
    for k in 1..cuts.len() {
        let gap = cuts[k].0 - cuts[k - 1].1;
        out.push(Cycle::between_cuts(cuts[k - 1], cuts[k], 0.25 * gap, format!("B{k}")));
    }
    let far = singular.iter().fold(1.0f64, |m, p| m.max(p.norm()));
    out.push(Cycle::at_infinity(4.0 * far));
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct PeriodEntry {
    pub label: String,
    pub kind: CycleKind,
    pub value: C,
}

pub fn period_table(curve: &SolvedCurve) -> Result<Vec<PeriodEntry>, CurveError> {
    let cycles = standard_cycles(curve)?;
    let values = periods(curve, &cycles);
    cycles.into_iter().zip(values).map(|(c, v)| Ok(PeriodEntry { label: c.label, kind: c.kind, value: v? })).collect()
}
