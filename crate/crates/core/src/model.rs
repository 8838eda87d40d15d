//! Model definition shared by every module.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{Polynomial, RationalFunction};

/// Nature of a contour extremity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndpointKind {
    HardEdge,
    PoleApproach,
    InfinitySector,
}

/// One piece of an eigenvalue integration path. An `InfinitySector`
/// endpoint is stored as a point at infinity (`re` or `im` set to `±inf`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourSegment {
    pub start: Complex64,
    pub end: Complex64,
    pub start_kind: EndpointKind,
    pub end_kind: EndpointKind,
    pub node_count: usize,
}

pub const DEFAULT_NODES: usize = 48;

impl ContourSegment {
    /// The whole real axis.
    pub fn real_line() -> Self {
        Self {
            start: Complex64::new(f64::NEG_INFINITY, 0.0),
            end: Complex64::new(f64::INFINITY, 0.0),
            start_kind: EndpointKind::InfinitySector,
            end_kind: EndpointKind::InfinitySector,
            node_count: DEFAULT_NODES,
        }
    }

    /// `[a, b]` with both ends hard edges.
    pub fn interval(a: f64, b: f64) -> Self {
        Self {
            start: Complex64::new(a, 0.0),
            end: Complex64::new(b, 0.0),
            start_kind: EndpointKind::HardEdge,
            end_kind: EndpointKind::HardEdge,
            node_count: DEFAULT_NODES,
        }
    }

    /// `[a, +inf)` (or `(-inf, a]` when `upward` is false) with a hard edge at `a`.
    pub fn half_line(a: f64, upward: bool) -> Self {
        let inf = Complex64::new(if upward { f64::INFINITY } else { f64::NEG_INFINITY }, 0.0);
        let edge = Complex64::new(a, 0.0);
        let (start, end, start_kind, end_kind) = if upward {
            (edge, inf, EndpointKind::HardEdge, EndpointKind::InfinitySector)
        } else {
            (inf, edge, EndpointKind::InfinitySector, EndpointKind::HardEdge)
        };
        Self { start, end, start_kind, end_kind, node_count: DEFAULT_NODES }
    }

    pub fn with_nodes(mut self, n: usize) -> Self {
        self.node_count = n;
        self
    }

    /// `(lo, hi)` if the segment lies on the real axis.
    pub fn real_bounds(&self) -> Option<(f64, f64)> {
        let real = |z: Complex64| z.im == 0.0 && !z.re.is_nan();
        if !real(self.start) || !real(self.end) {
            return None;
        }
        let (a, b) = (self.start.re, self.end.re);
        Some((a.min(b), a.max(b)))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("coupling t must be positive, got {0}")]
    NonPositiveCoupling(f64),
    #[error("matrix size must be at least 1")]
    EmptyMatrix,
    #[error("hard edge {edge} sits on a pole of V'{which}")]
    HardEdgeAtPole { edge: Complex64, which: u8 },
    #[error("contour endpoint {point} is marked as a hard edge but is not in the hard-edge list of matrix {which}")]
    UndeclaredHardEdge { point: Complex64, which: u8 },
    #[error("matrix {which} has no contour segments")]
    NoContour { which: u8 },
    #[error("path unsupported by the numeric lab: {0}")]
    UnsupportedPath(String),
}

/// Potentials, coupling, size, paths and hard edges.
///
/// `s(x)` and `s~(y)` are always derived from the edge lists.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub v1_prime: RationalFunction<Complex64>,
    pub v2_prime: RationalFunction<Complex64>,
    pub t: f64,
    pub n: usize,
    pub contours1: Vec<ContourSegment>,
    pub contours2: Vec<ContourSegment>,
    pub hard_edges_x: Vec<Complex64>,
    pub hard_edges_y: Vec<Complex64>,
    pub kappa: Vec<Vec<f64>>,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Real-coefficient polynomial helper, ascending order.
pub fn real_poly(coeffs: &[f64]) -> Polynomial<Complex64> {
    Polynomial::new(coeffs.iter().map(|&a| c(a)).collect())
}

impl ModelSpec {
    /// Two-matrix model with polynomial potentials on the real line, no edges.
    pub fn two_matrix(v1_prime: Polynomial<Complex64>, v2_prime: Polynomial<Complex64>, t: f64, n: usize) -> Self {
        Self {
            v1_prime: RationalFunction::polynomial(v1_prime),
            v2_prime: RationalFunction::polynomial(v2_prime),
            t,
            n,
            contours1: vec![ContourSegment::real_line()],
            contours2: vec![ContourSegment::real_line()],
            hard_edges_x: Vec::new(),
            hard_edges_y: Vec::new(),
            kappa: vec![vec![1.0]],
        }
    }

    /// One-matrix model with effective potential `V`: embedded as
    /// `V'_1 = V' + x`, `V'_2 = y`, so that integrating out the Gaussian `M2`
    /// leaves the weight `exp(-(N/t) Tr V(M1))`.
    pub fn one_matrix(v_prime: RationalFunction<Complex64>, t: f64, n: usize) -> Self {
        let x = RationalFunction::polynomial(Polynomial::x());
        Self {
            v1_prime: v_prime.add(&x),
            v2_prime: x,
            t,
            n,
            contours1: vec![ContourSegment::real_line()],
            contours2: vec![ContourSegment::real_line()],
            hard_edges_x: Vec::new(),
            hard_edges_y: Vec::new(),
            kappa: vec![vec![1.0]],
        }
    }

    /// Replaces the `M1` path by `segments`, collecting their hard edges.
    pub fn with_contours1(mut self, segments: Vec<ContourSegment>) -> Self {
        self.hard_edges_x = collect_edges(&segments);
        self.contours1 = segments;
        self
    }

    pub fn with_contours2(mut self, segments: Vec<ContourSegment>) -> Self {
        self.hard_edges_y = collect_edges(&segments);
        self.contours2 = segments;
        self
    }

    pub fn s(&self) -> Polynomial<Complex64> {
        Polynomial::from_roots(&self.hard_edges_x)
    }

    pub fn s_tilde(&self) -> Polynomial<Complex64> {
        Polynomial::from_roots(&self.hard_edges_y)
    }

    /// `true` when `V'_2(y) = y` exactly, i.e. `M2` is Gaussian.
    pub fn is_one_matrix(&self) -> bool {
        self.v2_prime.is_polynomial() && self.v2_prime.numerator().trimmed(0.0) == Polynomial::x() && self.hard_edges_y.is_empty()
    }

    /// The effective one-matrix `V' = V'_1 - x`.
    pub fn one_matrix_v_prime(&self) -> RationalFunction<Complex64> {
        self.v1_prime.sub(&RationalFunction::polynomial(Polynomial::x()))
    }

    /// Exchange of the two matrices.
    pub fn swapped(&self) -> Self {
        Self {
            v1_prime: self.v2_prime.clone(),
            v2_prime: self.v1_prime.clone(),
            t: self.t,
            n: self.n,
            contours1: self.contours2.clone(),
            contours2: self.contours1.clone(),
            hard_edges_x: self.hard_edges_y.clone(),
            hard_edges_y: self.hard_edges_x.clone(),
            kappa: transpose(&self.kappa),
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.t > 0.0) {
            return Err(ModelError::NonPositiveCoupling(self.t));
        }
        if self.n == 0 {
            return Err(ModelError::EmptyMatrix);
        }
        for (which, edges, v, contours) in [
            (1u8, &self.hard_edges_x, &self.v1_prime, &self.contours1),
            (2u8, &self.hard_edges_y, &self.v2_prime, &self.contours2),
        ] {
            if contours.is_empty() {
                return Err(ModelError::NoContour { which });
            }
            for &e in edges {
                if v.denominator().to_complex().eval(&e).norm() < 1e-12 {
                    return Err(ModelError::HardEdgeAtPole { edge: e, which });
                }
            }
            for seg in contours {
                for (p, kind) in [(seg.start, seg.start_kind), (seg.end, seg.end_kind)] {
                    if kind == EndpointKind::HardEdge && !edges.iter().any(|&e| (e - p).norm() < 1e-12) {
                        return Err(ModelError::UndeclaredHardEdge { point: p, which });
                    }
                }
            }
        }
        Ok(())
    }

    /// Extra restrictions of the numeric lab: real intervals, single product
    /// path with unit weight.
    pub fn validate_numeric(&self) -> Result<(), ModelError> {
        self.validate()?;
        let single = self.kappa.len() == 1 && self.kappa[0].len() == 1 && self.kappa[0][0] == 1.0;
        if !single {
            return Err(ModelError::UnsupportedPath("path weights must be a single entry equal to 1".into()));
        }
        for seg in self.contours1.iter().chain(&self.contours2) {
            if seg.real_bounds().is_none() {
                return Err(ModelError::UnsupportedPath(format!("segment {:?} -> {:?} is not a real interval", seg.start, seg.end)));
            }
        }
        Ok(())
    }
}

fn collect_edges(segments: &[ContourSegment]) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = Vec::new();
    for seg in segments {
        for (p, kind) in [(seg.start, seg.start_kind), (seg.end, seg.end_kind)] {
            if kind == EndpointKind::HardEdge && !out.iter().any(|&e| (e - p).norm() < 1e-12) {
                out.push(p);
            }
        }
    }
    out
}

fn transpose(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols).map(|j| m.iter().map(|row| row[j]).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edges_follow_contours() {
        let m = ModelSpec::one_matrix(RationalFunction::polynomial(real_poly(&[0.0, 1.0])), 1.0, 2)
            .with_contours1(vec![ContourSegment::interval(0.0, 1.0)]);
        assert_eq!(m.hard_edges_x.len(), 2);
        let s = m.s();
        assert!(s.eval(&c(0.0)).norm() < 1e-15 && s.eval(&c(1.0)).norm() < 1e-15);
        assert!(m.is_one_matrix());
        m.validate_numeric().unwrap();
    }

    #[test]
    fn edge_on_pole_is_rejected() {
        let v = RationalFunction::new(real_poly(&[1.0]), real_poly(&[-2.0, 1.0])).unwrap();
        let mut m = ModelSpec::one_matrix(v, 1.0, 1);
        m.hard_edges_x = vec![c(2.0)];
        assert!(matches!(m.validate(), Err(ModelError::HardEdgeAtPole { .. })));
    }

    #[test]
    fn swap_exchanges_roles() {
        let m = ModelSpec::two_matrix(real_poly(&[0.0, 2.0]), real_poly(&[0.0, 0.0, 1.0]), 1.0, 1)
            .with_contours1(vec![ContourSegment::half_line(0.0, true)]);
        let w = m.swapped();
        assert_eq!(w.hard_edges_y, m.hard_edges_x);
        assert_eq!(w.v1_prime, m.v2_prime);
    }
}
