//! Serialized form of a solved curve.

use num_complex::Complex64;
use serde::Serialize;

use super::ansatz::{AnsatzKind, Monomial};
use super::periods::{period_table, PeriodEntry};
use super::solved::{fraction_locations, CurveKind, SolveMode, SolvedCurve};
use super::CurveError;

#[derive(Debug, Clone, Serialize)]
pub struct CurveExport {
    pub ansatz: AnsatzKind,
    pub mode: SolveMode,
    pub parametrization: &'static str,
    pub basis: Vec<Monomial>,
    pub fixed: Vec<(Monomial, Complex64)>,
    pub coefficients: Vec<(String, f64)>,
    pub branch_points: Vec<Complex64>,
    pub cuts: Vec<(f64, f64)>,
    pub eps_locations: Vec<f64>,
    pub eps: Vec<f64>,
    pub periods: Vec<PeriodEntry>,
}

pub fn export(curve: &SolvedCurve) -> Result<CurveExport, CurveError> {
    Ok(CurveExport {
        ansatz: curve.ansatz.kind,
        mode: curve.mode,
        parametrization: match curve.kind {
            CurveKind::Hyperelliptic(_) => "hyperelliptic",
            CurveKind::Rational(_) => "rational",
        },
        basis: curve.ansatz.basis.clone(),
        fixed: curve.ansatz.fixed_coeffs.clone(),
        coefficients: curve.coefficients(),
        branch_points: curve.branch_points(),
        cuts: curve.cuts()?,
        eps_locations: fraction_locations(&curve.ansatz)?,
        eps: curve.eps.clone(),
        periods: period_table(curve)?,
    })
}

impl CurveExport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("curve export serializes")
    }
}
