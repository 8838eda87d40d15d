//! Spectral curves: ansatz, solution, periods and residue checks.

pub mod ansatz;
mod export;
mod extrema;
pub mod genus0;
pub mod hyperelliptic;
pub mod periods;
pub mod residues;
pub mod solved;
pub mod solver;
pub mod topology;

use num_complex::Complex64;

use crate::algebra::AlgebraError;

pub use ansatz::{build_ansatz, AnsatzKind, CurveAnsatz, Monomial};
pub use export::{export, CurveExport};
pub use extrema::find_extrema;
pub use hyperelliptic::{Cut, CutConditions, Endpoint};
pub use periods::{period, period_table, periods, Cycle, CycleKind, PeriodEntry};
pub use residues::{duality_check, residue_report, DualityReport, ResidueReport};
pub use solved::{solve_convergent, solve_formal, solve_with_topology, ConvergentSolutions, CurveKind, SolveMode, SolvedCurve};
pub use solver::{NewtonOptions, NewtonResult};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CurveError {
    #[error("V'2(V'1(x)) = x has no isolated solutions")]
    DegenerateExtremumEquation,
    #[error("Newton iteration stalled after {iterations} steps at residual {residual:e}")]
    NewtonDivergence { iterations: usize, residual: f64 },
    #[error("{free} free coefficients against {conditions} conditions")]
    ConditionCountMismatch { free: usize, conditions: usize },
    #[error("integration path meets the branch point {0}")]
    BranchCollision(Complex64),
    #[error("density is negative ({0:e}) on the support")]
    NegativeDensity(f64),
    #[error("invalid filling fractions: {0}")]
    InvalidFillingFractions(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}
