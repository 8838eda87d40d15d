//! The master loop equation evaluated on measured or exact correlators.

mod atoms;
pub mod cases;
pub mod context;
pub mod correlators;
pub mod master;
pub mod report;

use num_complex::Complex64;
use thiserror::Error;

use crate::lab::LabError;

pub use cases::{specialize_case, Case, CaseComparison, ReducedEvaluator};
pub use context::Context;
pub use correlators::{eval_a, eval_b, eval_bk, eval_d, eval_p, eval_u, eval_u3, eval_w, eval_y};
pub use master::{bundle, eval_e, eval_l, master_residual, CorrelatorBundle, E_TERMS, L_TERMS};
pub use report::{default_probes, residual_report, ProbeReport, ResidualReport};

#[derive(Debug, Error)]
pub enum CheckError {
    #[error(transparent)]
    Lab(#[from] LabError),
    #[error("hard edge hit: {0}")]
    EdgeEvaluation(String),
    #[error("missing observable: {0}")]
    MissingObservable(String),
    #[error("probe {probe} lies {distance:.3e} from the support")]
    ProbeTooClose { probe: Complex64, distance: f64 },
}
