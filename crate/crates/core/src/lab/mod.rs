//! Finite-N expectation values in the eigenvalue representation: exact
//! nested quadrature and Metropolis sampling, with error bars.

mod config;
mod ensemble;
mod mcmc;
mod potential;
mod quadrature;
mod table;

pub use config::Config;
pub use ensemble::{jackknife_means, Ensemble, ErrorModel, Estimate, Means, JACKKNIFE_BLOCKS};
pub use mcmc::{metropolis_1mm, metropolis_2mm, run_chains, McmcOptions, SampleChain};
pub use potential::{cutoffs, Domain, Potential, Weight};
pub use quadrature::{composite_rule, QuadratureEnsemble, QuadratureOptions};
pub use table::{
    estimate, model_hash, quadrature_moments_1mm, quadrature_moments_2mm, support_distance, Entry, MomentTable, Observable, Source,
    TableMetadata,
};

use num_complex::Complex64;
use thiserror::Error;

use crate::model::ModelError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("weight not integrable: {0}")]
    DivergentWeight(String),
    #[error("quadrature limited to N <= {max}, got N = {n}")]
    QuadratureOverflow { n: usize, max: usize },
    #[error("weight is not real positive near x = {0}")]
    NegativeWeight(f64),
    #[error("probe {probe} lies {distance:e} from the eigenvalue support")]
    ProbeTooClose { probe: Complex64, distance: f64 },
    #[error("missing observable: {0}")]
    MissingObservable(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("i/o: {0}")]
    Io(String),
}
