//! Polynomial and rational-function arithmetic over a generic coefficient
//! field, with complex-only numerics (roots, partial fractions, residues).

mod bivariate;
mod laurent;
mod poly;
mod rational;
mod roots;
mod serial;

pub use bivariate::Bivariate;
pub use laurent::{Center, LaurentSeries};
pub use poly::Polynomial;
pub use rational::{PartialFractions, Pole, PoleTerm, RationalFunction};
pub use roots::{cluster_roots, roots, RootCluster};
pub use serial::{ComplexRepr, RationalRepr};

use thiserror::Error;

/// Default relative root-clustering tolerance.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("evaluation at a pole: z = {0}")]
    PoleEvaluation(String),
    #[error("denominator is the zero polynomial")]
    ZeroDenominator,
    #[error("{0} is not a pole")]
    NotAPole(String),
    #[error("denominator roots not separable (separation {separation:e})")]
    ClusteredRoots { separation: f64 },
    #[error("series truncated at order {precision} below its valuation {valuation}")]
    Truncation { valuation: i32, precision: i32 },
    #[error("series vanishes to its truncation order")]
    ZeroSeries,
    #[error("square root of a series with odd valuation {0}")]
    OddValuation(i32),
}
