//! Noncommutative trace words and the change-of-variables calculus.

mod combination;
mod generating;
mod matrix;
mod relation;
mod word;

pub use combination::{Term, TraceCombination};
pub use generating::{moment_expand_generating, GeneratingKind, MatSeries, Series, DEFAULT_ORDER_CAP};
pub use matrix::{merge_jacobian, split_jacobian, MatrixKey, MatrixPoly};
pub use relation::{
    action_variation, admissible, build_loop_equation, build_m2_loop_equation, combination_report, MomentRelation, Provenance,
    RelationReport, SymbolicModel, TermReport,
};
pub use word::{canonical_rotation, canonicalize, parse_letters, Letter, ParseWordError, TraceProduct, TraceWord};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WordsError {
    #[error("NonPolynomialPotential: V'{0} is not a polynomial; symbolic mode needs polynomial potentials")]
    NonPolynomialPotential(u8),
    #[error("{0} has a complex coefficient; symbolic mode is exact over the rationals")]
    ComplexCoefficient(String),
    #[error("OrderTooLarge: requested order {order} exceeds the cap {cap}")]
    OrderTooLarge { order: usize, cap: usize },
}
