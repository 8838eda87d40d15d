//! Loop equations, spectral curves and finite-N checks for one- and
//! two-matrix models with hard edges.

pub mod algebra;
pub mod check;
pub mod curve;
pub mod lab;
pub mod model;
pub mod scalar;
pub mod words;

pub use num_complex::Complex64;

pub use model::{ContourSegment, ModelSpec};

/// Complex coefficients, the default field for model data.
pub type Poly = algebra::Polynomial<Complex64>;
pub type RealPoly = algebra::Polynomial<f64>;
pub type ExactPoly = algebra::Polynomial<num_rational::BigRational>;
pub type Rational = algebra::RationalFunction<Complex64>;
pub type Laurent = algebra::LaurentSeries<Complex64>;
pub type BivariatePoly = algebra::Bivariate<Complex64>;
