use loopcurve::algebra::RationalFunction;
use loopcurve::lab::{Ensemble, QuadratureEnsemble, QuadratureOptions};
use loopcurve::model::{real_poly, ContourSegment, ModelSpec};

pub fn gaussian_2mm(n: usize) -> ModelSpec {
    ModelSpec::two_matrix(real_poly(&[0.0, 2.0]), real_poly(&[0.0, 2.0]), 1.0, n)
}

pub fn quartic_2mm(n: usize) -> ModelSpec {
    ModelSpec::two_matrix(real_poly(&[0.0, 1.0, 0.0, 0.5]), real_poly(&[0.0, 1.5, 0.0, 0.3]), 1.0, n)
}

pub fn quartic_1mm(n: usize) -> ModelSpec {
    ModelSpec::one_matrix(RationalFunction::polynomial(real_poly(&[0.0, 1.0, 0.0, 1.0])), 1.0, n)
}

pub fn gaussian_1mm(n: usize) -> ModelSpec {
    ModelSpec::one_matrix(RationalFunction::polynomial(real_poly(&[0.0, 1.0])), 1.0, n)
}

pub fn half_line(a: f64) -> Vec<ContourSegment> {
    vec![ContourSegment::half_line(a, true)]
}

pub fn interval(a: f64, b: f64) -> Vec<ContourSegment> {
    vec![ContourSegment::interval(a, b)]
}

pub fn quadrature(model: &ModelSpec) -> Ensemble {
    let q = if model.is_one_matrix() {
        QuadratureEnsemble::one_matrix(model, QuadratureOptions::default())
    } else {
        QuadratureEnsemble::two_matrix(model, QuadratureOptions::default())
    };
    Ensemble::Quadrature(q.expect("quadrature ensemble"))
}
