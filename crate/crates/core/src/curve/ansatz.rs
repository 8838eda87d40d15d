//! Monomial ansatz for `E(x, y)` and the matching count of conditions.

use num_complex::Complex64;
use serde::Serialize;

use super::extrema::find_extrema;
use super::CurveError;
use crate::model::ModelSpec;

type C = Complex64;

/// `x^x y^y / (s(x)^s_power s~(y)^st_power Q(x)^q_power)`, `Q` the
/// denominator of `V'` in one-matrix models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Monomial {
    pub x: usize,
    pub y: usize,
    pub s_power: usize,
    pub st_power: usize,
    pub q_power: usize,
}

impl Monomial {
    pub fn xy(x: usize, y: usize) -> Self {
        Self { x, y, s_power: 0, st_power: 0, q_power: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AnsatzKind {
    /// `V'2(y) = y`: hyperelliptic in endpoint form.
    OneMatrix,
    /// Polynomial potentials, no edges: genus-zero parametrization.
    TwoMatrix,
    /// Block structure only; not solved.
    TwoMatrixWithEdges,
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveAnsatz {
    #[serde(skip)]
    pub model: ModelSpec,
    pub kind: AnsatzKind,
    /// Monomials with unknown coefficients.
    pub basis: Vec<Monomial>,
    /// Coefficients fixed by the head of `E` and the behaviour at infinity.
    pub fixed_coeffs: Vec<(Monomial, C)>,
    /// Current values of the unknown coefficients, in basis order.
    pub free_coeffs: Vec<C>,
    /// Linear relations among the unknowns from poles of `V'`.
    pub pole_constraints: usize,
    /// Filling-fraction or period conditions to impose.
    pub conditions: usize,
    pub genus_estimate: usize,
    /// Solutions of `V'2(V'1(x)) = x` as `(x, V'1(x))`.
    pub extrema: Vec<(C, C)>,
}

impl CurveAnsatz {
    /// Unknowns left after the pole relations.
    pub fn free_count(&self) -> usize {
        self.basis.len().saturating_sub(self.pole_constraints)
    }

    /// The count invariant: free unknowns match the imposed conditions.
    pub fn is_balanced(&self) -> bool {
        self.free_count() == self.conditions
    }
}

fn c(a: f64) -> C {
    C::new(a, 0.0)
}

pub fn build_ansatz(model: &ModelSpec) -> Result<CurveAnsatz, CurveError> {
    let extrema = find_extrema(model)?;
    let k = extrema.len();
    let k1 = model.hard_edges_x.len();
    let k2 = model.hard_edges_y.len();
    if model.is_one_matrix() {
        let v = model.one_matrix_v_prime();
        let (a, q) = (v.numerator().clone(), v.denominator().clone());
        let da = a.degree().unwrap_or(0);
        let dq = q.degree().unwrap_or(0);
        // (y - x)(A/Q + x - y) = -y^2 + 2xy - x^2 + (y A - x A)/Q
        let mut fixed = vec![(Monomial::xy(0, 2), c(-1.0)), (Monomial::xy(1, 1), c(2.0)), (Monomial::xy(2, 0), c(-1.0))];
        for (i, ai) in a.coeffs().iter().enumerate() {
            fixed.push((Monomial { x: i, y: 1, s_power: 0, st_power: 0, q_power: 1 }, *ai));
            fixed.push((Monomial { x: i + 1, y: 0, s_power: 0, st_power: 0, q_power: 1 }, -ai));
        }
        // -R/(s Q^2) with deg R = K1 + deg A + deg Q - 1, top coefficient fixed
        let deg_r = (k1 + da + dq).saturating_sub(1);
        let mono = |i: usize| Monomial { x: i, y: 0, s_power: 1, st_power: 0, q_power: 2 };
        let lc = model.t * a.leading().copied().unwrap_or(c(0.0)) * q.leading().copied().unwrap_or(c(1.0));
        fixed.push((mono(deg_r), -lc));
        let basis: Vec<Monomial> = (0..deg_r).map(mono).collect();
        let free_coeffs = vec![c(0.0); basis.len()];
        return Ok(CurveAnsatz {
            model: model.clone(),
            kind: AnsatzKind::OneMatrix,
            basis,
            fixed_coeffs: fixed,
            free_coeffs,
            pole_constraints: dq,
            conditions: (k + k1).saturating_sub(1),
            genus_estimate: (k + k1).saturating_sub(1),
            extrema,
        });
    }
    let d1 = model.v1_prime.numerator().degree().unwrap_or(0);
    let d2 = model.v2_prime.numerator().degree().unwrap_or(0);
    let mut fixed = Vec::new();
    let v1 = model.v1_prime.numerator();
    let v2 = model.v2_prime.numerator();
    // (V'2(y) - x)(V'1(x) - y) + t
    for (i, ai) in v1.coeffs().iter().enumerate() {
        for (j, bj) in v2.coeffs().iter().enumerate() {
            fixed.push((Monomial { x: i, y: j, ..Monomial::xy(0, 0) }, ai * bj));
        }
        fixed.push((Monomial::xy(i + 1, 0), -ai));
    }
    for (j, bj) in v2.coeffs().iter().enumerate() {
        fixed.push((Monomial::xy(0, j + 1), -bj));
    }
    fixed.push((Monomial::xy(1, 1), c(1.0)));
    fixed.push((Monomial::xy(0, 0), c(model.t)));
    let top = Monomial::xy(d1.saturating_sub(1), d2.saturating_sub(1));
    let lc = model.t * v1.leading().copied().unwrap_or(c(0.0)) * v2.leading().copied().unwrap_or(c(0.0));
    fixed.push((top, -lc));
    let mut basis: Vec<Monomial> = (0..d1).flat_map(|i| (0..d2).map(move |j| Monomial::xy(i, j))).filter(|m| *m != top).collect();
    let polynomial = model.v1_prime.is_polynomial() && model.v2_prime.is_polynomial();
    let kind = if k1 == 0 && k2 == 0 && polynomial {
        AnsatzKind::TwoMatrix
    } else {
        for i in 0..k1.max(1) {
            for j in 0..d2 {
                if k1 > 0 {
                    basis.push(Monomial { x: i, y: j, s_power: 1, st_power: 0, q_power: 0 });
                }
            }
        }
        for i in 0..d1 {
            for j in 0..k2 {
                basis.push(Monomial { x: i, y: j, s_power: 0, st_power: 1, q_power: 0 });
            }
        }
        for i in 0..k1 {
            for j in 0..k2 {
                basis.push(Monomial { x: i, y: j, s_power: 1, st_power: 1, q_power: 0 });
            }
        }
        AnsatzKind::TwoMatrixWithEdges
    };
    let free_coeffs = vec![c(0.0); basis.len()];
    let conditions = (k + k1 + k2).saturating_sub(1);
    let pole_constraints = match kind {
        AnsatzKind::TwoMatrix => 0,
        _ => basis.len().saturating_sub(conditions),
    };
    Ok(CurveAnsatz {
        model: model.clone(),
        kind,
        basis,
        fixed_coeffs: fixed,
        free_coeffs,
        pole_constraints,
        conditions,
        genus_estimate: conditions,
        extrema,
    })
}
