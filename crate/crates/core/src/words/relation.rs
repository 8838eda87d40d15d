use num_complex::Complex64;
use num_rational::BigRational;
use serde::Serialize;

use super::combination::TraceCombination;
use super::matrix::MatrixPoly;
use super::word::{Letter, TraceProduct};
use super::WordsError;
use crate::algebra::Polynomial;
use crate::model::ModelSpec;
use crate::scalar::{nearest_rational, Scalar};

/// Polynomial data the symbolic engine needs: `V'_1`, `V'_2`, `s`, `s~`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicModel<S> {
    pub v1: Polynomial<S>,
    pub v2: Polynomial<S>,
    pub s: Polynomial<S>,
    pub s_tilde: Polynomial<S>,
}

impl<S: Scalar> SymbolicModel<S> {
    pub fn new(v1: Polynomial<S>, v2: Polynomial<S>, s: Polynomial<S>, s_tilde: Polynomial<S>) -> Self {
        Self { v1, v2, s, s_tilde }
    }

    /// No hard edges.
    pub fn free(v1: Polynomial<S>, v2: Polynomial<S>) -> Self {
        Self::new(v1, v2, Polynomial::one(), Polynomial::one())
    }

    pub fn swapped(&self) -> Self {
        Self::new(self.v2.clone(), self.v1.clone(), self.s_tilde.clone(), self.s.clone())
    }
}

fn exact_poly(p: &Polynomial<Complex64>, what: &str) -> Result<Polynomial<BigRational>, WordsError> {
    p.coeffs()
        .iter()
        .map(|z| {
            if z.im != 0.0 {
                Err(WordsError::ComplexCoefficient(what.to_string()))
            } else {
                Ok(nearest_rational(z.re))
            }
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Polynomial::new)
}

impl SymbolicModel<BigRational> {
    /// Exact symbolic model; real coefficients are converted to the nearest
    /// small-denominator rational.
    pub fn from_spec(model: &ModelSpec) -> Result<Self, WordsError> {
        let v1 = model.v1_prime.as_polynomial().ok_or(WordsError::NonPolynomialPotential(1))?;
        let v2 = model.v2_prime.as_polynomial().ok_or(WordsError::NonPolynomialPotential(2))?;
        Ok(Self::new(
            exact_poly(&v1, "V'1")?,
            exact_poly(&v2, "V'2")?,
            exact_poly(&model.s(), "s")?,
            exact_poly(&model.s_tilde(), "s~")?,
        ))
    }
}

/// Where a relation came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    /// Which matrix is varied.
    pub varied: String,
    /// Rendered change of variables `f`.
    pub generator: String,
    /// Generating family, if any, with the `x^a y^b` coefficient index.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_power: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y_power: Option<u32>,
}

/// `<J(f)> = <S(f)>`: Jacobian side on the left, action side on the right.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentRelation<S> {
    pub lhs: TraceCombination<S>,
    pub rhs: TraceCombination<S>,
    pub provenance: Provenance,
}

impl<S: Scalar> MomentRelation<S> {
    pub fn residual(&self) -> TraceCombination<S> {
        self.lhs.clone() - self.rhs.clone()
    }

    /// `(lhs, rhs)` at numeric `N`, `t`.
    pub fn evaluate<E>(&self, n: f64, t: f64, mut moment: impl FnMut(&TraceProduct) -> Result<Complex64, E>) -> Result<(Complex64, Complex64), E> {
        Ok((self.lhs.eval(n, t, &mut moment)?, self.rhs.eval(n, t, &mut moment)?))
    }

    pub fn observables(&self) -> Vec<TraceProduct> {
        let mut v = self.lhs.observables();
        v.extend(self.rhs.observables());
        v.sort();
        v.dedup();
        v
    }

    /// `true` when both sides are empty (a trivial `0 = 0`).
    pub fn is_trivial(&self) -> bool {
        self.lhs.is_zero() && self.rhs.is_zero()
    }
}

/// `s(M1) g`.
pub fn admissible<S: Scalar>(g: &MatrixPoly<S>, model: &SymbolicModel<S>) -> MatrixPoly<S> {
    MatrixPoly::poly_in(Letter::M1, &model.s) * g.clone()
}

/// `(N/t) Tr((V'_1(M1) - M2) f)`.
pub fn action_variation<S: Scalar>(f: &MatrixPoly<S>, model: &SymbolicModel<S>) -> TraceCombination<S> {
    f.action(Letter::M1, &model.v1)
}

/// Loop equation of the admissible change `M1 -> M1 + eps s(M1) g`.
pub fn build_loop_equation<S: Scalar>(g: &MatrixPoly<S>, model: &SymbolicModel<S>) -> MomentRelation<S> {
    let f = admissible(g, model);
    MomentRelation {
        lhs: f.jacobian(Letter::M1),
        rhs: f.action(Letter::M1, &model.v1),
        provenance: Provenance {
            varied: "M1".into(),
            generator: format!("{f:?}"),
            family: None,
            x_power: None,
            y_power: None,
        },
    }
}

/// Loop equation of the change `M2 -> M2 + eps s(M1) g s~(M2)`.
pub fn build_m2_loop_equation<S: Scalar>(g: &MatrixPoly<S>, model: &SymbolicModel<S>) -> MomentRelation<S> {
    let f = MatrixPoly::poly_in(Letter::M1, &model.s) * g.clone() * MatrixPoly::poly_in(Letter::M2, &model.s_tilde);
    MomentRelation {
        lhs: f.jacobian(Letter::M2),
        rhs: f.action(Letter::M2, &model.v2),
        provenance: Provenance {
            varied: "M2".into(),
            generator: format!("{f:?}"),
            family: None,
            x_power: None,
            y_power: None,
        },
    }
}

/// One term of a serialized combination.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TermReport {
    pub scalar: serde_json::Value,
    pub n_power: i32,
    pub t_power: i32,
    /// Factors of the expectation, as canonical word strings.
    pub traces: Vec<String>,
    /// Further expectations multiplying the first (products of expectations).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub times: Vec<Vec<String>>,
}

pub fn combination_report<S: Scalar>(c: &TraceCombination<S>) -> Vec<TermReport> {
    c.terms()
        .map(|(k, v)| {
            let mut groups = k.expectations().iter().map(|p| p.factors().iter().map(|w| w.to_string()).collect::<Vec<_>>());
            TermReport {
                scalar: v.to_json(),
                n_power: k.n_pow,
                t_power: k.t_pow,
                traces: groups.next().unwrap_or_default(),
                times: groups.collect(),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationReport {
    pub provenance: Provenance,
    pub lhs: Vec<TermReport>,
    pub rhs: Vec<TermReport>,
}

impl<S: Scalar> From<&MomentRelation<S>> for RelationReport {
    fn from(r: &MomentRelation<S>) -> Self {
        Self {
            provenance: r.provenance.clone(),
            lhs: combination_report(&r.lhs),
            rhs: combination_report(&r.rhs),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use crate::words::TraceWord;
    use Letter::*;

    type Q = BigRational;

    fn qp(v: &[i64]) -> Polynomial<Q> {
        Polynomial::new(v.iter().map(|&c| ratio(c, 1)).collect())
    }

    fn tc(c: i64, n: i32, t: i32, words: &[&str]) -> TraceCombination<Q> {
        TraceCombination::expectation(ratio(c, 1), n, t, words.iter().map(|s| s.parse::<TraceWord>().unwrap()).collect())
    }

    #[test]
    fn admissible_examples() {
        let a = ratio(3, 1);
        let edge = SymbolicModel::new(qp(&[0, 1]), qp(&[0, 1]), Polynomial::from_roots(std::slice::from_ref(&a)), Polynomial::one());
        let f = admissible(&MatrixPoly::identity(), &edge);
        assert_eq!(f, MatrixPoly::letter(M1) - MatrixPoly::identity().scale(&a));

        let free = SymbolicModel::free(qp(&[0, 1]), qp(&[0, 1]));
        assert_eq!(admissible(&MatrixPoly::letter(M2), &free), MatrixPoly::letter(M2));

        let b = ratio(-2, 1);
        let two = SymbolicModel::new(qp(&[0, 1]), qp(&[0, 1]), Polynomial::from_roots(&[a.clone(), b.clone()]), Polynomial::one());
        let want = MatrixPoly::word(ratio(1, 1), vec![M1; 3]) - MatrixPoly::word(a.clone() + b.clone(), vec![M1; 2]) + MatrixPoly::word(a * b, vec![M1]);
        assert_eq!(admissible(&MatrixPoly::letter(M1), &two), want);
    }

    #[test]
    fn loop_equation_examples() {
        let free = SymbolicModel::free(qp(&[0, 1]), qp(&[0, 1]));
        let r = build_loop_equation(&MatrixPoly::identity(), &free);
        assert!(r.lhs.is_zero());
        assert_eq!(r.rhs, tc(1, 1, -1, &["1"]) - tc(1, 1, -1, &["2"]));

        let r = build_loop_equation(&MatrixPoly::letter(M1), &free);
        assert_eq!(r.lhs, tc(1, 2, 0, &[]));
        assert_eq!(r.rhs, tc(1, 1, -1, &["11"]) - tc(1, 1, -1, &["12"]));
    }

    #[test]
    fn rejects_rational_potential() {
        use crate::algebra::RationalFunction;
        use crate::model::real_poly;
        let v = RationalFunction::new(real_poly(&[1.0]), real_poly(&[-2.0, 1.0])).unwrap();
        let m = ModelSpec::one_matrix(v, 1.0, 1);
        assert_eq!(SymbolicModel::from_spec(&m), Err(WordsError::NonPolynomialPotential(1)));
    }

    #[test]
    fn report_uses_word_strings() {
        let rep = combination_report(&tc(2, 1, -1, &["211", "2"]));
        assert_eq!(rep[0].traces, vec!["112".to_string(), "2".to_string()]);
        assert_eq!(rep[0].scalar, serde_json::json!("2"));
    }
}
