//! Solutions of `V'2(V'1(x)) = x`.

use num_complex::Complex64;

use super::CurveError;
use crate::algebra::{roots, Polynomial};
use crate::check::context::eval_rational;
use crate::model::ModelSpec;

type C = Complex64;

/// `V'2(P/Q)` over the common denominator `Q^d`: returns numerator and
/// denominator polynomials.
fn compose(v2_num: &Polynomial<C>, v2_den: &Polynomial<C>, p: &Polynomial<C>, q: &Polynomial<C>) -> (Polynomial<C>, Polynomial<C>) {
    let d = v2_num.degree().unwrap_or(0).max(v2_den.degree().unwrap_or(0));
    let homogenize = |f: &Polynomial<C>| {
        let mut acc = Polynomial::zero();
        for (k, a) in f.coeffs().iter().enumerate() {
            acc = acc + (p.pow(k) * q.pow(d - k)).scale(a);
        }
        acc
    };
    (homogenize(v2_num), homogenize(v2_den))
}

/// All `K` points `(x, V'1(x))` with `V'2(V'1(x)) = x`, sorted by real part.
pub fn find_extrema(model: &ModelSpec) -> Result<Vec<(C, C)>, CurveError> {
    let (v1, v2) = (&model.v1_prime, &model.v2_prime);
    let (num, den) = compose(v2.numerator(), v2.denominator(), v1.numerator(), v1.denominator());
    let eq = (num - Polynomial::x() * den).trimmed(1e-12);
    if eq.is_zero() {
        return Err(CurveError::DegenerateExtremumEquation);
    }
    let mut xs = roots(&eq);
    xs.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(xs.into_iter().map(|x| (x, eval_rational(v1, x))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::real_poly;

    #[test]
    fn gaussian_pair_has_single_extremum() {
        let m = ModelSpec::two_matrix(real_poly(&[0.0, 2.0]), real_poly(&[0.0, 2.0]), 1.0, 1);
        let e = find_extrema(&m).unwrap();
        assert_eq!(e.len(), 1);
        assert!(e[0].0.norm() < 1e-14 && e[0].1.norm() < 1e-14);
    }

    #[test]
    fn identity_pair_is_degenerate() {
        let m = ModelSpec::two_matrix(real_poly(&[0.0, 1.0]), real_poly(&[0.0, 1.0]), 1.0, 1);
        assert!(matches!(find_extrema(&m), Err(CurveError::DegenerateExtremumEquation)));
    }
}
