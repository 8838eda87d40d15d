//! Config representation of coefficients: `{"num": [c0, ...], "den": [d0, ...]}`
//! where each entry is a plain number or an `[re, im]` pair.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{AlgebraError, Polynomial, RationalFunction};

/// A complex number as a plain real or an `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexRepr {
    Real(f64),
    Pair([f64; 2]),
}

impl From<ComplexRepr> for Complex64 {
    fn from(c: ComplexRepr) -> Self {
        match c {
            ComplexRepr::Real(re) => Complex64::new(re, 0.0),
            ComplexRepr::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

impl From<Complex64> for ComplexRepr {
    fn from(z: Complex64) -> Self {
        if z.im == 0.0 {
            ComplexRepr::Real(z.re)
        } else {
            ComplexRepr::Pair([z.re, z.im])
        }
    }
}

/// Serialized rational function; `den` defaults to `[1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalRepr {
    pub num: Vec<ComplexRepr>,
    #[serde(default = "unit_den")]
    pub den: Vec<ComplexRepr>,
}

fn unit_den() -> Vec<ComplexRepr> {
    vec![ComplexRepr::Real(1.0)]
}

impl RationalRepr {
    pub fn polynomial(coeffs: &[f64]) -> Self {
        Self {
            num: coeffs.iter().map(|&c| ComplexRepr::Real(c)).collect(),
            den: unit_den(),
        }
    }

    pub fn to_rational(&self) -> Result<RationalFunction<Complex64>, AlgebraError> {
        let num = Polynomial::new(self.num.iter().map(|&c| c.into()).collect());
        let den = Polynomial::new(self.den.iter().map(|&c| c.into()).collect());
        RationalFunction::new(num, den)
    }
}

impl From<&RationalFunction<Complex64>> for RationalRepr {
    fn from(r: &RationalFunction<Complex64>) -> Self {
        let conv = |p: &Polynomial<Complex64>| {
            if p.is_zero() {
                vec![ComplexRepr::Real(0.0)]
            } else {
                p.coeffs().iter().map(|&c| c.into()).collect()
            }
        };
        Self { num: conv(r.numerator()), den: conv(r.denominator()) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_entries_parse() {
        let r: RationalRepr = serde_json::from_str(r#"{"num": [1, [0, 2]], "den": [[-2, 0], 1]}"#).unwrap();
        let f = r.to_rational().unwrap();
        let z = Complex64::new(3.0, 0.0);
        let want = Complex64::new(1.0, 6.0) / Complex64::new(1.0, 0.0);
        assert!((f.eval(&z, 1e-14).unwrap() - want).norm() < 1e-14);
    }

    #[test]
    fn den_defaults_to_one() {
        let r: RationalRepr = serde_json::from_str(r#"{"num": [0, 1]}"#).unwrap();
        assert!(r.to_rational().unwrap().is_polynomial());
    }
}
