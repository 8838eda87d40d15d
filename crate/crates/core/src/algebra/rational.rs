use num_complex::Complex64;

use super::laurent::{Center, LaurentSeries};
use super::poly::Polynomial;
use super::roots::{cluster_roots, roots};
use super::{AlgebraError, DEFAULT_CLUSTER_TOL};
use crate::scalar::Scalar;

/// `numerator / denominator` with a nonzero denominator.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFunction<S> {
    num: Polynomial<S>,
    den: Polynomial<S>,
}

impl<S: Scalar> RationalFunction<S> {
    pub fn new(num: Polynomial<S>, den: Polynomial<S>) -> Result<Self, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::ZeroDenominator);
        }
        Ok(Self { num, den })
    }

    pub fn polynomial(p: Polynomial<S>) -> Self {
        Self { num: p, den: Polynomial::one() }
    }

    pub fn numerator(&self) -> &Polynomial<S> {
        &self.num
    }

    pub fn denominator(&self) -> &Polynomial<S> {
        &self.den
    }

    /// `Some(p)` when the denominator is a nonzero constant.
    pub fn as_polynomial(&self) -> Option<Polynomial<S>> {
        match self.den.degree() {
            Some(0) => Some(self.num.scale(&(S::one() / self.den.coeff(0)))),
            _ => None,
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.degree() == Some(0)
    }

    /// Evaluates at `z`; fails if `|den(z)|` is below `tol` times the
    /// magnitude scale of the denominator at `z`.
    pub fn eval(&self, z: &S, tol: f64) -> Result<S, AlgebraError> {
        let d = self.den.eval(z);
        let r = z.magnitude();
        let scale: f64 = self
            .den
            .coeffs()
            .iter()
            .enumerate()
            .map(|(k, c)| c.magnitude() * r.powi(k as i32))
            .sum();
        if d.is_zero_within(tol * scale) {
            return Err(AlgebraError::PoleEvaluation(format!("{z:?}")));
        }
        Ok(self.num.eval(z) / d)
    }

    pub fn derivative(&self) -> Self {
        let num = self.num.derivative() * self.den.clone() - self.num.clone() * self.den.derivative();
        Self { num, den: self.den.clone() * self.den.clone() }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        if self.den == rhs.den {
            return Self { num: self.num.clone() + rhs.num.clone(), den: self.den.clone() };
        }
        Self {
            num: self.num.clone() * rhs.den.clone() + rhs.num.clone() * self.den.clone(),
            den: self.den.clone() * rhs.den.clone(),
        }
    }

    pub fn neg(&self) -> Self {
        Self { num: -self.num.clone(), den: self.den.clone() }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self { num: self.num.clone() * rhs.num.clone(), den: self.den.clone() * rhs.den.clone() }
    }

    /// `self(inner(x))` for a polynomial `inner`.
    pub fn compose_polynomial(&self, inner: &Polynomial<S>) -> Self {
        Self { num: self.num.compose(inner), den: self.den.compose(inner) }
    }

    /// Cancels the polynomial gcd of numerator and denominator exactly and
    /// makes the denominator monic. Only meaningful for exact fields.
    pub fn reduced(&self) -> Self {
        let mut a = self.num.clone();
        let mut b = self.den.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        let g = a;
        let (num, _) = self.num.div_rem(&g);
        let (den, _) = self.den.div_rem(&g);
        let lead = den.leading().cloned().unwrap_or_else(S::one);
        let inv = S::one() / lead;
        Self { num: num.scale(&inv), den: den.scale(&inv) }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> RationalFunction<T> {
        RationalFunction { num: self.num.map(&f), den: self.den.map(&f) }
    }

    pub fn to_complex(&self) -> RationalFunction<Complex64> {
        self.map(Scalar::to_c64)
    }
}

/// One term `coeff / (x - pole)^order` of a partial-fraction decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoleTerm {
    pub pole: Complex64,
    pub order: usize,
    pub coeff: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartialFractions {
    pub polynomial: Polynomial<Complex64>,
    pub terms: Vec<PoleTerm>,
}

impl PartialFractions {
    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.polynomial.eval(&x)
            + self
                .terms
                .iter()
                .map(|t| t.coeff / (x - t.pole).powi(t.order as i32))
                .sum::<Complex64>()
    }
}

/// A pole of a rational function with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pole {
    pub location: Complex64,
    pub order: usize,
}

impl RationalFunction<Complex64> {
    /// Cancels common roots of numerator and denominator that agree within
    /// `tol` relative to the root scale.
    pub fn normalized(&self, tol: f64) -> Self {
        let num = self.num.trimmed(1e-15);
        let den = self.den.trimmed(1e-15);
        if num.is_zero() {
            return Self { num, den: Polynomial::one() };
        }
        let mut zn = roots(&num);
        let mut zd = roots(&den);
        let scale = zn.iter().chain(zd.iter()).map(|z| z.norm()).fold(1.0, f64::max);
        let mut i = 0;
        while i < zn.len() {
            if let Some(j) = zd.iter().position(|d| (d - zn[i]).norm() <= tol * scale) {
                zd.remove(j);
                zn.remove(i);
            } else {
                i += 1;
            }
        }
        let ln = *num.leading().unwrap();
        let ld = *den.leading().unwrap();
        Self {
            num: Polynomial::from_roots(&zn).scale(&(ln / ld)),
            den: Polynomial::from_roots(&zd),
        }
    }

    /// Distinct poles with multiplicities (after normalization).
    pub fn poles(&self, tol: f64) -> Result<Vec<Pole>, AlgebraError> {
        let r = self.normalized(tol);
        group_roots(&r.den, tol)
    }

    pub fn partial_fractions(&self) -> Result<PartialFractions, AlgebraError> {
        self.partial_fractions_with_tol(DEFAULT_CLUSTER_TOL)
    }

    pub fn partial_fractions_with_tol(&self, tol: f64) -> Result<PartialFractions, AlgebraError> {
        let r = self.normalized(tol);
        let (poly, rem) = r.num.div_rem(&r.den);
        let poles = group_roots(&r.den, tol)?;
        let lead = *r.den.leading().unwrap();
        let mut terms = Vec::new();
        for (idx, p) in poles.iter().enumerate() {
            let others: Vec<Complex64> = poles
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != idx)
                .flat_map(|(_, q)| std::iter::repeat_n(q.location, q.order))
                .collect();
            let cofactor = Polynomial::from_roots(&others).scale(&lead);
            let local = LaurentSeries::from_rational(&rem, &cofactor, Center::Finite(p.location), p.order as i32, 1e-300)?;
            for j in 0..p.order {
                terms.push(PoleTerm { pole: p.location, order: p.order - j, coeff: local.coeff(j as i32) });
            }
        }
        Ok(PartialFractions { polynomial: poly.trimmed(1e-15), terms })
    }

    /// Laurent expansion at `center` to `O(u^precision)`.
    pub fn expand(&self, center: Center<Complex64>, precision: i32) -> Result<LaurentSeries<Complex64>, AlgebraError> {
        LaurentSeries::from_rational(&self.num, &self.den, center, precision, 1e-13)
    }

    /// Residue of `R(x) dx` at a finite pole or at infinity.
    ///
    /// At infinity the convention is `Res = -[coefficient of 1/x]`, so that
    /// `Y = V'(x) - t/x + ...` has residue `t`.
    pub fn residue_at(&self, p: &Center<Complex64>) -> Result<Complex64, AlgebraError> {
        match p {
            Center::Infinity => Ok(self.expand(Center::Infinity, 2)?.residue()),
            Center::Finite(z) => {
                let r = self.normalized(DEFAULT_CLUSTER_TOL);
                let poles = group_roots(&r.den, DEFAULT_CLUSTER_TOL)?;
                let scale = 1.0 + z.norm();
                let pole = poles
                    .iter()
                    .find(|q| (q.location - z).norm() <= 1e-7 * scale)
                    .ok_or_else(|| AlgebraError::NotAPole(format!("{z}")))?;
                let pf = r.partial_fractions()?;
                let nearest = pf
                    .terms
                    .iter()
                    .map(|t| t.pole)
                    .min_by(|a, b| (a - pole.location).norm().total_cmp(&(b - pole.location).norm()))
                    .ok_or_else(|| AlgebraError::NotAPole(format!("{z}")))?;
                Ok(pf.terms.iter().filter(|t| t.pole == nearest && t.order == 1).map(|t| t.coeff).sum())
            }
        }
    }
}

/// Roots of `den` grouped into poles. Raw roots within a loose radius are
/// merged when the derivative test confirms a genuine multiple root;
/// otherwise distinct roots closer than `tol` relative are rejected.
fn group_roots(den: &Polynomial<Complex64>, tol: f64) -> Result<Vec<Pole>, AlgebraError> {
    let raw = roots(den);
    let scale = raw.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let clusters = cluster_roots(&raw, 1e-5 * scale);
    let mut out = Vec::new();
    for c in clusters {
        if c.multiplicity == 1 {
            out.push(Pole { location: c.root, order: 1 });
            continue;
        }
        // Genuine k-fold root: the first k-1 derivatives vanish at the mean.
        let mut d = den.clone();
        let mut genuine = true;
        let norm: f64 = den.coeffs().iter().map(|a| a.norm()).sum::<f64>() * scale.powi(den.degree().unwrap_or(0) as i32);
        for _ in 0..c.multiplicity {
            if d.eval(&c.root).norm() > 1e-6 * norm {
                genuine = false;
                break;
            }
            d = d.derivative();
        }
        if genuine {
            out.push(Pole { location: c.root, order: c.multiplicity });
            continue;
        }
        let members: Vec<Complex64> = raw.iter().copied().filter(|z| (z - c.root).norm() < 1e-5 * scale * c.multiplicity as f64).collect();
        for (i, a) in members.iter().enumerate() {
            for b in &members[i + 1..] {
                if (a - b).norm() < tol * scale {
                    return Err(AlgebraError::ClusteredRoots { separation: (a - b).norm() });
                }
            }
        }
        out.extend(members.into_iter().map(|z| Pole { location: z, order: 1 }));
    }
    Ok(out)
}
