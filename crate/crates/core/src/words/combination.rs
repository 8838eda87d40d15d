use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;

use super::word::{TraceProduct, TraceWord};
use crate::scalar::Scalar;

/// Monomial key: `N^n_pow t^t_pow <P_1><P_2>...` where each `<P_i>` is the
/// expectation of a product of traces. Loop equations only produce a single
/// expectation per term; products of expectations appear once connected
/// correlators and `W(x)`-type prefactors are written out.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term {
    pub n_pow: i32,
    pub t_pow: i32,
    expectations: Vec<TraceProduct>,
}

impl Term {
    pub fn new(n_pow: i32, t_pow: i32, expectations: Vec<TraceProduct>) -> Self {
        let mut expectations: Vec<TraceProduct> = expectations.into_iter().filter(|p| !p.is_trivial()).collect();
        expectations.sort();
        Self { n_pow, t_pow, expectations }
    }

    pub fn constant() -> Self {
        Self::new(0, 0, Vec::new())
    }

    pub fn expectations(&self) -> &[TraceProduct] {
        &self.expectations
    }

    fn times(&self, other: &Self) -> Self {
        let mut e = self.expectations.clone();
        e.extend(other.expectations.iter().cloned());
        Self::new(self.n_pow + other.n_pow, self.t_pow + other.t_pow, e)
    }
}

/// Linear combination of [`Term`]s with coefficients in `S`.
#[derive(Clone, PartialEq)]
pub struct TraceCombination<S> {
    terms: BTreeMap<Term, S>,
}

impl<S: Scalar> Default for TraceCombination<S> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<S: Scalar> TraceCombination<S> {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn constant(c: S) -> Self {
        let mut out = Self::zero();
        out.add_term(Term::constant(), c);
        out
    }

    /// `c N^n t^t <Tr w_1 Tr w_2 ...>`; identity factors contribute `N`.
    pub fn expectation(c: S, n_pow: i32, t_pow: i32, factors: Vec<TraceWord>) -> Self {
        let (p, ids) = TraceProduct::new(factors);
        let mut out = Self::zero();
        out.add_term(Term::new(n_pow + ids as i32, t_pow, vec![p]), c);
        out
    }

    /// `<Tr a Tr b> - <Tr a><Tr b>`.
    pub fn connected(a: TraceWord, b: TraceWord) -> Self {
        let both = Self::expectation(S::one(), 0, 0, vec![a.clone(), b.clone()]);
        let split = Self::expectation(S::one(), 0, 0, vec![a]) * Self::expectation(S::one(), 0, 0, vec![b]);
        both - split
    }

    pub fn add_term(&mut self, key: Term, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(v) => {
                let sum = v.clone() + c;
                if sum.is_zero() {
                    self.terms.remove(&key);
                } else {
                    *v = sum;
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Term, &S)> {
        self.terms.iter()
    }

    pub fn coeff(&self, key: &Term) -> S {
        self.terms.get(key).cloned().unwrap_or_else(S::zero)
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero();
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v.clone() * c.clone());
        }
        out
    }

    /// Multiplies by `N^dn t^dt`.
    pub fn shift_powers(&self, dn: i32, dt: i32) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (Term::new(k.n_pow + dn, k.t_pow + dt, k.expectations.clone()), v.clone()))
                .collect(),
        }
    }

    /// Drops coefficients with magnitude at or below `tol`.
    pub fn pruned(&self, tol: f64) -> Self {
        Self {
            terms: self.terms.iter().filter(|(_, v)| !v.is_zero_within(tol)).map(|(k, v)| (k.clone(), v.clone())).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(Scalar::magnitude).fold(0.0, f64::max)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> TraceCombination<T> {
        let mut out = TraceCombination::zero();
        for (k, v) in &self.terms {
            out.add_term(k.clone(), f(v));
        }
        out
    }

    /// Every distinct expectation appearing in the combination.
    pub fn observables(&self) -> Vec<TraceProduct> {
        let mut v: Vec<TraceProduct> = self.terms.keys().flat_map(|k| k.expectations.iter().cloned()).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Numeric value at given `N`, `t` with expectations supplied by `moment`.
    pub fn eval<E>(&self, n: f64, t: f64, mut moment: impl FnMut(&TraceProduct) -> Result<Complex64, E>) -> Result<Complex64, E> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, v) in &self.terms {
            let mut term = v.to_c64() * n.powi(k.n_pow) * t.powi(k.t_pow);
            for p in &k.expectations {
                term *= moment(p)?;
            }
            acc += term;
        }
        Ok(acc)
    }
}

impl<S: Scalar> AddAssign for TraceCombination<S> {
    fn add_assign(&mut self, rhs: Self) {
        for (k, v) in rhs.terms {
            self.add_term(k, v);
        }
    }
}

impl<S: Scalar> Add for TraceCombination<S> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl<S: Scalar> Neg for TraceCombination<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Self { terms: self.terms.into_iter().map(|(k, v)| (k, -v)).collect() }
    }
}

impl<S: Scalar> Sub for TraceCombination<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<S: Scalar> Mul for TraceCombination<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zero();
        for (ka, va) in &self.terms {
            for (kb, vb) in &rhs.terms {
                out.add_term(ka.times(kb), va.clone() * vb.clone());
            }
        }
        out
    }
}

impl<S: fmt::Debug> fmt::Debug for TraceCombination<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, v)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({v:?})")?;
            if k.n_pow != 0 {
                write!(f, " N^{}", k.n_pow)?;
            }
            if k.t_pow != 0 {
                write!(f, " t^{}", k.t_pow)?;
            }
            for p in &k.expectations {
                write!(f, " <{p:?}>")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use num_rational::BigRational;

    fn w(s: &str) -> TraceWord {
        s.parse().unwrap()
    }

    #[test]
    fn identity_trace_is_n() {
        let c = TraceCombination::<BigRational>::expectation(ratio(1, 1), 0, 0, vec![TraceWord::identity()]);
        let v = c.eval::<()>(5.0, 1.0, |_| unreachable!()).unwrap();
        assert_eq!(v, Complex64::new(5.0, 0.0));
    }

    #[test]
    fn like_terms_merge_and_cancel() {
        let a = TraceCombination::expectation(ratio(1, 2), 1, 0, vec![w("12"), w("1")]);
        let b = TraceCombination::expectation(ratio(1, 2), 1, 0, vec![w("1"), w("21")]);
        assert_eq!((a.clone() + b.clone()).len(), 1);
        assert!((a - b).is_zero());
    }

    #[test]
    fn connected_of_factorized_values_vanishes() {
        let c = TraceCombination::<f64>::connected(w("1"), w("2"));
        let v = c
            .eval::<()>(3.0, 1.0, |p| {
                Ok(Complex64::new(p.factors().iter().map(|f| if f.to_string() == "1" { 2.0 } else { 5.0 }).product(), 0.0))
            })
            .unwrap();
        assert!(v.norm() < 1e-15);
    }
}
