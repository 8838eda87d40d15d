use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::combination::TraceCombination;
use super::word::{Letter, TraceProduct, TraceWord};
use crate::algebra::Polynomial;
use crate::scalar::Scalar;

/// Key of a matrix-valued monomial `N^n t^t (prod Tr w_i) * word`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MatrixKey {
    pub n_pow: i32,
    pub t_pow: i32,
    pub traces: TraceProduct,
    pub word: Vec<Letter>,
}

/// Matrix-valued noncommutative polynomial in `M1`, `M2`, with scalar trace
/// prefactors. This is the carrier of a change of variables `f`.
#[derive(Clone, PartialEq)]
pub struct MatrixPoly<S> {
    terms: BTreeMap<MatrixKey, S>,
}

impl<S: Scalar> Default for MatrixPoly<S> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<S: Scalar> MatrixPoly<S> {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn identity() -> Self {
        Self::word(S::one(), Vec::new())
    }

    pub fn word(c: S, word: Vec<Letter>) -> Self {
        let mut out = Self::zero();
        out.add_term(MatrixKey { n_pow: 0, t_pow: 0, traces: TraceProduct::default(), word }, c);
        out
    }

    pub fn letter(l: Letter) -> Self {
        Self::word(S::one(), vec![l])
    }

    /// `a * Tr(traced)`.
    pub fn traced(a: Vec<Letter>, traced: TraceWord) -> Self {
        let (traces, ids) = TraceProduct::single(traced);
        let mut out = Self::zero();
        out.add_term(MatrixKey { n_pow: ids as i32, t_pow: 0, traces, word: a }, S::one());
        out
    }

    /// `p(l)` for a polynomial `p`.
    pub fn poly_in(l: Letter, p: &Polynomial<S>) -> Self {
        let mut out = Self::zero();
        for (k, c) in p.coeffs().iter().enumerate() {
            out = out + Self::word(c.clone(), vec![l; k]);
        }
        out
    }

    pub fn add_term(&mut self, key: MatrixKey, c: S) {
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

    pub fn terms(&self) -> impl Iterator<Item = (&MatrixKey, &S)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero();
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v.clone() * c.clone());
        }
        out
    }

    /// `Tr f` as a single-expectation combination.
    pub fn trace(&self) -> TraceCombination<S> {
        let mut out = TraceCombination::zero();
        for (k, v) in &self.terms {
            let mut factors = k.traces.factors().to_vec();
            factors.push(TraceWord::new(k.word.clone()));
            out += TraceCombination::expectation(v.clone(), k.n_pow, k.t_pow, factors);
        }
        out
    }

    /// Jacobian `J(f)` of `l -> l + eps f`: split rule on the letters of each
    /// word, merge rule on the letters inside each trace prefactor.
    pub fn jacobian(&self, l: Letter) -> TraceCombination<S> {
        let mut out = TraceCombination::zero();
        for (k, v) in &self.terms {
            let rest = k.traces.factors();
            for (p, &c) in k.word.iter().enumerate() {
                if c != l {
                    continue;
                }
                let mut factors = rest.to_vec();
                factors.push(TraceWord::new(k.word[..p].to_vec()));
                factors.push(TraceWord::new(k.word[p + 1..].to_vec()));
                out += TraceCombination::expectation(v.clone(), k.n_pow, k.t_pow, factors);
            }
            for (i, tw) in rest.iter().enumerate() {
                let letters = tw.letters();
                for (p, &c) in letters.iter().enumerate() {
                    if c != l {
                        continue;
                    }
                    // Tr(u l w) with prefactor word a  ->  Tr(a w u)
                    let mut merged = k.word.clone();
                    merged.extend_from_slice(&letters[p + 1..]);
                    merged.extend_from_slice(&letters[..p]);
                    let mut factors: Vec<TraceWord> =
                        rest.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, w)| w.clone()).collect();
                    factors.push(TraceWord::new(merged));
                    out += TraceCombination::expectation(v.clone(), k.n_pow, k.t_pow, factors);
                }
            }
        }
        out
    }

    /// Action variation `(N/t) Tr((V'(l) - l') f)` with `l'` the other letter.
    pub fn action(&self, l: Letter, v_prime: &Polynomial<S>) -> TraceCombination<S> {
        let force = Self::poly_in(l, v_prime) - Self::letter(l.other());
        (force * self.clone()).trace().shift_powers(1, -1)
    }

    /// `J(f) - S(f)` for the change of variables of `l`.
    pub fn loop_residual(&self, l: Letter, v_prime: &Polynomial<S>) -> TraceCombination<S> {
        self.jacobian(l) - self.action(l, v_prime)
    }
}

impl<S: Scalar> Add for MatrixPoly<S> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (k, v) in rhs.terms {
            self.add_term(k, v);
        }
        self
    }
}

impl<S: Scalar> Neg for MatrixPoly<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Self { terms: self.terms.into_iter().map(|(k, v)| (k, -v)).collect() }
    }
}

impl<S: Scalar> Sub for MatrixPoly<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<S: Scalar> Mul for MatrixPoly<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zero();
        for (ka, va) in &self.terms {
            for (kb, vb) in &rhs.terms {
                let mut word = ka.word.clone();
                word.extend_from_slice(&kb.word);
                let key = MatrixKey {
                    n_pow: ka.n_pow + kb.n_pow,
                    t_pow: ka.t_pow + kb.t_pow,
                    traces: ka.traces.merged(&kb.traces),
                    word,
                };
                out.add_term(key, va.clone() * vb.clone());
            }
        }
        out
    }
}

impl<S: fmt::Debug> fmt::Debug for MatrixPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, v)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({v:?})")?;
            if !k.traces.is_trivial() {
                write!(f, " {:?}", k.traces)?;
            }
            let w: String = k.word.iter().map(|l| if *l == Letter::M1 { '1' } else { '2' }).collect();
            write!(f, " [{w}]")?;
        }
        Ok(())
    }
}

/// Split-rule Jacobian of a bare word (variation of `M1`).
pub fn split_jacobian<S: Scalar>(f: &[Letter]) -> TraceCombination<S> {
    MatrixPoly::word(S::one(), f.to_vec()).jacobian(Letter::M1)
}

/// Merge-rule Jacobian of `a Tr(traced)` (variation of `M1`).
pub fn merge_jacobian<S: Scalar>(a: &[Letter], traced: &[Letter]) -> TraceCombination<S> {
    MatrixPoly::traced(a.to_vec(), TraceWord::new(traced.to_vec())).jacobian(Letter::M1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use num_rational::BigRational;
    use Letter::*;

    type Q = BigRational;

    fn tc(c: i64, n: i32, t: i32, words: &[&str]) -> TraceCombination<Q> {
        TraceCombination::expectation(ratio(c, 1), n, t, words.iter().map(|s| s.parse().unwrap()).collect())
    }

    #[test]
    fn split_examples() {
        // Tr(1)Tr(M1) + Tr(M1)Tr(1) = 2 N <Tr M1>
        assert_eq!(split_jacobian::<Q>(&[M1, M1]), tc(2, 1, 0, &["1"]));
        assert!(split_jacobian::<Q>(&[M2, M2, M2]).is_zero());
        assert_eq!(split_jacobian::<Q>(&[M1, M2]), tc(1, 1, 0, &["2"]));
    }

    #[test]
    fn merge_examples() {
        assert_eq!(merge_jacobian::<Q>(&[], &[M1]), tc(1, 1, 0, &[]));
        assert_eq!(merge_jacobian::<Q>(&[], &[M1, M1]), tc(2, 0, 0, &["1"]));
        assert_eq!(merge_jacobian::<Q>(&[M2], &[M1, M2]), tc(1, 0, 0, &["22"]));
    }

    #[test]
    fn action_examples() {
        let lin = Polynomial::new(vec![ratio(0, 1), ratio(1, 1)]);
        let one = MatrixPoly::<Q>::identity();
        assert_eq!(one.action(M1, &lin), tc(1, 1, -1, &["1"]) - tc(1, 1, -1, &["2"]));
        let m2 = MatrixPoly::<Q>::letter(M2);
        assert_eq!(m2.action(M1, &lin), tc(1, 1, -1, &["12"]) - tc(1, 1, -1, &["22"]));
        let cube = Polynomial::monomial(ratio(1, 1), 3);
        let m1 = MatrixPoly::<Q>::letter(M1);
        assert_eq!(m1.action(M1, &cube), tc(1, 1, -1, &["1111"]) - tc(1, 1, -1, &["12"]));
    }

    #[test]
    fn jacobian_of_trace_prefactor_and_word_adds() {
        // f = M1 Tr(M1): split gives N^2 Tr(M1), merge gives Tr(M1)
        let f = MatrixPoly::<Q>::traced(vec![M1], "1".parse().unwrap());
        assert_eq!(f.jacobian(M1), tc(1, 2, 0, &["1"]) + tc(1, 0, 0, &["1"]));
    }
}
