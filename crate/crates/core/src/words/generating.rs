//! Formal series in `1/x` (polynomial in a free `y`) with matrix-valued or
//! moment-valued coefficients, and the generating-function families of loop
//! equations.

use std::collections::BTreeMap;
use std::fmt;

use super::combination::TraceCombination;
use super::matrix::MatrixPoly;
use super::relation::{MomentRelation, Provenance, SymbolicModel};
use super::word::Letter;
use super::WordsError;
use crate::algebra::Polynomial;
use crate::scalar::Scalar;

pub const DEFAULT_ORDER_CAP: usize = 12;

type Key = (i32, u32);

/// Highest `x` power that may be nonzero, counting the unknown tail below
/// `floor`. `None` for an exactly zero series.
fn reach(top: Option<i32>, floor: Option<i32>) -> Option<i32> {
    match (top, floor) {
        (t, None) => t,
        (None, Some(f)) => Some(f - 1),
        (Some(t), Some(f)) => Some(t.max(f - 1)),
    }
}

/// Precision of a product: `floor` is the lowest `x` power still exact.
fn product_floor(a_top: Option<i32>, a_floor: Option<i32>, b_top: Option<i32>, b_floor: Option<i32>) -> Option<i32> {
    let ra = reach(a_top, a_floor);
    let rb = reach(b_top, b_floor);
    let from_a = a_floor.and_then(|f| rb.map(|r| f + r));
    let from_b = b_floor.and_then(|f| ra.map(|r| f + r));
    match (from_a, from_b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, y) => x.or(y),
    }
}

fn sum_floor(a: Option<i32>, b: Option<i32>) -> Option<i32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, y) => x.or(y),
    }
}

macro_rules! series_common {
    ($name:ident, $coef:ident) => {
        impl<S: Scalar> $name<S> {
            pub fn zero() -> Self {
                Self { terms: BTreeMap::new(), floor: None }
            }

            pub fn monomial(xpow: i32, ypow: u32, c: $coef<S>) -> Self {
                let mut out = Self::zero();
                out.add_at((xpow, ypow), c);
                out
            }

            fn add_at(&mut self, key: Key, c: $coef<S>) {
                if c.is_zero() {
                    return;
                }
                let slot = self.terms.entry(key).or_insert_with($coef::zero);
                *slot = slot.clone() + c;
                if slot.is_zero() {
                    self.terms.remove(&key);
                }
            }

            fn top(&self) -> Option<i32> {
                self.terms.keys().map(|k| k.0).max()
            }

            fn truncate(mut self) -> Self {
                if let Some(f) = self.floor {
                    self.terms.retain(|k, _| k.0 >= f);
                }
                self
            }

            /// Lowest `x` power whose coefficient is exact; `None` if exact throughout.
            pub fn floor(&self) -> Option<i32> {
                self.floor
            }

            pub fn coeff(&self, xpow: i32, ypow: u32) -> $coef<S> {
                self.terms.get(&(xpow, ypow)).cloned().unwrap_or_else($coef::zero)
            }

            pub fn terms(&self) -> impl Iterator<Item = (&Key, &$coef<S>)> {
                self.terms.iter()
            }

            pub fn is_zero(&self) -> bool {
                self.terms.is_empty()
            }

            pub fn add(&self, rhs: &Self) -> Self {
                let mut out = self.clone();
                for (k, v) in &rhs.terms {
                    out.add_at(*k, v.clone());
                }
                out.floor = sum_floor(self.floor, rhs.floor);
                out.truncate()
            }

            pub fn neg(&self) -> Self {
                Self { terms: self.terms.iter().map(|(k, v)| (*k, -v.clone())).collect(), floor: self.floor }
            }

            pub fn sub(&self, rhs: &Self) -> Self {
                self.add(&rhs.neg())
            }

            pub fn scale(&self, c: &S) -> Self {
                let mut out = Self { terms: BTreeMap::new(), floor: self.floor };
                for (k, v) in &self.terms {
                    out.add_at(*k, v.scale(c));
                }
                out
            }

            pub fn mul(&self, rhs: &Self) -> Self {
                let mut out = Self::zero();
                for (ka, va) in &self.terms {
                    for (kb, vb) in &rhs.terms {
                        out.add_at((ka.0 + kb.0, ka.1 + kb.1), va.clone() * vb.clone());
                    }
                }
                out.floor = product_floor(self.top(), self.floor, rhs.top(), rhs.floor);
                out.truncate()
            }

            /// Marks everything below `x^floor` as unknown and drops it.
            pub fn truncated(&self, floor: i32) -> Self {
                let mut out = self.clone();
                out.floor = Some(out.floor.map_or(floor, |f| f.max(floor)));
                out.truncate()
            }
        }

        impl<S: Scalar> Clone for $name<S> {
            fn clone(&self) -> Self {
                Self { terms: self.terms.clone(), floor: self.floor }
            }
        }
    };
}

/// `sum x^a y^b C_ab` with moment-valued coefficients.
pub struct Series<S> {
    terms: BTreeMap<Key, TraceCombination<S>>,
    floor: Option<i32>,
}

/// `sum x^a y^b F_ab` with matrix-valued coefficients.
pub struct MatSeries<S> {
    terms: BTreeMap<Key, MatrixPoly<S>>,
    floor: Option<i32>,
}

series_common!(Series, TraceCombination);
series_common!(MatSeries, MatrixPoly);

impl<S: Scalar> Series<S> {
    pub fn constant(c: S) -> Self {
        Self::monomial(0, 0, TraceCombination::constant(c))
    }

    /// Scalar polynomial in `x`.
    pub fn poly_x(p: &Polynomial<S>) -> Self {
        let mut out = Self::zero();
        for (r, c) in p.coeffs().iter().enumerate() {
            out.add_at((r as i32, 0), TraceCombination::constant(c.clone()));
        }
        out
    }

    /// Scalar polynomial in `y`.
    pub fn poly_y(p: &Polynomial<S>) -> Self {
        let mut out = Self::zero();
        for (r, c) in p.coeffs().iter().enumerate() {
            out.add_at((0, r as u32), TraceCombination::constant(c.clone()));
        }
        out
    }

    /// Multiplies every coefficient by `N^dn t^dt`.
    pub fn shift_powers(&self, dn: i32, dt: i32) -> Self {
        Self { terms: self.terms.iter().map(|(k, v)| (*k, v.shift_powers(dn, dt))).collect(), floor: self.floor }
    }

    /// Keys whose coefficient is nonzero at or above `x^min_x`.
    pub fn nonzero_above(&self, min_x: i32) -> Vec<Key> {
        self.terms.keys().filter(|k| k.0 >= min_x).copied().collect()
    }
}

impl<S: Scalar> MatSeries<S> {
    pub fn constant(f: MatrixPoly<S>) -> Self {
        Self::monomial(0, 0, f)
    }

    /// `p(l)` as an `x`-independent series.
    pub fn poly_in(l: Letter, p: &Polynomial<S>) -> Self {
        Self::constant(MatrixPoly::poly_in(l, p))
    }

    /// Scalar polynomial in `x` times the identity.
    pub fn poly_x(p: &Polynomial<S>) -> Self {
        let mut out = Self::zero();
        for (r, c) in p.coeffs().iter().enumerate() {
            out.add_at((r as i32, 0), MatrixPoly::identity().scale(c));
        }
        out
    }

    pub fn poly_y(p: &Polynomial<S>) -> Self {
        let mut out = Self::zero();
        for (r, c) in p.coeffs().iter().enumerate() {
            out.add_at((0, r as u32), MatrixPoly::identity().scale(c));
        }
        out
    }

    /// `(x - l)^-1 = sum_{k<terms} l^k x^-k-1`, exact down to `x^-terms`.
    pub fn resolvent(l: Letter, terms: usize) -> Self {
        let mut out = Self::zero();
        for k in 0..terms {
            out.add_at((-(k as i32) - 1, 0), MatrixPoly::word(S::one(), vec![l; k]));
        }
        out.floor = Some(-(terms as i32));
        out
    }

    /// `(p(x) - p(l)) / (x - l)`, polynomial in `x`.
    pub fn kernel_x(p: &Polynomial<S>, l: Letter) -> Self {
        let mut out = Self::zero();
        for (r, c) in p.coeffs().iter().enumerate() {
            for i in 0..r {
                out.add_at(((r - 1 - i) as i32, 0), MatrixPoly::word(c.clone(), vec![l; i]));
            }
        }
        out
    }

    /// `(p(y) - p(l)) / (y - l)`, polynomial in `y`.
    pub fn kernel_y(p: &Polynomial<S>, l: Letter) -> Self {
        let mut out = Self::zero();
        for (r, c) in p.coeffs().iter().enumerate() {
            for i in 0..r {
                out.add_at((0, (r - 1 - i) as u32), MatrixPoly::word(c.clone(), vec![l; i]));
            }
        }
        out
    }

    fn map_coeffs(&self, f: impl Fn(&MatrixPoly<S>) -> TraceCombination<S>) -> Series<S> {
        let mut out = Series::zero();
        for (k, v) in &self.terms {
            out.add_at(*k, f(v));
        }
        out.floor = self.floor;
        out
    }

    /// `<Tr F>` coefficientwise.
    pub fn trace(&self) -> Series<S> {
        self.map_coeffs(MatrixPoly::trace)
    }

    /// `<Tr F Tr G>` as a single expectation.
    pub fn trace_pair(&self, other: &Self) -> Series<S> {
        let mut out = Series::zero();
        for (ka, va) in &self.terms {
            for (kb, vb) in &other.terms {
                out.add_at((ka.0 + kb.0, ka.1 + kb.1), trace_pair(va, vb));
            }
        }
        out.floor = product_floor(self.top(), self.floor, other.top(), other.floor);
        out.truncate()
    }

    pub fn jacobian(&self, l: Letter) -> Series<S> {
        self.map_coeffs(|f| f.jacobian(l))
    }

    pub fn action(&self, l: Letter, v_prime: &Polynomial<S>) -> Series<S> {
        self.map_coeffs(|f| f.action(l, v_prime))
    }
}

fn trace_pair<S: Scalar>(a: &MatrixPoly<S>, b: &MatrixPoly<S>) -> TraceCombination<S> {
    let mut out = TraceCombination::zero();
    for (ka, va) in a.terms() {
        for (kb, vb) in b.terms() {
            let mut factors = ka.traces.factors().to_vec();
            factors.extend(kb.traces.factors().iter().cloned());
            factors.push(super::word::TraceWord::new(ka.word.clone()));
            factors.push(super::word::TraceWord::new(kb.word.clone()));
            out += TraceCombination::expectation(va.clone() * vb.clone(), ka.n_pow + kb.n_pow, ka.t_pow + kb.t_pow, factors);
        }
    }
    out
}

impl<S: fmt::Debug> fmt::Debug for Series<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ((a, b), v) in &self.terms {
            writeln!(f, "x^{a} y^{b}: {v:?}")?;
        }
        if let Some(fl) = self.floor {
            write!(f, "+ O(x^{})", fl - 1)?;
        }
        Ok(())
    }
}

/// Families of `x`-dependent changes of variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratingKind {
    /// `s(M1) (x-M1)^-1 (s~(y) - s~(M2))/(y - M2)`.
    B,
    /// `s(M1) (x-M1)^-1 (y^k - M2^k)/(y - M2)`.
    Bk(usize),
    /// `B` together with every `B_j`, `j < deg s~`.
    D,
    /// `M2 -> M2 + eps s(M1) (x-M1)^-1 s~(M2)`.
    A,
    /// `s(M1) (x-M1)^-1 (s~(y)V'_2(y) - s~(M2)V'_2(M2))/(y - M2)`.
    Main,
}

impl GeneratingKind {
    pub fn name(&self) -> String {
        match self {
            GeneratingKind::B => "B".into(),
            GeneratingKind::Bk(k) => format!("B_{k}"),
            GeneratingKind::D => "D".into(),
            GeneratingKind::A => "A".into(),
            GeneratingKind::Main => "main".into(),
        }
    }

    /// The matrix-valued generating change of variables and the varied letter,
    /// with the resolvent expanded to `terms` terms.
    pub fn generator<S: Scalar>(&self, model: &SymbolicModel<S>, terms: usize) -> Vec<(String, Letter, MatSeries<S>)> {
        let head = MatSeries::poly_in(Letter::M1, &model.s).mul(&MatSeries::resolvent(Letter::M1, terms));
        let y_power = |k: usize| Polynomial::monomial(S::one(), k);
        match self {
            GeneratingKind::B => vec![(self.name(), Letter::M1, head.mul(&MatSeries::kernel_y(&model.s_tilde, Letter::M2)))],
            GeneratingKind::Bk(k) => vec![(self.name(), Letter::M1, head.mul(&MatSeries::kernel_y(&y_power(*k), Letter::M2)))],
            GeneratingKind::D => {
                let mut out = GeneratingKind::B.generator(model, terms);
                for j in 1..model.s_tilde.degree().unwrap_or(0) {
                    out.extend(GeneratingKind::Bk(j).generator(model, terms));
                }
                out
            }
            GeneratingKind::A => vec![(self.name(), Letter::M2, head.mul(&MatSeries::poly_in(Letter::M2, &model.s_tilde)))],
            GeneratingKind::Main => {
                let p = model.s_tilde.clone() * model.v2.clone();
                vec![(self.name(), Letter::M1, head.mul(&MatSeries::kernel_y(&p, Letter::M2)))]
            }
        }
    }
}

/// Loop equations from a generating change of variables, one per
/// coefficient `x^-k-1 y^j` for `k < order`.
pub fn moment_expand_generating<S: Scalar>(model: &SymbolicModel<S>, kind: GeneratingKind, order: usize) -> Result<Vec<MomentRelation<S>>, WordsError> {
    moment_expand_generating_capped(model, kind, order, DEFAULT_ORDER_CAP)
}

pub fn moment_expand_generating_capped<S: Scalar>(
    model: &SymbolicModel<S>,
    kind: GeneratingKind,
    order: usize,
    cap: usize,
) -> Result<Vec<MomentRelation<S>>, WordsError> {
    if order > cap {
        return Err(WordsError::OrderTooLarge { order, cap });
    }
    let mut out = Vec::new();
    for (family, letter, f) in kind.generator(model, order) {
        let v_prime = match letter {
            Letter::M1 => &model.v1,
            Letter::M2 => &model.v2,
        };
        for (&(a, b), fab) in f.terms() {
            if a < -(order as i32) {
                continue;
            }
            out.push(MomentRelation {
                lhs: fab.jacobian(letter),
                rhs: fab.action(letter, v_prime),
                provenance: Provenance {
                    varied: format!("{letter:?}"),
                    generator: format!("{fab:?}"),
                    family: Some(family.clone()),
                    x_power: Some(a),
                    y_power: Some(b),
                },
            });
        }
    }
    Ok(out)
}
