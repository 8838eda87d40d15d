mod common;

use common::closed_forms::{self as forms, Q};
use loopcurve::algebra::Polynomial;
use loopcurve::scalar::ratio;
use loopcurve::words::{moment_expand_generating, GeneratingKind, MomentRelation, Series, SymbolicModel};

fn qp(v: &[(i64, i64)]) -> Polynomial<Q> {
    Polynomial::new(v.iter().map(|&(a, b)| ratio(a, b)).collect())
}

fn edge_model() -> SymbolicModel<Q> {
    SymbolicModel::new(
        qp(&[(1, 5), (-1, 2), (0, 1), (1, 1)]),
        qp(&[(0, 1), (2, 1)]),
        Polynomial::from_roots(&[ratio(1, 1), ratio(-1, 2)]),
        Polynomial::from_roots(&[ratio(1, 3)]),
    )
}

fn as_series(rels: &[MomentRelation<Q>]) -> Series<Q> {
    rels.iter().fold(Series::zero(), |acc, r| {
        acc.add(&Series::monomial(r.provenance.x_power.unwrap(), r.provenance.y_power.unwrap(), r.residual()))
    })
}

fn assert_vanishes(s: &Series<Q>, min_x: i32, what: &str) {
    let bad = s.nonzero_above(min_x);
    assert!(bad.is_empty(), "{what}: nonzero coefficients at {bad:?}\n{s:?}");
}

const ORDER: usize = 6;
const TERMS: usize = 16;

#[test]
fn b_first_form_matches_split_merge() {
    let m = edge_model();
    let route1 = as_series(&moment_expand_generating(&m, GeneratingKind::B, ORDER).unwrap());
    let route2 = forms::b_first_form(&m, TERMS).shift_powers(2, -2);
    assert_eq!(route1.nonzero_above(-(ORDER as i32)).len(), ORDER);
    let wrong = route2.add(&Series::monomial(-3, 0, route1.coeff(-2, 0)));
    assert!(!wrong.sub(&route1).nonzero_above(-(ORDER as i32)).is_empty());
    assert_vanishes(&route2.sub(&route1), -(ORDER as i32), "B first form");
}

#[test]
fn b_closed_form_holds_modulo_loop_equations() {
    let m = edge_model();
    let r_b = as_series(&moment_expand_generating(&m, GeneratingKind::B, ORDER).unwrap());
    let (gap, p) = forms::b_closed_form_gap(&m, TERMS);
    assert!(!gap.nonzero_above(-(ORDER as i32)).is_empty());
    let total = gap.sub(&forms::b_y_shift(&m, &p)).sub(&r_b.shift_powers(-2, 2));
    assert_vanishes(&total, -(ORDER as i32), "B closed form");
}

#[test]
fn no_edge_master_equation_reduces() {
    for v2 in [qp(&[(0, 1), (2, 1)]), qp(&[(-1, 1), (0, 1), (1, 1)])] {
        let m = SymbolicModel::free(qp(&[(1, 5), (-1, 2), (0, 1), (1, 1)]), v2.clone());
        let r_main = as_series(&moment_expand_generating(&m, GeneratingKind::Main, ORDER).unwrap());
        let r_a = as_series(&moment_expand_generating(&m, GeneratingKind::A, ORDER).unwrap());
        let (e, l, u, p) = forms::no_edge_master(&m, TERMS);
        let x = Series::poly_x(&Polynomial::x());
        let shift = p.y_of_x.sub(&p.y_free).mul(&Series::poly_y(&v2).sub(&x).sub(&u));
        let total = e
            .sub(&l.shift_powers(-2, 2))
            .sub(&shift)
            .add(&r_main.add(&r_a).shift_powers(-2, 2));
        assert!(!e.sub(&l.shift_powers(-2, 2)).nonzero_above(-(ORDER as i32)).is_empty());
        assert!(!r_a.is_zero() && !r_main.is_zero());
        assert_vanishes(&total, -(ORDER as i32), "no-edge master equation");
        let dropped = total.sub(&r_a.shift_powers(-2, 2));
        assert!(!dropped.nonzero_above(-(ORDER as i32)).is_empty());
    }
}
