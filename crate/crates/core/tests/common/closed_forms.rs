//! Closed-form generating functions assembled term by term, used as an
//! independent route against the split/merge engine.

use loopcurve::algebra::Polynomial;
use loopcurve::words::{Letter, MatSeries, Series, SymbolicModel};
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Q = BigRational;

/// `(t/N)^k` prefactor.
pub fn tau(s: &Series<Q>, k: i32) -> Series<Q> {
    s.shift_powers(-k, k)
}

/// `<Tr a Tr b>_c`.
pub fn connected(a: &MatSeries<Q>, b: &MatSeries<Q>) -> Series<Q> {
    a.trace_pair(b).sub(&a.trace().mul(&b.trace()))
}

fn m1_pow(k: usize) -> MatSeries<Q> {
    MatSeries::poly_in(Letter::M1, &Polynomial::monomial(Q::one(), k))
}

fn x_pow(k: usize) -> Polynomial<Q> {
    Polynomial::monomial(Q::one(), k)
}

/// `sum_r sum_{i<r} s_r <Tr M1^(r-1-i) Tr D_i g>` with `D_i = (x^i - M1^i)/(x - M1)`.
pub fn edge_double_sum(s: &Polynomial<Q>, g: &MatSeries<Q>) -> Series<Q> {
    let mut out = Series::zero();
    for (r, sr) in s.coeffs().iter().enumerate() {
        if sr.is_zero() {
            continue;
        }
        for i in 0..r {
            let di = MatSeries::kernel_x(&x_pow(i), Letter::M1);
            out = out.add(&m1_pow(r - 1 - i).trace_pair(&di.mul(g)).scale(sr));
        }
    }
    out
}

pub struct Pieces {
    pub g: MatSeries<Q>,
    pub res: MatSeries<Q>,
    pub w: Series<Q>,
    pub y_of_x: Series<Q>,
    pub y_free: Series<Q>,
}

pub fn pieces(m: &SymbolicModel<Q>, terms: usize, g: MatSeries<Q>) -> Pieces {
    let res = MatSeries::resolvent(Letter::M1, terms);
    let w = tau(&res.trace(), 1);
    let y_of_x = Series::poly_x(&m.v1).sub(&w);
    let y_free = Series::poly_y(&Polynomial::x());
    Pieces { g, res, w, y_of_x, y_free }
}

/// First form of the B(x) loop equation, Jacobian side minus action side,
/// with the free `y` in place of `Y(x)`.
pub fn b_first_form(m: &SymbolicModel<Q>, terms: usize) -> Series<Q> {
    let g = MatSeries::kernel_y(&m.s_tilde, Letter::M2);
    let p = pieces(m, terms, g);
    let sx = Series::poly_x(&m.s);
    let rg = p.res.mul(&p.g);
    let lhs = sx
        .mul(&p.w)
        .mul(&tau(&rg.trace(), 1))
        .add(&sx.mul(&tau(&connected(&p.res, &rg), 2)))
        .sub(&tau(&edge_double_sum(&m.s, &p.g), 2));
    let force = MatSeries::poly_in(Letter::M1, &m.v1).sub(&MatSeries::poly_in(Letter::M2, &Polynomial::x()));
    let rhs = tau(&MatSeries::poly_in(Letter::M1, &m.s).mul(&p.res).mul(&force).mul(&p.g).trace(), 1);
    lhs.sub(&rhs)
}

/// `B(x) - [closed form of B]` with the free `y` in place of `Y(x)`.
pub fn b_closed_form_gap(m: &SymbolicModel<Q>, terms: usize) -> (Series<Q>, Pieces) {
    let g = MatSeries::kernel_y(&m.s_tilde, Letter::M2);
    let p = pieces(m, terms, g);
    let sx = Series::poly_x(&m.s);
    let st_y = Series::poly_y(&m.s_tilde);
    let s_m = MatSeries::poly_in(Letter::M1, &m.s);
    let st_m = MatSeries::poly_in(Letter::M2, &m.s_tilde);
    let qs = MatSeries::kernel_x(&m.s, Letter::M1);
    let kv1 = MatSeries::kernel_x(&m.v1, Letter::M1);
    let force = MatSeries::poly_in(Letter::M1, &m.v1).sub(&MatSeries::poly_in(Letter::M2, &Polynomial::x()));
    let rg = p.res.mul(&p.g);

    let b = tau(&s_m.mul(&p.res).mul(&st_m).trace(), 1);
    let closed = sx
        .mul(&st_y)
        .mul(&p.w)
        .sub(&sx.mul(&tau(&kv1.mul(&p.g).trace(), 1)))
        .sub(&tau(&qs.mul(&st_m).trace(), 1))
        .sub(&tau(&qs.mul(&force).mul(&p.g).trace(), 1))
        .add(&tau(&edge_double_sum(&m.s, &p.g), 2))
        .sub(&sx.mul(&tau(&connected(&p.res, &rg), 2)));
    (b.sub(&closed), p)
}

/// `s(x) (Y(x) - y) (t/N) <Tr (x-M1)^-1 g>` for the B family.
pub fn b_y_shift(m: &SymbolicModel<Q>, p: &Pieces) -> Series<Q> {
    let rg = p.res.mul(&p.g);
    Series::poly_x(&m.s).mul(&p.y_of_x.sub(&p.y_free)).mul(&tau(&rg.trace(), 1))
}

/// Pieces of the no-hard-edge master equation with free `y`:
/// returns `(E, L, U)`.
pub fn no_edge_master(m: &SymbolicModel<Q>, terms: usize) -> (Series<Q>, Series<Q>, Series<Q>, Pieces) {
    let kv2 = MatSeries::kernel_y(&m.v2, Letter::M2);
    let p = pieces(m, terms, kv2.clone());
    let kv1 = MatSeries::kernel_x(&m.v1, Letter::M1);
    let x = Series::poly_x(&Polynomial::x());
    let head = Series::poly_y(&m.v2).sub(&x).mul(&Series::poly_x(&m.v1).sub(&p.y_free));
    let pxy = tau(&kv1.mul(&kv2).trace(), 1);
    let t_const = Series::constant(Q::one()).shift_powers(0, 1);
    let e = head.sub(&pxy).add(&t_const);
    let l = connected(&p.res, &p.res.mul(&kv2));
    let u = tau(&p.res.mul(&kv2).trace(), 1);
    (e, l, u, p)
}
