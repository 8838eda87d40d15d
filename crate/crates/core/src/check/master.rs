//! Term-by-term evaluation of `E(x, y)`, `L(x)` and the master residual
//! `s(x) s~(Y) (E(x, Y(x)) - (t/N)^2 L(x))`.

use num_complex::Complex64;
use serde::Serialize;

use super::atoms::{self, Layout, Layout1, S, V};
use super::context::{eval_rational, Context};
use super::CheckError;
use crate::lab::{support_distance, Ensemble, Estimate};
use crate::model::ModelSpec;

type C = Complex64;

pub const E_TERMS: usize = 10;
pub const L_TERMS: usize = 7;

const W: usize = 0;
const Y: usize = 1;
const U: usize = 2;
const P: usize = 3;
const A: usize = 4;
const B: usize = 5;
const D: usize = 6;
const ET: usize = 7;
const LT: usize = ET + E_TERMS;
const E: usize = LT + L_TERMS;
const L: usize = E + 1;
const RES: usize = L + 1;
const BK: usize = RES + 1;

/// Every named correlator at one probe, with propagated errors.
#[derive(Debug, Clone, Serialize)]
pub struct CorrelatorBundle {
    pub probe: C,
    pub w: Estimate,
    pub y: Estimate,
    /// `U(x, y)` at the evaluation point `y`.
    pub u: Estimate,
    /// `P(x, y)` at the evaluation point `y`.
    pub p: Estimate,
    pub a: Estimate,
    pub b: Estimate,
    pub b_k: Vec<Estimate>,
    pub d: Estimate,
    /// `E(x, y)`, evaluated at `y = Y(x)` unless a fixed `y` was given.
    pub e_at: Estimate,
    pub l_at: Estimate,
    pub e_terms: Vec<Estimate>,
    pub l_terms: Vec<Estimate>,
    pub residual: Estimate,
}

fn zero() -> C {
    C::new(0.0, 0.0)
}

/// Minimal distance between probe and support accepted by the evaluators.
pub const PROBE_MARGIN: f64 = 1e-6;
const EDGE_TOL: f64 = 1e-12;

fn check_probe(ctx: &Context, ens: &Ensemble, x: C) -> Result<(), CheckError> {
    let d = support_distance(ens, x);
    if d < PROBE_MARGIN {
        return Err(CheckError::ProbeTooClose { probe: x, distance: d });
    }
    if ctx.s.eval(&x).norm() < EDGE_TOL {
        return Err(CheckError::EdgeEvaluation(format!("s(x) vanishes at x = {x}")));
    }
    Ok(())
}

fn assemble_two(ctx: &Context, lay: &Layout, x: C, y: C, a: &[C], out: &mut [C]) {
    let tau = ctx.tau();
    let t = ctx.t;
    let (k1, k2) = (lay.k1, lay.k2);
    let sv = |s: S| a[lay.s(s)];
    let vv = |v: V, i: usize| a[lay.v(v, i)];
    let sx = ctx.s.eval(&x);
    let sy = ctx.st.eval(&y);
    let v1x = eval_rational(&ctx.v1, x);
    let v2y = eval_rational(&ctx.v2, y);
    let trg = sv(S::Trg);

    out[W] = tau * trg;
    out[U] = tau * sv(S::U);
    out[P] = tau * sv(S::P);
    out[A] = tau * sv(S::A);
    out[B] = tau * sv(S::B);
    let mut d = x * out[B];
    for s in 1..=k2 {
        for j in 0..s {
            d += ctx.st_coeff(s) * tau * vv(V::Tr2, s - 1 - j) * tau * vv(V::Bk, j);
        }
    }
    out[D] = d;
    for k in 0..k2 {
        out[BK + k] = tau * vv(V::Bk, k);
    }

    // sums over r, i < r and s, j < s, with p = r-1-i and q = s-1-j
    let rs: Vec<(usize, usize, C)> = (1..=k1).flat_map(|r| (0..r).map(move |i| (r - 1 - i, i, r))).map(|(p, i, r)| (p, i, ctx.s_coeff(r))).collect();
    let ss: Vec<(usize, usize, C)> = (1..=k2).flat_map(|s| (0..s).map(move |j| (s - 1 - j, j, s))).map(|(q, j, s)| (q, j, ctx.st_coeff(s))).collect();

    let e = &mut out[ET..ET + E_TERMS];
    e[0] = (v2y - x) * (v1x - y) - tau * sv(S::P) + t;
    e[1] = -tau * sv(S::T1) / sy;
    e[2] = ss.iter().map(|&(q, j, c)| c * tau * vv(V::Tr2, q) * tau * vv(V::T2, j)).sum::<C>() / sy;
    e[3] = -tau * sv(S::T3) / sx;
    e[4] = tau * tau * rs.iter().map(|&(p, i, c)| c * a[lay.v2(V::T4, p, i)]).sum::<C>() / sx;
    let sxy = sx * sy;
    e[5] = -tau * sv(S::T5) / sxy;
    e[6] = -tau * tau * sv(S::T6) / sxy;
    e[7] = tau * tau * rs.iter().map(|&(p, i, c)| c * vv(V::Tr1, p) * vv(V::T7, i)).sum::<C>() / sxy;
    e[8] = tau * tau * ss.iter().map(|&(q, j, c)| c * vv(V::Tr2, q) * vv(V::T8, j)).sum::<C>() / sxy;
    let mut t9 = zero();
    for &(p, i, cr) in &rs {
        for &(q, j, cs) in &ss {
            t9 += cr * cs * vv(V::Tr1, p) * vv(V::Tr2, q) * a[lay.v2(V::T9, i, j)];
        }
    }
    e[9] = -tau * tau * tau * t9 / sxy;

    let l = &mut out[LT..LT + L_TERMS];
    l[0] = sv(S::L1p) - trg * sv(S::U);
    l[1] = (sv(S::L2p) - trg * sv(S::L2)) / sy;
    l[2] = -(sv(S::L3p) - trg * sv(S::L3)) / sy;
    l[3] = ss.iter().map(|&(q, j, c)| c * (a[lay.v2(V::L4p, q, j)] - vv(V::Tr2, q) * vv(V::Gy, j))).sum::<C>() / sy;
    l[4] = -ss.iter().map(|&(q, j, c)| c * tau * vv(V::Tr2, q) * (vv(V::L5p, j) - trg * vv(V::L5, j))).sum::<C>() / sy;
    let mut l6 = zero();
    for &(p, i, cr) in &rs {
        for &(q, j, cs) in &ss {
            l6 += cr * cs * tau * vv(V::Tr2, q) * (a[lay.v3(p, i, j)] - vv(V::Tr1, p) * a[lay.v2(V::T9, i, j)]);
        }
    }
    l[5] = l6 / sxy;
    l[6] = -rs.iter().map(|&(p, i, c)| c * (a[lay.v2(V::L7p, p, i)] - vv(V::Tr1, p) * vv(V::T7, i))).sum::<C>() / sxy;

    finish(out, tau, sx * sy);
}

fn finish(out: &mut [C], tau: f64, prefactor: C) {
    let e: C = out[ET..ET + E_TERMS].iter().sum();
    let l: C = out[LT..LT + L_TERMS].iter().sum();
    out[E] = e;
    out[L] = l;
    out[RES] = prefactor * (e - tau * tau * l);
}

fn assemble_one(ctx: &Context, lay: &Layout1, x: C, y: C, a: &[C], out: &mut [C]) {
    let tau = ctx.tau();
    let t = ctx.t;
    let sx = ctx.s.eval(&x);
    let vx = eval_rational(&ctx.v, x);
    let trg = a[Layout1::TRG];
    out[W] = tau * trg;
    out[U] = tau * trg;
    out[P] = tau * a[Layout1::KV] + t;
    out[B] = tau * a[Layout1::B];
    out[A] = x * out[B] - tau * a[Layout1::SM];
    out[D] = x * out[B];
    for v in out[ET..LT + L_TERMS].iter_mut() {
        *v = zero();
    }
    out[ET] = (y - x) * (vx + x - y) - tau * a[Layout1::KV];
    out[ET + 3] = -tau * a[Layout1::QSV] / sx;
    let mut t4 = zero();
    for r in 1..=lay.k1 {
        for i in 0..r {
            t4 += ctx.s_coeff(r) * a[lay.t4(r - 1 - i, i)];
        }
    }
    out[ET + 4] = tau * tau * t4 / sx;
    out[LT] = a[Layout1::TRG2] - trg * trg;
    finish(out, tau, sx);
}

/// Evaluates every correlator at probe `x`. With `fixed_y = None` the
/// spectral value is the measured `Y(x) = V'1(x) - W(x)`, and its
/// uncertainty is propagated through the `y`-dependent kernels.
pub fn bundle(model: &ModelSpec, ens: &Ensemble, x: C, fixed_y: Option<C>) -> Result<CorrelatorBundle, CheckError> {
    let ctx = Context::new(model);
    check_probe(&ctx, ens, x)?;
    let tau = ctx.tau();
    let v1x = eval_rational(&ctx.v1, x);
    let (k1, k2) = ctx.degrees();
    let width = BK + k2;

    let two = ens.has_m2();
    if !two && !ctx.one_matrix {
        return Err(CheckError::MissingObservable("a two-matrix model needs M2 samples".into()));
    }

    let out = if !two {
        let lay = Layout1 { k1 };
        let means = ens.means(lay.len(), |cfg, o| atoms::one_matrix(&ctx, &lay, cfg, x, o));
        means.combine_many(width, |v, o| {
            let y = fixed_y.unwrap_or(v1x - tau * v[Layout1::TRG]);
            assemble_one(&ctx, &lay, x, y, v, o);
            o[Y] = y;
        })
    } else {
        let w = ens.means(1, |cfg, o| o[0] = cfg.x.iter().map(|&m| 1.0 / (x - m)).sum()).values[0] * tau;
        let y0 = fixed_y.unwrap_or(v1x - w);
        if ctx.st.eval(&y0).norm() < EDGE_TOL {
            return Err(CheckError::EdgeEvaluation(format!("s~(y) vanishes at y = {y0}")));
        }
        let lay = Layout::new(k1, k2);
        let n = lay.len();
        let h = 1e-4 * (1.0 + y0.norm());
        let ys = if fixed_y.is_some() { vec![y0] } else { vec![y0, y0 + h, y0 - h] };
        let means = ens.means(n * ys.len(), |cfg, o| {
            for (k, &y) in ys.iter().enumerate() {
                atoms::two_matrix(&ctx, &lay, cfg, x, y, &mut o[k * n..(k + 1) * n]);
            }
        });
        let local = std::cell::RefCell::new(vec![zero(); n]);
        means.combine_many(width, |v, o| {
            let mut a = local.borrow_mut();
            let y = match fixed_y {
                Some(y) => y,
                None => v1x - tau * v[lay.s(S::Trg)],
            };
            for i in 0..n {
                a[i] = if ys.len() == 3 { v[i] + (y - y0) * (v[n + i] - v[2 * n + i]) / (2.0 * h) } else { v[i] };
            }
            assemble_two(&ctx, &lay, x, y, &a, o);
            o[Y] = y;
        })
    };
    Ok(CorrelatorBundle {
        probe: x,
        w: out[W],
        y: out[Y],
        u: out[U],
        p: out[P],
        a: out[A],
        b: out[B],
        b_k: out[BK..BK + k2].to_vec(),
        d: out[D],
        e_at: out[E],
        l_at: out[L],
        e_terms: out[ET..ET + E_TERMS].to_vec(),
        l_terms: out[LT..LT + L_TERMS].to_vec(),
        residual: out[RES],
    })
}

/// `s(x) s~(Y(x)) E(x, Y(x)) - s(x) s~(Y(x)) (t/N)^2 L(x)`.
pub fn master_residual(model: &ModelSpec, ens: &Ensemble, x: C) -> Result<Estimate, CheckError> {
    Ok(bundle(model, ens, x, None)?.residual)
}

/// `E(x, y)` at a free `y`.
pub fn eval_e(model: &ModelSpec, ens: &Ensemble, x: C, y: C) -> Result<Estimate, CheckError> {
    Ok(bundle(model, ens, x, Some(y))?.e_at)
}

/// `L(x)` with its kernels at the measured `Y(x)`.
pub fn eval_l(model: &ModelSpec, ens: &Ensemble, x: C) -> Result<Estimate, CheckError> {
    Ok(bundle(model, ens, x, None)?.l_at)
}
