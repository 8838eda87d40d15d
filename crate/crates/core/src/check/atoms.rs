//! Per-configuration quantities ("atoms") whose ensemble means assemble
//! every correlator of the master equation. Layout is a flat vector.

use num_complex::Complex64;

use super::context::{eval_rational, kernel, poly_kernel, power_kernel, Context};
use crate::lab::Config;

type C = Complex64;

/// Scalar slots of the two-matrix layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum S {
    Trg,
    P,
    U,
    B,
    A,
    T1,
    T3,
    T5,
    T6,
    L1p,
    L2,
    L2p,
    L3,
    L3p,
}

const SCALARS: usize = 14;

/// Vector slots: one index (`k < K1` or `K2`) or a grid of indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum V {
    Bk,
    T2,
    Tr1,
    Tr2,
    T7,
    T8,
    Gy,
    L5,
    L5p,
    T4,
    T9,
    L4p,
    L6p,
    L7p,
}

const VECTORS: [V; 14] = [V::Bk, V::T2, V::Tr1, V::Tr2, V::T7, V::T8, V::Gy, V::L5, V::L5p, V::T4, V::T9, V::L4p, V::L6p, V::L7p];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub k1: usize,
    pub k2: usize,
    offsets: [usize; 15],
}

impl Layout {
    pub fn new(k1: usize, k2: usize) -> Self {
        let mut offsets = [0; 15];
        let mut at = SCALARS;
        for (i, v) in VECTORS.iter().enumerate() {
            offsets[i] = at;
            at += Self::size(*v, k1, k2);
        }
        offsets[14] = at;
        Self { k1, k2, offsets }
    }

    fn size(v: V, k1: usize, k2: usize) -> usize {
        match v {
            V::Bk | V::T2 | V::Tr2 | V::T8 | V::Gy | V::L5 | V::L5p => k2,
            V::Tr1 | V::T7 => k1,
            V::T4 | V::L7p => k1 * k1,
            V::T9 => k1 * k2,
            V::L4p => k2 * k2,
            V::L6p => k1 * k1 * k2,
        }
    }

    pub fn len(&self) -> usize {
        self.offsets[14]
    }

    pub fn s(&self, s: S) -> usize {
        s as usize
    }

    pub fn v(&self, v: V, i: usize) -> usize {
        self.offsets[VECTORS.iter().position(|w| *w == v).unwrap()] + i
    }

    /// Index of a two-index slot, row-major with the leading dimension of `v`.
    pub fn v2(&self, v: V, a: usize, b: usize) -> usize {
        let stride = match v {
            V::T4 | V::L7p => self.k1,
            V::T9 => self.k2,
            V::L4p => self.k2,
            _ => panic!("{v:?} is not a two-index slot"),
        };
        self.v(v, a * stride + b)
    }

    pub fn v3(&self, p: usize, i: usize, j: usize) -> usize {
        self.v(V::L6p, (p * self.k1 + i) * self.k2 + j)
    }
}

/// Scratch arrays for one configuration.
struct Pointwise {
    g: Vec<C>,
    kv1: Vec<C>,
    qs: Vec<C>,
    v1m: Vec<C>,
    sm: Vec<C>,
    di: Vec<Vec<C>>,
    kv2: Vec<C>,
    st_k: Vec<C>,
    v2m: Vec<C>,
    stm: Vec<C>,
    dy: Vec<Vec<C>>,
}

fn c(v: f64) -> C {
    C::new(v, 0.0)
}

fn bil(ov: &[f64], n: usize, f: impl Fn(usize) -> C, g: impl Fn(usize) -> C) -> C {
    let mut acc = C::new(0.0, 0.0);
    for a in 0..n {
        let mut row = C::new(0.0, 0.0);
        for b in 0..n {
            row += g(b) * ov[a * n + b];
        }
        acc += f(a) * row;
    }
    acc
}

/// Fills the two-matrix atoms of `cfg` at probe `x` and spectral value `y`.
pub fn two_matrix(ctx: &Context, lay: &Layout, cfg: &Config, x: C, y: C, out: &mut [C]) {
    let (k1, k2) = (lay.k1, lay.k2);
    let n = cfg.n();
    let ov: Vec<f64> = (0..n * n).map(|i| cfg.overlap(i / n, i % n)).collect();
    let xm: Vec<C> = cfg.x.iter().map(|&v| c(v)).collect();
    let ym: Vec<C> = cfg.y.iter().map(|&v| c(v)).collect();
    let v2y = eval_rational(&ctx.v2, y);
    let pw = Pointwise {
        g: xm.iter().map(|m| 1.0 / (x - m)).collect(),
        kv1: xm.iter().map(|&m| kernel(&ctx.v1, x, m)).collect(),
        qs: xm.iter().map(|&m| poly_kernel(&ctx.s, x, m)).collect(),
        v1m: xm.iter().map(|&m| eval_rational(&ctx.v1, m)).collect(),
        sm: xm.iter().map(|m| ctx.s.eval(m)).collect(),
        di: (0..k1).map(|i| xm.iter().map(|&m| power_kernel(i, x, m)).collect()).collect(),
        kv2: ym.iter().map(|&m| if (y - m).norm() > 0.0 { (v2y - eval_rational(&ctx.v2, m)) / (y - m) } else { kernel(&ctx.v2, y, m) }).collect(),
        st_k: ym.iter().map(|&m| poly_kernel(&ctx.st, y, m)).collect(),
        v2m: ym.iter().map(|&m| eval_rational(&ctx.v2, m)).collect(),
        stm: ym.iter().map(|m| ctx.st.eval(m)).collect(),
        dy: (0..k2).map(|j| ym.iter().map(|&m| power_kernel(j, y, m)).collect()).collect(),
    };
    let trg: C = pw.g.iter().sum();
    out[Layout1::SM] = xm.iter().map(|m| ctx.s.eval(m)).sum();
    let tr1: Vec<C> = (0..k1).map(|p| xm.iter().map(|m| m.powu(p as u32)).sum()).collect();
    let tr2: Vec<C> = (0..k2).map(|q| ym.iter().map(|m| m.powu(q as u32)).sum()).collect();

    out[lay.s(S::Trg)] = trg;
    out[lay.s(S::P)] = bil(&ov, n, |a| pw.kv1[a], |b| pw.kv2[b]);
    let u = bil(&ov, n, |a| pw.g[a], |b| pw.kv2[b]);
    out[lay.s(S::U)] = u;
    out[lay.s(S::B)] = bil(&ov, n, |a| pw.sm[a] * pw.g[a], |b| pw.stm[b]);
    out[lay.s(S::A)] = bil(&ov, n, |a| pw.sm[a] * pw.g[a], |b| pw.stm[b] * pw.v2m[b]);
    out[lay.s(S::T1)] = bil(&ov, n, |a| pw.kv1[a], |b| pw.v2m[b] * pw.st_k[b]) - bil(&ov, n, |a| pw.kv1[a] * xm[a], |b| pw.st_k[b]);
    out[lay.s(S::T3)] = bil(&ov, n, |a| pw.qs[a] * pw.v1m[a], |b| pw.kv2[b]) - bil(&ov, n, |a| pw.qs[a], |b| ym[b] * pw.kv2[b]);
    out[lay.s(S::T5)] = bil(&ov, n, |a| pw.qs[a] * pw.v1m[a], |b| pw.v2m[b] * pw.st_k[b])
        - bil(&ov, n, |a| pw.qs[a], |b| ym[b] * pw.v2m[b] * pw.st_k[b])
        - bil(&ov, n, |a| pw.qs[a] * xm[a] * pw.v1m[a], |b| pw.st_k[b])
        + bil(&ov, n, |a| pw.qs[a] * xm[a], |b| ym[b] * pw.st_k[b]);
    let sum_st_k: C = pw.st_k.iter().sum();
    out[lay.s(S::T6)] = pw.qs.iter().sum::<C>() * sum_st_k;
    out[lay.s(S::L1p)] = trg * u;
    let l2 = bil(&ov, n, |a| pw.g[a], |b| pw.v2m[b] * pw.st_k[b]) - bil(&ov, n, |a| pw.g[a] * xm[a], |b| pw.st_k[b]);
    out[lay.s(S::L2)] = l2;
    out[lay.s(S::L2p)] = trg * l2;
    out[lay.s(S::L3)] = sum_st_k;
    out[lay.s(S::L3p)] = trg * sum_st_k;

    for k in 0..k2 {
        out[lay.v(V::Bk, k)] = bil(&ov, n, |a| pw.sm[a] * pw.g[a], |b| ym[b].powu(k as u32));
        out[lay.v(V::Tr2, k)] = tr2[k];
        out[lay.v(V::T2, k)] = bil(&ov, n, |a| pw.kv1[a], |b| pw.dy[k][b]);
        out[lay.v(V::T8, k)] = bil(&ov, n, |a| pw.qs[a] * pw.v1m[a], |b| pw.dy[k][b]) - bil(&ov, n, |a| pw.qs[a], |b| ym[b] * pw.dy[k][b]);
        let gy = bil(&ov, n, |a| pw.g[a], |b| ym[b].powu(k as u32));
        out[lay.v(V::Gy, k)] = gy;
        let l5 = bil(&ov, n, |a| pw.g[a], |b| pw.dy[k][b]);
        out[lay.v(V::L5, k)] = l5;
        out[lay.v(V::L5p, k)] = trg * l5;
        for q in 0..k2 {
            out[lay.v2(V::L4p, q, k)] = tr2[q] * gy;
        }
    }
    let mut t7 = vec![C::new(0.0, 0.0); k1];
    let mut t9 = vec![vec![C::new(0.0, 0.0); k2]; k1];
    for i in 0..k1 {
        out[lay.v(V::Tr1, i)] = tr1[i];
        t7[i] = bil(&ov, n, |a| pw.di[i][a], |b| pw.v2m[b] * pw.st_k[b]) - bil(&ov, n, |a| pw.di[i][a] * xm[a], |b| pw.st_k[b]);
        out[lay.v(V::T7, i)] = t7[i];
        for j in 0..k2 {
            t9[i][j] = bil(&ov, n, |a| pw.di[i][a], |b| pw.dy[j][b]);
            out[lay.v2(V::T9, i, j)] = t9[i][j];
        }
    }
    for i in 0..k1 {
        let dk = bil(&ov, n, |a| pw.di[i][a], |b| pw.kv2[b]);
        for p in 0..k1 {
            out[lay.v2(V::T4, p, i)] = tr1[p] * dk;
            out[lay.v2(V::L7p, p, i)] = tr1[p] * t7[i];
            for j in 0..k2 {
                out[lay.v3(p, i, j)] = tr1[p] * t9[i][j];
            }
        }
    }
}

/// One-matrix slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout1 {
    pub k1: usize,
}

impl Layout1 {
    pub const TRG: usize = 0;
    pub const TRG2: usize = 1;
    pub const KV: usize = 2;
    pub const QSV: usize = 3;
    pub const B: usize = 4;
    pub const SM: usize = 5;

    pub fn tr1(&self, p: usize) -> usize {
        6 + p
    }

    pub fn t4(&self, p: usize, i: usize) -> usize {
        6 + self.k1 + p * self.k1 + i
    }

    pub fn len(&self) -> usize {
        6 + self.k1 + self.k1 * self.k1
    }

}

/// One-matrix atoms: the `M2` dependence of the two-matrix formulas is
/// integrated out (`V'2(y) = y` makes `M2` Gaussian around `M1`).
pub fn one_matrix(ctx: &Context, lay: &Layout1, cfg: &Config, x: C, out: &mut [C]) {
    let k1 = lay.k1;
    let xm: Vec<C> = cfg.x.iter().map(|&v| c(v)).collect();
    let g: Vec<C> = xm.iter().map(|m| 1.0 / (x - m)).collect();
    let trg: C = g.iter().sum();
    out[Layout1::TRG] = trg;
    out[Layout1::TRG2] = trg * trg;
    out[Layout1::KV] = xm.iter().map(|&m| kernel(&ctx.v, x, m)).sum();
    out[Layout1::QSV] = xm.iter().map(|&m| poly_kernel(&ctx.s, x, m) * eval_rational(&ctx.v, m)).sum();
    out[Layout1::B] = xm.iter().zip(&g).map(|(m, gi)| ctx.s.eval(m) * gi).sum();
    out[Layout1::SM] = xm.iter().map(|m| ctx.s.eval(m)).sum();
    let tr1: Vec<C> = (0..k1).map(|p| xm.iter().map(|m| m.powu(p as u32)).sum()).collect();
    for p in 0..k1 {
        out[lay.tr1(p)] = tr1[p];
        for i in 0..k1 {
            out[lay.t4(p, i)] = tr1[p] * xm.iter().map(|&m| power_kernel(i, x, m)).sum::<C>();
        }
    }
}
