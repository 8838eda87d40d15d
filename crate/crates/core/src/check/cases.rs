//! Reduced forms of `E` and `L` for the special edge configurations.

use num_complex::Complex64;
use serde::Serialize;

use super::context::{eval_rational, kernel, Context};
use super::master::bundle;
use super::CheckError;
use crate::lab::{Config, Ensemble, Estimate};
use crate::model::ModelSpec;

type C = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Case {
    /// `s = s~ = 1`.
    NoEdges,
    /// `V'2(y) = y`, no edge.
    OneMatrix,
    OneMatrixOneEdge(C),
    OneMatrixTwoEdges(C, C),
    TwoMatrixOneEdge(C),
    TwoMatrixTwoEdges(C, C),
    /// `s(x) = x - a`, `s~(y) = y - b`.
    OneEdgeEach(C, C),
    General,
}

pub fn specialize_case(model: &ModelSpec) -> (Case, ReducedEvaluator) {
    let ex = &model.hard_edges_x;
    let ey = &model.hard_edges_y;
    let case = if model.is_one_matrix() {
        match ex.len() {
            0 => Case::OneMatrix,
            1 => Case::OneMatrixOneEdge(ex[0]),
            2 => Case::OneMatrixTwoEdges(ex[0], ex[1]),
            _ => Case::General,
        }
    } else {
        match (ex.len(), ey.len()) {
            (0, 0) => Case::NoEdges,
            (1, 0) => Case::TwoMatrixOneEdge(ex[0]),
            (2, 0) => Case::TwoMatrixTwoEdges(ex[0], ex[1]),
            (1, 1) => Case::OneEdgeEach(ex[0], ey[0]),
            _ => Case::General,
        }
    };
    (case, ReducedEvaluator { case, model: model.clone() })
}

/// Reduced `E(x, y)` and `L(x)` of one case, both taken at the measured
/// `y = Y(x)`.
#[derive(Debug, Clone)]
pub struct ReducedEvaluator {
    pub case: Case,
    model: ModelSpec,
}

/// Reduced and general evaluations at one probe.
#[derive(Debug, Clone, Serialize)]
pub struct CaseComparison {
    pub probe: C,
    pub y: C,
    pub reduced_e: Estimate,
    pub reduced_l: Estimate,
    pub general_e: Estimate,
    pub general_l: Estimate,
}

impl CaseComparison {
    /// Largest discrepancy in units of the combined error, floored at `tol`.
    pub fn agrees(&self, tol: f64) -> bool {
        let close = |a: &Estimate, b: &Estimate| (a.value - b.value).norm() <= tol.max(3.0 * (a.error + b.error));
        close(&self.reduced_e, &self.general_e) && close(&self.reduced_l, &self.general_l)
    }
}

fn c(x: f64) -> C {
    C::new(x, 0.0)
}

struct Vectors {
    m: Vec<C>,
    yb: Vec<C>,
    g: Vec<C>,
    kv1: Vec<C>,
    kv2: Vec<C>,
    v1m: Vec<C>,
    v2m: Vec<C>,
}

impl Vectors {
    fn new(ctx: &Context, cfg: &Config, x: C, y: C) -> Self {
        let m: Vec<C> = cfg.x.iter().map(|&a| c(a)).collect();
        let yb: Vec<C> = cfg.y.iter().map(|&b| c(b)).collect();
        Self {
            g: m.iter().map(|&a| 1.0 / (x - a)).collect(),
            kv1: m.iter().map(|&a| kernel(&ctx.v1, x, a)).collect(),
            kv2: yb.iter().map(|&b| kernel(&ctx.v2, y, b)).collect(),
            v1m: m.iter().map(|&a| eval_rational(&ctx.v1, a)).collect(),
            v2m: yb.iter().map(|&b| eval_rational(&ctx.v2, b)).collect(),
            m,
            yb,
        }
    }
}

fn mul(a: &[C], b: &[C]) -> Vec<C> {
    a.iter().zip(b).map(|(u, v)| u * v).collect()
}

fn ones(n: usize) -> Vec<C> {
    vec![c(1.0); n]
}

impl ReducedEvaluator {
    pub fn evaluate(&self, ens: &Ensemble, x: C) -> Result<(Estimate, Estimate), CheckError> {
        let ctx = Context::new(&self.model);
        let y = bundle(&self.model, ens, x, None)?.y.value;
        if self.case == Case::General {
            let b = bundle(&self.model, ens, x, Some(y))?;
            return Ok((b.e_at, b.l_at));
        }
        let tau = ctx.tau();
        let t = ctx.t;
        let sx = ctx.s.eval(&x);
        let sy = ctx.st.eval(&y);
        let v1x = eval_rational(&ctx.v1, x);
        let v2y = eval_rational(&ctx.v2, y);
        let head = (v2y - x) * (v1x - y) + t;
        const K: usize = 8;
        let case = self.case;
        let one = matches!(case, Case::OneMatrix | Case::OneMatrixOneEdge(_) | Case::OneMatrixTwoEdges(..));
        let means = ens.means(K, |cfg, o| {
            o.iter_mut().for_each(|v| *v = c(0.0));
            if one {
                let m: Vec<C> = cfg.x.iter().map(|&a| c(a)).collect();
                let trg: C = m.iter().map(|&a| 1.0 / (x - a)).sum();
                o[0] = trg;
                o[1] = trg * trg;
                o[2] = m.iter().map(|&a| kernel(&ctx.v, x, a)).sum();
                o[3] = m.iter().map(|&a| eval_rational(&ctx.v, a)).sum();
                if let Case::OneMatrixTwoEdges(ea, eb) = case {
                    o[4] = m.iter().map(|&a| (x + a - ea - eb) * eval_rational(&ctx.v, a)).sum();
                }
                return;
            }
            let v = Vectors::new(&ctx, cfg, x, y);
            let n = v.m.len();
            let bil = |f: &[C], g: &[C]| cfg.bilinear(f, g);
            let trg: C = v.g.iter().sum();
            let u = bil(&v.g, &v.kv2);
            o[0] = trg;
            o[1] = trg * u;
            o[2] = u;
            o[3] = bil(&v.kv1, &v.kv2);
            match case {
                Case::TwoMatrixOneEdge(_) => {
                    o[4] = bil(&v.v1m, &v.kv2) - bil(&ones(n), &mul(&v.yb, &v.kv2));
                }
                Case::TwoMatrixTwoEdges(ea, eb) => {
                    let q: Vec<C> = v.m.iter().map(|&a| x + a - ea - eb).collect();
                    o[4] = bil(&mul(&q, &v.v1m), &v.kv2) - bil(&q, &mul(&v.yb, &v.kv2));
                    o[5] = v.kv2.iter().sum();
                }
                Case::OneEdgeEach(..) => {
                    o[4] = bil(&v.kv1, &v.v2m) - bil(&mul(&v.kv1, &v.m), &ones(n));
                    o[5] = bil(&v.v1m, &v.kv2) - bil(&ones(n), &mul(&v.yb, &v.kv2));
                    o[6] = bil(&v.v1m, &v.v2m) - bil(&ones(n), &mul(&v.yb, &v.v2m)) - mul(&v.m, &v.v1m).iter().sum::<C>() + bil(&v.m, &v.yb);
                    let inner = bil(&v.g, &v.v2m) - mul(&v.g, &v.m).iter().sum::<C>();
                    o[7] = inner;
                    o[1] += trg * inner / sy;
                }
                _ => {}
            }
        });
        let out = means.combine_many(2, |a, o| {
            if one {
                let base = (y - x) * (eval_rational(&ctx.v, x) + x - y) - tau * a[2];
                o[0] = match case {
                    Case::OneMatrixOneEdge(ea) => base - tau * a[3] / (x - ea),
                    Case::OneMatrixTwoEdges(..) => base - tau * a[4] / sx + t * t / sx,
                    _ => base,
                };
                o[1] = a[1] - a[0] * a[0];
                return;
            }
            let head = head - tau * a[3];
            let l1 = a[1] - a[0] * a[2];
            match case {
                Case::NoEdges => {
                    o[0] = head;
                    o[1] = l1;
                }
                Case::TwoMatrixOneEdge(ea) => {
                    o[0] = head - tau * a[4] / (x - ea);
                    o[1] = l1;
                }
                Case::TwoMatrixTwoEdges(..) => {
                    o[0] = head - tau * a[4] / sx + t * t / ctx.n as f64 * a[5] / sx;
                    o[1] = l1;
                }
                Case::OneEdgeEach(..) => {
                    o[0] = head - tau * a[4] / sy - tau * a[5] / sx - tau * a[6] / (sx * sy) - t * t / (sx * sy);
                    o[1] = l1 - a[0] * a[7] / sy;
                }
                _ => unreachable!(),
            }
        });
        Ok((out[0], out[1]))
    }

    /// Reduced against general evaluation at `x`.
    pub fn compare(&self, ens: &Ensemble, x: C) -> Result<CaseComparison, CheckError> {
        let (reduced_e, reduced_l) = self.evaluate(ens, x)?;
        let y = bundle(&self.model, ens, x, None)?.y.value;
        let general = bundle(&self.model, ens, x, Some(y))?;
        Ok(CaseComparison { probe: x, y, reduced_e, reduced_l, general_e: general.e_at, general_l: general.l_at })
    }
}
