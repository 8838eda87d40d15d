//! Stand-alone evaluators for the named correlators at free arguments.

use num_complex::Complex64;

use super::context::{eval_rational, kernel, Context};
use super::master::bundle;
use super::CheckError;
use crate::lab::{support_distance, Config, Ensemble, Estimate};
use crate::model::ModelSpec;

type C = Complex64;

fn c(x: f64) -> C {
    C::new(x, 0.0)
}

fn mean(ens: &Ensemble, f: impl Fn(&Config) -> C + Sync) -> Estimate {
    ens.means(1, |cfg, o| o[0] = f(cfg)).combine(|v| v[0])
}

fn connected(ens: &Ensemble, f: impl Fn(&Config) -> (C, C) + Sync) -> Estimate {
    ens.means(3, |cfg, o| {
        let (a, b) = f(cfg);
        o[0] = a * b;
        o[1] = a;
        o[2] = b;
    })
    .combine(|v| v[0] - v[1] * v[2])
}

fn off_support(ens: &Ensemble, x: C) -> Result<(), CheckError> {
    let d = support_distance(ens, x);
    if d < super::master::PROBE_MARGIN {
        return Err(CheckError::ProbeTooClose { probe: x, distance: d });
    }
    Ok(())
}

/// `sum_ab f(x_a) g(y_b) |U_ab|^2`, or `sum_a f(x_a) g(x_a)` without `M2`.
fn bilinear(cfg: &Config, f: impl Fn(C) -> C, g: impl Fn(C) -> C) -> C {
    if cfg.has_m2() {
        let fa: Vec<C> = cfg.x.iter().map(|&a| f(c(a))).collect();
        let gb: Vec<C> = cfg.y.iter().map(|&b| g(c(b))).collect();
        cfg.bilinear(&fa, &gb)
    } else {
        cfg.x.iter().map(|&a| f(c(a)) * g(c(a))).sum()
    }
}

fn trg(cfg: &Config, x: C) -> C {
    cfg.x.iter().map(|&m| 1.0 / (x - m)).sum()
}

/// `W(x) = (t/N) <Tr 1/(x - M1)>`.
pub fn eval_w(model: &ModelSpec, ens: &Ensemble, x: C) -> Result<Estimate, CheckError> {
    off_support(ens, x)?;
    let tau = model.t / model.n as f64;
    let e = mean(ens, |cfg| trg(cfg, x));
    Ok(Estimate { value: tau * e.value, error: tau * e.error })
}

/// `Y(x) = V'1(x) - W(x)`.
pub fn eval_y(model: &ModelSpec, ens: &Ensemble, x: C) -> Result<Estimate, CheckError> {
    let w = eval_w(model, ens, x)?;
    Ok(Estimate { value: eval_rational(&model.v1_prime, x) - w.value, error: w.error })
}

fn kv2(ctx: &Context, y: C, m: C) -> C {
    if ctx.one_matrix {
        c(1.0)
    } else {
        kernel(&ctx.v2, y, m)
    }
}

/// `U(x, y) = (t/N) <Tr 1/(x - M1) (V'2(y) - V'2(M2))/(y - M2)>`.
pub fn eval_u(model: &ModelSpec, ens: &Ensemble, x: C, y: C) -> Result<Estimate, CheckError> {
    off_support(ens, x)?;
    let ctx = Context::new(model);
    let tau = ctx.tau();
    let e = mean(ens, |cfg| bilinear(cfg, |a| 1.0 / (x - a), |b| kv2(&ctx, y, b)));
    Ok(Estimate { value: tau * e.value, error: tau * e.error })
}

/// `U(x, y, x') = <Tr 1/(x - M1) (V'2(y) - V'2(M2))/(y - M2) Tr 1/(x' - M1)>_c`.
pub fn eval_u3(model: &ModelSpec, ens: &Ensemble, x: C, y: C, xp: C) -> Result<Estimate, CheckError> {
    off_support(ens, x)?;
    off_support(ens, xp)?;
    let ctx = Context::new(model);
    Ok(connected(ens, |cfg| (bilinear(cfg, |a| 1.0 / (x - a), |b| kv2(&ctx, y, b)), trg(cfg, xp))))
}

/// `P(x, y) = (t/N) <Tr (V'1(x) - V'1(M1))/(x - M1) (V'2(y) - V'2(M2))/(y - M2)>`.
pub fn eval_p(model: &ModelSpec, ens: &Ensemble, x: C, y: C) -> Result<Estimate, CheckError> {
    let ctx = Context::new(model);
    let tau = ctx.tau();
    let e = mean(ens, |cfg| bilinear(cfg, |a| kernel(&ctx.v1, x, a), |b| kv2(&ctx, y, b)));
    Ok(Estimate { value: tau * e.value, error: tau * e.error })
}

/// `B_k(x) = (t/N) <Tr s(M1)/(x - M1) M2^k>`. Without `M2` samples only
/// `k <= 1` is available, through `<M2 | M1> = M1`.
pub fn eval_bk(model: &ModelSpec, ens: &Ensemble, x: C, k: usize) -> Result<Estimate, CheckError> {
    off_support(ens, x)?;
    if !ens.has_m2() && k > 1 {
        return Err(CheckError::MissingObservable(format!("B_{k} needs M2 samples")));
    }
    let ctx = Context::new(model);
    let tau = ctx.tau();
    let e = mean(ens, |cfg| bilinear(cfg, |a| ctx.s.eval(&a) / (x - a), |b| b.powu(k as u32)));
    Ok(Estimate { value: tau * e.value, error: tau * e.error })
}

/// `B(x) = (t/N) <Tr s(M1)/(x - M1) s~(M2)>`.
pub fn eval_b(model: &ModelSpec, ens: &Ensemble, x: C) -> Result<Estimate, CheckError> {
    Ok(bundle(model, ens, x, None)?.b)
}

/// `A(x) = (t/N) <Tr s(M1)/(x - M1) s~(M2) V'2(M2)>`.
pub fn eval_a(model: &ModelSpec, ens: &Ensemble, x: C) -> Result<Estimate, CheckError> {
    Ok(bundle(model, ens, x, None)?.a)
}

pub fn eval_d(model: &ModelSpec, ens: &Ensemble, x: C) -> Result<Estimate, CheckError> {
    Ok(bundle(model, ens, x, None)?.d)
}
