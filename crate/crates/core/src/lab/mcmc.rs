//! Metropolis sampling of the eigenvalue (and relative-unitary) measure.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::Config;
use super::potential::{Domain, Weight};
use super::LabError;
use crate::model::ModelSpec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McmcOptions {
    pub burn_in_fraction: f64,
    pub thinning: usize,
    pub target_acceptance: f64,
}

impl Default for McmcOptions {
    fn default() -> Self {
        Self { burn_in_fraction: 0.2, thinning: 10, target_acceptance: 0.4 }
    }
}

/// Stored post-burn-in configurations of one (or several merged) chains.
/// One step is one sweep: every eigenvalue once, then every Givens pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleChain {
    pub seed: u64,
    pub n: usize,
    pub t: f64,
    pub steps: usize,
    pub configs: Vec<Config>,
    pub burn_in: usize,
    pub thinning: usize,
    pub acceptance_rate: f64,
    pub warnings: Vec<String>,
}

impl SampleChain {
    /// Concatenates chains of the same model; acceptance is averaged.
    pub fn merge(chains: Vec<SampleChain>) -> Option<SampleChain> {
        let mut it = chains.into_iter();
        let mut out = it.next()?;
        let mut count = 1.0;
        for c in it {
            out.configs.extend(c.configs);
            out.steps += c.steps;
            out.acceptance_rate += c.acceptance_rate;
            out.warnings.extend(c.warnings);
            count += 1.0;
        }
        out.acceptance_rate /= count;
        Some(out)
    }
}

/// The single real interval a chain moves in.
fn interval(d: &Domain) -> Result<(f64, f64), LabError> {
    let mut iv = d.intervals.clone();
    iv.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (lo, hi) in iv {
        match merged.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => merged.push((lo, hi)),
        }
    }
    match merged.as_slice() {
        [one] => Ok(*one),
        _ => Err(LabError::Unsupported("the sampler needs a single connected real interval per matrix".into())),
    }
}

fn reflect(mut v: f64, (lo, hi): (f64, f64)) -> f64 {
    for _ in 0..64 {
        if v < lo {
            v = 2.0 * lo - v;
        } else if v > hi {
            v = 2.0 * hi - v;
        } else {
            return v;
        }
    }
    v.clamp(lo, hi)
}

fn initial_eigenvalues(n: usize, (lo, hi): (f64, f64), spread: f64) -> Vec<f64> {
    if lo.is_finite() && hi.is_finite() {
        return (0..n).map(|k| lo + (hi - lo) * (k as f64 + 0.5) / n as f64).collect();
    }
    let center = if lo.is_finite() { lo + spread } else if hi.is_finite() { hi - spread } else { 0.0 };
    (0..n).map(|k| reflect(center + spread * (k as f64 - 0.5 * (n as f64 - 1.0)) / n as f64, (lo, hi))).collect()
}

struct Stepper {
    size: f64,
    tried: usize,
    taken: usize,
}

impl Stepper {
    fn new(size: f64) -> Self {
        Self { size, tried: 0, taken: 0 }
    }

    fn adapt(&mut self, target: f64, max: f64) {
        if self.tried == 0 {
            return;
        }
        let rate = self.taken as f64 / self.tried as f64;
        self.size *= if rate > target { 1.1 } else { 1.0 / 1.1 };
        self.size = self.size.min(max);
        self.tried = 0;
        self.taken = 0;
    }
}

fn vandermonde_delta(v: &[f64], a: usize, new: f64) -> f64 {
    let old = v[a];
    v.iter()
        .enumerate()
        .filter(|&(b, _)| b != a)
        .map(|(_, &w)| 2.0 * ((new - w).abs().ln() - (old - w).abs().ln()))
        .sum()
}

/// Chain over `M1` eigenvalues with density `Delta(x)^2 prod exp(-(N/t) V(x_a))`.
pub fn metropolis_1mm(model: &ModelSpec, steps: usize, seed: u64, opts: McmcOptions) -> Result<SampleChain, LabError> {
    model.validate_numeric()?;
    if !(2..=64).contains(&model.n) {
        return Err(LabError::Unsupported(format!("one-matrix sampler needs 2 <= N <= 64, got {}", model.n)));
    }
    let w = Weight::new(&model.one_matrix_v_prime(), model.n, model.t, Domain::from_contours(&model.contours1)?)?;
    let iv = interval(&w.domain)?;
    run(model, steps, seed, opts, &w, None, iv, None)
}

/// Chain over `(x, y, U)` with density
/// `Delta(x)^2 Delta(y)^2 exp[-(N/t) sum (V1(x_a) + V2(y_a))] exp[(N/t) Tr X U Y U^*]` times Haar.
pub fn metropolis_2mm(model: &ModelSpec, steps: usize, seed: u64, opts: McmcOptions) -> Result<SampleChain, LabError> {
    model.validate_numeric()?;
    if !(2..=32).contains(&model.n) {
        return Err(LabError::Unsupported(format!("two-matrix sampler needs 2 <= N <= 32, got {}", model.n)));
    }
    let w1 = Weight::new(&model.v1_prime, model.n, model.t, Domain::from_contours(&model.contours1)?)?;
    let w2 = Weight::new(&model.v2_prime, model.n, model.t, Domain::from_contours(&model.contours2)?)?;
    let iv1 = interval(&w1.domain)?;
    let iv2 = interval(&w2.domain)?;
    run(model, steps, seed, opts, &w1, Some(&w2), iv1, Some(iv2))
}

/// Independent chains with distinct seeds, run concurrently and merged.
pub fn run_chains(model: &ModelSpec, steps: usize, seeds: &[u64], opts: McmcOptions) -> Result<SampleChain, LabError> {
    let chains: Result<Vec<SampleChain>, LabError> = seeds
        .par_iter()
        .map(|&s| if model.is_one_matrix() { metropolis_1mm(model, steps, s, opts) } else { metropolis_2mm(model, steps, s, opts) })
        .collect();
    SampleChain::merge(chains?).ok_or_else(|| LabError::Unsupported("no seeds given".into()))
}

#[allow(clippy::too_many_arguments)]
fn run(
    model: &ModelSpec,
    steps: usize,
    seed: u64,
    opts: McmcOptions,
    w1: &Weight,
    w2: Option<&Weight>,
    iv1: (f64, f64),
    iv2: Option<(f64, f64)>,
) -> Result<SampleChain, LabError> {
    let n = model.n;
    let scale = n as f64 / model.t;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spread = (model.t).sqrt();
    let mut x = initial_eigenvalues(n, iv1, spread);
    let mut y = iv2.map(|iv| initial_eigenvalues(n, iv, spread)).unwrap_or_default();
    let mut u: DMatrix<Complex64> = if w2.is_some() { DMatrix::identity(n, n) } else { DMatrix::zeros(0, 0) };
    let width = |iv: (f64, f64)| if iv.0.is_finite() && iv.1.is_finite() { iv.1 - iv.0 } else { f64::INFINITY };

    let mut sx = Stepper::new(0.5 * spread / (n as f64).sqrt());
    let mut sy = Stepper::new(0.5 * spread / (n as f64).sqrt());
    let mut su = Stepper::new(0.5);
    let burn_in = (opts.burn_in_fraction * steps as f64).round() as usize;
    let thinning = opts.thinning.max(1);
    let mut configs = Vec::with_capacity((steps - burn_in.min(steps)) / thinning + 1);
    let (mut tried, mut taken) = (0usize, 0usize);

    for step in 0..steps {
        let measuring = step >= burn_in;
        // eigenvalues of M1
        for a in 0..n {
            let new = reflect(x[a] + sx.size * rng.gen_range(-1.0..1.0), iv1);
            let mut d = w1.log(new) - w1.log(x[a]) + vandermonde_delta(&x, a, new);
            if w2.is_some() {
                let field: f64 = (0..n).map(|b| y[b] * u[(a, b)].norm_sqr()).sum();
                d += scale * (new - x[a]) * field;
            }
            let ok = d >= 0.0 || rng.gen::<f64>() < d.exp();
            sx.tried += 1;
            if ok {
                x[a] = new;
                sx.taken += 1;
            }
            if measuring {
                tried += 1;
                taken += ok as usize;
            }
        }
        if let (Some(w2), Some(iv2)) = (w2, iv2) {
            for b in 0..n {
                let new = reflect(y[b] + sy.size * rng.gen_range(-1.0..1.0), iv2);
                let field: f64 = (0..n).map(|a| x[a] * u[(a, b)].norm_sqr()).sum();
                let d = w2.log(new) - w2.log(y[b]) + vandermonde_delta(&y, b, new) + scale * (new - y[b]) * field;
                let ok = d >= 0.0 || rng.gen::<f64>() < d.exp();
                sy.tried += 1;
                if ok {
                    y[b] = new;
                    sy.taken += 1;
                }
                if measuring {
                    tried += 1;
                    taken += ok as usize;
                }
            }
            for i in 0..n {
                for j in (i + 1)..n {
                    let theta = su.size * rng.gen_range(-1.0..1.0);
                    let phase = Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
                    let (c, s) = (theta.cos(), theta.sin());
                    let mut d = 0.0;
                    let mut new_i = vec![Complex64::new(0.0, 0.0); n];
                    let mut new_j = vec![Complex64::new(0.0, 0.0); n];
                    for b in 0..n {
                        new_i[b] = u[(i, b)] * c - phase.conj() * s * u[(j, b)];
                        new_j[b] = phase * s * u[(i, b)] + u[(j, b)] * c;
                        d += y[b]
                            * (x[i] * (new_i[b].norm_sqr() - u[(i, b)].norm_sqr()) + x[j] * (new_j[b].norm_sqr() - u[(j, b)].norm_sqr()));
                    }
                    d *= scale;
                    let ok = d >= 0.0 || rng.gen::<f64>() < d.exp();
                    su.tried += 1;
                    if ok {
                        for b in 0..n {
                            u[(i, b)] = new_i[b];
                            u[(j, b)] = new_j[b];
                        }
                        su.taken += 1;
                    }
                    if measuring {
                        tried += 1;
                        taken += ok as usize;
                    }
                }
            }
        }
        if !measuring && step % 50 == 49 {
            sx.adapt(opts.target_acceptance, width(iv1));
            if let Some(iv2) = iv2 {
                sy.adapt(opts.target_acceptance, width(iv2));
            }
            su.adapt(opts.target_acceptance, std::f64::consts::PI);
        }
        if measuring && (step - burn_in).is_multiple_of(thinning) {
            debug_assert!(x.iter().all(|&v| v >= iv1.0 && v <= iv1.1));
            configs.push(Config { x: x.clone(), y: y.clone(), u: u.clone() });
        }
    }
    let acceptance_rate = if tried > 0 { taken as f64 / tried as f64 } else { 0.0 };
    let mut warnings = Vec::new();
    if acceptance_rate < 0.05 {
        warnings.push(format!("NonErgodicWarning: acceptance {acceptance_rate:.3} below 0.05"));
    }
    Ok(SampleChain { seed, n, t: model.t, steps, configs, burn_in, thinning, acceptance_rate, warnings })
}
