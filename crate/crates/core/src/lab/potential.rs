//! Eigenvalue weights `exp(-(N/t) V(x))` on real intervals.

use num_complex::Complex64;

use super::LabError;
use crate::algebra::{Polynomial, RationalFunction};
use crate::model::ContourSegment;

/// `V` rebuilt from `V'`: polynomial part plus logarithms and inverse powers
/// at the poles.
#[derive(Debug, Clone)]
pub struct Potential {
    poly: Polynomial<Complex64>,
    logs: Vec<(Complex64, Complex64)>,
    inverse_powers: Vec<(Complex64, usize, Complex64)>,
}

impl Potential {
    pub fn from_derivative(v_prime: &RationalFunction<Complex64>) -> Result<Self, LabError> {
        if let Some(p) = v_prime.as_polynomial() {
            return Ok(Self { poly: p.antiderivative(), logs: Vec::new(), inverse_powers: Vec::new() });
        }
        let pf = v_prime.partial_fractions().map_err(|e| LabError::Unsupported(e.to_string()))?;
        let mut logs = Vec::new();
        let mut inverse_powers = Vec::new();
        for term in &pf.terms {
            if term.order == 1 {
                logs.push((term.pole, term.coeff));
            } else {
                inverse_powers.push((term.pole, term.order, term.coeff));
            }
        }
        Ok(Self { poly: pf.polynomial.antiderivative(), logs, inverse_powers })
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        let mut v = self.poly.eval(&x);
        for &(p, c) in &self.logs {
            v += c * (x - p).ln();
        }
        for &(p, k, c) in &self.inverse_powers {
            let e = 1 - k as i32;
            v += c * (x - p).powi(e) / e as f64;
        }
        v
    }

    /// Poles of `V'`, where the weight is singular.
    pub fn poles(&self) -> Vec<Complex64> {
        self.logs.iter().map(|l| l.0).chain(self.inverse_powers.iter().map(|l| l.0)).collect()
    }
}

/// Union of real intervals carrying one matrix's eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    pub intervals: Vec<(f64, f64)>,
}

impl Domain {
    pub fn from_contours(segments: &[ContourSegment]) -> Result<Self, LabError> {
        let mut intervals = Vec::new();
        for seg in segments {
            let (lo, hi) = seg
                .real_bounds()
                .ok_or_else(|| LabError::Unsupported(format!("segment {} -> {} is not real", seg.start, seg.end)))?;
            intervals.push((lo, hi));
        }
        intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self { intervals })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(lo, hi)| x >= lo && x <= hi)
    }

    pub fn is_bounded(&self) -> bool {
        self.intervals.iter().all(|&(lo, hi)| lo.is_finite() && hi.is_finite())
    }

    /// Same intervals with infinite ends replaced by `[-r_lo, r_hi]` cutoffs.
    pub fn truncated(&self, lo_cut: f64, hi_cut: f64) -> Vec<(f64, f64)> {
        self.intervals
            .iter()
            .map(|&(lo, hi)| (if lo.is_finite() { lo } else { lo_cut }, if hi.is_finite() { hi } else { hi_cut }))
            .filter(|(lo, hi)| hi > lo)
            .collect()
    }
}

/// Log of the one-eigenvalue weight, `-(N/t) Re V(x)`, together with a phase
/// check: the weight must be real and positive on the whole domain.
#[derive(Debug, Clone)]
pub struct Weight {
    potential: Potential,
    scale: f64,
    pub domain: Domain,
}

impl Weight {
    pub fn new(v_prime: &RationalFunction<Complex64>, n: usize, t: f64, domain: Domain) -> Result<Self, LabError> {
        let potential = Potential::from_derivative(v_prime)?;
        let scale = n as f64 / t;
        let w = Self { potential, scale, domain };
        w.check_phase()?;
        Ok(w)
    }

    pub fn log(&self, x: f64) -> f64 {
        -self.scale * self.potential.eval(Complex64::new(x, 0.0)).re
    }

    /// `N/t`.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    fn check_phase(&self) -> Result<(), LabError> {
        for &(lo, hi) in &self.domain.intervals {
            for p in self.potential.poles() {
                if p.im.abs() < 1e-12 && p.re > lo && p.re < hi {
                    return Err(LabError::Unsupported(format!("pole of V' at {} inside the contour", p.re)));
                }
            }
            let a = if lo.is_finite() { lo } else { hi.min(0.0) - 50.0 };
            let b = if hi.is_finite() { hi } else { lo.max(0.0) + 50.0 };
            let phase = |x: f64| self.scale * self.potential.eval(Complex64::new(x, 0.0)).im;
            let reference = phase(0.5 * (a + b));
            for k in 0..=64 {
                let x = a + (b - a) * k as f64 / 64.0;
                let d = (phase(x) - reference) / std::f64::consts::TAU;
                if (d - d.round()).abs() > 1e-9 {
                    return Err(LabError::NegativeWeight(x));
                }
            }
        }
        Ok(())
    }
}

const MARGIN: f64 = 40.0;
const MAX_EXTENT: f64 = 1e4;

/// Cutoffs for the infinite ends of one or two eigenvalue domains, found on
/// the one-eigenvalue (N = 1 shaped) joint weight
/// `log w1(x) + log w2(y) + (N/t) x y`. Returns `[lo, hi]` per domain.
pub fn cutoffs(w1: &Weight, w2: Option<&Weight>) -> Result<Vec<(f64, f64)>, LabError> {
    let mut r = 4.0;
    let steps = 400;
    loop {
        let xs = sample_grid(&w1.domain, r, steps);
        let ys = w2.map(|w| sample_grid(&w.domain, r, steps)).unwrap_or_else(|| vec![0.0]);
        let lw1: Vec<f64> = xs.iter().map(|&x| w1.log(x)).collect();
        let lw2: Vec<f64> = match w2 {
            Some(w) => ys.iter().map(|&y| w.log(y)).collect(),
            None => vec![0.0],
        };
        let joint = |i: usize, j: usize| {
            let c = if w2.is_some() { w1.scale() * xs[i] * ys[j] } else { 0.0 };
            lw1[i] + lw2[j] + c
        };
        let mut peak = f64::NEG_INFINITY;
        for i in 0..xs.len() {
            for j in 0..ys.len() {
                let v = joint(i, j);
                if v.is_finite() {
                    peak = peak.max(v);
                }
            }
        }
        if !peak.is_finite() {
            return Err(LabError::DivergentWeight("weight vanishes everywhere on the contour".into()));
        }
        let (mut xlo, mut xhi, mut ylo, mut yhi) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..xs.len() {
            for j in 0..ys.len() {
                if joint(i, j) > peak - MARGIN {
                    xlo = xlo.min(xs[i]);
                    xhi = xhi.max(xs[i]);
                    ylo = ylo.min(ys[j]);
                    yhi = yhi.max(ys[j]);
                }
            }
        }
        let touches = |lo: f64, hi: f64, d: &Domain| {
            let open_lo = d.intervals.iter().any(|iv| iv.0.is_infinite());
            let open_hi = d.intervals.iter().any(|iv| iv.1.is_infinite());
            (open_lo && lo <= -r * 0.999) || (open_hi && hi >= r * 0.999)
        };
        let grow = touches(xlo, xhi, &w1.domain) || w2.is_some_and(|w| touches(ylo, yhi, &w.domain));
        if !grow {
            let pad = |lo: f64, hi: f64| {
                let p = 0.05 * (hi - lo).max(1.0);
                (lo - p, hi + p)
            };
            let mut out = vec![pad(xlo, xhi)];
            if w2.is_some() {
                out.push(pad(ylo, yhi));
            }
            return Ok(out);
        }
        r *= 2.0;
        if r > MAX_EXTENT {
            return Err(LabError::DivergentWeight(format!("weight does not decay within |x| <= {MAX_EXTENT}")));
        }
    }
}

fn sample_grid(d: &Domain, r: f64, steps: usize) -> Vec<f64> {
    let mut out = Vec::new();
    for &(lo, hi) in &d.intervals {
        let a = lo.max(-r);
        let b = hi.min(r);
        if b < a {
            continue;
        }
        for k in 0..=steps {
            out.push(a + (b - a) * k as f64 / steps as f64);
        }
    }
    out
}
