//! Residual reports over a set of probes.

use num_complex::Complex64;
use serde::Serialize;

use super::master::{bundle, CorrelatorBundle};
use super::CheckError;
use crate::lab::{Ensemble, Estimate};
use crate::model::ModelSpec;

type C = Complex64;

const PROBE_SCALES: [f64; 5] = [1.0, 2.0, 4.0, 8.0, 16.0];

/// Imaginary-axis probes at `{1, 2, 4, 8, 16}` times the support radius.
pub fn default_probes(ens: &Ensemble) -> Vec<C> {
    let radius = support_radius(ens).max(1.0);
    PROBE_SCALES.iter().map(|k| C::new(0.0, k * radius)).collect()
}

fn support_radius(ens: &Ensemble) -> f64 {
    match ens {
        Ensemble::Quadrature(q) => q.ranges().0.iter().map(|&(lo, hi)| lo.abs().max(hi.abs())).fold(0.0, f64::max),
        Ensemble::Chain(c) => c.configs.iter().flat_map(|cfg| cfg.x.iter()).map(|l| l.abs()).fold(0.0, f64::max),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub probe: C,
    pub bundle: CorrelatorBundle,
    pub residual: Estimate,
    pub sigmas: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub n: usize,
    pub t: f64,
    pub source: &'static str,
    pub probes: Vec<ProbeReport>,
}

pub fn residual_report(model: &ModelSpec, ens: &Ensemble, probes: &[C]) -> Result<ResidualReport, CheckError> {
    let mut out = Vec::with_capacity(probes.len());
    for &x in probes {
        let b = bundle(model, ens, x, None)?;
        let residual = b.residual;
        out.push(ProbeReport { probe: x, sigmas: residual.sigmas(), residual, bundle: b });
    }
    Ok(ResidualReport { n: ens.n(), t: ens.t(), source: ens.source(), probes: out })
}

impl ResidualReport {
    pub fn max_abs(&self) -> f64 {
        self.probes.iter().map(|p| p.residual.value.norm()).fold(0.0, f64::max)
    }

    pub fn max_sigmas(&self) -> f64 {
        self.probes.iter().map(|p| p.sigmas).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// `probe_re, probe_im, residual_abs, sigma`.
    pub fn to_csv(&self) -> Result<String, CheckError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CheckError::Lab(crate::lab::LabError::Io(e.to_string()));
        w.write_record(["probe_re", "probe_im", "residual_abs", "sigma"]).map_err(io)?;
        for p in &self.probes {
            w.write_record([p.probe.re.to_string(), p.probe.im.to_string(), p.residual.value.norm().to_string(), p.residual.error.to_string()])
                .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| CheckError::Lab(crate::lab::LabError::Io(e.to_string())))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }
}
