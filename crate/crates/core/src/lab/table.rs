//! Named trace observables and their estimated expectation values.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::Config;
use super::ensemble::Ensemble;
use super::quadrature::{QuadratureEnsemble, QuadratureOptions};
use super::LabError;
use crate::model::ModelSpec;
use crate::words::{Letter, TraceWord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    /// `<Tr w>`.
    Trace(TraceWord),
    /// `<Tr a Tr b>`.
    Product(TraceWord, TraceWord),
    /// `<Tr a Tr b>_c`.
    Connected(TraceWord, TraceWord),
    /// `<Tr (x - M1)^-1>`.
    Resolvent(Complex64),
    /// `<Tr (x1 - M1)^-1 Tr (x2 - M1)^-1>_c`.
    ResolventConnected(Complex64, Complex64),
}

fn point(z: Complex64) -> String {
    format!("({},{})", z.re, z.im)
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Trace(w) => write!(f, "Tr[{w}]"),
            Self::Product(a, b) => write!(f, "Tr[{a}]Tr[{b}]"),
            Self::Connected(a, b) => write!(f, "<Tr[{a}]Tr[{b}]>c"),
            Self::Resolvent(x) => write!(f, "R{}", point(*x)),
            Self::ResolventConnected(a, b) => write!(f, "<R{}R{}>c", point(*a), point(*b)),
        }
    }
}

impl Observable {
    fn needs_m2(&self) -> bool {
        let has = |w: &TraceWord| w.count(Letter::M2) > 0;
        match self {
            Self::Trace(w) => has(w),
            Self::Product(a, b) | Self::Connected(a, b) => has(a) || has(b),
            _ => false,
        }
    }

    fn probes(&self) -> Vec<Complex64> {
        match self {
            Self::Resolvent(x) => vec![*x],
            Self::ResolventConnected(a, b) => vec![*a, *b],
            _ => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Quadrature,
    Mcmc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub observable: Observable,
    pub value: Complex64,
    pub std_error: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TableMetadata {
    pub model_hash: Option<String>,
    pub seed: Option<u64>,
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentTable {
    pub entries: BTreeMap<String, Entry>,
    pub n: usize,
    pub t: f64,
    pub source: Source,
    pub metadata: TableMetadata,
}

impl MomentTable {
    pub fn get(&self, obs: &Observable) -> Option<&Entry> {
        self.entries.get(&obs.to_string())
    }

    pub fn value(&self, obs: &Observable) -> Result<Complex64, LabError> {
        self.get(obs).map(|e| e.value).ok_or_else(|| LabError::MissingObservable(obs.to_string()))
    }

    pub fn to_csv(&self) -> Result<String, LabError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["observable_key", "re", "im", "std_error"]).map_err(io)?;
        for (k, e) in &self.entries {
            w.write_record([k.clone(), e.value.re.to_string(), e.value.im.to_string(), e.std_error.to_string()]).map_err(io)?;
        }
        String::from_utf8(w.into_inner().map_err(|e| LabError::Io(e.to_string()))?).map_err(|e| LabError::Io(e.to_string()))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "metadata": {
                "model_hash": self.metadata.model_hash,
                "n": self.n,
                "t": self.t,
                "seed": self.metadata.seed,
                "steps": self.metadata.steps,
                "source": self.source,
            },
            "entries": self.entries.iter().map(|(k, e)| serde_json::json!({
                "observable_key": k,
                "re": e.value.re,
                "im": e.value.im,
                "std_error": e.std_error,
            })).collect::<Vec<_>>(),
        })
    }
}

fn io(e: csv::Error) -> LabError {
    LabError::Io(e.to_string())
}

/// Hex SHA-256 of the model's debug rendering.
pub fn model_hash(model: &ModelSpec) -> String {
    let digest = Sha256::digest(format!("{model:?}").as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn resolvent(cfg: &Config, x: Complex64) -> Complex64 {
    cfg.x.iter().map(|&l| 1.0 / (x - l)).sum()
}

/// Smallest distance between a probe and the eigenvalue support seen by the
/// ensemble (integration ranges or sampled eigenvalues).
pub fn support_distance(ens: &Ensemble, x: Complex64) -> f64 {
    match ens {
        Ensemble::Quadrature(q) => q
            .ranges()
            .0
            .iter()
            .map(|&(lo, hi)| {
                let r = x.re.clamp(lo, hi);
                (x - Complex64::new(r, 0.0)).norm()
            })
            .fold(f64::INFINITY, f64::min),
        Ensemble::Chain(c) => c
            .configs
            .iter()
            .flat_map(|cfg| cfg.x.iter())
            .map(|&l| (x - l).norm())
            .fold(f64::INFINITY, f64::min),
    }
}

/// Single-trace, two-trace and connected estimates with propagated errors.
/// `Tr 1` is always present and exact.
pub fn estimate(ens: &Ensemble, observables: &[Observable], margin: f64) -> Result<MomentTable, LabError> {
    for obs in observables {
        if obs.needs_m2() && !ens.has_m2() {
            return Err(LabError::MissingObservable(format!("{obs} needs M2 samples")));
        }
        for p in obs.probes() {
            let d = support_distance(ens, p);
            if d < margin {
                return Err(LabError::ProbeTooClose { probe: p, distance: d });
            }
        }
    }
    // slots: one per scalar per-config quantity
    let mut slots: Vec<Observable> = Vec::new();
    let mut slot = |o: Observable| -> usize {
        if let Some(i) = slots.iter().position(|s| *s == o) {
            return i;
        }
        slots.push(o);
        slots.len() - 1
    };
    let mut plan: Vec<(Observable, Vec<usize>)> = Vec::new();
    for obs in observables {
        let idx = match obs {
            Observable::Trace(_) | Observable::Product(..) | Observable::Resolvent(_) => vec![slot(obs.clone())],
            Observable::Connected(a, b) => vec![
                slot(Observable::Product(a.clone(), b.clone())),
                slot(Observable::Trace(a.clone())),
                slot(Observable::Trace(b.clone())),
            ],
            Observable::ResolventConnected(a, b) => {
                vec![slot(obs.clone()), slot(Observable::Resolvent(*a)), slot(Observable::Resolvent(*b))]
            }
        };
        plan.push((obs.clone(), idx));
    }
    let means = ens.means(slots.len(), |cfg, out| {
        for (o, s) in out.iter_mut().zip(&slots) {
            *o = match s {
                Observable::Trace(w) => cfg.trace_word(w),
                Observable::Product(a, b) => cfg.trace_word(a) * cfg.trace_word(b),
                Observable::Resolvent(x) => resolvent(cfg, *x),
                Observable::ResolventConnected(a, b) => resolvent(cfg, *a) * resolvent(cfg, *b),
                Observable::Connected(..) => unreachable!(),
            };
        }
    });
    let n = ens.n();
    let mut entries = BTreeMap::new();
    let one = Observable::Trace(TraceWord::identity());
    entries.insert(one.to_string(), Entry { observable: one, value: Complex64::new(n as f64, 0.0), std_error: 0.0 });
    for (obs, idx) in plan {
        if obs == Observable::Trace(TraceWord::identity()) {
            continue;
        }
        let est = if idx.len() == 1 { means.get(idx[0]) } else { means.combine(|v| v[idx[0]] - v[idx[1]] * v[idx[2]]) };
        entries.insert(obs.to_string(), Entry { observable: obs, value: est.value, std_error: est.error });
    }
    let (source, metadata) = match ens {
        Ensemble::Quadrature(_) => (Source::Quadrature, TableMetadata::default()),
        Ensemble::Chain(c) => (Source::Mcmc, TableMetadata { model_hash: None, seed: Some(c.seed), steps: Some(c.steps) }),
    };
    Ok(MomentTable { entries, n, t: ens.t(), source, metadata })
}

/// Exact one-matrix moments, `N <= 3`, `M1`-only words.
pub fn quadrature_moments_1mm(model: &ModelSpec, words: &[TraceWord]) -> Result<MomentTable, LabError> {
    if let Some(w) = words.iter().find(|w| w.count(Letter::M2) > 0) {
        return Err(LabError::MissingObservable(format!("word {w} involves M2 in a one-matrix model")));
    }
    let ens = Ensemble::Quadrature(QuadratureEnsemble::one_matrix(model, QuadratureOptions::default())?);
    let obs: Vec<Observable> = words.iter().cloned().map(Observable::Trace).collect();
    let mut table = estimate(&ens, &obs, 0.0)?;
    table.metadata.model_hash = Some(model_hash(model));
    Ok(table)
}

/// Exact two-matrix moments at `N = 1` (or the five-dimensional rule at `N = 2`).
pub fn quadrature_moments_2mm(model: &ModelSpec, words: &[TraceWord]) -> Result<MomentTable, LabError> {
    let ens = Ensemble::Quadrature(QuadratureEnsemble::two_matrix(model, QuadratureOptions::default())?);
    let obs: Vec<Observable> = words.iter().cloned().map(Observable::Trace).collect();
    let mut table = estimate(&ens, &obs, 0.0)?;
    table.metadata.model_hash = Some(model_hash(model));
    Ok(table)
}
