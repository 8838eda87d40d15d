//! Command implementations. Each writes its files under the output directory
//! and returns the exit code.

use std::f64::consts::PI;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use loopcurve::check::{default_probes, residual_report, CheckError, ResidualReport};
use loopcurve::curve::{
    build_ansatz, duality_check, export, period_table, residue_report, solve_convergent, solve_formal, CurveError, SolvedCurve,
};
use loopcurve::lab::{run_chains, Ensemble, JACKKNIFE_BLOCKS, LabError, McmcOptions, QuadratureEnsemble, QuadratureOptions};
use loopcurve::model::ModelSpec;
use loopcurve::words::{
    build_loop_equation, build_m2_loop_equation, moment_expand_generating, parse_letters, GeneratingKind, Letter, MatrixPoly,
    RelationReport, SymbolicModel, TraceWord, WordsError,
};
use loopcurve::Complex64;
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::config::{probes, CurveConfig, CurveMode, DeriveConfig, Format, RunConfig, VerifyConfig, VerifyMethod};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_DERIVATION: i32 = 3;
pub const EXIT_GATE: i32 = 4;
pub const EXIT_DIVERGENCE: i32 = 5;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        Self { code: EXIT_VALIDATION, message: message.into() }
    }

    fn io(e: std::io::Error, path: &Path) -> Self {
        Self { code: EXIT_IO, message: format!("{}: {e}", path.display()) }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<WordsError> for CliError {
    fn from(e: WordsError) -> Self {
        let code = match e {
            WordsError::NonPolynomialPotential(_) | WordsError::ComplexCoefficient(_) => EXIT_VALIDATION,
            WordsError::OrderTooLarge { .. } => EXIT_DERIVATION,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<LabError> for CliError {
    fn from(e: LabError) -> Self {
        let code = match e {
            LabError::Model(_) | LabError::Unsupported(_) | LabError::QuadratureOverflow { .. } | LabError::ProbeTooClose { .. } => EXIT_VALIDATION,
            _ => EXIT_DERIVATION,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<CheckError> for CliError {
    fn from(e: CheckError) -> Self {
        match e {
            CheckError::Lab(l) => l.into(),
            CheckError::ProbeTooClose { .. } => Self::validation(e.to_string()),
            other => Self { code: EXIT_DERIVATION, message: other.to_string() },
        }
    }
}

impl From<CurveError> for CliError {
    fn from(e: CurveError) -> Self {
        let code = match e {
            CurveError::NewtonDivergence { .. } | CurveError::BranchCollision(_) | CurveError::NegativeDensity(_) => EXIT_DIVERGENCE,
            CurveError::Algebra(_) => EXIT_DERIVATION,
            _ => EXIT_VALIDATION,
        };
        Self { code, message: e.to_string() }
    }
}

/// Resolved command context.
pub struct Run {
    pub config: RunConfig,
    pub model: ModelSpec,
    pub seed: Option<u64>,
    pub out: PathBuf,
    pub format: Format,
}

impl Run {
    pub fn write(&self, name: &str, contents: &str) -> Result<(), CliError> {
        fs::create_dir_all(&self.out).map_err(|e| CliError::io(e, &self.out))?;
        let path = self.out.join(name);
        fs::write(&path, contents).map_err(|e| CliError::io(e, &path))
    }

    fn json_only(&self, command: &str) -> Result<(), CliError> {
        if self.format == Format::Csv {
            return Err(CliError::validation(format!("{command} writes json only")));
        }
        Ok(())
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

/// Canonical nonempty words in `M1`, `M2` of length at most `max`.
pub fn canonical_words(max: usize) -> Vec<TraceWord> {
    let mut out = Vec::new();
    for len in 1..=max {
        for bits in 0..(1usize << len) {
            let letters = (0..len).map(|k| if bits >> (len - 1 - k) & 1 == 0 { Letter::M1 } else { Letter::M2 }).collect();
            out.push(TraceWord::new(letters));
        }
    }
    out.sort();
    out.dedup();
    out
}

fn generating_kind(name: &str) -> Result<GeneratingKind, CliError> {
    Ok(match name {
        "B" => GeneratingKind::B,
        "D" => GeneratingKind::D,
        "A" => GeneratingKind::A,
        "main" => GeneratingKind::Main,
        other => match other.strip_prefix("B_").map(str::parse) {
            Some(Ok(k)) => GeneratingKind::Bk(k),
            _ => return Err(CliError::validation(format!("unknown generating kind {other:?}"))),
        },
    })
}

pub fn derive(run: &Run) -> Result<i32, CliError> {
    run.json_only("derive")?;
    let cfg = run.config.derive.clone().unwrap_or(DeriveConfig { words: Vec::new(), max_length: None, vary: vec!["M1".into()], generating: Vec::new() });
    let model: SymbolicModel<BigRational> = SymbolicModel::from_spec(&run.model)?;
    let mut generators: Vec<Vec<Letter>> = Vec::new();
    for w in &cfg.words {
        generators.push(parse_letters(w).map_err(|e| CliError::validation(e.to_string()))?);
    }
    if let Some(max) = cfg.max_length {
        generators.extend(canonical_words(max).iter().map(|w| w.letters().to_vec()));
    }
    let one = BigRational::from_integer(BigInt::from(1));
    let mut reports = Vec::new();
    for letters in generators {
        let g = MatrixPoly::word(one.clone(), letters);
        for v in &cfg.vary {
            let rel = match v.as_str() {
                "M1" => build_loop_equation(&g, &model),
                "M2" => build_m2_loop_equation(&g, &model),
                other => return Err(CliError::validation(format!("cannot vary {other:?}: expected M1 or M2"))),
            };
            reports.push(RelationReport::from(&rel));
        }
    }
    for gen in &cfg.generating {
        let kind = generating_kind(&gen.kind)?;
        for rel in moment_expand_generating(&model, kind, gen.order)? {
            reports.push(RelationReport::from(&rel));
        }
    }
    run.write("relations.json", &to_json(&reports))?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct VerifyOutput<'a> {
    method: VerifyMethod,
    seed: Option<u64>,
    tolerance: f64,
    sigmas: f64,
    pass: bool,
    failing_probes: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    acceptance_rate: Option<f64>,
    warnings: Vec<String>,
    report: &'a ResidualReport,
}

/// A probe passes when `|r| <= tolerance + sigmas * error`.
fn gate(report: &ResidualReport, tolerance: f64, sigmas: f64) -> Vec<usize> {
    report
        .probes
        .iter()
        .enumerate()
        .filter(|(_, p)| !(p.residual.value.norm() <= tolerance + sigmas * p.residual.error))
        .map(|(k, _)| k)
        .collect()
}

pub fn verify(run: &Run) -> Result<i32, CliError> {
    let cfg: VerifyConfig = run.config.verify.clone().ok_or_else(|| CliError::validation("config has no \"verify\" section"))?;
    run.model.validate_numeric().map_err(|e| CliError::validation(e.to_string()))?;
    let (ens, acceptance, warnings) = match cfg.method {
        VerifyMethod::Quadrature => {
            let mut opts = QuadratureOptions { nodes: cfg.nodes, ..QuadratureOptions::default() };
            if let Some(a) = cfg.angle_nodes {
                opts.angle_nodes = a;
            }
            let q = if run.model.is_one_matrix() {
                QuadratureEnsemble::one_matrix(&run.model, opts)?
            } else {
                QuadratureEnsemble::two_matrix(&run.model, opts)?
            };
            (Ensemble::Quadrature(q), None, Vec::new())
        }
        VerifyMethod::Mcmc => {
            let seed = run.seed.ok_or_else(|| CliError::validation("mcmc verification needs a seed (--seed or \"seed\")"))?;
            let steps = cfg.steps.ok_or_else(|| CliError::validation("mcmc verification needs \"steps\""))?;
            if cfg.chains == 0 {
                return Err(CliError::validation("\"chains\" must be at least 1"));
            }
            let mut opts = McmcOptions::default();
            if let Some(t) = cfg.thinning {
                opts.thinning = t;
            }
            if let Some(b) = cfg.burn_in_fraction {
                opts.burn_in_fraction = b;
            }
            if let Some(a) = cfg.target_acceptance {
                opts.target_acceptance = a;
            }
            let seeds: Vec<u64> = (0..cfg.chains as u64).map(|k| seed.wrapping_add(k)).collect();
            let chain = run_chains(&run.model, steps, &seeds, opts)?;
            if chain.configs.len() < JACKKNIFE_BLOCKS {
                return Err(CliError::validation(format!(
                    "{} stored samples cannot fill {JACKKNIFE_BLOCKS} jackknife blocks; raise steps or lower thinning",
                    chain.configs.len()
                )));
            }
            let (rate, warnings) = (chain.acceptance_rate, chain.warnings.clone());
            (Ensemble::Chain(chain), Some(rate), warnings)
        }
    };
    let points = match &cfg.probes {
        Some(list) => probes(list),
        None => default_probes(&ens),
    };
    let report = residual_report(&run.model, &ens, &points)?;
    let failing = gate(&report, cfg.tolerance, cfg.sigmas);
    let out = VerifyOutput {
        method: cfg.method,
        seed: run.seed.filter(|_| cfg.method == VerifyMethod::Mcmc),
        tolerance: cfg.tolerance,
        sigmas: cfg.sigmas,
        pass: failing.is_empty(),
        failing_probes: failing,
        acceptance_rate: acceptance,
        warnings,
        report: &report,
    };
    match run.format {
        Format::Json => run.write("residuals.json", &to_json(&out))?,
        Format::Csv => run.write("residuals.csv", &report.to_csv()?)?,
    }
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    Ok(if out.pass { EXIT_OK } else { EXIT_GATE })
}

fn curve_config(run: &Run) -> CurveConfig {
    run.config.curve.clone().unwrap_or(CurveConfig { mode: CurveMode::Convergent, eps: Vec::new(), samples: 200, tolerance: 1e-6 })
}

fn solve(run: &Run, cfg: &CurveConfig) -> Result<(Vec<SolvedCurve>, bool), CliError> {
    let ansatz = build_ansatz(&run.model)?;
    Ok(match cfg.mode {
        CurveMode::Formal => (vec![solve_formal(&ansatz, &cfg.eps)?], false),
        CurveMode::Convergent => {
            let s = solve_convergent(&ansatz)?;
            (s.solutions, s.multiple)
        }
    })
}

#[derive(Serialize)]
struct FractionCheck {
    cut: (f64, f64),
    requested: f64,
    measured: f64,
    abs_diff: f64,
}

/// Requested fractions summed per cut against `A_k / (2 pi i t)`.
fn fraction_round_trip(curve: &SolvedCurve, locations: &[f64]) -> Result<Vec<FractionCheck>, CliError> {
    let cuts = curve.cuts()?;
    let table = period_table(curve)?;
    let mut requested = vec![0.0; cuts.len()];
    for (&loc, &e) in locations.iter().zip(&curve.eps) {
        let dist = |&(l, r): &(f64, f64)| if loc < l { l - loc } else if loc > r { loc - r } else { 0.0 };
        if let Some(k) = (0..cuts.len()).min_by(|&a, &b| dist(&cuts[a]).total_cmp(&dist(&cuts[b]))) {
            requested[k] += e;
        }
    }
    let norm = Complex64::new(0.0, 2.0 * PI * curve.t());
    Ok(cuts
        .iter()
        .enumerate()
        .map(|(k, &cut)| {
            let label = format!("A{}", k + 1);
            let a = table.iter().find(|p| p.label == label).map(|p| p.value).unwrap_or_default();
            let measured = (a / norm).re;
            FractionCheck { cut, requested: requested[k], measured, abs_diff: (measured - requested[k]).abs() }
        })
        .collect())
}

#[derive(Serialize)]
struct CurveOutput {
    mode: CurveMode,
    multiple: bool,
    solutions: Vec<serde_json::Value>,
}

pub fn solve_curve(run: &Run) -> Result<i32, CliError> {
    run.json_only("solve-curve")?;
    let cfg = curve_config(run);
    let (curves, multiple) = solve(run, &cfg)?;
    let mut solutions = Vec::new();
    let mut pass = true;
    for (k, c) in curves.iter().enumerate() {
        let e = export(c)?;
        let fractions = fraction_round_trip(c, &e.eps_locations)?;
        if cfg.mode == CurveMode::Formal {
            pass &= fractions.iter().all(|f| f.abs_diff <= cfg.tolerance);
        }
        let mut value = serde_json::to_value(&e).expect("export serializes");
        value["fraction_round_trip"] = serde_json::to_value(&fractions).expect("fractions serialize");
        solutions.push(value);
        let name = if k == 0 { "density.csv".to_string() } else { format!("density_{k}.csv") };
        run.write(&name, &c.density_csv(cfg.samples)?)?;
    }
    run.write("curve.json", &to_json(&CurveOutput { mode: cfg.mode, multiple, solutions }))?;
    Ok(if pass { EXIT_OK } else { EXIT_GATE })
}

pub fn residues(run: &Run) -> Result<i32, CliError> {
    run.json_only("residues")?;
    let cfg = curve_config(run);
    let (curves, _) = solve(run, &cfg)?;
    let mut reports = Vec::new();
    let mut pass = true;
    for c in &curves {
        let r = residue_report(c, &run.model)?;
        pass &= r.passes();
        reports.push(r);
    }
    run.write("residues.json", &to_json(&reports))?;
    Ok(if pass { EXIT_OK } else { EXIT_GATE })
}

pub fn duality(run: &Run) -> Result<i32, CliError> {
    run.json_only("duality")?;
    let cfg = curve_config(run);
    let r = duality_check(&run.model, cfg.tolerance)?;
    run.write("duality.json", &to_json(&r))?;
    Ok(if r.pass { EXIT_OK } else { EXIT_GATE })
}
