//! Run configuration: a single JSON document with `"schema": 1`.

use loopcurve::algebra::{ComplexRepr, RationalRepr};
use loopcurve::model::{ContourSegment, ModelSpec};
use loopcurve::{Complex64, Rational};
use serde::{Deserialize, Serialize};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: u32,
    pub model: ModelConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derive: Option<DeriveConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<CurveConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    /// Potential `V` of one matrix; `M2` is integrated out as a Gaussian.
    OneMatrix {
        v_prime: RationalRepr,
        t: f64,
        n: usize,
        #[serde(default = "real_line")]
        contours: Vec<ContourConfig>,
    },
    TwoMatrix {
        v1_prime: RationalRepr,
        v2_prime: RationalRepr,
        t: f64,
        n: usize,
        #[serde(default = "real_line")]
        contours1: Vec<ContourConfig>,
        #[serde(default = "real_line")]
        contours2: Vec<ContourConfig>,
    },
}

fn real_line() -> Vec<ContourConfig> {
    vec![ContourConfig::RealLine { nodes: None }]
}

/// Real integration paths. Endpoints other than `+-inf` are hard edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ContourConfig {
    RealLine {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        nodes: Option<usize>,
    },
    Interval {
        a: f64,
        b: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        nodes: Option<usize>,
    },
    HalfLine {
        a: f64,
        upward: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        nodes: Option<usize>,
    },
}

impl ContourConfig {
    fn segment(&self) -> ContourSegment {
        let (seg, nodes) = match *self {
            ContourConfig::RealLine { nodes } => (ContourSegment::real_line(), nodes),
            ContourConfig::Interval { a, b, nodes } => (ContourSegment::interval(a, b), nodes),
            ContourConfig::HalfLine { a, upward, nodes } => (ContourSegment::half_line(a, upward), nodes),
        };
        match nodes {
            Some(n) => seg.with_nodes(n),
            None => seg,
        }
    }
}

fn segments(c: &[ContourConfig]) -> Vec<ContourSegment> {
    c.iter().map(ContourConfig::segment).collect()
}

impl ModelConfig {
    pub fn to_model(&self) -> Result<ModelSpec, String> {
        let rational = |r: &RationalRepr, name: &str| -> Result<Rational, String> { r.to_rational().map_err(|e| format!("{name}: {e}")) };
        let model = match self {
            ModelConfig::OneMatrix { v_prime, t, n, contours } => {
                ModelSpec::one_matrix(rational(v_prime, "v_prime")?, *t, *n).with_contours1(segments(contours))
            }
            ModelConfig::TwoMatrix { v1_prime, v2_prime, t, n, contours1, contours2 } => {
                let m = ModelSpec {
                    v1_prime: rational(v1_prime, "v1_prime")?,
                    v2_prime: rational(v2_prime, "v2_prime")?,
                    t: *t,
                    n: *n,
                    contours1: Vec::new(),
                    contours2: Vec::new(),
                    hard_edges_x: Vec::new(),
                    hard_edges_y: Vec::new(),
                    kappa: vec![vec![1.0]],
                };
                m.with_contours1(segments(contours1)).with_contours2(segments(contours2))
            }
        };
        model.validate().map_err(|e| e.to_string())?;
        Ok(model)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeriveConfig {
    /// Explicit generators `g` as letter strings (`"12"` for `M1 M2`).
    #[serde(default)]
    pub words: Vec<String>,
    /// Adds every canonical nonempty word up to this length.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_length: Option<usize>,
    /// Matrices to vary: `"M1"`, `"M2"`.
    #[serde(default = "default_vary")]
    pub vary: Vec<String>,
    #[serde(default)]
    pub generating: Vec<GeneratingConfig>,
}

fn default_vary() -> Vec<String> {
    vec!["M1".into()]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratingConfig {
    /// `B`, `B_k`, `D`, `A` or `main`.
    pub kind: String,
    pub order: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyMethod {
    Quadrature,
    Mcmc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub method: VerifyMethod,
    /// Defaults to imaginary-axis probes scaled by the support radius.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probes: Option<Vec<ComplexRepr>>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_sigmas")]
    pub sigmas: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle_nodes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default = "one")]
    pub chains: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thinning: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub burn_in_fraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_acceptance: Option<f64>,
}

fn default_tolerance() -> f64 {
    1e-6
}

fn default_sigmas() -> f64 {
    3.0
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveMode {
    Formal,
    Convergent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveConfig {
    pub mode: CurveMode,
    /// Filling fractions, one per zero of `V'` or hard edge (formal mode).
    #[serde(default)]
    pub eps: Vec<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_samples() -> usize {
    200
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| format!("config: {e}"))?;
        if cfg.schema != SCHEMA {
            return Err(format!("config: unsupported schema {}, expected {SCHEMA}", cfg.schema));
        }
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

pub fn probes(list: &[ComplexRepr]) -> Vec<Complex64> {
    list.iter().map(|&c| c.into()).collect()
}
