//! Expectation values over a quadrature rule or a Markov chain, with error
//! propagation through arbitrary functions of the means.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::Config;
use super::mcmc::SampleChain;
use super::quadrature::QuadratureEnsemble;

/// Value with a one-sigma (or refinement) error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
}

impl Estimate {
    pub fn exact(value: Complex64) -> Self {
        Self { value, error: 0.0 }
    }

    /// `|value| / error`, infinite for a nonzero exact value.
    pub fn sigmas(&self) -> f64 {
        if self.error > 0.0 {
            self.value.norm() / self.error
        } else if self.value.norm() == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorModel {
    /// Replica is the same integral at half the node count.
    Refinement,
    /// Replicas are leave-one-block-out means.
    Jackknife,
}

/// Means of a vector of observables plus the replicas needed to propagate
/// errors through nonlinear functions.
#[derive(Debug, Clone)]
pub struct Means {
    pub values: Vec<Complex64>,
    replicas: Vec<Vec<Complex64>>,
    model: ErrorModel,
}

impl Means {
    pub fn new(values: Vec<Complex64>, replicas: Vec<Vec<Complex64>>, model: ErrorModel) -> Self {
        Self { values, replicas, model }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn error_model(&self) -> ErrorModel {
        self.model
    }

    pub fn get(&self, i: usize) -> Estimate {
        self.combine(|v| v[i])
    }

    /// `f(means)` with its propagated error.
    pub fn combine(&self, f: impl Fn(&[Complex64]) -> Complex64) -> Estimate {
        let value = f(&self.values);
        let error = match self.model {
            ErrorModel::Refinement => self.replicas.iter().map(|r| (f(r) - value).norm()).fold(0.0, f64::max),
            ErrorModel::Jackknife => {
                let b = self.replicas.len() as f64;
                let reps: Vec<Complex64> = self.replicas.iter().map(|r| f(r)).collect();
                let mean = reps.iter().sum::<Complex64>() / b;
                ((b - 1.0) / b * reps.iter().map(|r| (r - mean).norm_sqr()).sum::<f64>()).sqrt()
            }
        };
        Estimate { value, error }
    }

    /// Component-wise combination producing several outputs at once.
    pub fn combine_many(&self, k: usize, f: impl Fn(&[Complex64], &mut [Complex64])) -> Vec<Estimate> {
        let mut value = vec![Complex64::new(0.0, 0.0); k];
        f(&self.values, &mut value);
        let mut reps = vec![vec![Complex64::new(0.0, 0.0); k]; self.replicas.len()];
        for (r, out) in self.replicas.iter().zip(reps.iter_mut()) {
            f(r, out);
        }
        (0..k)
            .map(|i| {
                let error = match self.model {
                    ErrorModel::Refinement => reps.iter().map(|r| (r[i] - value[i]).norm()).fold(0.0, f64::max),
                    ErrorModel::Jackknife => {
                        let b = reps.len() as f64;
                        let mean = reps.iter().map(|r| r[i]).sum::<Complex64>() / b;
                        ((b - 1.0) / b * reps.iter().map(|r| (r[i] - mean).norm_sqr()).sum::<f64>()).sqrt()
                    }
                };
                Estimate { value: value[i], error }
            })
            .collect()
    }
}

/// Source of configurations: a quadrature rule or a sampled chain.
#[derive(Debug, Clone)]
pub enum Ensemble {
    Quadrature(QuadratureEnsemble),
    Chain(SampleChain),
}

impl Ensemble {
    pub fn n(&self) -> usize {
        match self {
            Self::Quadrature(q) => q.n(),
            Self::Chain(c) => c.n,
        }
    }

    pub fn t(&self) -> f64 {
        match self {
            Self::Quadrature(q) => q.t(),
            Self::Chain(c) => c.t,
        }
    }

    pub fn has_m2(&self) -> bool {
        match self {
            Self::Quadrature(q) => q.has_m2(),
            Self::Chain(c) => c.configs.first().is_some_and(Config::has_m2),
        }
    }

    pub fn source(&self) -> &'static str {
        match self {
            Self::Quadrature(_) => "quadrature",
            Self::Chain(_) => "mcmc",
        }
    }

    /// Means of `k` observables written by `f` for each configuration.
    pub fn means<F>(&self, k: usize, f: F) -> Means
    where
        F: Fn(&Config, &mut [Complex64]) + Sync,
    {
        match self {
            Self::Quadrature(q) => q.means(k, f),
            Self::Chain(c) => jackknife_means(&c.configs, k, JACKKNIFE_BLOCKS, f),
        }
    }
}

pub const JACKKNIFE_BLOCKS: usize = 50;

/// Block means with leave-one-block-out replicas.
pub fn jackknife_means<F>(configs: &[Config], k: usize, blocks: usize, f: F) -> Means
where
    F: Fn(&Config, &mut [Complex64]) + Sync,
{
    let len = configs.len();
    assert!(len >= blocks, "{len} samples cannot fill {blocks} jackknife blocks");
    let sums: Vec<(Vec<Complex64>, usize)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let (lo, hi) = (b * len / blocks, (b + 1) * len / blocks);
            let mut acc = vec![Complex64::new(0.0, 0.0); k];
            let mut buf = vec![Complex64::new(0.0, 0.0); k];
            for cfg in &configs[lo..hi] {
                f(cfg, &mut buf);
                for (a, v) in acc.iter_mut().zip(&buf) {
                    *a += v;
                }
            }
            (acc, hi - lo)
        })
        .collect();
    let mut total = vec![Complex64::new(0.0, 0.0); k];
    for (s, _) in &sums {
        for (t, v) in total.iter_mut().zip(s) {
            *t += v;
        }
    }
    let values: Vec<Complex64> = total.iter().map(|t| t / len as f64).collect();
    let replicas = sums
        .iter()
        .map(|(s, m)| {
            let rest = (len - m) as f64;
            total.iter().zip(s).map(|(t, v)| (t - v) / rest).collect()
        })
        .collect();
    Means::new(values, replicas, ErrorModel::Jackknife)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jackknife_of_linear_function_is_standard_error() {
        let configs: Vec<Config> = (0..1000).map(|i| Config::one_matrix(vec![((i * 7919) % 1000) as f64 / 1000.0])).collect();
        let m = jackknife_means(&configs, 1, 50, |c, out| out[0] = Complex64::new(c.x[0], 0.0));
        let est = m.get(0);
        assert!((est.value.re - 0.4995).abs() < 1e-12);
        // block means of a permuted uniform grid: error near sigma/sqrt(n)
        let naive = (1.0f64 / 12.0 / 1000.0).sqrt();
        assert!(est.error > 0.3 * naive && est.error < 3.0 * naive, "{} vs {naive}", est.error);
    }

    #[test]
    fn combine_propagates_through_products() {
        let m = Means::new(vec![Complex64::new(2.0, 0.0)], vec![vec![Complex64::new(2.1, 0.0)]], ErrorModel::Refinement);
        let e = m.combine(|v| v[0] * v[0]);
        assert!((e.error - 0.41).abs() < 1e-12);
    }
}
