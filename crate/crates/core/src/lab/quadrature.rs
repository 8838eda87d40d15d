//! Nested composite Gauss-Legendre quadrature over eigenvalues (and the
//! relative angle at N = 2).

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::config::Config;
use super::ensemble::{ErrorModel, Means};
use super::potential::{cutoffs, Domain, Weight};
use super::LabError;
use crate::model::ModelSpec;

const PANEL: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    /// Nodes per interval on the coarse grid; the fine grid doubles it.
    /// `None` takes the largest `node_count` of the model's segments
    /// (16 for the five-dimensional N = 2 two-matrix rule).
    pub nodes: Option<usize>,
    pub angle_nodes: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self { nodes: None, angle_nodes: 16 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    OneMatrix,
    TwoMatrixN1,
    TwoMatrixN2,
}

#[derive(Debug, Clone)]
pub struct QuadratureEnsemble {
    layout: Layout,
    n: usize,
    t: f64,
    w1: Weight,
    w2: Option<Weight>,
    ranges1: Vec<(f64, f64)>,
    ranges2: Vec<(f64, f64)>,
    nodes: usize,
    angle_nodes: usize,
}

/// Composite rule on a union of intervals: nodes and `ln(weight)`.
pub fn composite_rule(ranges: &[(f64, f64)], m: usize) -> (Vec<f64>, Vec<f64>) {
    let panels = m.div_ceil(PANEL).max(1);
    let per = m.div_ceil(panels).max(1);
    let rule = GaussLegendre::new(NonZeroUsize::new(per).unwrap());
    let mut xs = Vec::new();
    let mut lw = Vec::new();
    for &(lo, hi) in ranges {
        let h = (hi - lo) / panels as f64;
        for p in 0..panels {
            let a = lo + h * p as f64;
            for &(node, weight) in rule.as_node_weight_pairs() {
                xs.push(a + 0.5 * h * (node + 1.0));
                lw.push((0.5 * h * weight).ln());
            }
        }
    }
    (xs, lw)
}

impl QuadratureEnsemble {
    /// Eigenvalue integral of the one-matrix model, `N <= 3`.
    pub fn one_matrix(model: &ModelSpec, opts: QuadratureOptions) -> Result<Self, LabError> {
        model.validate_numeric()?;
        if model.n > 3 {
            return Err(LabError::QuadratureOverflow { n: model.n, max: 3 });
        }
        let w1 = Weight::new(&model.one_matrix_v_prime(), model.n, model.t, Domain::from_contours(&model.contours1)?)?;
        let cut = cutoffs(&w1, None)?;
        let ranges1 = w1.domain.truncated(cut[0].0, cut[0].1);
        let nodes = opts.nodes.unwrap_or_else(|| max_nodes(model));
        Ok(Self { layout: Layout::OneMatrix, n: model.n, t: model.t, w1, w2: None, ranges1, ranges2: Vec::new(), nodes, angle_nodes: opts.angle_nodes })
    }

    /// Eigenvalue and angle integral of the two-matrix model, `N <= 2`.
    pub fn two_matrix(model: &ModelSpec, opts: QuadratureOptions) -> Result<Self, LabError> {
        model.validate_numeric()?;
        let layout = match model.n {
            1 => Layout::TwoMatrixN1,
            2 => Layout::TwoMatrixN2,
            n => return Err(LabError::QuadratureOverflow { n, max: 2 }),
        };
        let w1 = Weight::new(&model.v1_prime, model.n, model.t, Domain::from_contours(&model.contours1)?)?;
        let w2 = Weight::new(&model.v2_prime, model.n, model.t, Domain::from_contours(&model.contours2)?)?;
        let cut = cutoffs(&w1, Some(&w2))?;
        let ranges1 = w1.domain.truncated(cut[0].0, cut[0].1);
        let ranges2 = w2.domain.truncated(cut[1].0, cut[1].1);
        let nodes = opts.nodes.unwrap_or(if layout == Layout::TwoMatrixN2 { 16 } else { max_nodes(model) });
        Ok(Self { layout, n: model.n, t: model.t, w1, w2: Some(w2), ranges1, ranges2, nodes, angle_nodes: opts.angle_nodes })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn has_m2(&self) -> bool {
        self.layout != Layout::OneMatrix
    }

    /// Truncated integration ranges for `M1` and `M2`.
    pub fn ranges(&self) -> (&[(f64, f64)], &[(f64, f64)]) {
        (&self.ranges1, &self.ranges2)
    }

    /// Fine-grid means with the coarse grid as refinement replica.
    pub fn means<F>(&self, k: usize, f: F) -> Means
    where
        F: Fn(&Config, &mut [Complex64]) + Sync,
    {
        let fine = self.integrate(2 * self.nodes, 2 * self.angle_nodes, k, &f);
        let coarse = self.integrate(self.nodes, self.angle_nodes, k, &f);
        Means::new(fine, vec![coarse], ErrorModel::Refinement)
    }

    fn integrate<F>(&self, m: usize, m_angle: usize, k: usize, f: &F) -> Vec<Complex64>
    where
        F: Fn(&Config, &mut [Complex64]) + Sync,
    {
        let (xs, lx) = composite_rule(&self.ranges1, m);
        let lx: Vec<f64> = xs.iter().zip(&lx).map(|(&x, &l)| l + self.w1.log(x)).collect();
        let (ys, ly) = match &self.w2 {
            Some(w2) => {
                let (ys, ly) = composite_rule(&self.ranges2, m);
                let ly = ys.iter().zip(&ly).map(|(&y, &l)| l + w2.log(y)).collect();
                (ys, ly)
            }
            None => (Vec::new(), Vec::new()),
        };
        let (cs, lc) = composite_rule(&[(0.0, 1.0)], m_angle);
        let scale = self.n as f64 / self.t;
        let peak = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (px, py) = (peak(&lx), if ys.is_empty() { 0.0 } else { peak(&ly) });

        let mut axes: Vec<usize> = Vec::new();
        let reference;
        match self.layout {
            Layout::OneMatrix => {
                axes.extend(std::iter::repeat_n(xs.len(), self.n));
                reference = px * self.n as f64;
            }
            Layout::TwoMatrixN1 => {
                axes.extend([xs.len(), ys.len()]);
                reference = px + py;
            }
            Layout::TwoMatrixN2 => {
                axes.extend([xs.len(), xs.len(), ys.len(), ys.len(), cs.len()]);
                reference = 2.0 * (px + py);
            }
        }

        let layout = self.layout;
        let n = self.n;
        let partial: Vec<(Vec<Complex64>, f64)> = (0..axes[0])
            .into_par_iter()
            .map(|first| {
                let mut cfg = match layout {
                    Layout::OneMatrix => Config::one_matrix(vec![0.0; n]),
                    _ => Config::two_matrix(vec![0.0; n], vec![0.0; n], DMatrix::identity(n, n)),
                };
                let mut acc = vec![Complex64::new(0.0, 0.0); k];
                let mut buf = vec![Complex64::new(0.0, 0.0); k];
                let mut z = 0.0;
                let mut idx = vec![0usize; axes.len()];
                idx[0] = first;
                loop {
                    let logw = match layout {
                        Layout::OneMatrix => {
                            let mut l = 0.0;
                            for a in 0..n {
                                cfg.x[a] = xs[idx[a]];
                                l += lx[idx[a]];
                            }
                            for a in 0..n {
                                for b in 0..a {
                                    l += 2.0 * (cfg.x[a] - cfg.x[b]).abs().ln();
                                }
                            }
                            l
                        }
                        Layout::TwoMatrixN1 => {
                            cfg.x[0] = xs[idx[0]];
                            cfg.y[0] = ys[idx[1]];
                            lx[idx[0]] + ly[idx[1]] + scale * cfg.x[0] * cfg.y[0]
                        }
                        Layout::TwoMatrixN2 => {
                            let (x1, x2, y1, y2, c) = (xs[idx[0]], xs[idx[1]], ys[idx[2]], ys[idx[3]], cs[idx[4]]);
                            cfg.x[0] = x1;
                            cfg.x[1] = x2;
                            cfg.y[0] = y1;
                            cfg.y[1] = y2;
                            let (a, b) = (c.sqrt(), (1.0 - c).sqrt());
                            cfg.u[(0, 0)] = Complex64::new(a, 0.0);
                            cfg.u[(0, 1)] = Complex64::new(b, 0.0);
                            cfg.u[(1, 0)] = Complex64::new(-b, 0.0);
                            cfg.u[(1, 1)] = Complex64::new(a, 0.0);
                            lx[idx[0]] + lx[idx[1]] + ly[idx[2]] + ly[idx[3]] + lc[idx[4]]
                                + 2.0 * (x1 - x2).abs().ln()
                                + 2.0 * (y1 - y2).abs().ln()
                                + scale * (c * (x1 * y1 + x2 * y2) + (1.0 - c) * (x1 * y2 + x2 * y1))
                        }
                    };
                    let w = (logw - reference).exp();
                    if w > 0.0 && w.is_finite() {
                        f(&cfg, &mut buf);
                        for (a, v) in acc.iter_mut().zip(&buf) {
                            *a += v * w;
                        }
                        z += w;
                    }
                    // odometer over all axes but the first
                    let mut d = axes.len() - 1;
                    loop {
                        if d == 0 {
                            return (acc, z);
                        }
                        idx[d] += 1;
                        if idx[d] < axes[d] {
                            break;
                        }
                        idx[d] = 0;
                        d -= 1;
                    }
                }
            })
            .collect();
        let z: f64 = partial.iter().map(|p| p.1).sum();
        let mut out = vec![Complex64::new(0.0, 0.0); k];
        for (acc, _) in &partial {
            for (o, a) in out.iter_mut().zip(acc) {
                *o += a;
            }
        }
        out.iter().map(|v| v / z).collect()
    }
}

fn max_nodes(model: &ModelSpec) -> usize {
    model.contours1.iter().chain(&model.contours2).map(|s| s.node_count).max().unwrap_or(crate::model::DEFAULT_NODES)
}
