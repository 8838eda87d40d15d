//! Cut topologies for one-matrix curves: from filling fractions, or by
//! multi-start search for convergent saddles.

use num_complex::Complex64;

use super::hyperelliptic::{solve_topology, Cut, CutConditions, Endpoint, HyperellipticCurve, OneMatrixData};
use super::solver::NewtonOptions;
use super::CurveError;
use crate::algebra::roots;

type C = Complex64;

/// Where a cut may open: around a zero of `V'`, or at a hard edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Candidate {
    Extremum(C),
    Edge(f64),
}

impl Candidate {
    pub fn position(&self) -> f64 {
        match *self {
            Candidate::Extremum(z) => z.re,
            Candidate::Edge(a) => a,
        }
    }
}

fn imag(c: &Candidate) -> f64 {
    match c {
        Candidate::Extremum(z) => z.im,
        Candidate::Edge(_) => 0.0,
    }
}

/// Zeros of `V'` and hard edges, sorted by real then imaginary part.
pub fn candidates(data: &OneMatrixData) -> Vec<Candidate> {
    let mut out: Vec<Candidate> = if data.a.degree().unwrap_or(0) > 0 {
        roots(&data.a.to_complex()).into_iter().map(Candidate::Extremum).collect()
    } else {
        Vec::new()
    };
    out.extend(data.edges.iter().map(|&a| Candidate::Edge(a)));
    out.sort_by(|a, b| a.position().total_cmp(&b.position()).then(imag(a).total_cmp(&imag(b))));
    out
}

fn v_second(data: &OneMatrixData, x: f64) -> f64 {
    let h = 1e-5 * (1.0 + x.abs());
    (data.v_prime(C::new(x + h, 0.0)).re - data.v_prime(C::new(x - h, 0.0)).re) / (2.0 * h)
}

fn domain_of(data: &OneMatrixData, x: f64) -> Option<(f64, f64)> {
    data.domain.iter().copied().find(|&(lo, hi)| x >= lo - 1e-12 && x <= hi + 1e-12)
}

/// Starting cut around a candidate holding mass `eps`.
fn seed_cut(data: &OneMatrixData, cand: Candidate, eps: f64) -> Result<Cut, CurveError> {
    let w = 2.0 * (data.t * eps).sqrt();
    match cand {
        Candidate::Extremum(z) => {
            if z.im.abs() > 1e-9 {
                return Err(CurveError::Unsupported(format!("cut around the complex extremum {z}")));
            }
            let half = 2.0 * (data.t * eps / v_second(data, z.re).abs().max(1e-6)).sqrt();
            let (mut l, mut r) = (z.re - half, z.re + half);
            if let Some((lo, hi)) = domain_of(data, z.re) {
                l = l.max(0.5 * (lo + z.re));
                r = r.min(0.5 * (hi + z.re));
            }
            Ok(Cut { left: Endpoint::Soft(l), right: Endpoint::Soft(r) })
        }
        Candidate::Edge(a) => {
            let (lo, hi) = domain_of(data, a).ok_or_else(|| CurveError::Unsupported(format!("edge {a} outside the contour")))?;
            if (a - lo).abs() < 1e-12 {
                Ok(Cut { left: Endpoint::Hard(a), right: Endpoint::Soft(a + w.min(0.5 * (hi - a))) })
            } else {
                Ok(Cut { left: Endpoint::Soft(a - w.min(0.5 * (a - lo))), right: Endpoint::Hard(a) })
            }
        }
    }
}

/// Topology with one cut per candidate of positive filling fraction.
pub fn topology_from_fractions(data: &OneMatrixData, eps: &[f64]) -> Result<(Vec<Cut>, Vec<f64>), CurveError> {
    let cands = candidates(data);
    if eps.len() != cands.len() {
        return Err(CurveError::InvalidFillingFractions(format!("{} fractions for {} extrema and edges", eps.len(), cands.len())));
    }
    let total: f64 = eps.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(CurveError::InvalidFillingFractions(format!("fractions sum to {total}")));
    }
    if let Some(e) = eps.iter().find(|e| **e < 0.0) {
        return Err(CurveError::InvalidFillingFractions(format!("negative fraction {e}")));
    }
    let mut cuts = Vec::new();
    let mut masses = Vec::new();
    for (c, &e) in cands.iter().zip(eps) {
        if e > 0.0 {
            cuts.push(seed_cut(data, *c, e)?);
            masses.push(e);
        }
    }
    separate(&mut cuts);
    Ok((cuts, masses))
}

/// Shrinks overlapping starting cuts so the endpoints are increasing.
fn separate(cuts: &mut [Cut]) {
    for k in 1..cuts.len() {
        let (r, l) = (cuts[k - 1].right.value(), cuts[k].left.value());
        if r >= l {
            let mid = 0.5 * (cuts[k - 1].left.value().max(r.min(l)) + cuts[k].right.value().min(r.max(l)));
            let gap = 1e-2 * (cuts[k].right.value() - cuts[k - 1].left.value());
            if let Endpoint::Soft(_) = cuts[k - 1].right {
                cuts[k - 1].right = Endpoint::Soft(mid - gap);
            }
            if let Endpoint::Soft(_) = cuts[k].left {
                cuts[k].left = Endpoint::Soft(mid + gap);
            }
        }
    }
}

/// Formal solution with prescribed filling fractions per candidate.
pub fn solve_fractions(data: &OneMatrixData, eps: &[f64], opts: NewtonOptions) -> Result<HyperellipticCurve, CurveError> {
    let (cuts, masses) = topology_from_fractions(data, eps)?;
    solve_topology(data, &cuts, &CutConditions::Masses(masses), opts)
}

/// Filling fraction of every candidate for a solved curve: the mass of the
/// cut containing it, zero otherwise.
pub fn fractions_of(curve: &HyperellipticCurve) -> Vec<f64> {
    let cands = candidates(&curve.data);
    let mut out = vec![0.0; cands.len()];
    for (k, cut) in curve.cuts.iter().enumerate() {
        let (l, r) = (cut.left.value(), cut.right.value());
        let inside: Vec<usize> = (0..cands.len()).filter(|&i| {
            let p = cands[i].position();
            p >= l - 1e-9 && p <= r + 1e-9 && !matches!(cands[i], Candidate::Extremum(z) if z.im.abs() > 1e-9)
        }).collect();
        let mass = curve.cut_mass(k);
        if let Some(&i) = inside.first() {
            // a merged cut carries the whole mass on its first candidate
            out[i] += mass;
        }
    }
    out
}

const DENSITY_SAMPLES: usize = 64;

/// Most negative density value sampled inside the cuts.
pub fn min_density(curve: &HyperellipticCurve) -> f64 {
    let mut worst = f64::INFINITY;
    for (k, cut) in curve.cuts.iter().enumerate() {
        let (l, r) = (cut.left.value(), cut.right.value());
        for i in 1..DENSITY_SAMPLES {
            let x = l + (r - l) * (i as f64 / DENSITY_SAMPLES as f64);
            worst = worst.min(curve.density_at(k, x));
        }
    }
    worst
}

/// Lowest value of the effective potential measured from the nearest cut
/// end, over the gaps and the tails of the contour: `int 2y dx` from the end.
fn min_effective_potential(curve: &HyperellipticCurve) -> f64 {
    let ends = curve.cut_bounds();
    let span = ends.last().unwrap().1 - ends[0].0 + 1.0;
    let mut regions = Vec::new();
    let (lo0, hi0) = curve.data.domain.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &(l, h)| (a.min(l), b.max(h)));
    let left_end = lo0.max(ends[0].0 - 3.0 * span);
    let right_end = hi0.min(ends.last().unwrap().1 + 3.0 * span);
    if left_end < ends[0].0 - 1e-12 {
        regions.push((ends[0].0, left_end));
    }
    if right_end > ends.last().unwrap().1 + 1e-12 {
        regions.push((ends.last().unwrap().1, right_end));
    }
    for w in ends.windows(2) {
        regions.push((w[0].1, w[1].0));
        regions.push((w[1].0, w[0].1));
    }
    let mut worst = f64::INFINITY;
    const STEPS: usize = 400;
    for (a, b) in regions {
        // x = a + (b - a) u^2 absorbs the square-root behaviour at the end
        let mut acc = 0.0;
        let f = |u: f64| {
            let x = a + (b - a) * u * u;
            2.0 * curve.half_y(C::new(x, 0.0)).re * 2.0 * (b - a) * u
        };
        let mut prev = f(0.0);
        for i in 1..=STEPS {
            let u = i as f64 / STEPS as f64;
            let cur = f(u);
            acc += 0.5 * (prev + cur) / STEPS as f64;
            prev = cur;
            // direction of travel: potential measured outward from the cut
            worst = worst.min(acc);
        }
    }
    worst
}

/// Saddles with positive density and a confining effective potential.
#[derive(Debug, Clone)]
pub struct ConvergentSearch {
    pub solutions: Vec<HyperellipticCurve>,
    pub multiple: bool,
}

fn non_empty_subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u32..(1 << n)).map(move |mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
}

/// Multi-start search over cut topologies with real periods set to zero.
pub fn search_convergent(data: &OneMatrixData, opts: NewtonOptions) -> Result<ConvergentSearch, CurveError> {
    let cands: Vec<Candidate> = candidates(data)
        .into_iter()
        .filter(|c| match *c {
            Candidate::Extremum(z) => z.im.abs() < 1e-9 && v_second(data, z.re) > 0.0 && domain_of(data, z.re).is_some(),
            Candidate::Edge(_) => true,
        })
        .collect();
    if cands.len() > 12 {
        return Err(CurveError::Unsupported(format!("{} starting points", cands.len())));
    }
    let mut starts: Vec<Vec<Cut>> = Vec::new();
    for subset in non_empty_subsets(cands.len()) {
        let eps = 1.0 / subset.len() as f64;
        let mut cuts = Vec::new();
        for &i in &subset {
            match seed_cut(data, cands[i], eps) {
                Ok(c) => cuts.push(c),
                Err(_) => break,
            }
        }
        if cuts.len() == subset.len() {
            separate(&mut cuts);
            starts.push(cuts);
        }
    }
    // one cut across all minima
    let minima: Vec<f64> = cands.iter().filter_map(|c| match c {
        Candidate::Extremum(z) => Some(z.re),
        _ => None,
    }).collect();
    if minima.len() > 1 {
        let (l, r) = (minima[0], *minima.last().unwrap());
        let pad = 0.5 * (r - l) + 2.0 * data.t.sqrt();
        let (mut lo, mut hi) = (l - pad, r + pad);
        if let Some((a, b)) = domain_of(data, l) {
            lo = lo.max(0.5 * (a + l));
            hi = hi.min(if b.is_finite() { 0.5 * (b + r) } else { hi });
        }
        starts.push(vec![Cut { left: Endpoint::Soft(lo), right: Endpoint::Soft(hi) }]);
    }
    let mut solutions: Vec<HyperellipticCurve> = Vec::new();
    let mut last_err = CurveError::NewtonDivergence { iterations: 0, residual: f64::INFINITY };
    for cuts in starts {
        match solve_topology(data, &cuts, &CutConditions::RealPeriods, opts) {
            Ok(curve) => {
                if !admissible(&curve) {
                    continue;
                }
                let ends = curve.endpoints();
                if !solutions.iter().any(|s| same_endpoints(&s.endpoints(), &ends)) {
                    solutions.push(curve);
                }
            }
            Err(e) => last_err = e,
        }
    }
    if solutions.is_empty() {
        return Err(last_err);
    }
    solutions.sort_by(|a, b| a.cuts.len().cmp(&b.cuts.len()).then(a.endpoints()[0].total_cmp(&b.endpoints()[0])));
    Ok(ConvergentSearch { multiple: solutions.len() > 1, solutions })
}

fn same_endpoints(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-6 * (1.0 + x.abs()))
}

fn admissible(curve: &HyperellipticCurve) -> bool {
    let inside = curve.cut_bounds().iter().all(|&(l, r)| {
        curve.data.domain.iter().any(|&(lo, hi)| l >= lo - 1e-9 && r <= hi + 1e-9)
    });
    let scale = curve.data.t.max(1e-12);
    inside && min_density(curve) > -1e-9 && min_effective_potential(curve) > -1e-7 * scale
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::RationalFunction;
    use crate::model::{real_poly, ModelSpec};

    fn double_well(t: f64) -> OneMatrixData {
        // V = x^4/4 - x^2/2
        OneMatrixData::new(&ModelSpec::one_matrix(RationalFunction::polynomial(real_poly(&[0.0, -1.0, 0.0, 1.0])), t, 1)).unwrap()
    }

    #[test]
    fn fractions_are_validated() {
        let d = double_well(0.1);
        assert!(matches!(topology_from_fractions(&d, &[0.5, 0.5]), Err(CurveError::InvalidFillingFractions(_))));
        assert!(matches!(topology_from_fractions(&d, &[0.6, 0.0, 0.6]), Err(CurveError::InvalidFillingFractions(_))));
    }

    #[test]
    fn symmetric_two_cut_masses() {
        let c = solve_fractions(&double_well(0.1), &[0.5, 0.0, 0.5], NewtonOptions::default()).unwrap();
        assert_eq!(c.cuts.len(), 2);
        assert!((c.cut_mass(0) - 0.5).abs() < 1e-10 && (c.cut_mass(1) - 0.5).abs() < 1e-10);
        let e = c.endpoints();
        assert!((e[0] + e[3]).abs() < 1e-8 && (e[1] + e[2]).abs() < 1e-8);
    }

    #[test]
    fn merged_cut_for_shallow_wells() {
        let s = search_convergent(&double_well(1.0), NewtonOptions::default()).unwrap();
        assert_eq!(s.solutions[0].cuts.len(), 1);
        assert!(!s.multiple);
    }
}
