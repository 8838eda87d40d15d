//! Solved curves behind one interface, and the formal/convergent drivers.

use num_complex::Complex64;
use serde::Serialize;

use super::ansatz::{AnsatzKind, CurveAnsatz};
use super::genus0::RationalCurve;
use super::hyperelliptic::{solve_topology, Cut, CutConditions, HyperellipticCurve, OneMatrixData};
use super::solver::NewtonOptions;
use super::topology::{candidates, fractions_of, min_density, search_convergent, solve_fractions};
use super::CurveError;

type C = Complex64;

const NEGATIVE_DENSITY: f64 = -1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SolveMode {
    Formal,
    Convergent,
}

#[derive(Debug, Clone)]
pub enum CurveKind {
    Hyperelliptic(HyperellipticCurve),
    Rational(RationalCurve),
}

#[derive(Debug, Clone)]
pub struct SolvedCurve {
    pub ansatz: CurveAnsatz,
    pub kind: CurveKind,
    pub mode: SolveMode,
    /// Filling fractions per candidate location.
    pub eps: Vec<f64>,
}

/// All convergent solutions found; `multiple` when more than one survives.
#[derive(Debug, Clone)]
pub struct ConvergentSolutions {
    pub solutions: Vec<SolvedCurve>,
    pub multiple: bool,
}

impl SolvedCurve {
    pub fn t(&self) -> f64 {
        self.ansatz.model.t
    }

    /// `Y(x)` on the physical sheet.
    pub fn y(&self, x: C) -> Result<C, CurveError> {
        match &self.kind {
            CurveKind::Hyperelliptic(h) => Ok(h.y(x)),
            CurveKind::Rational(r) => r.y(x),
        }
    }

    /// `W(x) = V'1(x) - Y(x)`.
    pub fn w(&self, x: C) -> Result<C, CurveError> {
        match &self.kind {
            CurveKind::Hyperelliptic(h) => Ok(h.w(x)),
            CurveKind::Rational(r) => r.w(x),
        }
    }

    pub fn e(&self, x: C, y: C) -> Result<C, CurveError> {
        match &self.kind {
            CurveKind::Hyperelliptic(h) => h.e(x, y),
            CurveKind::Rational(r) => Ok(r.e(x, y)),
        }
    }

    pub fn cuts(&self) -> Result<Vec<(f64, f64)>, CurveError> {
        match &self.kind {
            CurveKind::Hyperelliptic(h) => Ok(h.cut_bounds()),
            CurveKind::Rational(r) => Ok(vec![r.cut()?]),
        }
    }

    /// Branch points of `Y` on the physical sheet.
    pub fn branch_points(&self) -> Vec<C> {
        match &self.kind {
            CurveKind::Hyperelliptic(h) => h.endpoints().into_iter().map(|e| C::new(e, 0.0)).collect(),
            CurveKind::Rational(r) => r.critical_points().into_iter().map(|z| r.x_of_z(z)).collect(),
        }
    }

    /// Points `Y` is not analytic at: branch points and poles of `V'`.
    pub fn singular_points(&self) -> Vec<C> {
        let mut out = self.branch_points();
        if let CurveKind::Hyperelliptic(h) = &self.kind {
            out.extend(h.data.poles.iter().copied());
        }
        out
    }

    pub fn density_at(&self, x: f64) -> Result<f64, CurveError> {
        match &self.kind {
            CurveKind::Hyperelliptic(h) => {
                let k = h.cut_bounds().iter().position(|&(l, r)| x > l && x < r);
                Ok(k.map(|k| h.density_at(k, x)).unwrap_or(0.0))
            }
            CurveKind::Rational(r) => {
                let (l, rr) = r.cut()?;
                if x > l && x < rr {
                    r.density_at(x)
                } else {
                    Ok(0.0)
                }
            }
        }
    }

    /// `int rho f` over the whole support.
    pub fn moment(&self, f: impl Fn(f64) -> f64 + Copy) -> Result<f64, CurveError> {
        match &self.kind {
            CurveKind::Hyperelliptic(h) => Ok(h.moment(f)),
            CurveKind::Rational(r) => r.moment(f),
        }
    }

    /// `(x, rho(x))` at `samples` interior points of cut `cut`.
    pub fn density(&self, cut: usize, samples: usize) -> Result<Vec<(f64, f64)>, CurveError> {
        let cuts = self.cuts()?;
        let &(l, r) = cuts.get(cut).ok_or_else(|| CurveError::Unsupported(format!("no cut {cut}")))?;
        let mut out = Vec::with_capacity(samples);
        for i in 0..samples {
            // Chebyshev-like clustering resolves the edges
            let u = (i as f64 + 0.5) / samples as f64;
            let x = 0.5 * (l + r) - 0.5 * (r - l) * (std::f64::consts::PI * u).cos();
            let rho = self.density_at(x)?;
            if rho < NEGATIVE_DENSITY {
                return Err(CurveError::NegativeDensity(rho));
            }
            out.push((x, rho));
        }
        Ok(out)
    }

    /// `(x, rho)` table over every cut, as CSV.
    pub fn density_csv(&self, samples: usize) -> Result<String, CurveError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CurveError::Unsupported(e.to_string());
        w.write_record(["x", "rho"]).map_err(io)?;
        for k in 0..self.cuts()?.len() {
            for (x, rho) in self.density(k, samples)? {
                w.write_record([x.to_string(), rho.to_string()]).map_err(io)?;
            }
        }
        let bytes = w.into_inner().map_err(|e| CurveError::Unsupported(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }

    /// Solved unknowns: cut endpoints and `h` for one-matrix curves,
    /// `(g, a_k, b_k)` and `P` for two-matrix ones.
    pub fn coefficients(&self) -> Vec<(String, f64)> {
        match &self.kind {
            CurveKind::Hyperelliptic(h) => h.h.coeffs().iter().enumerate().map(|(k, c)| (format!("h_{k}"), *c)).collect(),
            CurveKind::Rational(r) => {
                let mut out = vec![("gamma".to_string(), r.gamma)];
                out.extend(r.alpha.iter().enumerate().map(|(k, a)| (format!("alpha_{k}"), *a)));
                out.extend(r.beta.iter().enumerate().map(|(k, b)| (format!("beta_{k}"), *b)));
                for (i, row) in r.p.iter().enumerate() {
                    out.extend(row.iter().enumerate().map(|(j, p)| (format!("p_{i}_{j}"), *p)));
                }
                out
            }
        }
    }
}

fn one_matrix_data(ansatz: &CurveAnsatz) -> Result<OneMatrixData, CurveError> {
    OneMatrixData::new(&ansatz.model)
}

fn hyper(ansatz: &CurveAnsatz, curve: HyperellipticCurve, mode: SolveMode) -> SolvedCurve {
    let eps = fractions_of(&curve);
    SolvedCurve { ansatz: ansatz.clone(), kind: CurveKind::Hyperelliptic(curve), mode, eps }
}

fn check_balanced(ansatz: &CurveAnsatz) -> Result<(), CurveError> {
    if !ansatz.is_balanced() {
        return Err(CurveError::ConditionCountMismatch { free: ansatz.free_count(), conditions: ansatz.conditions });
    }
    Ok(())
}

fn rational(ansatz: &CurveAnsatz, index: usize, mode: SolveMode, opts: NewtonOptions) -> Result<SolvedCurve, CurveError> {
    let (x0, y0) = ansatz.extrema[index];
    if x0.im.abs() > 1e-9 || y0.im.abs() > 1e-9 {
        return Err(CurveError::Unsupported(format!("complex extremum {x0}")));
    }
    let r = RationalCurve::solve(&ansatz.model, x0.re, y0.re, opts)?;
    let mut eps = vec![0.0; ansatz.extrema.len()];
    eps[index] = 1.0;
    Ok(SolvedCurve { ansatz: ansatz.clone(), kind: CurveKind::Rational(r), mode, eps })
}

/// Solution with prescribed filling fractions.
pub fn solve_formal(ansatz: &CurveAnsatz, eps: &[f64]) -> Result<SolvedCurve, CurveError> {
    solve_formal_with(ansatz, eps, NewtonOptions::default())
}

pub fn solve_formal_with(ansatz: &CurveAnsatz, eps: &[f64], opts: NewtonOptions) -> Result<SolvedCurve, CurveError> {
    check_balanced(ansatz)?;
    match ansatz.kind {
        AnsatzKind::OneMatrix => {
            let curve = solve_fractions(&one_matrix_data(ansatz)?, eps, opts)?;
            Ok(hyper(ansatz, curve, SolveMode::Formal))
        }
        AnsatzKind::TwoMatrix => {
            if eps.len() != ansatz.extrema.len() {
                return Err(CurveError::InvalidFillingFractions(format!("{} fractions for {} extrema", eps.len(), ansatz.extrema.len())));
            }
            let filled: Vec<usize> = (0..eps.len()).filter(|&i| eps[i] != 0.0).collect();
            if filled.len() != 1 || (eps[filled[0]] - 1.0).abs() > 1e-9 {
                return Err(CurveError::Unsupported("two-matrix curves are solved for one filled extremum".into()));
            }
            rational(ansatz, filled[0], SolveMode::Formal, opts)
        }
        AnsatzKind::TwoMatrixWithEdges => Err(CurveError::Unsupported("two-matrix curves with hard edges".into())),
    }
}

/// One-matrix curve with an explicit cut topology.
pub fn solve_with_topology(ansatz: &CurveAnsatz, cuts: &[Cut], conditions: &CutConditions) -> Result<SolvedCurve, CurveError> {
    if ansatz.kind != AnsatzKind::OneMatrix {
        return Err(CurveError::Unsupported("explicit cuts need a one-matrix model".into()));
    }
    let mode = match conditions {
        CutConditions::Masses(_) => SolveMode::Formal,
        CutConditions::RealPeriods => SolveMode::Convergent,
    };
    let curve = solve_topology(&one_matrix_data(ansatz)?, cuts, conditions, NewtonOptions::default())?;
    Ok(hyper(ansatz, curve, mode))
}

/// Multi-start search for solutions with vanishing real periods.
pub fn solve_convergent(ansatz: &CurveAnsatz) -> Result<ConvergentSolutions, CurveError> {
    check_balanced(ansatz)?;
    let opts = NewtonOptions::default();
    match ansatz.kind {
        AnsatzKind::OneMatrix => {
            let found = search_convergent(&one_matrix_data(ansatz)?, opts)?;
            let solutions = found.solutions.into_iter().map(|c| hyper(ansatz, c, SolveMode::Convergent)).collect();
            Ok(ConvergentSolutions { solutions, multiple: found.multiple })
        }
        AnsatzKind::TwoMatrix => {
            let mut solutions: Vec<SolvedCurve> = Vec::new();
            let mut last = CurveError::NewtonDivergence { iterations: 0, residual: f64::INFINITY };
            for i in 0..ansatz.extrema.len() {
                match rational(ansatz, i, SolveMode::Convergent, opts) {
                    Ok(s) => {
                        if !positive_support(&s) {
                            continue;
                        }
                        let dup = solutions.iter().any(|o| match (&o.kind, &s.kind) {
                            (CurveKind::Rational(a), CurveKind::Rational(b)) => {
                                a.alpha.iter().chain(&a.beta).zip(b.alpha.iter().chain(&b.beta)).all(|(u, v)| (u - v).abs() < 1e-7)
                            }
                            _ => false,
                        });
                        if !dup {
                            solutions.push(s);
                        }
                    }
                    Err(e) => last = e,
                }
            }
            if solutions.is_empty() {
                return Err(last);
            }
            Ok(ConvergentSolutions { multiple: solutions.len() > 1, solutions })
        }
        AnsatzKind::TwoMatrixWithEdges => Err(CurveError::Unsupported("two-matrix curves with hard edges".into())),
    }
}

fn positive_support(s: &SolvedCurve) -> bool {
    match &s.kind {
        CurveKind::Hyperelliptic(h) => min_density(h) > NEGATIVE_DENSITY,
        CurveKind::Rational(r) => match r.cut() {
            Ok((l, rr)) => (1..16).all(|i| r.density_at(l + (rr - l) * i as f64 / 16.0).map(|d| d > NEGATIVE_DENSITY).unwrap_or(false)),
            Err(_) => false,
        },
    }
}

/// Candidate locations of the filling fractions, in order.
pub fn fraction_locations(ansatz: &CurveAnsatz) -> Result<Vec<f64>, CurveError> {
    match ansatz.kind {
        AnsatzKind::OneMatrix => Ok(candidates(&one_matrix_data(ansatz)?).iter().map(|c| c.position()).collect()),
        _ => Ok(ansatz.extrema.iter().map(|e| e.0.re).collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::RationalFunction;
    use crate::curve::ansatz::build_ansatz;
    use crate::model::{real_poly, ModelSpec};

    #[test]
    fn gaussian_formal_and_convergent_agree() {
        let m = ModelSpec::one_matrix(RationalFunction::polynomial(real_poly(&[0.0, 1.0])), 1.0, 1);
        let a = build_ansatz(&m).unwrap();
        let f = solve_formal(&a, &[1.0]).unwrap();
        let c = solve_convergent(&a).unwrap();
        assert!(!c.multiple);
        let x = C::new(0.4, 0.9);
        assert!((f.w(x).unwrap() - c.solutions[0].w(x).unwrap()).norm() < 1e-12);
        let d = f.density(0, 50).unwrap();
        assert!(d.iter().all(|&(x, rho)| (rho - (4.0 - x * x).sqrt() / (2.0 * std::f64::consts::PI)).abs() < 1e-12));
    }

    #[test]
    fn two_matrix_formal_needs_one_hot() {
        let m = ModelSpec::two_matrix(real_poly(&[0.0, 2.0]), real_poly(&[0.0, 2.0]), 1.0, 1);
        let a = build_ansatz(&m).unwrap();
        assert!(solve_formal(&a, &[1.0]).is_ok());
        assert!(matches!(solve_formal(&a, &[0.5]), Err(CurveError::Unsupported(_))));
    }
}
