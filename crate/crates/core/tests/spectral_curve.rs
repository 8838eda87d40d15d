use std::f64::consts::PI;

use loopcurve::algebra::RationalFunction;
use loopcurve::curve::{
    build_ansatz, duality_check, export, period, period_table, residue_report, solve_convergent, solve_formal, solve_with_topology, Cut,
    CutConditions, Cycle, CycleKind, Endpoint,
};
use loopcurve::model::{real_poly, ContourSegment, ModelSpec};
use loopcurve::{Complex64 as C, Poly, Rational};

fn one_matrix(v: &[f64], t: f64) -> ModelSpec {
    ModelSpec::one_matrix(RationalFunction::polynomial(real_poly(v)), t, 1)
}

fn double_well(t: f64) -> ModelSpec {
    one_matrix(&[0.0, -1.0, 0.0, 1.0], t)
}

/// Two-cut equilibrium density of `x^4/4 - x^2/2`.
fn two_cut_density(x: f64, t: f64) -> f64 {
    let (a2, b2) = (1.0 - 2.0 * t.sqrt(), 1.0 + 2.0 * t.sqrt());
    x.abs() * ((x * x - a2) * (b2 - x * x)).max(0.0).sqrt() / (2.0 * PI * t)
}

#[test]
fn gaussian_curve_matches_semicircle() {
    let t = 0.8;
    let m = one_matrix(&[0.0, 1.0], t);
    let c = solve_formal(&build_ansatz(&m).unwrap(), &[1.0]).unwrap();
    for k in 0..10 {
        let x = C::new(-3.0 + 0.6 * k as f64, 0.4 + 0.1 * k as f64);
        let r = 2.0 * t.sqrt();
        let exact = (x - (x - r).sqrt() * (x + r).sqrt()) / 2.0;
        assert!((c.w(x).unwrap() - exact).norm() < 1e-12);
    }
    let sup = c
        .density(0, 200)
        .unwrap()
        .iter()
        .map(|&(x, rho)| (rho - (4.0 * t - x * x).max(0.0).sqrt() / (2.0 * PI * t)).abs())
        .fold(0.0, f64::max);
    assert!(sup < 1e-6, "{sup}");
}

#[test]
fn symmetric_double_well_matches_closed_form() {
    let t = 0.1;
    let m = double_well(t);
    let a = build_ansatz(&m).unwrap();
    let c = solve_formal(&a, &[0.5, 0.0, 0.5]).unwrap();
    for k in 0..2 {
        for (x, rho) in c.density(k, 40).unwrap() {
            assert!((rho - two_cut_density(x, t)).abs() < 1e-9, "{x} {rho}");
        }
    }
    // recomputed A-periods
    let table = period_table(&c).unwrap();
    for name in ["A1", "A2"] {
        let p = table.iter().find(|e| e.label == name).unwrap().value;
        assert!((p / C::new(0.0, 2.0 * PI * t) - 0.5).norm() < 1e-6, "{name} {p}");
    }
}

#[test]
fn filling_fraction_round_trip() {
    let t = 0.08;
    let m = double_well(t);
    let a = build_ansatz(&m).unwrap();
    let c = solve_formal(&a, &[0.3, 0.0, 0.7]).unwrap();
    let cuts = c.cuts().unwrap();
    let expect = [0.3, 0.7];
    for (k, &(l, r)) in cuts.iter().enumerate() {
        let p = period(&c, &Cycle::around_cut(l, r, 0.2 * (cuts[1].0 - cuts[0].1), "A")).unwrap();
        assert!((p / C::new(0.0, 2.0 * PI * t) - expect[k]).norm() < 1e-6);
    }
    assert!((c.eps[0] - 0.3).abs() < 1e-9 && (c.eps[2] - 0.7).abs() < 1e-9);
}

#[test]
fn convergent_symmetric_double_well_splits_evenly() {
    let m = double_well(0.1);
    let s = solve_convergent(&build_ansatz(&m).unwrap()).unwrap();
    let c = &s.solutions[0];
    assert_eq!(c.cuts().unwrap().len(), 2);
    assert!((c.eps[0] - 0.5).abs() < 1e-8 && (c.eps[2] - 0.5).abs() < 1e-8);
}

#[test]
fn convergent_asymmetric_double_well_has_real_periods_zero() {
    let m = one_matrix(&[0.05, -1.0, 0.0, 1.0], 0.1);
    let s = solve_convergent(&build_ansatz(&m).unwrap()).unwrap();
    for c in &s.solutions {
        for e in period_table(c).unwrap() {
            if e.kind == CycleKind::BCycle {
                assert!(e.value.re.abs() < 1e-8, "{e:?}");
            }
        }
    }
}

#[test]
fn convergent_gaussian_matches_formal() {
    let a = build_ansatz(&one_matrix(&[0.0, 1.0], 1.0)).unwrap();
    let f = solve_formal(&a, &[1.0]).unwrap();
    let c = solve_convergent(&a).unwrap();
    assert!(!c.multiple);
    let x = C::new(0.3, 2.0);
    assert!((f.w(x).unwrap() - c.solutions[0].w(x).unwrap()).norm() < 1e-12);
}

/// Least-squares slope of `log rho` against `log(1 - x)`.
fn edge_exponent(samples: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = samples.iter().map(|&(x, r)| ((1.0 - x).ln(), r.ln())).collect();
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let (mx, my) = (sx / n, sy / n);
    let cov: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let var: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    cov / var
}

#[test]
fn hard_edges_give_inverse_square_root() {
    let m = one_matrix(&[0.0, 0.3], 1.0).with_contours1(vec![ContourSegment::interval(-1.0, 1.0)]);
    let a = build_ansatz(&m).unwrap();
    let cuts = [Cut { left: Endpoint::Hard(-1.0), right: Endpoint::Hard(1.0) }];
    let c = solve_with_topology(&a, &cuts, &CutConditions::RealPeriods).unwrap();
    let samples: Vec<(f64, f64)> = (0..8).map(|k| {
        let x = 1.0 - 10f64.powf(-2.0 - 0.5 * k as f64);
        (x, c.density_at(x).unwrap())
    }).collect();
    let slope = edge_exponent(&samples);
    assert!((slope + 0.5).abs() < 0.05, "{slope}");
    assert!((c.moment(|_| 1.0).unwrap() - 1.0).abs() < 1e-8);
    let r = residue_report(&c, &m).unwrap();
    assert!(r.boundedness.iter().all(|b| b.pass));
    assert!(r.hard_edges.iter().all(|h| h.abs_diff < 1e-6), "{:?}", r.hard_edges);
}

#[test]
fn half_line_edge_opens_a_hard_cut() {
    // V = x on [0, inf): Marchenko-Pastur-like support [0, 4t]
    let t = 0.5;
    let m = one_matrix(&[1.0], t).with_contours1(vec![ContourSegment::half_line(0.0, true)]);
    let a = build_ansatz(&m).unwrap();
    assert!(a.is_balanced());
    let c = solve_formal(&a, &[1.0]).unwrap();
    let (l, r) = c.cuts().unwrap()[0];
    assert!(l.abs() < 1e-14 && (r - 4.0 * t).abs() < 1e-9, "{l} {r}");
    // rho = sqrt((4t - x)/x) / (2 pi t)
    for (x, rho) in c.density(0, 30).unwrap() {
        assert!((rho - ((4.0 * t - x) / x).sqrt() / (2.0 * PI * t)).abs() < 1e-8);
    }
}

#[test]
fn finite_pole_residue_is_reproduced() {
    // V' = x + 0.2 x/(x^2 + 4): simple poles at +-2i with residue 0.1
    let num: Poly = real_poly(&[0.0, 4.2, 0.0, 1.0]);
    let den: Poly = real_poly(&[4.0, 0.0, 1.0]);
    let v: Rational = RationalFunction::new(num, den).unwrap();
    let m = ModelSpec::one_matrix(v, 0.5, 1);
    let a = build_ansatz(&m).unwrap();
    assert!(a.is_balanced());
    let c = solve_formal(&a, &[0.0, 1.0, 0.0]).unwrap();
    let r = residue_report(&c, &m).unwrap();
    assert_eq!(r.poles.len(), 2);
    for p in &r.poles {
        assert!((p.expected - C::new(0.1, 0.0)).norm() < 1e-12);
        assert!(p.abs_diff < 1e-8, "{p:?}");
    }
    assert!(r.infinity.pass);
}

#[test]
fn two_matrix_gaussian_resolvent() {
    // V'1 = a x, V'2 = b y: semicircle of variance t b/(ab - 1)
    let (a, b, t) = (2.0, 3.0, 0.6);
    let m = ModelSpec::two_matrix(real_poly(&[0.0, a]), real_poly(&[0.0, b]), t, 1);
    let s = solve_convergent(&build_ansatz(&m).unwrap()).unwrap();
    let c = &s.solutions[0];
    let v = t * b / (a * b - 1.0);
    let x = C::new(0.4, 0.7);
    let r = 2.0 * v.sqrt();
    let exact = t * (x - (x - r).sqrt() * (x + r).sqrt()) / (2.0 * v);
    assert!((c.w(x).unwrap() - exact).norm() < 1e-10);
}

#[test]
fn two_matrix_duality() {
    let m = ModelSpec::two_matrix(real_poly(&[0.0, 1.0, 0.0, 0.3]), real_poly(&[0.0, 2.0]), 0.5, 1);
    let r = duality_check(&m, 1e-6).unwrap();
    assert!(r.pass, "{r:?}");
    let g = ModelSpec::two_matrix(real_poly(&[0.0, 2.0]), real_poly(&[0.0, 2.0]), 1.0, 1);
    assert!(duality_check(&g, 1e-8).unwrap().pass);
}

#[test]
fn export_lists_periods_and_cuts() {
    let c = solve_formal(&build_ansatz(&double_well(0.1)).unwrap(), &[0.5, 0.0, 0.5]).unwrap();
    let e = export(&c).unwrap();
    assert_eq!(e.cuts.len(), 2);
    assert!(e.periods.iter().any(|p| p.label == "B1"));
    let json: serde_json::Value = serde_json::from_str(&e.to_json()).unwrap();
    assert_eq!(json["parametrization"], "hyperelliptic");
    let csv = c.density_csv(10).unwrap();
    assert_eq!(csv.lines().count(), 21);
}
