mod common;

use common::models::*;
use loopcurve::check::{bundle, eval_b, eval_e, eval_p, eval_u, eval_w, eval_y, master_residual, specialize_case, Case, CheckError};
use loopcurve::model::ModelSpec;
use num_complex::Complex64 as C;

fn probes() -> Vec<C> {
    vec![C::new(0.0, 2.0), C::new(1.5, 1.0), C::new(-2.0, 1.2)]
}

fn assert_residual(model: &ModelSpec, tol: f64) {
    let ens = quadrature(model);
    for x in probes() {
        let r = master_residual(model, &ens, x).unwrap();
        assert!(r.value.norm() <= tol, "x = {x}: residual {:e}", r.value.norm());
    }
}

#[test]
fn gaussian_two_matrix_one_eigenvalue() {
    assert_residual(&gaussian_2mm(1), 1e-6);
}

#[test]
fn quartic_two_matrix_one_eigenvalue() {
    assert_residual(&quartic_2mm(1), 1e-6);
}

#[test]
fn one_edge_in_x() {
    assert_residual(&gaussian_2mm(1).with_contours1(half_line(-0.5)), 1e-6);
    assert_residual(&quartic_2mm(1).with_contours1(half_line(0.3)), 1e-6);
}

#[test]
fn two_edges_in_x() {
    assert_residual(&quartic_2mm(1).with_contours1(interval(-1.0, 1.5)), 1e-6);
}

#[test]
fn edges_in_both_variables() {
    assert_residual(&quartic_2mm(1).with_contours1(half_line(-0.5)).with_contours2(half_line(-0.3)), 1e-6);
    assert_residual(&quartic_2mm(1).with_contours1(interval(-1.0, 1.5)).with_contours2(interval(-1.2, 0.8)), 1e-6);
}

#[test]
fn one_matrix_two_eigenvalues() {
    assert_residual(&quartic_1mm(2), 1e-8);
    assert_residual(&quartic_1mm(2).with_contours1(interval(0.0, 1.0)), 1e-8);
    assert_residual(&quartic_1mm(2).with_contours1(half_line(0.2)), 1e-8);
}

#[test]
fn reduced_cases_match_general_evaluator() {
    let models = [
        (gaussian_2mm(1), Case::NoEdges),
        (quartic_2mm(1).with_contours1(half_line(-0.5)), Case::TwoMatrixOneEdge(C::new(-0.5, 0.0))),
        (quartic_2mm(1).with_contours1(interval(-1.0, 1.5)), Case::TwoMatrixTwoEdges(C::new(-1.0, 0.0), C::new(1.5, 0.0))),
        (quartic_2mm(1).with_contours1(half_line(-0.5)).with_contours2(half_line(-0.3)), Case::OneEdgeEach(C::new(-0.5, 0.0), C::new(-0.3, 0.0))),
        (quartic_1mm(2), Case::OneMatrix),
        (quartic_1mm(2).with_contours1(half_line(0.2)), Case::OneMatrixOneEdge(C::new(0.2, 0.0))),
        (quartic_1mm(2).with_contours1(interval(0.0, 1.0)), Case::OneMatrixTwoEdges(C::new(0.0, 0.0), C::new(1.0, 0.0))),
    ];
    for (model, expected) in models {
        let (case, ev) = specialize_case(&model);
        assert_eq!(case, expected);
        let ens = quadrature(&model);
        for x in probes() {
            assert!(ev.compare(&ens, x).unwrap().agrees(1e-10), "{case:?} at {x}");
        }
    }
}

#[test]
fn reduced_evaluators_satisfy_the_loop_equation() {
    let model = quartic_2mm(1).with_contours1(half_line(-0.5)).with_contours2(half_line(-0.3));
    let (_, ev) = specialize_case(&model);
    let ens = quadrature(&model);
    let x = C::new(0.0, 2.0);
    let (e, l) = ev.evaluate(&ens, x).unwrap();
    let y = eval_y(&model, &ens, x).unwrap().value;
    let s = (x + 0.5) * (y + 0.3);
    assert!((s * (e.value - l.value)).norm() < 1e-8);
}

#[test]
fn many_edges_fall_back_to_general() {
    let model = quartic_2mm(1).with_contours1(interval(-1.0, 1.5)).with_contours2(interval(-1.2, 0.8));
    assert_eq!(specialize_case(&model).0, Case::General);
}

fn gaussian_resolvent_oracle(x: C) -> C {
    // trapezoid on a wide grid, independent of the Gauss-Legendre rule
    let (a, b, n) = (-14.0, 14.0, 40000);
    let h = (b - a) / n as f64;
    let mut num = C::new(0.0, 0.0);
    let mut z = 0.0;
    for k in 0..=n {
        let m: f64 = a + h * k as f64;
        let w = (-0.5 * m * m).exp();
        num += w / (x - m);
        z += w;
    }
    num / z
}

#[test]
fn resolvent_of_one_gaussian_eigenvalue() {
    let model = gaussian_1mm(1);
    let ens = quadrature(&model);
    let x = C::new(0.0, 2.0);
    let w = eval_w(&model, &ens, x).unwrap();
    assert!((w.value - gaussian_resolvent_oracle(x)).norm() < 1e-9, "{w:?}");
}

#[test]
fn resolvent_decays_like_t_over_x() {
    let model = quartic_1mm(2);
    let ens = quadrature(&model);
    let x = C::new(0.0, 1e3);
    let w = eval_w(&model, &ens, x).unwrap();
    assert!((x * w.value - model.t).norm() < 1e-5);
}

#[test]
fn y_plus_w_is_v1_prime() {
    let model = quartic_2mm(1);
    let ens = quadrature(&model);
    let x = C::new(0.7, 1.3);
    let b = bundle(&model, &ens, x, None).unwrap();
    let v1 = x + 0.5 * x * x * x;
    assert!((b.y.value + b.w.value - v1).norm() < 1e-14);
}

#[test]
fn p_of_linear_potentials_is_t() {
    let model = gaussian_2mm(1);
    let ens = quadrature(&model);
    let p = eval_p(&model, &ens, C::new(0.0, 2.0), C::new(0.0, 3.0)).unwrap();
    assert!((p.value - C::new(2.0 * 2.0 * model.t, 0.0)).norm() < 1e-12);
}

#[test]
fn u_with_linear_v2_is_w() {
    let model = quartic_1mm(2);
    let ens = quadrature(&model);
    let x = C::new(0.2, 1.5);
    let w = eval_w(&model, &ens, x).unwrap().value;
    for y in [C::new(0.0, 1.0), C::new(3.0, -2.0)] {
        assert!((eval_u(&model, &ens, x, y).unwrap().value - w).norm() < 1e-14);
    }
}

#[test]
fn u_is_polynomial_in_y_of_degree_deg_v2_minus_one() {
    let model = quartic_2mm(1);
    let ens = quadrature(&model);
    let x = C::new(0.0, 2.0);
    // V'2 has degree 3: U is quadratic in y, so the third finite difference vanishes
    let ys: Vec<C> = (0..5).map(|k| C::new(0.3 * k as f64, 1.0)).collect();
    let u: Vec<C> = ys.iter().map(|&y| eval_u(&model, &ens, x, y).unwrap().value).collect();
    let d3 = u[3] - 3.0 * u[2] + 3.0 * u[1] - u[0];
    let d2 = u[2] - 2.0 * u[1] + u[0];
    assert!(d3.norm() < 1e-8 && d2.norm() > 1e-4);
}

#[test]
fn b_without_edges_is_w() {
    let model = quartic_2mm(1);
    let ens = quadrature(&model);
    let x = C::new(0.0, 2.0);
    let b = eval_b(&model, &ens, x).unwrap();
    assert!((b.value - eval_w(&model, &ens, x).unwrap().value).norm() < 1e-14);
}

#[test]
fn e_without_edges_is_the_head() {
    let model = quartic_2mm(1);
    let ens = quadrature(&model);
    let (x, y) = (C::new(0.0, 2.0), C::new(0.5, -1.0));
    let e = eval_e(&model, &ens, x, y).unwrap().value;
    let p = eval_p(&model, &ens, x, y).unwrap().value;
    let v1 = x + 0.5 * x.powu(3);
    let v2 = 1.5 * y + 0.3 * y.powu(3);
    assert!((e - ((v2 - x) * (v1 - y) - p + model.t)).norm() < 1e-12);
}

#[test]
fn probe_on_the_support_is_refused() {
    let model = quartic_1mm(2).with_contours1(interval(0.0, 1.0));
    let ens = quadrature(&model);
    assert!(matches!(master_residual(&model, &ens, C::new(0.5, 0.0)), Err(CheckError::ProbeTooClose { .. })));
}
