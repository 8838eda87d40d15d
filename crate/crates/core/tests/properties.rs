use loopcurve::algebra::{Center, Polynomial, RationalFunction};
use loopcurve::scalar::ratio;
use loopcurve::words::{canonicalize, split_jacobian, Letter, MatrixPoly, TraceCombination};
use num_complex::Complex64;
use num_rational::BigRational;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn cpoly() -> impl Strategy<Value = Polynomial<Complex64>> {
    prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), 1..7).prop_map(|v| Polynomial::new(v.into_iter().map(|(a, b)| c(a, b)).collect()))
}

fn word() -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec(prop::bool::ANY.prop_map(|b| if b { Letter::M1 } else { Letter::M2 }), 0..8)
}

proptest! {
    #[test]
    fn divided_kernel_identity(p in cpoly(), pts in prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64, -2.0..2.0f64), 10)) {
        for (a, b, d, e) in pts {
            let (x, m) = (c(a, b), c(d, e));
            let lhs = p.eval(&x) - p.eval(&m);
            let rhs = (x - m) * p.divided_kernel(&x).eval(&m);
            let scale = 1.0 + lhs.norm().max(rhs.norm());
            prop_assert!((lhs - rhs).norm() <= 1e-12 * scale * 10.0);
        }
    }

    #[test]
    fn residues_sum_to_zero(roots in prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), 1..5), num in cpoly()) {
        let roots: Vec<Complex64> = roots.into_iter().map(|(a, b)| c(a, b)).collect();
        for i in 0..roots.len() {
            for j in 0..i {
                prop_assume!((roots[i] - roots[j]).norm() > 0.2);
            }
        }
        prop_assume!(num.coeffs().iter().any(|a| a.norm() > 1e-3));
        prop_assume!(roots.iter().all(|z| num.eval(z).norm() > 1e-3));
        let r = RationalFunction::new(num, Polynomial::from_roots(&roots)).unwrap();
        let mut total = r.residue_at(&Center::Infinity).unwrap();
        for z in &roots {
            total += r.residue_at(&Center::Finite(*z)).unwrap();
        }
        prop_assert!(total.norm() < 1e-10 * (1.0 + r.numerator().coeffs().iter().map(|a| a.norm()).sum::<f64>()) * 10.0);
    }

    #[test]
    fn partial_fractions_reproduce(roots in prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), 1..5), num in cpoly(),
                                   probes in prop::collection::vec((-4.0..4.0f64, -4.0..4.0f64), 20)) {
        let roots: Vec<Complex64> = roots.into_iter().map(|(a, b)| c(a, b)).collect();
        for i in 0..roots.len() {
            for j in 0..i {
                prop_assume!((roots[i] - roots[j]).norm() > 0.2);
            }
        }
        let r = RationalFunction::new(num, Polynomial::from_roots(&roots)).unwrap();
        let pf = r.partial_fractions().unwrap();
        for (a, b) in probes {
            let z = c(a, b);
            prop_assume!(roots.iter().all(|q| (q - z).norm() > 0.1));
            let want = r.eval(&z, 1e-14).unwrap();
            prop_assert!((pf.eval(z) - want).norm() <= 1e-10 * (1.0 + want.norm()) * 10.0);
        }
    }

    #[test]
    fn canonical_word_is_rotation_invariant(w in word(), k in 0usize..8) {
        let mut r = w.clone();
        if !r.is_empty() {
            let k = k % r.len();
            r.rotate_left(k);
        }
        prop_assert_eq!(canonicalize(&r), canonicalize(&w));
    }

    #[test]
    fn split_is_linear(f in word(), g in word(), a in -5i64..5, b in -5i64..5) {
        let (qa, qb) = (ratio(a, 1), ratio(b, 1));
        let combo = MatrixPoly::word(qa.clone(), f.clone()) + MatrixPoly::word(qb.clone(), g.clone());
        let lhs = combo.jacobian(Letter::M1);
        let rhs = split_jacobian::<BigRational>(&f).scale(&qa) + split_jacobian::<BigRational>(&g).scale(&qb);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn split_obeys_leibniz(u in word(), v in word()) {
        // J(u v) = sum over letters of u (with v appended to the right part)
        //        + sum over letters of v (with u prepended to the left part)
        let mut uv = u.clone();
        uv.extend_from_slice(&v);
        let whole = split_jacobian::<BigRational>(&uv);
        let mut parts = TraceCombination::zero();
        for (p, &l) in u.iter().enumerate() {
            if l == Letter::M1 {
                let mut right = u[p + 1..].to_vec();
                right.extend_from_slice(&v);
                parts += TraceCombination::expectation(ratio(1, 1), 0, 0, vec![canonicalize(&u[..p]), canonicalize(&right)]);
            }
        }
        for (p, &l) in v.iter().enumerate() {
            if l == Letter::M1 {
                let mut left = u.clone();
                left.extend_from_slice(&v[..p]);
                parts += TraceCombination::expectation(ratio(1, 1), 0, 0, vec![canonicalize(&left), canonicalize(&v[p + 1..])]);
            }
        }
        prop_assert_eq!(whole, parts);
    }
}
