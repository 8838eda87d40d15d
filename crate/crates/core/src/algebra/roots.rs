//! Simultaneous polynomial root finding.

use num_complex::Complex64;

use super::poly::Polynomial;

/// All complex roots of `p` (with multiplicity) by Aberth-Ehrlich iteration.
///
/// Multiple roots converge to a cluster of radius ~ eps^(1/k); callers that
/// need multiplicities group them with [`cluster_roots`].
pub fn roots(p: &Polynomial<Complex64>) -> Vec<Complex64> {
    let p = p.trimmed(1e-15);
    let Some(deg) = p.degree() else {
        return Vec::new();
    };
    if deg == 0 {
        return Vec::new();
    }
    let lead = *p.leading().unwrap();
    let monic = p.scale(&(1.0 / lead));
    let c = monic.coeffs();
    if deg == 1 {
        return vec![-c[0]];
    }
    let dp = monic.derivative();

    // Cauchy-type bound for the initial circle.
    let radius = 1.0 + c[..deg].iter().map(|a| a.norm()).fold(0.0, f64::max);
    let start_r = radius.min(
        c[..deg]
            .iter()
            .enumerate()
            .map(|(k, a)| a.norm().powf(1.0 / (deg - k) as f64))
            .fold(0.0, f64::max)
            .max(1e-3),
    );
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| Complex64::from_polar(start_r, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / deg as f64 + 0.4))
        .collect();

    for _ in 0..500 {
        let mut max_step: f64 = 0.0;
        for i in 0..deg {
            let pv = monic.eval(&z[i]);
            if pv.norm() == 0.0 {
                continue;
            }
            let ratio = pv / dp.eval(&z[i]);
            let repulsion: Complex64 = (0..deg)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        1.0 / d
                    }
                })
                .sum();
            let denom = 1.0 - ratio * repulsion;
            let step = if denom.norm() == 0.0 || !denom.is_finite() {
                ratio
            } else {
                ratio / denom
            };
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if max_step < 1e-16 {
            break;
        }
    }
    // Newton polish on the undeflated polynomial.
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let d = dp.eval(zi);
            if d.norm() == 0.0 {
                break;
            }
            let step = monic.eval(zi) / d;
            if !step.is_finite() || step.norm() > 1e-6 * (1.0 + zi.norm()) {
                break;
            }
            *zi -= step;
        }
    }
    z.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    z
}

/// Root cluster: mean location plus the number of raw roots it absorbed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootCluster {
    pub root: Complex64,
    pub multiplicity: usize,
}

/// Groups roots closer than `radius` (single linkage).
pub fn cluster_roots(roots: &[Complex64], radius: f64) -> Vec<RootCluster> {
    let n = roots.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (roots[i] - roots[j]).norm() < radius {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                label[a.max(b)] = a.min(b);
            }
        }
    }
    let mut out: Vec<(usize, Complex64, usize)> = Vec::new();
    for i in 0..n {
        let r = find(&mut label, i);
        match out.iter_mut().find(|(l, _, _)| *l == r) {
            Some((_, sum, count)) => {
                *sum += roots[i];
                *count += 1;
            }
            None => out.push((r, roots[i], 1)),
        }
    }
    out.into_iter()
        .map(|(_, sum, count)| RootCluster {
            root: sum / count as f64,
            multiplicity: count,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn roots_of_known_cubic() {
        let want = [c(-2.0, 0.0), c(0.5, 1.0), c(3.0, -0.25)];
        let p = Polynomial::from_roots(&want);
        let got = roots(&p);
        for w in want {
            assert!(got.iter().any(|g| (g - w).norm() < 1e-12), "{w} not in {got:?}");
        }
    }

    #[test]
    fn double_root_clusters() {
        let p = Polynomial::from_roots(&[c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)]);
        let cl = cluster_roots(&roots(&p), 1e-5);
        assert_eq!(cl.len(), 2);
        let double = cl.iter().find(|k| k.multiplicity == 2).unwrap();
        assert!((double.root - c(1.0, 0.0)).norm() < 1e-7, "{:?}", double);
    }

    #[test]
    fn wide_dynamic_range() {
        let want = [c(1e-3, 0.0), c(1e3, 0.0), c(0.0, 5.0), c(0.0, -5.0)];
        let got = roots(&Polynomial::from_roots(&want));
        for w in want {
            assert!(got.iter().any(|g| (g - w).norm() < 1e-9 * (1.0 + w.norm())));
        }
    }
}
