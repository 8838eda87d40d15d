//! Damped Gauss-Newton (Levenberg-Marquardt) on small real systems with a
//! finite-difference Jacobian.

use nalgebra::{DMatrix, DVector};

use super::CurveError;

#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 200 }
    }
}

#[derive(Debug, Clone)]
pub struct NewtonResult {
    pub x: DVector<f64>,
    pub residual: f64,
    pub iterations: usize,
}

fn norm_inf(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |m, a| m.max(a.abs()))
}

fn jacobian<F>(f: &F, x: &DVector<f64>, fx: &DVector<f64>) -> Result<DMatrix<f64>, CurveError>
where
    F: Fn(&DVector<f64>) -> Result<DVector<f64>, CurveError>,
{
    let mut j = DMatrix::zeros(fx.len(), x.len());
    for k in 0..x.len() {
        let h = 1e-7 * (1.0 + x[k].abs());
        let mut xp = x.clone();
        xp[k] += h;
        let mut xm = x.clone();
        xm[k] -= h;
        let d = (f(&xp)? - f(&xm)?) / (2.0 * h);
        j.set_column(k, &d);
    }
    Ok(j)
}

/// Drives `f(x)` to zero in the max norm. Rejected steps raise the damping,
/// accepted ones relax it; a non-finite trial point counts as rejected.
pub fn solve<F>(f: F, x0: DVector<f64>, opts: NewtonOptions) -> Result<NewtonResult, CurveError>
where
    F: Fn(&DVector<f64>) -> Result<DVector<f64>, CurveError>,
{
    let mut x = x0;
    let mut fx = f(&x)?;
    if x.is_empty() {
        let residual = norm_inf(&fx);
        return if residual <= opts.tol {
            Ok(NewtonResult { x, residual, iterations: 0 })
        } else {
            Err(CurveError::NewtonDivergence { iterations: 0, residual })
        };
    }
    let mut lambda = 1e-6;
    for it in 0..opts.max_iter {
        let r = norm_inf(&fx);
        if r <= opts.tol {
            return Ok(NewtonResult { x, residual: r, iterations: it });
        }
        let j = jacobian(&f, &x, &fx)?;
        let jt = j.transpose();
        let g = &jt * &fx;
        let a = &jt * &j;
        let cost = fx.norm_squared();
        let mut accepted = false;
        for _ in 0..30 {
            let mut m = a.clone();
            for k in 0..m.nrows() {
                m[(k, k)] += lambda * (1.0 + a[(k, k)]);
            }
            let Some(step) = m.lu().solve(&(-&g)) else {
                lambda *= 10.0;
                continue;
            };
            let trial = &x + &step;
            match f(&trial) {
                Ok(ft) if ft.iter().all(|v| v.is_finite()) && ft.norm_squared() < cost => {
                    x = trial;
                    fx = ft;
                    lambda = (lambda / 5.0).max(1e-12);
                    accepted = true;
                    break;
                }
                _ => lambda *= 8.0,
            }
        }
        if !accepted {
            return Err(CurveError::NewtonDivergence { iterations: it, residual: r });
        }
    }
    let residual = norm_inf(&fx);
    if residual <= opts.tol {
        Ok(NewtonResult { x, residual, iterations: opts.max_iter })
    } else {
        Err(CurveError::NewtonDivergence { iterations: opts.max_iter, residual })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_coupled_quadratics() {
        let f = |v: &DVector<f64>| Ok(DVector::from_vec(vec![v[0] * v[0] + v[1] * v[1] - 4.0, v[0] - v[1]]));
        let r = solve(f, DVector::from_vec(vec![1.0, 0.5]), NewtonOptions::default()).unwrap();
        assert!((r.x[0] - 2f64.sqrt()).abs() < 1e-10 && (r.x[1] - 2f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn overdetermined_consistent_system() {
        let f = |v: &DVector<f64>| Ok(DVector::from_vec(vec![v[0] - 1.0, 2.0 * v[0] - 2.0, v[0] * v[0] - 1.0]));
        let r = solve(f, DVector::from_vec(vec![3.0]), NewtonOptions::default()).unwrap();
        assert!((r.x[0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn unsolvable_system_diverges() {
        let f = |v: &DVector<f64>| Ok(DVector::from_vec(vec![v[0] * v[0] + 1.0]));
        assert!(matches!(solve(f, DVector::from_vec(vec![0.3]), NewtonOptions::default()), Err(CurveError::NewtonDivergence { .. })));
    }
}
