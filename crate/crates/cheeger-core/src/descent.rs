//! Small derivative-free and finite-difference optimizers used by the
//! zero-plane search and the non-negativity scans. The curvature engine only
//! provides function values, so gradients are estimated by central
//! differences.

use nalgebra::DVector;
use rand::Rng;

/// Uniform direction on the unit sphere (Box–Muller normals, normalized).
pub(crate) fn random_unit<R: Rng>(dim: usize, rng: &mut R) -> DVector<f64> {
    loop {
        let mut v = DVector::zeros(dim);
        let mut i = 0;
        while i < dim {
            let u1: f64 = rng.random::<f64>().max(1e-300);
            let u2: f64 = rng.random();
            let r = (-2.0 * u1.ln()).sqrt();
            v[i] = r * (2.0 * std::f64::consts::PI * u2).cos();
            i += 1;
            if i < dim {
                v[i] = r * (2.0 * std::f64::consts::PI * u2).sin();
                i += 1;
            }
        }
        let n = v.norm();
        if n > 1e-12 {
            return v / n;
        }
    }
}

/// Projected gradient descent with a retraction and Armijo backtracking.
///
/// `retract` maps an ambient iterate back to the feasible set; the gradient
/// is estimated by central differences of the retracted objective with step
/// `fd_step`. Stops when the step size or the decrease falls below `tol`.
pub(crate) fn projected_gradient<F, Rt>(
    f: F,
    retract: Rt,
    x0: DVector<f64>,
    fd_step: f64,
    tol: f64,
    max_iter: usize,
) -> (DVector<f64>, f64)
where
    F: Fn(&DVector<f64>) -> f64,
    Rt: Fn(&DVector<f64>) -> DVector<f64>,
{
    let fr = |x: &DVector<f64>| f(&retract(x));
    let mut x = retract(&x0);
    let mut fx = f(&x);
    let dim = x.len();
    let mut step: f64 = 1.0;
    for _ in 0..max_iter {
        let mut grad = DVector::zeros(dim);
        for i in 0..dim {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += fd_step;
            xm[i] -= fd_step;
            grad[i] = (fr(&xp) - fr(&xm)) / (2.0 * fd_step);
        }
        let gnorm = grad.norm();
        if gnorm < 1e-14 {
            break;
        }
        let dir = -&grad / gnorm;
        let mut accepted = false;
        let mut local = step.min(1.0).max(1e-10);
        for _ in 0..40 {
            let cand = retract(&(&x + &dir * local));
            let fc = f(&cand);
            if fc < fx - 0.1 * local * gnorm {
                x = cand;
                fx = fc;
                step = local * 1.8;
                accepted = true;
                break;
            }
            local *= 0.5;
        }
        if !accepted || step < tol {
            break;
        }
        if fx.abs() < tol {
            break;
        }
    }
    (x, fx)
}

/// Plain Nelder–Mead on `ℝⁿ` (objective may return `INFINITY` outside its
/// domain).
pub(crate) fn nelder_mead<F>(
    f: &F,
    x0: &DVector<f64>,
    scale: f64,
    max_iter: usize,
    ftol: f64,
) -> (DVector<f64>, f64)
where
    F: Fn(&DVector<f64>) -> f64,
{
    let n = x0.len();
    let mut simplex: Vec<(f64, DVector<f64>)> = Vec::with_capacity(n + 1);
    simplex.push((f(x0), x0.clone()));
    for i in 0..n {
        let mut x = x0.clone();
        x[i] += scale * x0[i].abs().max(1.0);
        simplex.push((f(&x), x));
    }
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        let best = simplex[0].0;
        let worst = simplex[n].0;
        if (worst - best).abs() <= ftol * (1.0 + best.abs()) {
            break;
        }
        let centroid: DVector<f64> = {
            let mut c = DVector::zeros(n);
            for (_, x) in &simplex[..n] {
                c += x;
            }
            c / n as f64
        };
        let reflect = &centroid + (&centroid - &simplex[n].1) * alpha;
        let fr = f(&reflect);
        if fr < simplex[0].0 {
            let expand = &centroid + (&reflect - &centroid) * gamma;
            let fe = f(&expand);
            simplex[n] = if fe < fr { (fe, expand) } else { (fr, reflect) };
        } else if fr < simplex[n - 1].0 {
            simplex[n] = (fr, reflect);
        } else {
            let contract = &centroid + (&simplex[n].1 - &centroid) * rho;
            let fc = f(&contract);
            if fc < simplex[n].0 {
                simplex[n] = (fc, contract);
            } else {
                let best_x = simplex[0].1.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let x = &best_x + (&entry.1 - &best_x) * sigma;
                    *entry = (f(&x), x);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    let (v, x) = simplex.swap_remove(0);
    (x, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn nelder_mead_finds_quadratic_minimum() {
        let f = |x: &DVector<f64>| (x[0] - 1.5).powi(2) + 3.0 * (x[1] + 0.5).powi(2) + 2.0;
        let (x, v) = nelder_mead(&f, &DVector::from_vec(vec![0.0, 0.0]), 0.5, 500, 1e-14);
        assert!((x[0] - 1.5).abs() < 1e-6);
        assert!((x[1] + 0.5).abs() < 1e-6);
        assert!((v - 2.0).abs() < 1e-10);
    }

    #[test]
    fn projected_gradient_on_sphere() {
        // minimize x·a on the unit sphere: minimum -|a|
        let a = DVector::from_vec(vec![0.3, -1.2, 0.5]);
        let f = |x: &DVector<f64>| x.dot(&a);
        let retract = |x: &DVector<f64>| x / x.norm();
        let mut rng = StdRng::seed_from_u64(1);
        let x0 = random_unit(3, &mut rng);
        let (_, v) = projected_gradient(f, retract, x0, 1e-6, 1e-12, 300);
        assert!((v + a.norm()).abs() < 1e-5);
    }
}
