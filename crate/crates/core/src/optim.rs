//! Derivative-free minimization.

use alloc::vec::Vec;
use core::cell::Cell;

/// Settings for [`nelder_mead`].
#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    /// Budget of objective evaluations, shared across restarts.
    pub max_evals: usize,
    /// Relative spread of objective values across the simplex at which a pass stops.
    pub f_tol: f64,
    /// Restarts from the best vertex after a pass converges.
    pub restarts: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_evals: 2000,
            f_tol: 1e-8,
            restarts: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Minimizes `f` with the Nelder-Mead simplex method.
///
/// The initial simplex is `x0` plus one vertex per coordinate offset by
/// `steps[i]`. Non-finite objective values are treated as `+inf`. The returned
/// value is never worse than `f(x0)`.
pub fn nelder_mead<F>(mut f: F, x0: &[f64], steps: &[f64], opts: NelderMeadOptions) -> Minimum
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    assert_eq!(steps.len(), n, "one step per coordinate");
    let evals = Cell::new(0usize);
    let mut eval = |x: &[f64]| {
        evals.set(evals.get() + 1);
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };

    let mut best_x: Vec<f64> = x0.to_vec();
    let mut best_f = eval(x0);
    let mut converged = false;

    for pass in 0..=opts.restarts {
        if evals.get() >= opts.max_evals {
            break;
        }
        let mut simplex: Vec<(f64, Vec<f64>)> = Vec::with_capacity(n + 1);
        simplex.push((best_f, best_x.clone()));
        for i in 0..n {
            let mut v = best_x.clone();
            v[i] += steps[i];
            let fv = eval(&v);
            simplex.push((fv, v));
        }
        let pass_converged = run_pass(&mut simplex, &mut eval, &opts, &evals);
        simplex.sort_by(|a, b| a.0.total_cmp(&b.0));
        let improved = simplex[0].0 < best_f;
        if simplex[0].0 <= best_f {
            best_f = simplex[0].0;
            best_x = simplex[0].1.clone();
        }
        converged = pass_converged;
        // a restart that found nothing better confirms the optimum
        if pass > 0 && !improved && pass_converged {
            break;
        }
    }

    Minimum {
        x: best_x,
        value: best_f,
        evals: evals.get(),
        converged,
    }
}

fn run_pass<E>(
    simplex: &mut [(f64, Vec<f64>)],
    eval: &mut E,
    opts: &NelderMeadOptions,
    evals: &Cell<usize>,
) -> bool
where
    E: FnMut(&[f64]) -> f64,
{
    const REFLECT: f64 = 1.0;
    const EXPAND: f64 = 2.0;
    const CONTRACT: f64 = 0.5;
    const SHRINK: f64 = 0.5;

    let n = simplex.len() - 1;
    let mut centroid = alloc::vec![0.0; n];
    let point = |c: &[f64], w: &[f64], t: f64| -> Vec<f64> {
        c.iter().zip(w).map(|(ci, wi)| ci + t * (ci - wi)).collect()
    };

    loop {
        simplex.sort_by(|a, b| a.0.total_cmp(&b.0));
        let f_best = simplex[0].0;
        let f_worst = simplex[n].0;
        if f_worst.is_finite() && (f_worst - f_best) <= opts.f_tol * f_best.abs().max(1e-8) {
            return true;
        }
        if evals.get() >= opts.max_evals {
            return false;
        }

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for (_, v) in simplex[..n].iter() {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }

        let worst = simplex[n].1.clone();
        let xr = point(&centroid, &worst, REFLECT);
        let fr = eval(&xr);
        if fr < f_best {
            let xe = point(&centroid, &worst, EXPAND);
            let fe = eval(&xe);
            simplex[n] = if fe < fr { (fe, xe) } else { (fr, xr) };
            continue;
        }
        if fr < simplex[n - 1].0 {
            simplex[n] = (fr, xr);
            continue;
        }
        // contraction: outside if the reflection beat the worst vertex
        let (xc, fc) = if fr < f_worst {
            let xc = point(&centroid, &worst, CONTRACT);
            let fc = eval(&xc);
            (xc, fc)
        } else {
            let xc = point(&centroid, &worst, -CONTRACT);
            let fc = eval(&xc);
            (xc, fc)
        };
        if fc < f_worst.min(fr) {
            simplex[n] = (fc, xc);
            continue;
        }
        let best = simplex[0].1.clone();
        for vertex in simplex[1..].iter_mut() {
            let v: Vec<f64> = best
                .iter()
                .zip(&vertex.1)
                .map(|(b, x)| b + SHRINK * (x - b))
                .collect();
            let fv = eval(&v);
            *vertex = (fv, v);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn minimizes_rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let opts = NelderMeadOptions {
            max_evals: 5000,
            f_tol: 1e-14,
            restarts: 2,
        };
        let m = nelder_mead(f, &[-1.2, 1.0], &[0.5, 0.5], opts);
        assert!(m.converged);
        assert_abs_diff_eq!(m.x[0], 1.0, epsilon = 1e-3);
        assert_abs_diff_eq!(m.x[1], 1.0, epsilon = 1e-3);
    }

    #[test]
    fn never_worse_than_start_and_respects_budget() {
        let f = |x: &[f64]| if x[0] > 0.0 { f64::NAN } else { x[0] * x[0] };
        let opts = NelderMeadOptions {
            max_evals: 30,
            ..Default::default()
        };
        let m = nelder_mead(f, &[-3.0], &[1.0], opts);
        assert!(m.value <= 9.0);
        assert!(m.evals <= 30 + 3);
    }
}
