//! Dense linear algebra for the handful of small systems the estimators need
//! (at most a few dozen unknowns). Matrices are row-major `Vec<f64>`.

use alloc::vec;
use alloc::vec::Vec;

/// Cholesky factor `L` of a symmetric positive-definite `n x n` matrix.
///
/// Returns `None` when a pivot is not positive relative to the diagonal scale.
pub fn cholesky(a: &[f64], n: usize) -> Option<Vec<f64>> {
    debug_assert_eq!(a.len(), n * n);
    let scale = (0..n).map(|i| a[i * n + i].abs()).fold(0.0, f64::max);
    if !(scale > 0.0) || !scale.is_finite() {
        return None;
    }
    let tiny = scale * 1e-14;
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !(s > tiny) {
                    return None;
                }
                l[i * n + i] = libm::sqrt(s);
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Some(l)
}

/// Solves `L L^T x = b` given the Cholesky factor.
pub fn cholesky_solve(l: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[k * n + i] * x[k];
        }
        x[i] = s / l[i * n + i];
    }
    x
}

/// Diagonal of the inverse of `L L^T`.
pub fn cholesky_inverse_diagonal(l: &[f64], n: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    (0..n)
        .map(|i| {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[i] = 1.0;
            cholesky_solve(l, n, &e)[i]
        })
        .collect()
}

/// Ordinary least squares result.
#[derive(Debug, Clone)]
pub struct OlsFit {
    pub coef: Vec<f64>,
    pub ssr: f64,
    /// Diagonal of `(X^T X)^{-1}`.
    pub xtx_inv_diag: Vec<f64>,
    pub nobs: usize,
}

/// Least squares of `y` on the row-major design `x` (`y.len()` rows, `k` columns).
pub fn ols(x: &[f64], y: &[f64], k: usize) -> Option<OlsFit> {
    let n = y.len();
    if k == 0 || n < k || x.len() != n * k {
        return None;
    }
    let mut xtx = vec![0.0; k * k];
    let mut xty = vec![0.0; k];
    for (row, &yi) in x.chunks_exact(k).zip(y) {
        for i in 0..k {
            xty[i] += row[i] * yi;
            for j in 0..=i {
                xtx[i * k + j] += row[i] * row[j];
            }
        }
    }
    for i in 0..k {
        for j in 0..i {
            xtx[j * k + i] = xtx[i * k + j];
        }
    }
    let l = cholesky(&xtx, k)?;
    let coef = cholesky_solve(&l, k, &xty);
    let ssr = x
        .chunks_exact(k)
        .zip(y)
        .map(|(row, &yi)| {
            let fit: f64 = row.iter().zip(&coef).map(|(a, b)| a * b).sum();
            (yi - fit) * (yi - fit)
        })
        .sum();
    Some(OlsFit {
        xtx_inv_diag: cholesky_inverse_diagonal(&l, k),
        coef,
        ssr,
        nobs: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn solves_spd_system() {
        let a = [4.0, 2.0, 2.0, 3.0];
        let l = cholesky(&a, 2).unwrap();
        let x = cholesky_solve(&l, 2, &[2.0, 1.0]);
        assert_relative_eq!(x[0], 0.5, epsilon = 1e-14);
        assert_relative_eq!(x[1], 0.0, epsilon = 1e-14);
        let d = cholesky_inverse_diagonal(&l, 2);
        // inverse = 1/8 * [[3, -2], [-2, 4]]
        assert_relative_eq!(d[0], 3.0 / 8.0, epsilon = 1e-14);
        assert_relative_eq!(d[1], 0.5, epsilon = 1e-14);
    }

    #[test]
    fn singular_is_rejected() {
        assert!(cholesky(&[1.0, 1.0, 1.0, 1.0], 2).is_none());
    }

    #[test]
    fn ols_recovers_line() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let design: Vec<f64> = xs.iter().flat_map(|&x| [1.0, x]).collect();
        let y: Vec<f64> = xs.iter().map(|x| 2.0 + 3.0 * x).collect();
        let fit = ols(&design, &y, 2).unwrap();
        assert_relative_eq!(fit.coef[0], 2.0, epsilon = 1e-10);
        assert_relative_eq!(fit.coef[1], 3.0, epsilon = 1e-10);
        assert!(fit.ssr < 1e-18);
    }
}
