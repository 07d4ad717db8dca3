//! ARMA(p, q) conditional mean with AIC order selection, and GARCH(1,1)
//! conditional variance by Gaussian quasi-maximum likelihood.
//!
//! Estimation is two-stage. The ARMA stage minimizes the conditional sum of
//! squares with pre-sample returns and residuals set to zero; with the
//! innovation variance concentrated out this is the conditional Gaussian
//! likelihood. The GARCH stage is then fit on the ARMA residuals.
//!
//! ```text
//! r_t       = c + sum_i phi_i r_{t-i} + sum_j theta_j e_{t-j} + e_t
//! sigma_t^2 = omega + a e_{t-1}^2 + b sigma_{t-1}^2
//! ```
//!
//! The intercept `c` is off by default.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg;
use crate::moments;
use crate::optim::{self, NelderMeadOptions};

/// Largest AR or MA order searched by default.
pub const MAX_ORDER: usize = 4;
/// `a + b` never exceeds `1 - STATIONARITY_MARGIN`.
pub const STATIONARITY_MARGIN: f64 = 1e-6;
/// Shortest residual series accepted by [`fit_garch11`].
pub const MIN_GARCH_LEN: usize = 50;

const LN_2PI: f64 = 1.8378770664093453;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FitError {
    #[error("series contains a non-finite value at index {0}")]
    NonFinite(usize),
    #[error("series too short: need {needed}, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("residuals have zero variance")]
    DegenerateVariance,
    #[error("parameter outside its domain: {0}")]
    Domain(&'static str),
    #[error("no ARMA order in the search grid produced a converged fit")]
    AllFailed,
}

/// Options for the ARMA stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmaOptions {
    pub include_intercept: bool,
    pub max_iter: usize,
    /// Relative improvement in the sum of squares below which the search stops.
    pub tol: f64,
}

impl Default for ArmaOptions {
    fn default() -> Self {
        Self {
            include_intercept: false,
            max_iter: 100,
            tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArmaFit {
    pub p: usize,
    pub q: usize,
    /// Zero unless the intercept is enabled.
    pub intercept: f64,
    pub has_intercept: bool,
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Innovation variance `css / n`.
    pub sigma2: f64,
    pub loglik: f64,
    pub aic: f64,
    pub converged: bool,
}

impl ArmaFit {
    /// Number of parameters counted by AIC: coefficients plus the variance.
    pub fn n_params(&self) -> usize {
        self.p + self.q + 1 + usize::from(self.has_intercept)
    }

    /// Re-runs the residual recursion on `series` with the fitted coefficients.
    pub fn residuals_for(&self, series: &[f64]) -> Vec<f64> {
        arma_residuals(series, self.intercept, &self.phi, &self.theta)
    }
}

fn check_finite(series: &[f64]) -> Result<(), FitError> {
    match series.iter().position(|x| !x.is_finite()) {
        Some(i) => Err(FitError::NonFinite(i)),
        None => Ok(()),
    }
}

/// ARMA residual recursion with zero pre-sample values.
pub fn arma_residuals(series: &[f64], intercept: f64, phi: &[f64], theta: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; series.len()];
    for t in 0..series.len() {
        let mut v = series[t] - intercept;
        for (i, f) in phi.iter().enumerate() {
            if t > i {
                v -= f * series[t - 1 - i];
            }
        }
        for (j, th) in theta.iter().enumerate() {
            if t > j {
                v -= th * e[t - 1 - j];
            }
        }
        e[t] = v;
    }
    e
}

struct Layout {
    intercept: bool,
    p: usize,
    q: usize,
}

impl Layout {
    fn k(&self) -> usize {
        usize::from(self.intercept) + self.p + self.q
    }

    fn split<'a>(&self, params: &'a [f64]) -> (f64, &'a [f64], &'a [f64]) {
        let o = usize::from(self.intercept);
        let c = if self.intercept { params[0] } else { 0.0 };
        (c, &params[o..o + self.p], &params[o + self.p..])
    }
}

fn css(series: &[f64], layout: &Layout, params: &[f64]) -> (f64, Vec<f64>) {
    let (c, phi, theta) = layout.split(params);
    let e = arma_residuals(series, c, phi, theta);
    let s: f64 = e.iter().map(|x| x * x).sum();
    (if s.is_finite() { s } else { f64::INFINITY }, e)
}

/// Residuals and their Jacobian (row-major `n x k`) with respect to the parameters.
fn residual_jacobian(series: &[f64], layout: &Layout, params: &[f64], e: &[f64]) -> Vec<f64> {
    let (_, _, theta) = layout.split(params);
    let n = series.len();
    let k = layout.k();
    let o = usize::from(layout.intercept);
    let mut d = vec![0.0; n * k];
    for t in 0..n {
        for m in 0..k {
            let mut v = if layout.intercept && m == 0 {
                -1.0
            } else if m < o + layout.p {
                let i = m - o;
                if t > i {
                    -series[t - 1 - i]
                } else {
                    0.0
                }
            } else {
                let j = m - o - layout.p;
                if t > j {
                    -e[t - 1 - j]
                } else {
                    0.0
                }
            };
            for (l, th) in theta.iter().enumerate() {
                if t > l {
                    v -= th * d[(t - 1 - l) * k + m];
                }
            }
            d[t * k + m] = v;
        }
    }
    d
}

/// Least squares of `y_t` on lagged columns with zero pre-sample padding.
fn lagged_ols(y: &[f64], lagged: &[(&[f64], usize)], intercept: bool) -> Option<Vec<f64>> {
    let k = usize::from(intercept) + lagged.iter().map(|(_, l)| l).sum::<usize>();
    if k == 0 {
        return Some(Vec::new());
    }
    let mut x = Vec::with_capacity(y.len() * k);
    for t in 0..y.len() {
        if intercept {
            x.push(1.0);
        }
        for (src, lags) in lagged {
            for i in 0..*lags {
                x.push(if t > i { src[t - 1 - i] } else { 0.0 });
            }
        }
    }
    linalg::ols(&x, y, k).map(|f| f.coef)
}

fn initial_params(series: &[f64], layout: &Layout) -> Vec<f64> {
    let k = layout.k();
    if layout.q == 0 {
        return lagged_ols(series, &[(series, layout.p)], layout.intercept).unwrap_or_else(|| vec![0.0; k]);
    }
    // Hannan-Rissanen: long autoregression for proxy innovations, then a
    // regression on lagged returns and lagged proxies
    let long = (layout.p + layout.q + 4).max(10).min(series.len() / 4);
    let ar = lagged_ols(series, &[(series, long)], layout.intercept);
    let proxy = match ar {
        Some(coef) => {
            let (c, phi) = if layout.intercept { (coef[0], &coef[1..]) } else { (0.0, &coef[..]) };
            arma_residuals(series, c, phi, &[])
        }
        None => series.to_vec(),
    };
    let mut params = lagged_ols(series, &[(series, layout.p), (&proxy, layout.q)], layout.intercept)
        .unwrap_or_else(|| vec![0.0; k]);
    // keep the starting MA polynomial invertible (sum |theta| < 1 is sufficient)
    let o = usize::from(layout.intercept) + layout.p;
    let l1: f64 = params[o..].iter().map(|x| x.abs()).sum();
    if l1 >= 0.95 {
        params[o..].iter_mut().for_each(|x| *x *= 0.9 / l1);
    }
    params
}

/// Conditional sum of squares minimized by Levenberg-Marquardt.
fn minimize_css(series: &[f64], layout: &Layout, start: Vec<f64>, opts: &ArmaOptions) -> (Vec<f64>, f64, bool) {
    let k = layout.k();
    let mut params = start;
    let (mut s, mut e) = css(series, layout, &params);
    if k == 0 {
        return (params, s, true);
    }
    if !s.is_finite() {
        params = vec![0.0; k];
        (s, e) = css(series, layout, &params);
    }
    let mut mu = 1e-3;
    for _ in 0..opts.max_iter {
        let d = residual_jacobian(series, layout, &params, &e);
        let mut jtj = vec![0.0; k * k];
        let mut jte = vec![0.0; k];
        for (row, et) in d.chunks_exact(k).zip(&e) {
            for a in 0..k {
                jte[a] += row[a] * et;
                for b in 0..=a {
                    jtj[a * k + b] += row[a] * row[b];
                }
            }
        }
        for a in 0..k {
            for b in 0..a {
                jtj[b * k + a] = jtj[a * k + b];
            }
        }
        let grad_norm = jte.iter().map(|g| g.abs()).fold(0.0, f64::max);
        if grad_norm <= 1e-14 * s.max(f64::MIN_POSITIVE) {
            return (params, s, true);
        }

        let mut accepted = false;
        while mu <= 1e10 {
            let mut damped = jtj.clone();
            for a in 0..k {
                damped[a * k + a] += mu * jtj[a * k + a].max(1e-12);
            }
            let step = match linalg::cholesky(&damped, k) {
                Some(l) => linalg::cholesky_solve(&l, k, &jte),
                None => {
                    mu *= 10.0;
                    continue;
                }
            };
            let trial: Vec<f64> = params.iter().zip(&step).map(|(p, d)| p - d).collect();
            let (st, et) = css(series, layout, &trial);
            if st < s {
                let rel = (s - st) / s;
                params = trial;
                s = st;
                e = et;
                mu = (mu * 0.1).max(1e-12);
                accepted = true;
                if rel < opts.tol {
                    return (params, s, true);
                }
                break;
            }
            mu *= 10.0;
        }
        if !accepted {
            // no descent direction left at machine precision
            return (params, s, true);
        }
    }
    (params, s, false)
}

/// Fits ARMA(p, q) by conditional sum of squares.
///
/// `loglik` is the concentrated Gaussian log-likelihood
/// `-n/2 (ln 2 pi + ln(css / n) + 1)` and `aic = 2k - 2 loglik` with `k`
/// counting the coefficients and the innovation variance.
pub fn fit_arma(series: &[f64], p: usize, q: usize, opts: &ArmaOptions) -> Result<ArmaFit, FitError> {
    check_finite(series)?;
    let needed = 20 + p + q;
    if series.len() < needed {
        return Err(FitError::TooShort {
            needed,
            got: series.len(),
        });
    }
    let layout = Layout {
        intercept: opts.include_intercept,
        p,
        q,
    };
    let n = series.len() as f64;
    if series.iter().all(|&x| x == 0.0) {
        return Ok(ArmaFit {
            p,
            q,
            intercept: 0.0,
            has_intercept: opts.include_intercept,
            phi: vec![0.0; p],
            theta: vec![0.0; q],
            residuals: vec![0.0; series.len()],
            sigma2: 0.0,
            loglik: f64::INFINITY,
            aic: f64::NEG_INFINITY,
            converged: false,
        });
    }

    let start = initial_params(series, &layout);
    // q = 0: the padded least-squares start already is the CSS minimizer
    let (params, s, mut converged) = if q == 0 {
        let (s, _) = css(series, &layout, &start);
        (start, s, true)
    } else {
        minimize_css(series, &layout, start, opts)
    };
    let (c, phi, theta) = layout.split(&params);
    let residuals = arma_residuals(series, c, phi, theta);
    let sigma2 = s / n;
    let loglik = -0.5 * n * (LN_2PI + libm::log(sigma2) + 1.0);
    let k = layout.k() + 1;
    let aic = 2.0 * k as f64 - 2.0 * loglik;
    if !aic.is_finite() {
        converged = false;
    }
    Ok(ArmaFit {
        p,
        q,
        intercept: c,
        has_intercept: opts.include_intercept,
        phi: phi.to_vec(),
        theta: theta.to_vec(),
        residuals,
        sigma2,
        loglik,
        aic,
        converged,
    })
}

/// Searches `p <= p_max`, `q <= q_max` for the converged fit with minimal AIC.
///
/// Ties go to the smaller `p + q`, then the smaller `p`. A series that is
/// identically zero selects `(0, 0)`.
pub fn select_arma_fit(series: &[f64], p_max: usize, q_max: usize, opts: &ArmaOptions) -> Result<ArmaFit, FitError> {
    check_finite(series)?;
    if series.iter().all(|&x| x == 0.0) {
        return fit_arma(series, 0, 0, opts);
    }
    let mut orders: Vec<(usize, usize)> = (0..=p_max).flat_map(|p| (0..=q_max).map(move |q| (p, q))).collect();
    orders.sort_by_key(|&(p, q)| (p + q, p));
    let mut best: Option<ArmaFit> = None;
    let mut first_err = None;
    for (p, q) in orders {
        match fit_arma(series, p, q, opts) {
            Ok(fit) if fit.converged => {
                if best.as_ref().map_or(true, |b| fit.aic < b.aic) {
                    best = Some(fit);
                }
            }
            Ok(_) => {}
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    match (best, first_err) {
        (Some(fit), _) => Ok(fit),
        (None, Some(e @ (FitError::TooShort { .. } | FitError::NonFinite(_)))) => Err(e),
        (None, _) => Err(FitError::AllFailed),
    }
}

/// Order pair selected by [`select_arma_fit`].
pub fn select_arma(series: &[f64], p_max: usize, q_max: usize, opts: &ArmaOptions) -> Result<(usize, usize), FitError> {
    select_arma_fit(series, p_max, q_max, opts).map(|f| (f.p, f.q))
}

/// One-step-ahead conditional mean after the last observation of `history`.
///
/// `history` is the series the fit was estimated on; the residual tail comes
/// from the fit.
pub fn forecast_mean(fit: &ArmaFit, history: &[f64]) -> Result<f64, FitError> {
    let needed = fit.p.max(fit.q);
    if history.len() < needed || fit.residuals.len() < fit.q {
        return Err(FitError::TooShort {
            needed,
            got: history.len().min(fit.residuals.len()),
        });
    }
    let n = history.len();
    let m = fit.residuals.len();
    let ar: f64 = fit.phi.iter().enumerate().map(|(i, f)| f * history[n - 1 - i]).sum();
    let ma: f64 = fit.theta.iter().enumerate().map(|(j, t)| t * fit.residuals[m - 1 - j]).sum();
    Ok(fit.intercept + ar + ma)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GarchFit {
    pub omega: f64,
    pub alpha: f64,
    pub beta: f64,
    pub loglik: f64,
    pub cond_var: Vec<f64>,
    pub converged: bool,
}

fn check_garch_domain(omega: f64, alpha: f64, beta: f64) -> Result<(), FitError> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(FitError::Domain("omega must be positive"));
    }
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(FitError::Domain("alpha must be non-negative"));
    }
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(FitError::Domain("beta must be non-negative"));
    }
    Ok(())
}

fn backcast(residuals: &[f64]) -> Result<f64, FitError> {
    if residuals.len() < 2 {
        return Err(FitError::TooShort {
            needed: 2,
            got: residuals.len(),
        });
    }
    check_finite(residuals)?;
    let v = moments::sample_variance(residuals);
    if !(v > 0.0) {
        return Err(FitError::DegenerateVariance);
    }
    Ok(v)
}

/// Conditional variance path. The pre-sample squared residual and variance
/// are both the sample variance `s2`, so `sigma_1^2 = omega + (a + b) s2`.
fn variance_path(residuals: &[f64], s2: f64, omega: f64, alpha: f64, beta: f64) -> Vec<f64> {
    let mut h = Vec::with_capacity(residuals.len());
    let mut prev_e2 = s2;
    let mut prev_h = s2;
    for &e in residuals {
        let ht = omega + alpha * prev_e2 + beta * prev_h;
        h.push(ht);
        prev_e2 = e * e;
        prev_h = ht;
    }
    h
}

fn gaussian_loglik(residuals: &[f64], h: &[f64]) -> f64 {
    -0.5 * residuals
        .iter()
        .zip(h)
        .map(|(e, ht)| LN_2PI + libm::log(*ht) + e * e / ht)
        .sum::<f64>()
}

/// GARCH(1,1) conditional variances for the given parameters.
pub fn garch_variance(residuals: &[f64], omega: f64, alpha: f64, beta: f64) -> Result<Vec<f64>, FitError> {
    check_garch_domain(omega, alpha, beta)?;
    let s2 = backcast(residuals)?;
    Ok(variance_path(residuals, s2, omega, alpha, beta))
}

/// Gaussian log-likelihood `-1/2 sum [ln 2 pi + ln sigma_t^2 + e_t^2 / sigma_t^2]`.
pub fn loglik_garch(residuals: &[f64], omega: f64, alpha: f64, beta: f64) -> Result<f64, FitError> {
    let h = garch_variance(residuals, omega, alpha, beta)?;
    Ok(gaussian_loglik(residuals, &h))
}

/// Analytic gradient of [`loglik_garch`] with respect to `(omega, alpha, beta)`.
pub fn loglik_garch_gradient(residuals: &[f64], omega: f64, alpha: f64, beta: f64) -> Result<[f64; 3], FitError> {
    check_garch_domain(omega, alpha, beta)?;
    let s2 = backcast(residuals)?;
    let mut grad = [0.0; 3];
    let (mut prev_e2, mut prev_h) = (s2, s2);
    let mut dh = [0.0f64; 3];
    let mut prev_dh = [0.0f64; 3];
    for &e in residuals {
        let h = omega + alpha * prev_e2 + beta * prev_h;
        dh[0] = 1.0 + beta * prev_dh[0];
        dh[1] = prev_e2 + beta * prev_dh[1];
        dh[2] = prev_h + beta * prev_dh[2];
        let w = -0.5 * (1.0 / h - e * e / (h * h));
        for i in 0..3 {
            grad[i] += w * dh[i];
        }
        prev_dh = dh;
        prev_e2 = e * e;
        prev_h = h;
    }
    Ok(grad)
}

const SIMPLEX_SCALE: f64 = 1.0 - STATIONARITY_MARGIN;

/// Maps unconstrained `u` to `(omega, a, b)` with `omega > 0`, `a, b >= 0`,
/// `a + b <= 1 - margin`.
fn to_constrained(u: &[f64]) -> (f64, f64, f64) {
    let e1 = libm::exp(u[1]);
    let e2 = libm::exp(u[2]);
    let den = 1.0 + e1 + e2;
    (libm::exp(u[0]), SIMPLEX_SCALE * e1 / den, SIMPLEX_SCALE * e2 / den)
}

fn to_unconstrained(omega: f64, alpha: f64, beta: f64) -> [f64; 3] {
    let rest = 1.0 - (alpha + beta) / SIMPLEX_SCALE;
    [
        libm::log(omega),
        libm::log(alpha / (SIMPLEX_SCALE * rest)),
        libm::log(beta / (SIMPLEX_SCALE * rest)),
    ]
}

/// Standard starting point as `(omega / var, a, b)`.
pub const GARCH_START: (f64, f64, f64) = (0.05, 0.05, 0.90);

/// Fits GARCH(1,1) to `residuals` by Gaussian quasi-maximum likelihood.
///
/// The search runs Nelder-Mead on an unconstrained reparameterization of
/// the residuals standardized by their sample deviation; the result is
/// mapped back and never has a lower likelihood than the starting point
/// `omega = 0.05 var, a = 0.05, b = 0.90`.
pub fn fit_garch11(residuals: &[f64]) -> Result<GarchFit, FitError> {
    check_finite(residuals)?;
    if residuals.len() < MIN_GARCH_LEN {
        return Err(FitError::TooShort {
            needed: MIN_GARCH_LEN,
            got: residuals.len(),
        });
    }
    let var = backcast(residuals)?;
    let sd = libm::sqrt(var);
    let z: Vec<f64> = residuals.iter().map(|e| e / sd).collect();
    let z_var = moments::sample_variance(&z);

    let objective = |u: &[f64]| {
        let (w, a, b) = to_constrained(u);
        let h = variance_path(&z, z_var, w * z_var, a, b);
        -gaussian_loglik(&z, &h)
    };
    let (w0, a0, b0) = GARCH_START;
    let x0 = to_unconstrained(w0, a0, b0);
    let min = optim::nelder_mead(objective, &x0, &[0.5, 0.5, 0.5], NelderMeadOptions::default());

    let (w, alpha, beta) = to_constrained(&min.x);
    let start_ll = loglik_garch(residuals, w0 * var, a0, b0)?;
    let mut fit = GarchFit {
        omega: w * var,
        alpha,
        beta,
        loglik: loglik_garch(residuals, w * var, alpha, beta)?,
        cond_var: Vec::new(),
        converged: min.converged,
    };
    if !(fit.loglik >= start_ll) {
        fit.omega = w0 * var;
        fit.alpha = a0;
        fit.beta = b0;
        fit.loglik = start_ll;
    }
    fit.cond_var = variance_path(residuals, var, fit.omega, fit.alpha, fit.beta);
    Ok(fit)
}

/// Configuration of the combined ARMA-GARCH fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitConfig {
    pub p_max: usize,
    pub q_max: usize,
    /// Skip the AIC search and use these orders.
    pub orders: Option<(usize, usize)>,
    pub arma: ArmaOptions,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            p_max: MAX_ORDER,
            q_max: MAX_ORDER,
            orders: None,
            arma: ArmaOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArmaGarchFit {
    pub arma: ArmaFit,
    pub garch: GarchFit,
    pub mean_forecast: f64,
}

impl ArmaGarchFit {
    /// The GARCH-stage log-likelihood on the ARMA residuals.
    pub fn loglik(&self) -> f64 {
        self.garch.loglik
    }
}

/// ARMA stage of [`fit_arma_garch`]: order search (or fixed orders) and the
/// one-step mean forecast.
pub fn fit_mean_stage(series: &[f64], cfg: &FitConfig) -> Result<(ArmaFit, f64), FitError> {
    let arma = match cfg.orders {
        Some((p, q)) => fit_arma(series, p, q, &cfg.arma)?,
        None => select_arma_fit(series, cfg.p_max, cfg.q_max, &cfg.arma)?,
    };
    let forecast = forecast_mean(&arma, series)?;
    Ok((arma, forecast))
}

/// Selects ARMA orders by AIC, fits GARCH(1,1) on the residuals and forecasts
/// the next conditional mean.
pub fn fit_arma_garch(series: &[f64], cfg: &FitConfig) -> Result<ArmaGarchFit, FitError> {
    let (arma, mean_forecast) = fit_mean_stage(series, cfg)?;
    let garch = fit_garch11(&arma.residuals)?;
    Ok(ArmaGarchFit {
        arma,
        garch,
        mean_forecast,
    })
}
