//! Rolling-window ARMA-GARCH fits of the regular and liquidity-adjusted
//! daily return series.
//!
//! Window `i` covers days `[t - L, t)` with `t = L + i`; its one-step forecast
//! targets day `t`. There are `n - L` windows. Fits never share state across
//! windows, so any [`WindowMap`] that preserves index order yields identical
//! output.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use chrono::NaiveDate;

use crate::econometrics::{self, ArmaOptions, FitConfig, FitError, MAX_ORDER};
use crate::liquidity::DailyRecord;
use crate::stats::{self, StatsError, TestResult};

/// Shortest window accepted by [`WindowSpec`].
pub const MIN_WINDOW_LEN: usize = 60;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BacktestError {
    #[error("history of {n_days} days is too short for a {window_len}-day window")]
    TooShortHistory { n_days: usize, window_len: usize },
    #[error("window length {0} is below the minimum of 60 days")]
    WindowTooShort(usize),
    #[error("records must belong to one ticker with strictly increasing dates (index {0})")]
    NotContiguous(usize),
}

/// How ARMA orders are chosen across windows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OrderSelection {
    /// AIC search in every window.
    #[default]
    PerWindow,
    /// AIC search in the first window only; later windows reuse those orders.
    FirstWindow,
}

impl OrderSelection {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::PerWindow => "per_window",
            Self::FirstWindow => "first_window",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowSpec {
    pub window_len: usize,
    pub p_max: usize,
    pub q_max: usize,
    pub selection: OrderSelection,
    pub include_intercept: bool,
}

impl WindowSpec {
    pub fn new(window_len: usize) -> Result<Self, BacktestError> {
        Self {
            window_len,
            p_max: MAX_ORDER,
            q_max: MAX_ORDER,
            selection: OrderSelection::PerWindow,
            include_intercept: false,
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self, BacktestError> {
        if self.window_len < MIN_WINDOW_LEN {
            return Err(BacktestError::WindowTooShort(self.window_len));
        }
        Ok(self)
    }

    fn fit_config(&self, orders: Option<(usize, usize)>) -> FitConfig {
        FitConfig {
            p_max: self.p_max,
            q_max: self.q_max,
            orders,
            arma: ArmaOptions {
                include_intercept: self.include_intercept,
                ..ArmaOptions::default()
            },
        }
    }
}

/// Index ranges `[t - window_len, t)` for `t = window_len .. n_days - 1`.
pub fn rolling_windows(n_days: usize, window_len: usize) -> Result<Vec<Range<usize>>, BacktestError> {
    if n_days <= window_len {
        return Err(BacktestError::TooShortHistory { n_days, window_len });
    }
    Ok((window_len..n_days).map(|t| t - window_len..t).collect())
}

/// Maps window indices to results, returned in index order.
pub trait WindowMap {
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Runs windows one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl WindowMap for Sequential {
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..n).map(f).collect()
    }
}

/// Which return series a fit was run on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Path {
    Reg,
    Liq,
}

impl Path {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Reg => "reg",
            Self::Liq => "liq",
        }
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Result of one window on one path. Values the fit could not produce are NaN,
/// except `mean_forecast`, which falls back to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowOutcome {
    pub p: usize,
    pub q: usize,
    pub omega: f64,
    pub alpha: f64,
    pub beta: f64,
    pub loglik: f64,
    pub mean_forecast: f64,
    pub converged: bool,
    pub error: Option<FitError>,
}

impl WindowOutcome {
    fn failed(p: usize, q: usize, mean_forecast: f64, error: FitError) -> Self {
        Self {
            p,
            q,
            omega: f64::NAN,
            alpha: f64::NAN,
            beta: f64::NAN,
            loglik: f64::NAN,
            mean_forecast,
            converged: false,
            error: Some(error),
        }
    }
}

fn fit_window(series: &[f64], cfg: &FitConfig) -> WindowOutcome {
    let (arma, forecast) = match econometrics::fit_mean_stage(series, cfg) {
        Ok(v) => v,
        Err(e) => {
            let (p, q) = cfg.orders.unwrap_or((0, 0));
            return WindowOutcome::failed(p, q, 0.0, e);
        }
    };
    let forecast = if forecast.is_finite() { forecast } else { 0.0 };
    match econometrics::fit_garch11(&arma.residuals) {
        Ok(g) => WindowOutcome {
            p: arma.p,
            q: arma.q,
            omega: g.omega,
            alpha: g.alpha,
            beta: g.beta,
            loglik: g.loglik,
            mean_forecast: forecast,
            converged: arma.converged && g.converged,
            error: None,
        },
        Err(e) => WindowOutcome::failed(arma.p, arma.q, forecast, e),
    }
}

/// Fits every window of `series`.
pub fn run_backtest<M: WindowMap>(series: &[f64], spec: &WindowSpec, mapper: &M) -> Result<Vec<WindowOutcome>, BacktestError> {
    let spec = spec.validated()?;
    let windows = rolling_windows(series.len(), spec.window_len)?;
    let orders = match spec.selection {
        OrderSelection::PerWindow => None,
        OrderSelection::FirstWindow => {
            let first = &series[windows[0].clone()];
            let cfg = spec.fit_config(None);
            Some(
                econometrics::select_arma(first, cfg.p_max, cfg.q_max, &cfg.arma)
                    .unwrap_or((0, 0)),
            )
        }
    };
    let cfg = spec.fit_config(orders);
    Ok(mapper.map(windows.len(), |i| fit_window(&series[windows[i].clone()], &cfg)))
}

fn check_contiguous(records: &[DailyRecord]) -> Result<(), BacktestError> {
    match records
        .windows(2)
        .position(|w| w[0].ticker != w[1].ticker || w[0].date >= w[1].date)
    {
        Some(i) => Err(BacktestError::NotContiguous(i + 1)),
        None => Ok(()),
    }
}

/// Paired per-window results for the two paths of one ticker.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonPanel {
    pub ticker: String,
    /// Last day inside each window.
    pub window_end: Vec<NaiveDate>,
    /// Day each window's forecast targets.
    pub target_date: Vec<NaiveDate>,
    pub reg: Vec<WindowOutcome>,
    pub liq: Vec<WindowOutcome>,
}

/// t-tests of the regular path (x) against the adjusted path (y).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PanelTests {
    pub loglik: TestResult,
    pub alpha: TestResult,
    pub beta: TestResult,
    /// Windows where both paths converged.
    pub n_windows: usize,
}

impl ComparisonPanel {
    pub fn len(&self) -> usize {
        self.window_end.len()
    }

    pub fn is_empty(&self) -> bool {
        self.window_end.is_empty()
    }

    /// Windows where both paths converged.
    pub fn both_converged(&self) -> impl Iterator<Item = (&WindowOutcome, &WindowOutcome)> {
        self.reg.iter().zip(&self.liq).filter(|(r, l)| r.converged && l.converged)
    }

    fn paired(&self, f: impl Fn(&WindowOutcome) -> f64) -> (Vec<f64>, Vec<f64>) {
        self.both_converged().map(|(r, l)| (f(r), f(l))).unzip()
    }

    /// Pooled t-tests on loglik, `a` and `b` over the windows where both paths converged.
    pub fn tests(&self) -> Result<PanelTests, StatsError> {
        let (lr, ll) = self.paired(|w| w.loglik);
        let (ar, al) = self.paired(|w| w.alpha);
        let (br, bl) = self.paired(|w| w.beta);
        Ok(PanelTests {
            loglik: stats::t_test_two_sample(&lr, &ll)?,
            alpha: stats::t_test_two_sample(&ar, &al)?,
            beta: stats::t_test_two_sample(&br, &bl)?,
            n_windows: lr.len(),
        })
    }

    /// One forecast per window and path.
    pub fn forecasts(&self) -> ForecastSeries {
        ForecastSeries {
            ticker: self.ticker.clone(),
            dates: self.target_date.clone(),
            mu_hat_reg: self.reg.iter().map(|w| w.mean_forecast).collect(),
            mu_hat_liq: self.liq.iter().map(|w| w.mean_forecast).collect(),
        }
    }
}

/// One-step mean forecasts, each dated to the day it predicts.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastSeries {
    pub ticker: String,
    pub dates: Vec<NaiveDate>,
    pub mu_hat_reg: Vec<f64>,
    pub mu_hat_liq: Vec<f64>,
}

/// Fits both paths of one ticker's records over every rolling window.
pub fn run_model_comparison<M: WindowMap>(
    records: &[DailyRecord],
    spec: &WindowSpec,
    mapper: &M,
) -> Result<ComparisonPanel, BacktestError> {
    check_contiguous(records)?;
    let windows = rolling_windows(records.len(), spec.validated()?.window_len)?;
    let r: Vec<f64> = records.iter().map(|d| d.r).collect();
    let r_liq: Vec<f64> = records.iter().map(|d| d.r_liq).collect();
    Ok(ComparisonPanel {
        ticker: records[0].ticker.clone(),
        window_end: windows.iter().map(|w| records[w.end - 1].date).collect(),
        target_date: windows.iter().map(|w| records[w.end].date).collect(),
        reg: run_backtest(&r, spec, mapper)?,
        liq: run_backtest(&r_liq, spec, mapper)?,
    })
}

/// Forecast series of [`run_model_comparison`].
pub fn forecast_series<M: WindowMap>(
    records: &[DailyRecord],
    spec: &WindowSpec,
    mapper: &M,
) -> Result<ForecastSeries, BacktestError> {
    run_model_comparison(records, spec, mapper).map(|p| p.forecasts())
}
