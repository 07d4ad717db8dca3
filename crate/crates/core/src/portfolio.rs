//! Long-only two-asset mean-variance portfolios (one risky asset plus a
//! zero-return risk-free asset) driven by one-step mean forecasts.
//!
//! TMV uses the regular forecast and the variance of `r` over the forecast
//! window, LAMV the adjusted forecast and the variance of `r_liq`. Both are
//! scored on realized regular returns.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use chrono::NaiveDate;

use crate::backtest::ForecastSeries;
use crate::liquidity::DailyRecord;
use crate::moments;
use crate::stats::Direction;

pub const DEFAULT_LAMBDA_FLOOR: f64 = 1e-4;
/// Shortest market window accepted by [`market_lambda`].
pub const MIN_LAMBDA_WINDOW: usize = 30;
/// Shortest return series accepted by [`sharpe_annualized`].
pub const MIN_SHARPE_LEN: usize = 30;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PortfolioError {
    #[error("series too short: need {needed}, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("window has zero variance")]
    ZeroVariance,
    #[error("portfolio returns have zero volatility")]
    DegenerateVolatility,
    #[error("{0}")]
    Domain(&'static str),
    #[error("weights ({weights}) and realized returns ({returns}) are misaligned")]
    Misalignment { weights: usize, returns: usize },
    #[error("no daily record for forecast date {0}")]
    MissingRecord(NaiveDate),
}

/// Risk aversion from the market: `mean / variance`, floored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskAversion {
    pub lambda: f64,
}

pub fn market_lambda(window: &[f64], floor: f64) -> Result<RiskAversion, PortfolioError> {
    if window.len() < MIN_LAMBDA_WINDOW {
        return Err(PortfolioError::TooShort {
            needed: MIN_LAMBDA_WINDOW,
            got: window.len(),
        });
    }
    if !(floor > 0.0) {
        return Err(PortfolioError::Domain("lambda floor must be positive"));
    }
    let var = moments::sample_variance(window);
    if moments::negligible_variance(var, window) {
        return Err(PortfolioError::ZeroVariance);
    }
    let lambda = moments::mean(window) / var;
    Ok(RiskAversion {
        lambda: if lambda > floor { lambda } else { floor },
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MvWeights {
    pub w_asset: f64,
    pub w_rf: f64,
}

/// Mean-variance objective `w mu - lambda/2 w^2 sigma2`.
pub fn mv_objective(w: f64, mu_hat: f64, sigma2: f64, lam: RiskAversion) -> f64 {
    w * mu_hat - 0.5 * lam.lambda * w * w * sigma2
}

/// Maximizes [`mv_objective`] over `w` in `[0, 1]`: `clamp(mu / (lambda sigma2), 0, 1)`.
pub fn mv_weights(mu_hat: f64, sigma2: f64, lam: RiskAversion) -> Result<MvWeights, PortfolioError> {
    if !(sigma2 > 0.0) || !sigma2.is_finite() {
        return Err(PortfolioError::Domain("asset variance must be positive"));
    }
    if !(lam.lambda > 0.0) || !lam.lambda.is_finite() || !mu_hat.is_finite() {
        return Err(PortfolioError::Domain("risk aversion and forecast must be finite, lambda > 0"));
    }
    let w = (mu_hat / (lam.lambda * sigma2)).clamp(0.0, 1.0);
    // w lies in [0, 1], so 1 - w is exact and w + (1 - w) == 1
    Ok(MvWeights { w_asset: w, w_rf: 1.0 - w })
}

/// `p_{t+1} = w_t r_{t+1}`: `weights[i]` settles against `next_returns[i]`.
pub fn realized_portfolio_returns(weights: &[f64], next_returns: &[f64]) -> Result<Vec<f64>, PortfolioError> {
    if weights.len() != next_returns.len() {
        return Err(PortfolioError::Misalignment {
            weights: weights.len(),
            returns: next_returns.len(),
        });
    }
    Ok(weights.iter().zip(next_returns).map(|(w, r)| w * r).collect())
}

/// `(mean / sd) * sqrt(N)` with the sample sd and zero risk-free rate.
pub fn sharpe_annualized(returns: &[f64], periods_per_year: f64) -> Result<f64, PortfolioError> {
    if returns.len() < MIN_SHARPE_LEN {
        return Err(PortfolioError::TooShort {
            needed: MIN_SHARPE_LEN,
            got: returns.len(),
        });
    }
    let var = moments::sample_variance(returns);
    if moments::negligible_variance(var, returns) {
        return Err(PortfolioError::DegenerateVolatility);
    }
    Ok(moments::mean(returns) / libm::sqrt(var) * libm::sqrt(periods_per_year))
}

/// Equal-weight mean of `r` across every asset with a record on each date.
pub fn equal_weight_market(records: &[DailyRecord]) -> BTreeMap<NaiveDate, f64> {
    let mut acc: BTreeMap<NaiveDate, (f64, usize)> = BTreeMap::new();
    for d in records {
        let e = acc.entry(d.date).or_insert((0.0, 0));
        e.0 += d.r;
        e.1 += 1;
    }
    acc.into_iter().map(|(k, (s, n))| (k, s / n as f64)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PortfolioKind {
    Tmv,
    Lamv,
}

impl PortfolioKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Tmv => "TMV",
            Self::Lamv => "LAMV",
        }
    }
}

impl fmt::Display for PortfolioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PortfolioSpec {
    /// Days of history used for variances and the market lambda.
    pub window_len: usize,
    pub lambda_floor: f64,
    pub periods_per_year: f64,
}

/// Daily weights and realized returns of one portfolio. `dates[i]` is the
/// settlement day; `weights[i]` was fixed with data from earlier days only.
#[derive(Debug, Clone, PartialEq)]
pub struct PortfolioSeries {
    pub ticker: String,
    pub kind: PortfolioKind,
    pub dates: Vec<NaiveDate>,
    pub weights: Vec<MvWeights>,
    pub lambda: Vec<f64>,
    pub returns: Vec<f64>,
    pub cumulative: Vec<f64>,
    /// Zero when the realized returns have no volatility (e.g. never invested).
    pub sharpe_annualized: f64,
}

/// TMV and LAMV for one ticker and the Sharpe comparison arrow.
#[derive(Debug, Clone, PartialEq)]
pub struct PortfolioComparison {
    pub tmv: PortfolioSeries,
    pub lamv: PortfolioSeries,
    /// LAMV relative to TMV.
    pub direction: Direction,
}

fn compare_sharpe(tmv: f64, lamv: f64) -> Direction {
    let tol = 1e-12 * tmv.abs().max(lamv.abs()).max(1.0);
    if (lamv - tmv).abs() <= tol {
        Direction::NoChange
    } else if lamv > tmv {
        Direction::Up
    } else {
        Direction::Down
    }
}

/// Builds TMV and LAMV for one ticker from its forecasts and records.
///
/// Each forecast dated `t` is paired with the `window_len` records before `t`
/// for the variance and the market lambda, and settles on record `t`.
pub fn run_tmv_lamv(
    forecasts: &ForecastSeries,
    records: &[DailyRecord],
    market: &BTreeMap<NaiveDate, f64>,
    spec: &PortfolioSpec,
) -> Result<PortfolioComparison, PortfolioError> {
    let n = forecasts.dates.len();
    if forecasts.mu_hat_reg.len() != n || forecasts.mu_hat_liq.len() != n {
        return Err(PortfolioError::Misalignment {
            weights: n,
            returns: forecasts.mu_hat_reg.len().min(forecasts.mu_hat_liq.len()),
        });
    }
    let mut series = [PortfolioKind::Tmv, PortfolioKind::Lamv].map(|kind| PortfolioSeries {
        ticker: forecasts.ticker.clone(),
        kind,
        dates: Vec::with_capacity(n),
        weights: Vec::with_capacity(n),
        lambda: Vec::with_capacity(n),
        returns: Vec::with_capacity(n),
        cumulative: Vec::with_capacity(n),
        sharpe_annualized: 0.0,
    });
    let mut next_r = Vec::with_capacity(n);
    for (i, date) in forecasts.dates.iter().enumerate() {
        let t = records
            .binary_search_by(|d| d.date.cmp(date))
            .map_err(|_| PortfolioError::MissingRecord(*date))?;
        if t < spec.window_len {
            return Err(PortfolioError::TooShort {
                needed: spec.window_len,
                got: t,
            });
        }
        let window = &records[t - spec.window_len..t];
        let mkt: Vec<f64> = window.iter().filter_map(|d| market.get(&d.date).copied()).collect();
        let lam = market_lambda(&mkt, spec.lambda_floor)?;
        let r: Vec<f64> = window.iter().map(|d| d.r).collect();
        let r_liq: Vec<f64> = window.iter().map(|d| d.r_liq).collect();
        let inputs = [
            (forecasts.mu_hat_reg[i], moments::sample_variance(&r)),
            (forecasts.mu_hat_liq[i], moments::sample_variance(&r_liq)),
        ];
        for (s, (mu, var)) in series.iter_mut().zip(inputs) {
            s.weights.push(mv_weights(mu, var, lam)?);
            s.lambda.push(lam.lambda);
            s.dates.push(*date);
        }
        next_r.push(records[t].r);
    }
    for s in series.iter_mut() {
        let w: Vec<f64> = s.weights.iter().map(|w| w.w_asset).collect();
        s.returns = realized_portfolio_returns(&w, &next_r)?;
        let mut growth = 1.0;
        s.cumulative = s
            .returns
            .iter()
            .map(|p| {
                growth *= 1.0 + p;
                growth - 1.0
            })
            .collect();
        s.sharpe_annualized = match sharpe_annualized(&s.returns, spec.periods_per_year) {
            Ok(v) => v,
            Err(PortfolioError::DegenerateVolatility) => 0.0,
            Err(e) => return Err(e),
        };
    }
    let [tmv, lamv] = series;
    let direction = compare_sharpe(tmv.sharpe_annualized, lamv.sharpe_annualized);
    Ok(PortfolioComparison { tmv, lamv, direction })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn lambda_from_market_window() {
        // mean 0.0008, sample variance 0.0001
        let d = 0.01 * libm::sqrt(39.0 / 40.0);
        let w: Vec<f64> = (0..40).map(|i| 0.0008 + if i % 2 == 0 { d } else { -d }).collect();
        assert_relative_eq!(market_lambda(&w, DEFAULT_LAMBDA_FLOOR).unwrap().lambda, 8.0, max_relative = 1e-9);
        let neg: Vec<f64> = w.iter().map(|x| x - 0.01).collect();
        assert_eq!(market_lambda(&neg, DEFAULT_LAMBDA_FLOOR).unwrap().lambda, DEFAULT_LAMBDA_FLOOR);
        assert_eq!(market_lambda(&[0.001; 40], DEFAULT_LAMBDA_FLOOR), Err(PortfolioError::ZeroVariance));
        assert!(matches!(market_lambda(&w[..29], DEFAULT_LAMBDA_FLOOR), Err(PortfolioError::TooShort { .. })));
    }

    #[test]
    fn weight_closed_form() {
        let lam = |l| RiskAversion { lambda: l };
        assert_eq!(mv_weights(-0.01, 0.0004, lam(5.0)).unwrap().w_asset, 0.0);
        assert_relative_eq!(mv_weights(0.001, 0.0004, lam(5.0)).unwrap().w_asset, 0.5, max_relative = 1e-12);
        let w = mv_weights(0.002, 0.0004, lam(4.0)).unwrap();
        assert_eq!((w.w_asset, w.w_rf), (1.0, 0.0));
        assert!(mv_weights(0.001, 0.0, lam(1.0)).is_err());
    }

    #[test]
    fn settlement() {
        assert_eq!(realized_portfolio_returns(&[0.0, 0.0], &[0.1, -0.3]).unwrap(), [0.0, 0.0]);
        assert_eq!(realized_portfolio_returns(&[1.0, 1.0], &[0.1, -0.3]).unwrap(), [0.1, -0.3]);
        assert_eq!(realized_portfolio_returns(&[0.5], &[0.02]).unwrap(), [0.01]);
        assert!(matches!(realized_portfolio_returns(&[0.5], &[]), Err(PortfolioError::Misalignment { .. })));
    }

    #[test]
    fn sharpe_closed_form_and_scale() {
        // mean 0.001, sample sd 0.02
        let d = 0.02 * libm::sqrt(99.0 / 100.0);
        let x: Vec<f64> = (0..100).map(|i| 0.001 + if i % 2 == 0 { d } else { -d }).collect();
        let sr = sharpe_annualized(&x, 252.0).unwrap();
        assert_relative_eq!(sr, 0.05 * libm::sqrt(252.0), max_relative = 1e-9);
        assert_relative_eq!(sr, 0.7937, epsilon = 1e-4);
        let scaled: Vec<f64> = x.iter().map(|v| v * 7.5).collect();
        assert_relative_eq!(sharpe_annualized(&scaled, 252.0).unwrap(), sr, max_relative = 1e-12);
        assert_eq!(sharpe_annualized(&[0.01; 40], 252.0), Err(PortfolioError::DegenerateVolatility));
    }

    #[test]
    fn sharpe_direction_tolerance() {
        assert_eq!(compare_sharpe(0.5, 0.5), Direction::NoChange);
        assert_eq!(compare_sharpe(0.5, 0.6), Direction::Up);
        assert_eq!(compare_sharpe(0.5, -0.6), Direction::Down);
    }
}
