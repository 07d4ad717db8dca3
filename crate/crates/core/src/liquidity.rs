//! Liquidity-adjusted minute returns and their daily aggregates.
//!
//! Each minute gets an illiquidity ratio
//! `ratio = (|r| / mean|r|) / (A / mean A)`, where `A` is the dollar amount
//! traded. A per-day normalization factor `eta` rescales the ratios so they
//! sum to the number of minutes, and the liquidity factor of a minute is
//! `sqrt(eta * ratio)`. Liquidity-adjusted minute returns are the observed
//! returns multiplied by their factor.
//!
//! Daily returns compound the minute returns, daily volatilities scale the
//! population variance of the minute returns by the minute count, and the
//! liquidity beta pair compares the regular and adjusted daily values:
//! `beta_jump = |r / r_liq|`, `beta_diff = sigma / sigma_liq`, both capped.

use alloc::string::String;
use alloc::vec::Vec;

use chrono::NaiveDate;

use crate::marketdata::{minute_series, TradingDay};
use crate::moments;

/// Upper clamp applied to both liquidity betas.
pub const DEFAULT_BETA_CAP: f64 = 10.0;
/// Default histogram resolution over `[0, cap]`.
pub const DEFAULT_HISTOGRAM_BINS: usize = 50;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LiquidityError {
    #[error("empty input")]
    Empty,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("every minute return is zero")]
    AllZeroReturns,
    #[error("every minute amount is zero")]
    AllZeroAmounts,
    #[error("negative amount at minute {0}")]
    NegativeAmount(usize),
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("histogram needs at least one bin and a positive cap")]
    BadBins,
}

/// Per-minute liquidity factors for one day.
#[derive(Debug, Clone, PartialEq)]
pub struct LiquidityFactors {
    pub eta: f64,
    /// One factor per input minute; excluded minutes carry 0.
    pub per_minute: Vec<f64>,
    pub effective_t: usize,
    /// Minutes dropped because they traded nothing but moved the price.
    pub excluded: Vec<usize>,
}

impl LiquidityFactors {
    /// `(returns, amounts)` restricted to the minutes that count towards `effective_t`.
    pub fn retained<'a>(&'a self, xs: &'a [f64]) -> impl Iterator<Item = f64> + 'a {
        let mut skip = self.excluded.iter().peekable();
        xs.iter().enumerate().filter_map(move |(i, &x)| {
            if skip.peek() == Some(&&i) {
                skip.next();
                None
            } else {
                Some(x)
            }
        })
    }
}

/// Computes `eta` and the per-minute liquidity factors.
///
/// Zero-return minutes get ratio 0 but still count towards `effective_t`.
/// Minutes with zero amount and a nonzero return have no defined ratio; they
/// are excluded from the normalization sum and from `effective_t`, and their
/// index is reported in `excluded`.
pub fn normalization_factor(returns: &[f64], amounts: &[f64]) -> Result<LiquidityFactors, LiquidityError> {
    if returns.len() != amounts.len() {
        return Err(LiquidityError::LengthMismatch(returns.len(), amounts.len()));
    }
    if returns.is_empty() {
        return Err(LiquidityError::Empty);
    }
    for (i, (&r, &a)) in returns.iter().zip(amounts).enumerate() {
        if !r.is_finite() || !a.is_finite() {
            return Err(LiquidityError::NonFinite(i));
        }
        if a < 0.0 {
            return Err(LiquidityError::NegativeAmount(i));
        }
    }
    if amounts.iter().all(|&a| a == 0.0) {
        return Err(LiquidityError::AllZeroAmounts);
    }

    let excluded: Vec<usize> = returns
        .iter()
        .zip(amounts)
        .enumerate()
        .filter(|(_, (&r, &a))| a == 0.0 && r != 0.0)
        .map(|(i, _)| i)
        .collect();
    let keep = |i: usize| excluded.binary_search(&i).is_err();

    let effective_t = returns.len() - excluded.len();
    let (sum_abs, sum_amt) = returns
        .iter()
        .zip(amounts)
        .enumerate()
        .filter(|(i, _)| keep(*i))
        .fold((0.0, 0.0), |(sr, sa), (_, (r, a))| (sr + r.abs(), sa + a));
    if sum_abs == 0.0 {
        return Err(LiquidityError::AllZeroReturns);
    }
    let mean_abs = sum_abs / effective_t as f64;
    let mean_amt = sum_amt / effective_t as f64;

    let ratios: Vec<f64> = returns
        .iter()
        .zip(amounts)
        .enumerate()
        .map(|(i, (&r, &a))| {
            if !keep(i) || r == 0.0 {
                0.0
            } else {
                (r.abs() / mean_abs) / (a / mean_amt)
            }
        })
        .collect();
    let total: f64 = ratios.iter().sum();
    let eta = effective_t as f64 / total;
    let per_minute = ratios.iter().map(|&x| libm::sqrt(eta * x)).collect();

    Ok(LiquidityFactors {
        eta,
        per_minute,
        effective_t,
        excluded,
    })
}

/// Liquidity-adjusted minute returns `factor * r`.
pub fn adjust_returns(returns: &[f64], factors: &LiquidityFactors) -> Result<Vec<f64>, LiquidityError> {
    if returns.len() != factors.per_minute.len() {
        return Err(LiquidityError::LengthMismatch(returns.len(), factors.per_minute.len()));
    }
    Ok(returns.iter().zip(&factors.per_minute).map(|(r, f)| r * f).collect())
}

/// Daily return and intraday volatility, regular and liquidity-adjusted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DailyAggregates {
    pub r: f64,
    pub r_liq: f64,
    pub sigma: f64,
    pub sigma_liq: f64,
    pub minutes: usize,
}

fn compound(xs: &[f64]) -> f64 {
    xs.iter().fold(1.0, |acc, x| acc * (1.0 + x)) - 1.0
}

fn intraday_vol(xs: &[f64]) -> f64 {
    libm::sqrt(xs.len() as f64 * moments::population_variance(xs))
}

/// Compounds minute returns into daily returns and scales the minute
/// variance (population, 1/T) by T into a daily intraday volatility.
pub fn daily_aggregates(returns: &[f64], adj_returns: &[f64]) -> Result<DailyAggregates, LiquidityError> {
    if returns.len() != adj_returns.len() {
        return Err(LiquidityError::LengthMismatch(returns.len(), adj_returns.len()));
    }
    if returns.is_empty() {
        return Err(LiquidityError::Empty);
    }
    Ok(DailyAggregates {
        r: compound(returns),
        r_liq: compound(adj_returns),
        sigma: intraday_vol(returns),
        sigma_liq: intraday_vol(adj_returns),
        minutes: returns.len(),
    })
}

/// Liquidity beta pair of one day.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiquidityBetas {
    pub beta_jump: f64,
    pub beta_diff: f64,
    /// Set when a degenerate numerator or denominator rule fired.
    pub degenerate: bool,
}

fn capped_ratio(num: f64, den: f64, cap: f64) -> (f64, bool) {
    let (num, den) = (num.abs(), den.abs());
    match (num == 0.0, den == 0.0) {
        (true, true) => (1.0, true),
        (false, true) => (cap, true),
        (true, false) => (1.0 / cap, true),
        (false, false) => ((num / den).min(cap), false),
    }
}

/// `beta_jump = min(|r / r_liq|, cap)` and `beta_diff = min(sigma / sigma_liq, cap)`.
///
/// A zero denominator with a nonzero numerator maps to `cap`, two zeros map
/// to the equilibrium value 1, and a zero numerator over a nonzero
/// denominator maps to `1 / cap`. Any of these marks the day degenerate.
pub fn liquidity_betas(agg: &DailyAggregates, cap: f64) -> LiquidityBetas {
    let (beta_jump, dj) = capped_ratio(agg.r, agg.r_liq, cap);
    let (beta_diff, dd) = capped_ratio(agg.sigma, agg.sigma_liq, cap);
    LiquidityBetas {
        beta_jump,
        beta_diff,
        degenerate: dj || dd,
    }
}

/// One row of the daily liquidity panel.
#[derive(Debug, Clone, PartialEq)]
pub struct DailyRecord {
    pub ticker: String,
    pub date: NaiveDate,
    pub r: f64,
    pub r_liq: f64,
    pub sigma: f64,
    pub sigma_liq: f64,
    pub beta_jump: f64,
    pub beta_diff: f64,
    pub degenerate: bool,
}

/// Builds a day's [`DailyRecord`] from its minute returns and amounts.
///
/// Days where no factor can be formed (all returns zero, or nothing traded)
/// get `r_liq = sigma_liq = 0` and are flagged degenerate.
pub fn daily_record(
    ticker: &str,
    date: NaiveDate,
    returns: &[f64],
    amounts: &[f64],
    cap: f64,
) -> Result<DailyRecord, LiquidityError> {
    let (agg, forced_degenerate) = match normalization_factor(returns, amounts) {
        Ok(factors) => {
            let kept: Vec<f64> = factors.retained(returns).collect();
            let adjusted = adjust_returns(returns, &factors)?;
            let adjusted: Vec<f64> = factors.retained(&adjusted).collect();
            (daily_aggregates(&kept, &adjusted)?, false)
        }
        Err(LiquidityError::AllZeroReturns | LiquidityError::AllZeroAmounts) => {
            let zeros = alloc::vec![0.0; returns.len()];
            (daily_aggregates(returns, &zeros)?, true)
        }
        Err(e) => return Err(e),
    };
    let betas = liquidity_betas(&agg, cap);
    Ok(DailyRecord {
        ticker: String::from(ticker),
        date,
        r: agg.r,
        r_liq: agg.r_liq,
        sigma: agg.sigma,
        sigma_liq: agg.sigma_liq,
        beta_jump: betas.beta_jump,
        beta_diff: betas.beta_diff,
        degenerate: betas.degenerate || forced_degenerate,
    })
}

/// [`daily_record`] for a trading day's minute series.
pub fn record_for_day(day: &TradingDay, cap: f64) -> Result<DailyRecord, LiquidityError> {
    let series = minute_series(day).map_err(|_| LiquidityError::Empty)?;
    daily_record(&day.ticker, day.date, &series.returns, &series.amounts, cap)
}

/// Summary statistics in the layout of the descriptive tables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescriptiveStats {
    pub count: usize,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub median: f64,
    pub max: f64,
    pub skewness: f64,
    /// Excess kurtosis.
    pub kurtosis: f64,
    pub days_ge_1: usize,
    pub pct_ge_1: f64,
}

/// Sample moments with bias-adjusted skewness and excess kurtosis.
///
/// `days_ge_1` counts values `>= threshold`. Moments that need more points
/// than available, or a nonzero spread, are reported as 0.
pub fn describe(values: &[f64], threshold: f64) -> Result<DescriptiveStats, LiquidityError> {
    if values.is_empty() {
        return Err(LiquidityError::Empty);
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(LiquidityError::NonFinite(i));
    }
    let n = values.len();
    let nf = n as f64;
    let mean = moments::mean(values);
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &v in values {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let std = if n > 1 { libm::sqrt(m2 / (nf - 1.0)) } else { 0.0 };
    let (m2, m3, m4) = (m2 / nf, m3 / nf, m4 / nf);

    let degenerate = m2 <= f64::EPSILON * f64::EPSILON * mean * mean;
    let skewness = if degenerate || n < 3 {
        0.0
    } else {
        let g1 = m3 / libm::pow(m2, 1.5);
        g1 * libm::sqrt(nf * (nf - 1.0)) / (nf - 2.0)
    };
    let kurtosis = if degenerate || n < 4 {
        0.0
    } else {
        let g2 = m4 / (m2 * m2) - 3.0;
        ((nf + 1.0) * g2 + 6.0) * (nf - 1.0) / ((nf - 2.0) * (nf - 3.0))
    };

    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    let days_ge_1 = values.iter().filter(|&&v| v >= threshold).count();

    Ok(DescriptiveStats {
        count: n,
        mean,
        std,
        min: sorted[0],
        median,
        max: sorted[n - 1],
        skewness,
        kurtosis,
        days_ge_1,
        pct_ge_1: days_ge_1 as f64 / nf,
    })
}

/// Equal-width histogram over `[0, cap]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    /// `bins + 1` ascending edges.
    pub bin_edges: Vec<f64>,
    pub counts: Vec<usize>,
    pub cap: f64,
}

/// Clamps values to `[0, cap]` and tallies them; the last bin is closed on the right.
pub fn histogram(values: &[f64], bins: usize, cap: f64) -> Result<Histogram, LiquidityError> {
    if values.is_empty() {
        return Err(LiquidityError::Empty);
    }
    if bins == 0 || !(cap > 0.0) {
        return Err(LiquidityError::BadBins);
    }
    if let Some(i) = values.iter().position(|v| v.is_nan()) {
        return Err(LiquidityError::NonFinite(i));
    }
    let width = cap / bins as f64;
    let mut counts = alloc::vec![0usize; bins];
    for &v in values {
        let v = v.clamp(0.0, cap);
        let idx = ((v / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let bin_edges = (0..=bins).map(|i| if i == bins { cap } else { i as f64 * width }).collect();
    Ok(Histogram { bin_edges, counts, cap })
}
