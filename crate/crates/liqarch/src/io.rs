//! CSV formats read and written by the pipeline.
//!
//! Every table has a fixed column order, and the header row is written even
//! when a table has no rows. Floats are written in their shortest
//! round-trip form, so a file read back yields the same values bit for bit.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use chrono::{DateTime, NaiveDate, Utc};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use liqarch_core::liquidity::DailyRecord;
use liqarch_core::marketdata::{MarketDataError, MinuteBar};

/// Columns of the minute-bar schema, in order.
pub const MINUTE_COLUMNS: [&str; 4] = ["ticker", "minute_start", "close", "amount"];

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("missing column `{0}`")]
    MissingColumn(&'static str),
    #[error("line {0}: bad timestamp")]
    BadTimestamp(u64),
    #[error("line {0}: close must be a positive number")]
    NonPositivePrice(u64),
    #[error("line {0}: amount must be a non-negative number")]
    NegativeAmount(u64),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// A parsed minute bar together with the text it was parsed from.
#[derive(Debug, Clone, PartialEq)]
pub struct MinuteRow {
    pub bar: MinuteBar,
    pub minute_start: String,
    pub close: String,
    pub amount: String,
}

fn parse_timestamp(s: &str) -> Option<DateTime<Utc>> {
    DateTime::parse_from_rfc3339(s).ok().map(|t| t.with_timezone(&Utc))
}

/// Reads minute bars in file order. Columns are located by header name.
pub fn parse_minute_csv<R: Read>(stream: R) -> Result<Vec<MinuteRow>, ParseError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(stream);
    let headers = rdr.headers()?.clone();
    let mut idx = [0usize; 4];
    for (slot, name) in idx.iter_mut().zip(MINUTE_COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h == name)
            .ok_or(ParseError::MissingColumn(name))?;
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let field = |i: usize| rec.get(idx[i]).unwrap_or("");
        let ts = parse_timestamp(field(1)).ok_or(ParseError::BadTimestamp(line))?;
        let close: f64 = field(2).parse().map_err(|_| ParseError::NonPositivePrice(line))?;
        let amount: f64 = field(3).parse().map_err(|_| ParseError::NegativeAmount(line))?;
        let bar = MinuteBar::new(field(0), ts, close, amount).map_err(|e| match e {
            MarketDataError::NonPositivePrice(_) => ParseError::NonPositivePrice(line),
            MarketDataError::NegativeAmount(_) => ParseError::NegativeAmount(line),
            _ => ParseError::BadTimestamp(line),
        })?;
        rows.push(MinuteRow {
            bar,
            minute_start: field(1).to_owned(),
            close: field(2).to_owned(),
            amount: field(3).to_owned(),
        });
    }
    Ok(rows)
}

pub fn read_minute_file(path: &Path) -> Result<Vec<MinuteRow>, String> {
    let file = File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_minute_csv(file).map_err(|e| format!("{}: {e}", path.display()))
}

/// Writes rows back with their original field text.
pub fn write_minute_rows<'a, W: Write>(w: W, rows: impl IntoIterator<Item = &'a MinuteRow>) -> csv::Result<usize> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(MINUTE_COLUMNS)?;
    let mut n = 0;
    for r in rows {
        wtr.write_record([r.bar.ticker.as_str(), &r.minute_start, &r.close, &r.amount])?;
        n += 1;
    }
    wtr.flush()?;
    Ok(n)
}

/// Writes bars in the minute-bar schema, timestamps as `YYYY-MM-DDTHH:MM:SSZ`.
pub fn write_minute_bars<'a, W: Write>(w: W, bars: impl IntoIterator<Item = &'a MinuteBar>) -> csv::Result<usize> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(MINUTE_COLUMNS)?;
    let mut n = 0;
    for b in bars {
        wtr.write_record([
            b.ticker.clone(),
            b.minute_start.format("%Y-%m-%dT%H:%M:%SZ").to_string(),
            b.close.to_string(),
            b.amount.to_string(),
        ])?;
        n += 1;
    }
    wtr.flush()?;
    Ok(n)
}

/// A CSV table with a fixed header.
pub trait Table: Serialize + DeserializeOwned {
    const HEADER: &'static [&'static str];
}

pub fn create(path: &Path) -> Result<BufWriter<File>, String> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| format!("{}: {e}", path.display()))
}

pub fn write_table<T: Table>(path: &Path, rows: &[T]) -> Result<usize, String> {
    let err = |e: csv::Error| format!("{}: {e}", path.display());
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(create(path)?);
    wtr.write_record(T::HEADER).map_err(err)?;
    for r in rows {
        wtr.serialize(r).map_err(err)?;
    }
    wtr.flush().map_err(|e: io::Error| format!("{}: {e}", path.display()))?;
    Ok(rows.len())
}

pub fn read_table<T: Table>(path: &Path) -> Result<Vec<T>, String> {
    let err = |e: csv::Error| format!("{}: {e}", path.display());
    let file = File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut rdr = csv::Reader::from_reader(file);
    let headers = rdr.headers().map_err(err)?;
    if headers.iter().ne(T::HEADER.iter().copied()) {
        return Err(format!("{}: unexpected columns", path.display()));
    }
    rdr.deserialize().collect::<Result<_, _>>().map_err(err)
}

macro_rules! table {
    ($ty:ty, [$($col:literal),* $(,)?]) => {
        impl Table for $ty {
            const HEADER: &'static [&'static str] = &[$($col),*];
        }
    };
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DayStatusRow {
    pub ticker: String,
    pub date: NaiveDate,
    pub valid: bool,
    pub effective_minutes: usize,
    pub reason: String,
}
table!(DayStatusRow, ["ticker", "date", "valid", "effective_minutes", "reason"]);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DailyRow {
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
table!(
    DailyRow,
    ["ticker", "date", "r", "r_liq", "sigma", "sigma_liq", "beta_jump", "beta_diff", "degenerate"]
);

impl From<&DailyRecord> for DailyRow {
    fn from(d: &DailyRecord) -> Self {
        Self {
            ticker: d.ticker.clone(),
            date: d.date,
            r: d.r,
            r_liq: d.r_liq,
            sigma: d.sigma,
            sigma_liq: d.sigma_liq,
            beta_jump: d.beta_jump,
            beta_diff: d.beta_diff,
            degenerate: d.degenerate,
        }
    }
}

impl From<DailyRow> for DailyRecord {
    fn from(d: DailyRow) -> Self {
        Self {
            ticker: d.ticker,
            date: d.date,
            r: d.r,
            r_liq: d.r_liq,
            sigma: d.sigma,
            sigma_liq: d.sigma_liq,
            beta_jump: d.beta_jump,
            beta_diff: d.beta_diff,
            degenerate: d.degenerate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptiveRow {
    pub ticker: String,
    pub measure: String,
    pub count: usize,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub median: f64,
    pub max: f64,
    pub skewness: f64,
    pub kurtosis: f64,
    pub days_ge_1: usize,
    pub pct_ge_1: f64,
}
table!(
    DescriptiveRow,
    ["ticker", "measure", "count", "mean", "std", "min", "median", "max", "skewness", "kurtosis", "days_ge_1", "pct_ge_1"]
);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramRow {
    pub ticker: String,
    pub bin_left: f64,
    pub bin_right: f64,
    pub count: usize,
}
table!(HistogramRow, ["ticker", "bin_left", "bin_right", "count"]);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRow {
    pub ticker: String,
    pub path: String,
    pub p: usize,
    pub q: usize,
    pub intercept: f64,
    pub phi1: Option<f64>,
    pub phi2: Option<f64>,
    pub phi3: Option<f64>,
    pub phi4: Option<f64>,
    pub theta1: Option<f64>,
    pub theta2: Option<f64>,
    pub theta3: Option<f64>,
    pub theta4: Option<f64>,
    pub omega: f64,
    pub alpha: f64,
    pub beta: f64,
    pub loglik: f64,
    pub aic: f64,
    pub converged: bool,
    pub mean_forecast: f64,
}
table!(
    FitRow,
    [
        "ticker", "path", "p", "q", "intercept", "phi1", "phi2", "phi3", "phi4", "theta1", "theta2", "theta3", "theta4",
        "omega", "alpha", "beta", "loglik", "aic", "converged", "mean_forecast",
    ]
);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowFitRow {
    pub ticker: String,
    pub window_end: NaiveDate,
    pub path: String,
    pub p: usize,
    pub q: usize,
    pub omega: f64,
    pub alpha: f64,
    pub beta: f64,
    pub loglik: f64,
    pub converged: bool,
}
table!(
    WindowFitRow,
    ["ticker", "window_end", "path", "p", "q", "omega", "alpha", "beta", "loglik", "converged"]
);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastRow {
    pub ticker: String,
    pub date: NaiveDate,
    pub mu_hat_reg: f64,
    pub mu_hat_liq: f64,
}
table!(ForecastRow, ["ticker", "date", "mu_hat_reg", "mu_hat_liq"]);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TtestRow {
    pub ticker: String,
    pub panel: String,
    #[serde(rename = "T")]
    pub t: f64,
    pub dof: f64,
    pub p_two_sided: f64,
    pub p_less: f64,
    pub p_greater: f64,
    pub sig: String,
    pub direction: String,
}
table!(
    TtestRow,
    ["ticker", "panel", "T", "dof", "p_two_sided", "p_less", "p_greater", "sig", "direction"]
);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdfRow {
    pub ticker: String,
    pub series: String,
    pub statistic: f64,
    pub lag_used: usize,
    pub nobs: usize,
    pub cv_1pct: f64,
    pub cv_5pct: f64,
    pub cv_10pct: f64,
    pub reject_5pct: bool,
}
table!(
    AdfRow,
    ["ticker", "series", "statistic", "lag_used", "nobs", "cv_1pct", "cv_5pct", "cv_10pct", "reject_5pct"]
);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnovaRow {
    pub measure: String,
    pub groups: usize,
    pub f_statistic: f64,
    pub dof_between: usize,
    pub dof_within: usize,
    pub p_value: f64,
}
table!(AnovaRow, ["measure", "groups", "f_statistic", "dof_between", "dof_within", "p_value"]);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortfolioRow {
    pub ticker: String,
    pub portfolio: String,
    pub sharpe_annualized: f64,
    pub direction: String,
}
table!(PortfolioRow, ["ticker", "portfolio", "sharpe_annualized", "direction"]);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortfolioDailyRow {
    pub ticker: String,
    pub date: NaiveDate,
    pub portfolio: String,
    pub weight: f64,
    pub realized_return: f64,
}
table!(PortfolioDailyRow, ["ticker", "date", "portfolio", "weight", "realized_return"]);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpTruthRow {
    pub ticker: String,
    pub date: NaiveDate,
    pub n_jumps: usize,
    /// Session minute indices separated by `;`.
    pub jump_minutes: String,
    pub jump_sum: f64,
    pub diffusive_sum: f64,
    pub drift: f64,
    pub vol_scale: f64,
}
table!(
    JumpTruthRow,
    ["ticker", "date", "n_jumps", "jump_minutes", "jump_sum", "diffusive_sum", "drift", "vol_scale"]
);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureTruthRow {
    pub date: NaiveDate,
    pub planted_beta_jump: f64,
    pub planted_beta_diff: f64,
}
table!(FixtureTruthRow, ["date", "planted_beta_jump", "planted_beta_diff"]);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedRow {
    pub date: NaiveDate,
    pub r_base: f64,
    pub mu: f64,
    pub jump: f64,
    pub r_planted: f64,
    pub r_liq: f64,
}
table!(PlantedRow, ["date", "r_base", "mu", "jump", "r_planted", "r_liq"]);
