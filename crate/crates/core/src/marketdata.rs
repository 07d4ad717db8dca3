//! Minute bars, trading days and venue session calendars.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use chrono::{DateTime, NaiveDate, NaiveTime, TimeZone, Timelike, Utc};
use chrono_tz::America::New_York;

/// Default minimum number of usable minute returns for a day to be kept.
pub const DEFAULT_MIN_MINUTES: usize = 30;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MarketDataError {
    #[error("close must be positive, got {0}")]
    NonPositivePrice(f64),
    #[error("amount must be non-negative, got {0}")]
    NegativeAmount(f64),
    #[error("timestamp {0} is not aligned to a whole minute")]
    UnalignedTimestamp(DateTime<Utc>),
    #[error("bars are not sorted by (ticker, minute_start) at index {0}")]
    UnsortedInput(usize),
    #[error("day needs at least two bars, or one bar and a previous close")]
    TooFewBars,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VenueKind {
    Stock,
    Crypto,
}

impl VenueKind {
    pub fn as_str(self) -> &'static str {
        match self {
            VenueKind::Stock => "stock",
            VenueKind::Crypto => "crypto",
        }
    }
}

impl fmt::Display for VenueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Trading venue: session length and annualization convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Venue {
    pub kind: VenueKind,
    pub session_minutes: u32,
    pub annualization_days: u32,
}

impl Venue {
    /// US equities: 09:30-16:00 US/Eastern, 252 trading days per year.
    pub const fn stock() -> Self {
        Self {
            kind: VenueKind::Stock,
            session_minutes: 390,
            annualization_days: 252,
        }
    }

    /// Crypto: 24h UTC days, 365 trading days per year.
    pub const fn crypto() -> Self {
        Self {
            kind: VenueKind::Crypto,
            session_minutes: 1440,
            annualization_days: 365,
        }
    }

    pub const fn from_kind(kind: VenueKind) -> Self {
        match kind {
            VenueKind::Stock => Self::stock(),
            VenueKind::Crypto => Self::crypto(),
        }
    }

    /// Default rolling-window length in days for this venue.
    pub const fn default_window_len(&self) -> usize {
        match self.kind {
            VenueKind::Stock => 242,
            VenueKind::Crypto => 365,
        }
    }

    /// Venue-local calendar date of a minute.
    pub fn local_date(&self, t: DateTime<Utc>) -> NaiveDate {
        match self.kind {
            VenueKind::Crypto => t.date_naive(),
            VenueKind::Stock => t.with_timezone(&New_York).date_naive(),
        }
    }

    /// Whether a minute starting at `t` lies inside the regular session.
    pub fn in_session(&self, t: DateTime<Utc>) -> bool {
        match self.kind {
            VenueKind::Crypto => true,
            VenueKind::Stock => {
                let local = t.with_timezone(&New_York).time();
                let mins = local.hour() * 60 + local.minute();
                (9 * 60 + 30..16 * 60).contains(&mins)
            }
        }
    }

    /// UTC start of the session's first minute on a local date.
    pub fn session_open(&self, date: NaiveDate) -> DateTime<Utc> {
        match self.kind {
            VenueKind::Crypto => date.and_time(NaiveTime::MIN).and_utc(),
            VenueKind::Stock => {
                let open = date.and_hms_opt(9, 30, 0).expect("valid time");
                // 09:30 never falls in a DST gap or overlap
                New_York
                    .from_local_datetime(&open)
                    .single()
                    .expect("unambiguous session open")
                    .with_timezone(&Utc)
            }
        }
    }
}

/// One minute of trading: closing price and dollar amount traded.
#[derive(Debug, Clone, PartialEq)]
pub struct MinuteBar {
    pub ticker: String,
    pub minute_start: DateTime<Utc>,
    pub close: f64,
    pub amount: f64,
}

impl MinuteBar {
    pub fn new(
        ticker: impl Into<String>,
        minute_start: DateTime<Utc>,
        close: f64,
        amount: f64,
    ) -> Result<Self, MarketDataError> {
        if !(close > 0.0) || !close.is_finite() {
            return Err(MarketDataError::NonPositivePrice(close));
        }
        if !(amount >= 0.0) || !amount.is_finite() {
            return Err(MarketDataError::NegativeAmount(amount));
        }
        if minute_start.second() != 0 || minute_start.nanosecond() != 0 {
            return Err(MarketDataError::UnalignedTimestamp(minute_start));
        }
        Ok(Self {
            ticker: ticker.into(),
            minute_start,
            close,
            amount,
        })
    }
}

/// The retained session bars of one asset on one venue-local date.
#[derive(Debug, Clone, PartialEq)]
pub struct TradingDay {
    pub ticker: String,
    pub date: NaiveDate,
    pub bars: Vec<MinuteBar>,
    pub prev_close: Option<f64>,
}

impl TradingDay {
    /// Number of minute returns the day yields.
    pub fn return_count(&self) -> usize {
        match self.prev_close {
            Some(_) => self.bars.len(),
            None => self.bars.len().saturating_sub(1),
        }
    }
}

/// Why a day was rejected by [`validate_day`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RejectReason {
    TooFewMinutes,
    DuplicateMinute,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RejectReason::TooFewMinutes => "too few minutes",
            RejectReason::DuplicateMinute => "duplicate minute",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DayStatus {
    pub valid: bool,
    pub effective_minutes: usize,
    pub reason: Option<RejectReason>,
}

/// Groups bars into per-ticker trading days.
///
/// Input must be sorted by `(ticker, minute_start)`; equal timestamps are
/// let through so that [`validate_day`] can report them. Stock bars outside
/// the regular session are dropped. `prev_close` is the final close of the
/// same ticker's preceding retained day.
pub fn partition_days(bars: &[MinuteBar], venue: Venue) -> Result<Vec<TradingDay>, MarketDataError> {
    for (i, w) in bars.windows(2).enumerate() {
        let ordered = match w[0].ticker.cmp(&w[1].ticker) {
            core::cmp::Ordering::Less => true,
            core::cmp::Ordering::Equal => w[0].minute_start <= w[1].minute_start,
            core::cmp::Ordering::Greater => false,
        };
        if !ordered {
            return Err(MarketDataError::UnsortedInput(i + 1));
        }
    }

    let mut days: Vec<TradingDay> = Vec::new();
    for bar in bars.iter().filter(|b| venue.in_session(b.minute_start)) {
        let date = venue.local_date(bar.minute_start);
        let same_day = days
            .last()
            .is_some_and(|d| d.ticker == bar.ticker && d.date == date);
        if same_day {
            if let Some(day) = days.last_mut() {
                day.bars.push(bar.clone());
            }
        } else {
            let prev_close = days
                .last()
                .filter(|prev| prev.ticker == bar.ticker)
                .and_then(|prev| prev.bars.last())
                .map(|b| b.close);
            days.push(TradingDay {
                ticker: bar.ticker.clone(),
                date,
                bars: alloc::vec![bar.clone()],
                prev_close,
            });
        }
    }
    Ok(days)
}

/// Simple minute returns `close_t / close_{t-1} - 1`.
///
/// The first bar's return is taken against `prev_close` when present;
/// otherwise the first bar only seeds the chain.
pub fn minute_returns(day: &TradingDay) -> Result<Vec<f64>, MarketDataError> {
    Ok(minute_series(day)?.returns)
}

/// Minute returns paired with the dollar amount traded in the same minute.
#[derive(Debug, Clone, PartialEq)]
pub struct MinuteSeries {
    pub returns: Vec<f64>,
    pub amounts: Vec<f64>,
}

pub fn minute_series(day: &TradingDay) -> Result<MinuteSeries, MarketDataError> {
    let enough = day.bars.len() >= 2 || (day.bars.len() == 1 && day.prev_close.is_some());
    if !enough {
        return Err(MarketDataError::TooFewBars);
    }
    let n = day.return_count();
    let mut returns = Vec::with_capacity(n);
    let mut amounts = Vec::with_capacity(n);
    let mut prev = day.prev_close;
    for bar in &day.bars {
        if let Some(p) = prev {
            returns.push(bar.close / p - 1.0);
            amounts.push(bar.amount);
        }
        prev = Some(bar.close);
    }
    Ok(MinuteSeries { returns, amounts })
}

/// Checks a day for duplicate minutes and a minimum number of minute returns.
pub fn validate_day(day: &TradingDay, min_minutes: usize) -> DayStatus {
    let effective_minutes = day.return_count();
    let duplicate = day
        .bars
        .windows(2)
        .any(|w| w[0].minute_start == w[1].minute_start);
    let reason = if duplicate {
        Some(RejectReason::DuplicateMinute)
    } else if effective_minutes < min_minutes || effective_minutes == 0 {
        Some(RejectReason::TooFewMinutes)
    } else {
        None
    };
    DayStatus {
        valid: reason.is_none(),
        effective_minutes,
        reason,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;
    use approx::assert_relative_eq;
    use chrono::Duration;

    fn ts(s: &str) -> DateTime<Utc> {
        DateTime::parse_from_rfc3339(s).unwrap().with_timezone(&Utc)
    }

    fn bar(ticker: &str, t: DateTime<Utc>, close: f64) -> MinuteBar {
        MinuteBar::new(ticker, t, close, 1000.0).unwrap()
    }

    fn day_with(closes: &[f64], prev_close: Option<f64>) -> TradingDay {
        let t0 = ts("2020-01-02T00:00:00Z");
        TradingDay {
            ticker: "X".into(),
            date: t0.date_naive(),
            bars: closes
                .iter()
                .enumerate()
                .map(|(i, &c)| bar("X", t0 + Duration::minutes(i as i64), c))
                .collect(),
            prev_close,
        }
    }

    #[test]
    fn bar_invariants() {
        let t = ts("2020-01-02T14:30:00Z");
        assert!(matches!(MinuteBar::new("A", t, 0.0, 1.0), Err(MarketDataError::NonPositivePrice(_))));
        assert!(matches!(MinuteBar::new("A", t, 1.0, -1.0), Err(MarketDataError::NegativeAmount(_))));
        let off = ts("2020-01-02T14:30:05Z");
        assert!(matches!(MinuteBar::new("A", off, 1.0, 1.0), Err(MarketDataError::UnalignedTimestamp(_))));
    }

    #[test]
    fn full_crypto_session_is_one_day() {
        let t0 = ts("2021-03-01T00:00:00Z");
        let bars: Vec<_> = (0..1440).map(|i| bar("BTC", t0 + Duration::minutes(i), 100.0)).collect();
        let days = partition_days(&bars, Venue::crypto()).unwrap();
        assert_eq!(days.len(), 1);
        assert_eq!(days[0].bars.len(), 1440);
        assert_eq!(days[0].prev_close, None);
    }

    #[test]
    fn stock_premarket_is_dropped() {
        // 2020-01-02 is EST: session 14:30-21:00 UTC
        let t0 = ts("2020-01-02T14:00:00Z");
        let bars: Vec<_> = (0..60).map(|i| bar("AAPL", t0 + Duration::minutes(i), 300.0)).collect();
        let days = partition_days(&bars, Venue::stock()).unwrap();
        assert_eq!(days.len(), 1);
        assert_eq!(days[0].bars.len(), 30);
        assert_eq!(days[0].bars[0].minute_start, ts("2020-01-02T14:30:00Z"));
    }

    #[test]
    fn stock_session_follows_daylight_saving() {
        let summer = NaiveDate::from_ymd_opt(2020, 7, 1).unwrap();
        assert_eq!(Venue::stock().session_open(summer), ts("2020-07-01T13:30:00Z"));
        assert!(Venue::stock().in_session(ts("2020-07-01T19:59:00Z")));
        assert!(!Venue::stock().in_session(ts("2020-07-01T20:00:00Z")));
    }

    #[test]
    fn two_dates_carry_prev_close() {
        let d1 = ts("2021-03-01T23:58:00Z");
        let bars = vec![
            bar("ETH", d1, 10.0),
            bar("ETH", d1 + Duration::minutes(1), 11.0),
            bar("ETH", d1 + Duration::minutes(2), 12.0),
            bar("ETH", d1 + Duration::minutes(3), 13.0),
        ];
        let days = partition_days(&bars, Venue::crypto()).unwrap();
        assert_eq!(days.len(), 2);
        assert_eq!(days[0].prev_close, None);
        assert_eq!(days[1].prev_close, Some(11.0));
        assert_eq!(days[1].bars.len(), 2);
    }

    #[test]
    fn prev_close_does_not_cross_tickers() {
        let t = ts("2021-03-01T00:00:00Z");
        let bars = vec![bar("A", t, 1.0), bar("B", t, 2.0)];
        let days = partition_days(&bars, Venue::crypto()).unwrap();
        assert_eq!(days[1].prev_close, None);
    }

    #[test]
    fn unsorted_input_is_rejected() {
        let t = ts("2021-03-01T00:00:00Z");
        let bars = vec![bar("A", t + Duration::minutes(1), 1.0), bar("A", t, 1.0)];
        assert_eq!(partition_days(&bars, Venue::crypto()), Err(MarketDataError::UnsortedInput(1)));
        let bars = vec![bar("B", t, 1.0), bar("A", t, 1.0)];
        assert!(partition_days(&bars, Venue::crypto()).is_err());
    }

    #[test]
    fn returns_without_prev_close() {
        let r = minute_returns(&day_with(&[100.0, 101.0, 99.99], None)).unwrap();
        assert_eq!(r.len(), 2);
        assert_relative_eq!(r[0], 0.01, epsilon = 1e-12);
        assert_relative_eq!(r[1], -0.01, epsilon = 1e-12);
    }

    #[test]
    fn returns_constant_and_single_bar() {
        let r = minute_returns(&day_with(&[5.0; 4], None)).unwrap();
        assert!(r.iter().all(|&x| x == 0.0));
        let r = minute_returns(&day_with(&[102.0], Some(100.0))).unwrap();
        assert_eq!(r.len(), 1);
        assert_relative_eq!(r[0], 0.02, epsilon = 1e-12);
        assert_eq!(minute_returns(&day_with(&[102.0], None)), Err(MarketDataError::TooFewBars));
    }

    #[test]
    fn validation_rules() {
        let full = day_with(&[100.0; 390], None);
        let s = validate_day(&full, DEFAULT_MIN_MINUTES);
        assert!(s.valid);
        assert_eq!(s.effective_minutes, 389);
        let with_prev = day_with(&[100.0; 390], Some(100.0));
        assert_eq!(validate_day(&with_prev, 30).effective_minutes, 390);

        let short = day_with(&[100.0; 10], None);
        let s = validate_day(&short, 30);
        assert!(!s.valid);
        assert_eq!(s.reason.unwrap().to_string(), "too few minutes");

        let mut dup = day_with(&[100.0; 40], None);
        dup.bars[5].minute_start = dup.bars[4].minute_start;
        let s = validate_day(&dup, 30);
        assert!(!s.valid);
        assert_eq!(s.reason.unwrap().to_string(), "duplicate minute");
    }
}
