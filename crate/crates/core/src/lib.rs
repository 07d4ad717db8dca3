//! Liquidity-adjusted volatility modeling.
//!
//! This crate holds the numerical core of `liqarch`:
//!
//! - [`marketdata`]: minute bars, trading days and session calendars.
//! - [`liquidity`]: minute-level liquidity factors, liquidity-adjusted daily
//!   returns and volatilities, and the liquidity jump/diffusion betas.
//! - [`econometrics`]: ARMA(p, q) with AIC order selection and GARCH(1,1)
//!   quasi-maximum likelihood.
//! - [`backtest`]: rolling-window fits of the regular and liquidity-adjusted
//!   return series.
//! - [`stats`]: pooled t-tests, augmented Dickey-Fuller and one-way ANOVA.
//! - [`portfolio`]: two-asset long-only mean-variance backtests.
//! - [`synth`]: seeded generators for GARCH series and jump-diffusion days.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line and parallel execution live in the `liqarch` crate.
#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod backtest;
pub mod econometrics;
pub mod linalg;
pub mod liquidity;
pub mod marketdata;
pub mod optim;
pub mod portfolio;
pub mod stats;
pub mod synth;

pub(crate) mod moments;

/// Version of this crate.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use backtest::{ComparisonPanel, ForecastSeries, WindowOutcome, WindowSpec};
pub use econometrics::{ArmaFit, ArmaGarchFit, GarchFit};
pub use liquidity::{DailyRecord, DescriptiveStats, Histogram, LiquidityFactors};
pub use marketdata::{DayStatus, MinuteBar, TradingDay, Venue, VenueKind};
pub use portfolio::{MvWeights, PortfolioSeries, RiskAversion};
pub use stats::{AdfResult, AnovaResult, TestResult};
pub use synth::{DailyJumpParams, JumpParams};
