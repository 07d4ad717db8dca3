//! File formats, configuration and the `liqarch` command line around
//! [`liqarch_core`].
//!
//! The pipeline runs in stages (`synth`, `ingest`, `liquidity`, `fit`,
//! `backtest`, `report`, `portfolio`) that exchange CSV files through one
//! output directory. See [`pipeline`] for the file names.

pub mod config;
pub mod io;
pub mod parallel;
pub mod pipeline;

pub use config::RunConfig;
pub use pipeline::{Pipeline, Stage};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("config error: {0}")]
    Config(String),
    #[error("{stage} failed: {message}")]
    Pipeline { stage: &'static str, message: String },
}

impl Error {
    /// 1 for configuration problems, 2 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::Pipeline { .. } => 2,
        }
    }
}
