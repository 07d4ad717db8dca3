//! Pipeline stages. Each stage reads the files of earlier stages from the
//! output directory and writes its own, so `run` and the standalone
//! subcommands produce the same bytes.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use rayon::ThreadPool;
use serde::Serialize;

use liqarch_core::backtest::{self, ComparisonPanel, ForecastSeries, Path as FitPath, WindowOutcome, WindowSpec};
use liqarch_core::econometrics::{self, ArmaOptions, FitConfig};
use liqarch_core::liquidity::{self, DailyRecord};
use liqarch_core::marketdata::{self, MinuteBar};
use liqarch_core::portfolio::{self, PortfolioSpec};
use liqarch_core::stats::{self, TestResult};
use liqarch_core::synth;

use crate::config::RunConfig;
use crate::io::{self, *};
use crate::parallel::Rayon;
use crate::Error;

pub const SYNTH_MINUTES: &str = "synth_minutes.csv";
pub const JUMP_TRUTH: &str = "jump_truth.csv";
pub const PLANTED_RETURNS: &str = "planted_returns.csv";
pub const FIXTURE_TRUTH: &str = "fixture_truth.csv";
pub const MINUTES: &str = "minutes.csv";
pub const DAY_STATUS: &str = "day_status.csv";
pub const DAILY_RECORDS: &str = "daily_records.csv";
pub const DESCRIPTIVE_STATS: &str = "descriptive_stats.csv";
pub const HISTOGRAM_BETA_JUMP: &str = "histogram_beta_jump.csv";
pub const HISTOGRAM_BETA_DIFF: &str = "histogram_beta_diff.csv";
pub const FITS: &str = "fits.csv";
pub const WINDOW_FITS: &str = "window_fits.csv";
pub const FORECASTS: &str = "forecasts.csv";
pub const TTESTS: &str = "ttests.csv";
pub const ADF: &str = "adf.csv";
pub const ANOVA: &str = "anova.csv";
pub const PORTFOLIO: &str = "portfolio.csv";
pub const PORTFOLIO_DAILY: &str = "portfolio_daily.csv";
pub const MANIFEST: &str = "run_manifest.json";

/// Row counts per file written by a stage.
pub type Rows = BTreeMap<String, usize>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Synth,
    Ingest,
    Liquidity,
    Fit,
    Backtest,
    Report,
    Portfolio,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Synth => "synth",
            Stage::Ingest => "ingest",
            Stage::Liquidity => "liquidity",
            Stage::Fit => "fit",
            Stage::Backtest => "backtest",
            Stage::Report => "report",
            Stage::Portfolio => "portfolio",
        }
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    core_version: &'static str,
    config: &'a RunConfig,
    stages: BTreeMap<String, Rows>,
}

pub struct Pipeline {
    cfg: RunConfig,
    pool: ThreadPool,
}

const MEASURES: [(&str, fn(&DailyRecord) -> f64); 6] = [
    ("r", |d| d.r),
    ("r_liq", |d| d.r_liq),
    ("sigma", |d| d.sigma),
    ("sigma_liq", |d| d.sigma_liq),
    ("beta_jump", |d| d.beta_jump),
    ("beta_diff", |d| d.beta_diff),
];

fn by_ticker(records: Vec<DailyRecord>) -> BTreeMap<String, Vec<DailyRecord>> {
    let mut out: BTreeMap<String, Vec<DailyRecord>> = BTreeMap::new();
    for r in records {
        out.entry(r.ticker.clone()).or_default().push(r);
    }
    out
}

fn warn(stage: Stage, msg: impl std::fmt::Display) {
    eprintln!("warning: {}: {msg}", stage.as_str());
}

fn test_row(ticker: &str, panel: &str, t: &TestResult) -> TtestRow {
    TtestRow {
        ticker: ticker.to_owned(),
        panel: panel.to_owned(),
        t: t.statistic,
        dof: t.dof,
        p_two_sided: t.p_two_sided,
        p_less: t.p_less,
        p_greater: t.p_greater,
        sig: t.significance.stars().to_owned(),
        direction: t.direction.as_str().to_owned(),
    }
}

impl Pipeline {
    pub fn new(cfg: RunConfig, threads: Option<usize>) -> Result<Self, Error> {
        let pool = crate::parallel::pool(threads).map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        Ok(Self { cfg, pool })
    }

    pub fn config(&self) -> &RunConfig {
        &self.cfg
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.cfg.output_dir.join(name)
    }

    fn fail(stage: Stage) -> impl Fn(String) -> Error {
        move |message| Error::Pipeline {
            stage: stage.as_str(),
            message,
        }
    }

    fn prepare(&self, stage: Stage) -> Result<(), Error> {
        fs::create_dir_all(&self.cfg.output_dir).map_err(|e| {
            Self::fail(stage)(format!("cannot create {}: {e}", self.cfg.output_dir.display()))
        })
    }

    fn require(&self, stage: Stage, name: &str, producer: Stage) -> Result<PathBuf, Error> {
        let p = self.path(name);
        if p.is_file() {
            Ok(p)
        } else {
            Err(Self::fail(stage)(format!(
                "{} not found; run `{}` first",
                p.display(),
                producer.as_str()
            )))
        }
    }

    /// Minute files read by `ingest`: the configured inputs, or the synthetic
    /// universe when none are configured and a `[synth]` table is present.
    pub fn inputs(&self) -> Result<Vec<PathBuf>, Error> {
        if self.cfg.inputs.is_empty() && self.cfg.synth.as_ref().is_some_and(|s| !s.planted) {
            return Ok(vec![self.path(SYNTH_MINUTES)]);
        }
        self.cfg.check_inputs()?;
        Ok(self.cfg.inputs.clone())
    }

    fn record(&self, stage: Stage, rows: &Rows) -> Result<(), Error> {
        let path = self.path(MANIFEST);
        let mut stages: BTreeMap<String, Rows> = fs::read_to_string(&path)
            .ok()
            .and_then(|t| serde_json::from_str::<serde_json::Value>(&t).ok())
            .and_then(|v| serde_json::from_value(v.get("stages")?.clone()).ok())
            .unwrap_or_default();
        stages.insert(stage.as_str().to_owned(), rows.clone());
        let manifest = Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            core_version: liqarch_core::VERSION,
            config: &self.cfg,
            stages,
        };
        let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| Self::fail(stage)(e.to_string()))?;
        text.push('\n');
        fs::write(&path, text).map_err(|e| Self::fail(stage)(format!("{}: {e}", path.display())))
    }

    fn finish(&self, stage: Stage, rows: Rows) -> Result<Rows, Error> {
        self.record(stage, &rows)?;
        Ok(rows)
    }

    fn write<T: Table>(&self, stage: Stage, rows: &mut Rows, name: &str, table: &[T]) -> Result<(), Error> {
        let n = io::write_table(&self.path(name), table).map_err(Self::fail(stage))?;
        rows.insert(name.to_owned(), n);
        Ok(())
    }

    fn load_records(&self, stage: Stage) -> Result<Vec<DailyRecord>, Error> {
        let p = self.require(stage, DAILY_RECORDS, Stage::Liquidity)?;
        let rows: Vec<DailyRow> = io::read_table(&p).map_err(Self::fail(stage))?;
        Ok(rows.into_iter().map(DailyRecord::from).collect())
    }

    fn window_spec(&self, stage: Stage) -> Result<WindowSpec, Error> {
        WindowSpec {
            window_len: self.cfg.window_len,
            p_max: self.cfg.p_max,
            q_max: self.cfg.q_max,
            selection: self.cfg.order_selection.into(),
            include_intercept: self.cfg.include_intercept,
        }
        .validated()
        .map_err(|e| Self::fail(stage)(e.to_string()))
    }

    /// Generates a synthetic universe (or planted daily fixture).
    pub fn synth(&self) -> Result<Rows, Error> {
        let stage = Stage::Synth;
        self.prepare(stage)?;
        let s = self.cfg.synth_or_default();
        let venue = self.cfg.venue();
        let fail = Self::fail(stage);
        let mut rows = Rows::new();
        if s.planted {
            let (base, params) = synth::planted_fixture(s.days, self.cfg.seed).map_err(|e| fail(e.to_string()))?;
            let planted = synth::plant_daily_jumps(&base, &params).map_err(|e| fail(e.to_string()))?;
            let adjusted = planted.adjusted(&params);
            let dates = synth::session_dates(&venue, s.start, s.days);
            let returns: Vec<PlantedRow> = (0..s.days)
                .map(|t| PlantedRow {
                    date: dates[t],
                    r_base: base[t],
                    mu: planted.mu[t],
                    jump: planted.jump[t],
                    r_planted: planted.returns[t],
                    r_liq: adjusted[t],
                })
                .collect();
            let truth: Vec<FixtureTruthRow> = (0..s.days)
                .map(|t| FixtureTruthRow {
                    date: dates[t],
                    planted_beta_jump: params.beta_jump[t],
                    planted_beta_diff: params.beta_diff[t],
                })
                .collect();
            self.write(stage, &mut rows, PLANTED_RETURNS, &returns)?;
            self.write(stage, &mut rows, FIXTURE_TRUTH, &truth)?;
            return self.finish(stage, rows);
        }

        let universe = synth::gen_universe(&venue, &s.asset_params(), s.days, s.start, self.cfg.seed)
            .map_err(|e| fail(e.to_string()))?;
        let bars = universe
            .days
            .iter()
            .flat_map(|d| d.bars.iter().step_by(s.thin));
        let path = self.path(SYNTH_MINUTES);
        let n = io::write_minute_bars(io::create(&path).map_err(&fail)?, bars)
            .map_err(|e| fail(format!("{}: {e}", path.display())))?;
        rows.insert(SYNTH_MINUTES.to_owned(), n);
        let truth: Vec<JumpTruthRow> = universe
            .truth
            .iter()
            .map(|t| JumpTruthRow {
                ticker: t.ticker.clone(),
                date: t.date,
                n_jumps: t.jump_minutes.len(),
                jump_minutes: t
                    .jump_minutes
                    .iter()
                    .map(|m| m.to_string())
                    .collect::<Vec<_>>()
                    .join(";"),
                jump_sum: t.jump_sum,
                diffusive_sum: t.diffusive_sum,
                drift: t.drift,
                vol_scale: t.vol_scale,
            })
            .collect();
        self.write(stage, &mut rows, JUMP_TRUTH, &truth)?;
        self.finish(stage, rows)
    }

    /// Parses, sorts and session-filters the minute files and validates each day.
    pub fn ingest(&self) -> Result<Rows, Error> {
        let stage = Stage::Ingest;
        let inputs = self.inputs()?;
        self.prepare(stage)?;
        let fail = Self::fail(stage);
        let mut minutes = Vec::new();
        for p in &inputs {
            minutes.extend(io::read_minute_file(p).map_err(&fail)?);
        }
        minutes.sort_by(|a, b| {
            a.bar
                .ticker
                .cmp(&b.bar.ticker)
                .then(a.bar.minute_start.cmp(&b.bar.minute_start))
        });
        let venue = self.cfg.venue();
        minutes.retain(|m| venue.in_session(m.bar.minute_start));
        let bars: Vec<MinuteBar> = minutes.iter().map(|m| m.bar.clone()).collect();
        let days = marketdata::partition_days(&bars, venue).map_err(|e| fail(e.to_string()))?;
        let status: Vec<DayStatusRow> = days
            .iter()
            .map(|d| {
                let s = marketdata::validate_day(d, self.cfg.min_minutes);
                DayStatusRow {
                    ticker: d.ticker.clone(),
                    date: d.date,
                    valid: s.valid,
                    effective_minutes: s.effective_minutes,
                    reason: s.reason.map(|r| r.to_string()).unwrap_or_default(),
                }
            })
            .collect();

        let mut rows = Rows::new();
        let path = self.path(MINUTES);
        let n = io::write_minute_rows(io::create(&path).map_err(&fail)?, &minutes)
            .map_err(|e| fail(format!("{}: {e}", path.display())))?;
        rows.insert(MINUTES.to_owned(), n);
        self.write(stage, &mut rows, DAY_STATUS, &status)?;
        self.finish(stage, rows)
    }

    /// Daily liquidity records of every valid day, descriptive statistics
    /// and beta histograms.
    pub fn liquidity(&self) -> Result<Rows, Error> {
        let stage = Stage::Liquidity;
        let fail = Self::fail(stage);
        let minutes = io::read_minute_file(&self.require(stage, MINUTES, Stage::Ingest)?).map_err(&fail)?;
        let bars: Vec<MinuteBar> = minutes.into_iter().map(|m| m.bar).collect();
        let days = marketdata::partition_days(&bars, self.cfg.venue()).map_err(|e| fail(e.to_string()))?;
        let (min_minutes, cap) = (self.cfg.min_minutes, self.cfg.beta_cap);
        let records: Vec<Option<Result<DailyRecord, String>>> = self.pool.install(|| {
            days.par_iter()
                .map(|d| {
                    marketdata::validate_day(d, min_minutes).valid.then(|| {
                        liquidity::record_for_day(d, cap).map_err(|e| format!("{} {}: {e}", d.ticker, d.date))
                    })
                })
                .collect()
        });
        let records: Vec<DailyRecord> = records.into_iter().flatten().collect::<Result<_, _>>().map_err(&fail)?;

        let mut rows = Rows::new();
        let daily: Vec<DailyRow> = records.iter().map(DailyRow::from).collect();
        self.write(stage, &mut rows, DAILY_RECORDS, &daily)?;

        let grouped = by_ticker(records);
        let mut desc = Vec::new();
        let mut hist_jump = Vec::new();
        let mut hist_diff = Vec::new();
        for (ticker, recs) in &grouped {
            for (measure, f) in MEASURES {
                let values: Vec<f64> = recs.iter().map(f).collect();
                let s = liquidity::describe(&values, 1.0).map_err(|e| fail(format!("{ticker} {measure}: {e}")))?;
                desc.push(DescriptiveRow {
                    ticker: ticker.clone(),
                    measure: measure.to_owned(),
                    count: s.count,
                    mean: s.mean,
                    std: s.std,
                    min: s.min,
                    median: s.median,
                    max: s.max,
                    skewness: s.skewness,
                    kurtosis: s.kurtosis,
                    days_ge_1: s.days_ge_1,
                    pct_ge_1: s.pct_ge_1,
                });
            }
            for (out, f) in [
                (&mut hist_jump, MEASURES[4].1),
                (&mut hist_diff, MEASURES[5].1),
            ] {
                let values: Vec<f64> = recs.iter().map(f).collect();
                let h = liquidity::histogram(&values, self.cfg.histogram_bins, cap)
                    .map_err(|e| fail(format!("{ticker}: {e}")))?;
                out.extend(h.counts.iter().enumerate().map(|(i, &count)| HistogramRow {
                    ticker: ticker.clone(),
                    bin_left: h.bin_edges[i],
                    bin_right: h.bin_edges[i + 1],
                    count,
                }));
            }
        }
        self.write(stage, &mut rows, DESCRIPTIVE_STATS, &desc)?;
        self.write(stage, &mut rows, HISTOGRAM_BETA_JUMP, &hist_jump)?;
        self.write(stage, &mut rows, HISTOGRAM_BETA_DIFF, &hist_diff)?;
        self.finish(stage, rows)
    }

    /// Full-sample ARMA-GARCH fits of both paths of every ticker.
    pub fn fit(&self) -> Result<Rows, Error> {
        let stage = Stage::Fit;
        let grouped = by_ticker(self.load_records(stage)?);
        let cfg = FitConfig {
            p_max: self.cfg.p_max,
            q_max: self.cfg.q_max,
            orders: None,
            arma: ArmaOptions {
                include_intercept: self.cfg.include_intercept,
                ..ArmaOptions::default()
            },
        };
        let jobs: Vec<(&String, FitPath, Vec<f64>)> = grouped
            .iter()
            .flat_map(|(t, recs)| {
                [
                    (t, FitPath::Reg, recs.iter().map(|d| d.r).collect()),
                    (t, FitPath::Liq, recs.iter().map(|d| d.r_liq).collect()),
                ]
            })
            .collect();
        let fits: Vec<_> = self.pool.install(|| {
            jobs.par_iter()
                .map(|(_, _, series)| econometrics::fit_arma_garch(series, &cfg))
                .collect()
        });
        let mut table = Vec::new();
        for ((ticker, path, _), fit) in jobs.iter().zip(fits) {
            let f = match fit {
                Ok(f) => f,
                Err(e) => {
                    warn(stage, format!("{ticker} {path}: {e}"));
                    continue;
                }
            };
            let coef = |v: &[f64], i: usize| v.get(i).copied();
            table.push(FitRow {
                ticker: (*ticker).clone(),
                path: path.as_str().to_owned(),
                p: f.arma.p,
                q: f.arma.q,
                intercept: f.arma.intercept,
                phi1: coef(&f.arma.phi, 0),
                phi2: coef(&f.arma.phi, 1),
                phi3: coef(&f.arma.phi, 2),
                phi4: coef(&f.arma.phi, 3),
                theta1: coef(&f.arma.theta, 0),
                theta2: coef(&f.arma.theta, 1),
                theta3: coef(&f.arma.theta, 2),
                theta4: coef(&f.arma.theta, 3),
                omega: f.garch.omega,
                alpha: f.garch.alpha,
                beta: f.garch.beta,
                loglik: f.loglik(),
                aic: f.arma.aic,
                converged: f.arma.converged && f.garch.converged,
                mean_forecast: f.mean_forecast,
            });
        }
        let mut rows = Rows::new();
        self.write(stage, &mut rows, FITS, &table)?;
        self.finish(stage, rows)
    }

    /// Rolling-window fits of both paths and their one-step forecasts.
    pub fn backtest(&self) -> Result<Rows, Error> {
        let stage = Stage::Backtest;
        let spec = self.window_spec(stage)?;
        let grouped = by_ticker(self.load_records(stage)?);
        let mapper = Rayon { pool: &self.pool };
        let mut fits = Vec::new();
        let mut forecasts = Vec::new();
        for (ticker, recs) in &grouped {
            let panel = match backtest::run_model_comparison(recs, &spec, &mapper) {
                Ok(p) => p,
                Err(e) => {
                    warn(stage, format!("{ticker}: {e}"));
                    continue;
                }
            };
            for (i, end) in panel.window_end.iter().enumerate() {
                for (path, w) in [(FitPath::Reg, &panel.reg[i]), (FitPath::Liq, &panel.liq[i])] {
                    fits.push(WindowFitRow {
                        ticker: ticker.clone(),
                        window_end: *end,
                        path: path.as_str().to_owned(),
                        p: w.p,
                        q: w.q,
                        omega: w.omega,
                        alpha: w.alpha,
                        beta: w.beta,
                        loglik: w.loglik,
                        converged: w.converged,
                    });
                }
            }
            let f = panel.forecasts();
            forecasts.extend((0..f.dates.len()).map(|i| ForecastRow {
                ticker: ticker.clone(),
                date: f.dates[i],
                mu_hat_reg: f.mu_hat_reg[i],
                mu_hat_liq: f.mu_hat_liq[i],
            }));
        }
        let mut rows = Rows::new();
        self.write(stage, &mut rows, WINDOW_FITS, &fits)?;
        self.write(stage, &mut rows, FORECASTS, &forecasts)?;
        self.finish(stage, rows)
    }

    /// t-tests on the window fits, ADF on the daily series and ANOVA on the betas.
    pub fn report(&self) -> Result<Rows, Error> {
        let stage = Stage::Report;
        let fail = Self::fail(stage);
        let p = self.require(stage, WINDOW_FITS, Stage::Backtest)?;
        let window_rows: Vec<WindowFitRow> = io::read_table(&p).map_err(&fail)?;
        let records = by_ticker(self.load_records(stage)?);

        let mut panels: BTreeMap<String, ComparisonPanel> = BTreeMap::new();
        for w in window_rows {
            let panel = panels.entry(w.ticker.clone()).or_insert_with(|| ComparisonPanel {
                ticker: w.ticker.clone(),
                window_end: Vec::new(),
                target_date: Vec::new(),
                reg: Vec::new(),
                liq: Vec::new(),
            });
            let outcome = WindowOutcome {
                p: w.p,
                q: w.q,
                omega: w.omega,
                alpha: w.alpha,
                beta: w.beta,
                loglik: w.loglik,
                mean_forecast: 0.0,
                converged: w.converged,
                error: None,
            };
            match w.path.as_str() {
                "reg" => {
                    panel.window_end.push(w.window_end);
                    panel.target_date.push(w.window_end);
                    panel.reg.push(outcome);
                }
                "liq" => panel.liq.push(outcome),
                other => return Err(fail(format!("{}: unknown path `{other}`", p.display()))),
            }
        }

        let mut ttests = Vec::new();
        for (ticker, panel) in &panels {
            if panel.reg.len() != panel.liq.len() {
                return Err(fail(format!("{ticker}: unpaired window fits")));
            }
            match panel.tests() {
                Ok(t) => {
                    ttests.push(test_row(ticker, "loglik", &t.loglik));
                    ttests.push(test_row(ticker, "a", &t.alpha));
                    ttests.push(test_row(ticker, "b", &t.beta));
                }
                Err(e) => warn(stage, format!("{ticker} t-tests: {e}")),
            }
        }

        let mut adf = Vec::new();
        for (ticker, recs) in &records {
            for (name, f) in &MEASURES[..2] {
                let series: Vec<f64> = recs.iter().map(f).collect();
                match stats::adf_test(&series, None) {
                    Ok(a) => adf.push(AdfRow {
                        ticker: ticker.clone(),
                        series: (*name).to_owned(),
                        statistic: a.statistic,
                        lag_used: a.lag_used,
                        nobs: a.nobs,
                        cv_1pct: a.critical_values.0,
                        cv_5pct: a.critical_values.1,
                        cv_10pct: a.critical_values.2,
                        reject_5pct: a.reject_5pct,
                    }),
                    Err(e) => warn(stage, format!("{ticker} {name} ADF: {e}")),
                }
            }
        }

        let mut anova = Vec::new();
        if records.len() >= 2 {
            for (name, f) in &MEASURES[4..] {
                let groups: Vec<Vec<f64>> = records.values().map(|r| r.iter().map(f).collect()).collect();
                match stats::anova_oneway(&groups) {
                    Ok(a) => anova.push(AnovaRow {
                        measure: (*name).to_owned(),
                        groups: groups.len(),
                        f_statistic: a.f_statistic,
                        dof_between: a.dof_between,
                        dof_within: a.dof_within,
                        p_value: a.p_value,
                    }),
                    Err(e) => warn(stage, format!("{name} ANOVA: {e}")),
                }
            }
        }

        let mut rows = Rows::new();
        self.write(stage, &mut rows, TTESTS, &ttests)?;
        self.write(stage, &mut rows, ADF, &adf)?;
        self.write(stage, &mut rows, ANOVA, &anova)?;
        self.finish(stage, rows)
    }

    /// TMV and LAMV backtests driven by the rolling forecasts.
    pub fn portfolio(&self) -> Result<Rows, Error> {
        let stage = Stage::Portfolio;
        let fail = Self::fail(stage);
        let p = self.require(stage, FORECASTS, Stage::Backtest)?;
        let forecast_rows: Vec<ForecastRow> = io::read_table(&p).map_err(&fail)?;
        let all_records = self.load_records(stage)?;
        let market = portfolio::equal_weight_market(&all_records);
        let records = by_ticker(all_records);
        let spec = PortfolioSpec {
            window_len: self.cfg.window_len,
            lambda_floor: self.cfg.lambda_floor,
            periods_per_year: f64::from(self.cfg.annualization_days),
        };

        let mut forecasts: BTreeMap<String, ForecastSeries> = BTreeMap::new();
        for f in forecast_rows {
            let s = forecasts.entry(f.ticker.clone()).or_insert_with(|| ForecastSeries {
                ticker: f.ticker.clone(),
                dates: Vec::new(),
                mu_hat_reg: Vec::new(),
                mu_hat_liq: Vec::new(),
            });
            s.dates.push(f.date);
            s.mu_hat_reg.push(f.mu_hat_reg);
            s.mu_hat_liq.push(f.mu_hat_liq);
        }

        let mut summary = Vec::new();
        let mut daily = Vec::new();
        for (ticker, f) in &forecasts {
            let recs = records
                .get(ticker)
                .ok_or_else(|| fail(format!("{ticker}: forecasts without daily records")))?;
            let cmp = match portfolio::run_tmv_lamv(f, recs, &market, &spec) {
                Ok(c) => c,
                Err(e) => {
                    warn(stage, format!("{ticker}: {e}"));
                    continue;
                }
            };
            for s in [&cmp.tmv, &cmp.lamv] {
                summary.push(PortfolioRow {
                    ticker: ticker.clone(),
                    portfolio: s.kind.as_str().to_owned(),
                    sharpe_annualized: s.sharpe_annualized,
                    direction: cmp.direction.as_str().to_owned(),
                });
                daily.extend((0..s.dates.len()).map(|i| PortfolioDailyRow {
                    ticker: ticker.clone(),
                    date: s.dates[i],
                    portfolio: s.kind.as_str().to_owned(),
                    weight: s.weights[i].w_asset,
                    realized_return: s.returns[i],
                }));
            }
        }
        let mut rows = Rows::new();
        self.write(stage, &mut rows, PORTFOLIO, &summary)?;
        self.write(stage, &mut rows, PORTFOLIO_DAILY, &daily)?;
        self.finish(stage, rows)
    }

    /// Every stage in order. The synthetic universe is generated first when
    /// no inputs are configured and a `[synth]` table is present.
    pub fn run(&self) -> Result<BTreeMap<Stage, Rows>, Error> {
        let inputs = self.inputs()?;
        let from_synth = inputs.len() == 1 && inputs[0] == self.path(SYNTH_MINUTES) && self.cfg.inputs.is_empty();
        let manifest = self.path(MANIFEST);
        if manifest.exists() {
            fs::remove_file(&manifest).map_err(|e| Self::fail(Stage::Ingest)(format!("{}: {e}", manifest.display())))?;
        }
        let mut out = BTreeMap::new();
        if from_synth {
            out.insert(Stage::Synth, self.synth()?);
        }
        out.insert(Stage::Ingest, self.ingest()?);
        out.insert(Stage::Liquidity, self.liquidity()?);
        out.insert(Stage::Fit, self.fit()?);
        out.insert(Stage::Backtest, self.backtest()?);
        out.insert(Stage::Report, self.report()?);
        out.insert(Stage::Portfolio, self.portfolio()?);
        Ok(out)
    }
}

/// Files every full run writes, besides the synthetic and manifest outputs.
pub const REPORT_FILES: [&str; 15] = [
    MINUTES,
    DAY_STATUS,
    DAILY_RECORDS,
    DESCRIPTIVE_STATS,
    HISTOGRAM_BETA_JUMP,
    HISTOGRAM_BETA_DIFF,
    FITS,
    WINDOW_FITS,
    FORECASTS,
    TTESTS,
    ADF,
    ANOVA,
    PORTFOLIO,
    PORTFOLIO_DAILY,
    MANIFEST,
];

pub fn exists_all(dir: &Path) -> bool {
    REPORT_FILES.iter().all(|f| dir.join(f).is_file())
}
