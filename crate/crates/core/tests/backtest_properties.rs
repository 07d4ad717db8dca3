//! Rolling-window backtest properties and the planted-jump directional checks.

use chrono::{Duration, NaiveDate};
use liqarch_core::backtest::*;
use liqarch_core::liquidity::DailyRecord;
use liqarch_core::portfolio::{equal_weight_market, run_tmv_lamv, PortfolioSpec, DEFAULT_LAMBDA_FLOOR};
use liqarch_core::stats::Direction;
use liqarch_core::synth::*;

fn records(r: &[f64], r_liq: &[f64]) -> Vec<DailyRecord> {
    let d0 = NaiveDate::from_ymd_opt(2021, 1, 1).unwrap();
    r.iter()
        .zip(r_liq)
        .enumerate()
        .map(|(i, (&r, &r_liq))| DailyRecord {
            ticker: "P".into(),
            date: d0 + Duration::days(i as i64),
            r,
            r_liq,
            sigma: r.abs(),
            sigma_liq: r_liq.abs(),
            beta_jump: 1.0,
            beta_diff: 1.0,
            degenerate: false,
        })
        .collect()
}

fn ar1(phi: f64, n: usize, seed: u64) -> Vec<f64> {
    let e = gen_garch_series(1e-4, 0.0, 0.0, n, seed).unwrap();
    let mut prev = 0.0;
    e.iter()
        .map(|e| {
            prev = phi * prev + e;
            prev
        })
        .collect()
}

/// Evaluates windows back to front.
struct Reversed;

impl WindowMap for Reversed {
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        let mut out: Vec<T> = (0..n).rev().map(f).collect();
        out.reverse();
        out
    }
}

#[test]
fn windows_never_see_the_future() {
    let spec = WindowSpec::new(60).unwrap();
    let y = ar1(0.4, 90, 3);
    let base = run_backtest(&y, &spec, &Sequential).unwrap();
    let mut bumped = y.clone();
    bumped[75] += 0.05;
    let after = run_backtest(&bumped, &spec, &Sequential).unwrap();
    // window i covers [i, i + 60)
    for i in 0..base.len() {
        if i + 60 <= 75 {
            assert_eq!(base[i], after[i], "window {i}");
        } else {
            assert_ne!(base[i], after[i], "window {i}");
        }
    }
}

#[test]
fn identical_paths_give_identical_panels() {
    let y = ar1(0.3, 100, 8);
    let panel = run_model_comparison(&records(&y, &y), &WindowSpec::new(60).unwrap(), &Sequential).unwrap();
    assert_eq!(panel.reg, panel.liq);
    let tests = panel.tests().unwrap();
    for t in [tests.loglik, tests.alpha, tests.beta] {
        assert_eq!(t.direction, Direction::NoChange);
    }
}

#[test]
fn evaluation_order_does_not_matter() {
    let y = ar1(0.3, 90, 4);
    let spec = WindowSpec::new(60).unwrap();
    assert_eq!(run_backtest(&y, &spec, &Sequential).unwrap(), run_backtest(&y, &spec, &Reversed).unwrap());
}

#[test]
fn ar1_forecasts_track_realized_returns() {
    let y = ar1(0.5, 1060, 21);
    let spec = WindowSpec {
        selection: OrderSelection::FirstWindow,
        ..WindowSpec::new(60).unwrap()
    };
    let out = run_backtest(&y, &spec, &Sequential).unwrap();
    assert_eq!(out.len(), 1000);
    let f: Vec<f64> = out.iter().map(|w| w.mean_forecast).collect();
    let realized = &y[60..];
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (mf, mr) = (mean(&f), mean(realized));
    let cov: f64 = f.iter().zip(realized).map(|(a, b)| (a - mf) * (b - mr)).sum();
    assert!(cov > 0.0, "cov {cov}");
}

#[test]
fn planted_jumps_raise_shock_coefficient_and_sharpe() {
    let (base, params) = planted_fixture(900, DEFAULT_UNIVERSE_SEED).unwrap();
    let planted = plant_daily_jumps(&base, &params).unwrap();
    let recs = records(&planted.returns, &planted.adjusted(&params));
    let spec = WindowSpec::new(365).unwrap();
    let panel = run_model_comparison(&recs, &spec, &Sequential).unwrap();
    let alpha = panel.tests().unwrap().alpha;
    let port = run_tmv_lamv(
        &panel.forecasts(),
        &recs,
        &equal_weight_market(&recs),
        &PortfolioSpec {
            window_len: 365,
            lambda_floor: DEFAULT_LAMBDA_FLOOR,
            periods_per_year: 365.0,
        },
    )
    .unwrap();
    let detail = format!(
        "a: T {:.2} p {:.4} {:?}; sharpe tmv {:.3} lamv {:.3}",
        alpha.statistic, alpha.p_two_sided, alpha.direction, port.tmv.sharpe_annualized, port.lamv.sharpe_annualized
    );
    assert!(alpha.direction == Direction::Up && alpha.p_two_sided < 0.05, "{detail}");
    assert!(port.lamv.sharpe_annualized >= port.tmv.sharpe_annualized, "{detail}");
}
