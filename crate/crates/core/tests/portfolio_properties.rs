//! Mean-variance weights and the TMV/LAMV comparison.

use chrono::{Duration, NaiveDate};
use liqarch_core::backtest::ForecastSeries;
use liqarch_core::liquidity::DailyRecord;
use liqarch_core::portfolio::*;
use liqarch_core::stats::Direction;
use liqarch_core::synth::gen_garch_series;
use proptest::prelude::*;

proptest! {
    #[test]
    fn weight_beats_every_grid_point(
        mu in -0.01f64..0.01,
        sigma2 in 1e-6f64..1e-2,
        lambda in 1e-4f64..50.0,
    ) {
        let lam = RiskAversion { lambda };
        let w = mv_weights(mu, sigma2, lam).unwrap();
        let best = mv_objective(w.w_asset, mu, sigma2, lam);
        for k in 0..=1000 {
            let g = k as f64 / 1000.0;
            prop_assert!(best >= mv_objective(g, mu, sigma2, lam) - 1e-15);
        }
        prop_assert_eq!(w.w_asset + w.w_rf, 1.0);
    }
}

#[test]
fn identical_pipelines_tie() {
    let d0 = NaiveDate::from_ymd_opt(2022, 1, 3).unwrap();
    let r = gen_garch_series(1e-4, 0.1, 0.8, 200, 6).unwrap();
    let recs: Vec<DailyRecord> = r
        .iter()
        .enumerate()
        .map(|(i, &r)| DailyRecord {
            ticker: "X".into(),
            date: d0 + Duration::days(i as i64),
            r: r + 5e-4,
            r_liq: r + 5e-4,
            sigma: r.abs(),
            sigma_liq: r.abs(),
            beta_jump: 1.0,
            beta_diff: 1.0,
            degenerate: false,
        })
        .collect();
    let dates: Vec<NaiveDate> = recs[60..].iter().map(|d| d.date).collect();
    let mu: Vec<f64> = (0..dates.len()).map(|i| 1e-3 * ((i % 7) as f64 - 2.0)).collect();
    let forecasts = ForecastSeries {
        ticker: "X".into(),
        dates,
        mu_hat_reg: mu.clone(),
        mu_hat_liq: mu,
    };
    let spec = PortfolioSpec {
        window_len: 60,
        lambda_floor: DEFAULT_LAMBDA_FLOOR,
        periods_per_year: 252.0,
    };
    let cmp = run_tmv_lamv(&forecasts, &recs, &equal_weight_market(&recs), &spec).unwrap();
    assert_eq!(cmp.tmv.returns, cmp.lamv.returns);
    assert_eq!(cmp.direction, Direction::NoChange);
    assert!(cmp.tmv.returns.iter().any(|&p| p != 0.0));
}
