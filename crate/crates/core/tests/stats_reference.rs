//! Statistics checked against reference values from SciPy and statsmodels,
//! plus property tests of the test identities.

use approx::assert_relative_eq;
use liqarch_core::stats::*;
use liqarch_core::synth::gen_garch_series;
use proptest::prelude::*;

/// Deterministic pseudo-noise reproducible outside Rust.
fn noise(n: usize, k: f64) -> Vec<f64> {
    (0..n)
        .map(|t| ((t as f64 + 1.0) * 12.9898 * k).sin() * 43758.5453)
        .map(|v| v.rem_euclid(1.0) - 0.5)
        .collect()
}

fn cumsum(xs: &[f64]) -> Vec<f64> {
    xs.iter()
        .scan(0.0, |s, x| {
            *s += x;
            Some(*s)
        })
        .collect()
}

#[test]
fn student_t_tails_match_scipy() {
    let cases = [
        (0.5, 3.0, 0.6742760175759246, 0.3257239824240755),
        (-2.29, 4818.0, 0.011032169965724236, 0.9889678300342758),
        (1.96, 10.0, 0.9607818798761502, 0.03921812012384987),
        (-7.0, 198.0, 1.939817297763615e-11, 0.9999999999806019),
        (3.0, 1.0, 0.8975836176504333, 0.10241638234956672),
        (12.0, 30.0, 0.999999999999721, 2.7900927075996303e-13),
    ];
    for (t, d, lo, hi) in cases {
        let (l, h) = student_t_tails(t, d);
        assert_relative_eq!(l, lo, max_relative = 1e-9);
        assert_relative_eq!(h, hi, max_relative = 1e-9);
    }
}

#[test]
fn f_upper_tail_matches_scipy() {
    for (f, d1, d2, p) in [
        (2.5, 2.0, 50.0, 0.09229599817706412),
        (0.3, 4.0, 10.0, 0.871405528424992),
        (10.0, 1.0, 100.0, 0.0020728725808666576),
    ] {
        assert_relative_eq!(f_sf(f, d1, d2), p, max_relative = 1e-9);
    }
}

#[test]
fn pooled_t_test_matches_scipy() {
    let a = noise(50, 4.0);
    let b: Vec<f64> = noise(70, 5.0).iter().map(|v| v + 0.1).collect();
    let r = t_test_two_sample(&a, &b).unwrap();
    assert_relative_eq!(r.statistic, -4.624274164949122, max_relative = 1e-9);
    assert_relative_eq!(r.p_two_sided, 9.69467106827709e-06, max_relative = 1e-7);
    assert_relative_eq!(r.p_less, 4.847335534138545e-06, max_relative = 1e-7);
    assert_eq!(r.dof, 118.0);
    assert_eq!(r.significance, Significance::Pct1);
    // y has the larger mean
    assert_eq!(r.direction, Direction::Up);
}

#[test]
fn anova_matches_scipy() {
    let groups = [noise(50, 4.0), noise(70, 5.0).iter().map(|v| v + 0.1).collect(), noise(40, 6.0)];
    let r = anova_oneway(&groups).unwrap();
    assert_relative_eq!(r.f_statistic, 10.614307977886103, max_relative = 1e-9);
    assert_relative_eq!(r.p_value, 4.746725311799968e-05, max_relative = 1e-7);
    assert_eq!((r.dof_between, r.dof_within), (2, 157));
}

#[test]
fn adf_matches_statsmodels() {
    let x = noise(300, 1.0);
    let rw = cumsum(&noise(300, 2.0));
    let e = noise(300, 3.0);
    let mut ar = vec![0.0; 300];
    for t in 1..300 {
        ar[t] = 0.6 * ar[t - 1] + e[t];
    }
    for (series, stat, lag) in [
        (&x, -17.195419700616412, 0),
        (&rw, 0.10317835886882282, 0),
        (&ar, -7.678845464008561, 1),
    ] {
        for max_lag in [None, Some(4)] {
            let r = adf_test(series, max_lag).unwrap();
            assert_relative_eq!(r.statistic, stat, max_relative = 1e-8);
            assert_eq!(r.lag_used, lag);
            assert_eq!(r.reject_5pct, r.statistic < r.critical_values.1);
        }
    }
}

#[test]
fn five_percent_critical_value_by_monte_carlo() {
    // lag-0 Dickey-Fuller statistic under a unit root, n = 500
    let mut stats: Vec<f64> = (0..2000)
        .map(|s| {
            let walk = cumsum(&gen_garch_series(1.0, 0.0, 0.0, 500, 10_000 + s).unwrap());
            adf_test(&walk, Some(0)).unwrap().statistic
        })
        .collect();
    stats.sort_by(f64::total_cmp);
    let (q1, q5, q10) = (stats[19], stats[99], stats[199]);
    assert!((q5 - ADF_CRITICAL.1).abs() < 0.1, "5% quantile {q5}");
    assert!((q1 - ADF_CRITICAL.0).abs() < 0.2, "1% quantile {q1}");
    assert!((q10 - ADF_CRITICAL.2).abs() < 0.1, "10% quantile {q10}");
}

#[test]
fn closed_form_pooled_t() {
    // unit sample sd in both groups, means 1 and 0
    let base = noise(100, 7.0);
    let m = base.iter().sum::<f64>() / 100.0;
    let sd = (base.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / 99.0).sqrt();
    let z: Vec<f64> = base.iter().map(|v| (v - m) / sd).collect();
    let x: Vec<f64> = z.iter().map(|v| v + 1.0).collect();
    let r = t_test_two_sample(&x, &z).unwrap();
    assert_relative_eq!(r.statistic, 1.0 / (2.0f64 / 100.0).sqrt(), max_relative = 1e-12);
    assert_relative_eq!(r.statistic, 7.0711, epsilon = 1e-4);
}

#[test]
fn shifted_group_is_detected() {
    let g: Vec<Vec<f64>> = (0..3)
        .map(|i| {
            let shift = if i == 2 { 1.0 } else { 0.0 };
            gen_garch_series(1.0, 0.0, 0.0, 200, 40 + i).unwrap().iter().map(|v| v + shift).collect()
        })
        .collect();
    assert!(anova_oneway(&g).unwrap().p_value < 0.01);
}

fn sample() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, 2..40)
}

proptest! {
    #[test]
    fn t_test_identities(x in sample(), y in sample(), c in -100.0f64..100.0) {
        let Ok(r) = t_test_two_sample(&x, &y) else { return Ok(()) };
        prop_assert!((r.p_less + r.p_greater - 1.0).abs() <= 1e-9);
        prop_assert!((r.p_two_sided - (2.0 * r.p_less.min(r.p_greater)).min(1.0)).abs() <= 1e-9);
        prop_assert_eq!(r.dof, (x.len() + y.len() - 2) as f64);

        let s = t_test_two_sample(&y, &x).unwrap();
        prop_assert!((s.statistic + r.statistic).abs() <= 1e-9 * (1.0 + r.statistic.abs()));
        prop_assert!((s.p_less - r.p_greater).abs() <= 1e-9);

        let xs: Vec<f64> = x.iter().map(|v| v + c).collect();
        let ys: Vec<f64> = y.iter().map(|v| v + c).collect();
        let shifted = t_test_two_sample(&xs, &ys).unwrap();
        prop_assert!((shifted.statistic - r.statistic).abs() <= 1e-6 * (1.0 + r.statistic.abs()));

        let f = anova_oneway(&[x.clone(), y.clone()]).unwrap();
        prop_assert!(f.f_statistic >= 0.0);
        let t2 = r.statistic * r.statistic;
        prop_assert!((f.f_statistic - t2).abs() <= 1e-9 * (1.0 + t2));
    }
}
