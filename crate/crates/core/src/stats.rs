//! Pooled two-sample t-tests with directional reading, the augmented
//! Dickey-Fuller unit-root test, and one-way ANOVA.

use alloc::vec::Vec;
use core::fmt;

use crate::linalg;
use crate::moments;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StatsError {
    #[error("sample too short: need {needed}, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("samples have zero variance")]
    ZeroVariance,
    #[error("need at least two groups")]
    TooFewGroups,
    #[error("input contains non-finite values")]
    NonFinite,
}

// ---------------------------------------------------------------------------
// Distribution functions

/// Regularized incomplete beta `I_x(a, b)`.
pub fn inc_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = libm::lgamma(a + b) - libm::lgamma(a) - libm::lgamma(b) + a * libm::log(x) + b * libm::log1p(-x);
    let front = libm::exp(ln_front);
    // the continued fraction converges fast on this side of the mean
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, 1.0 - x) / b
    }
}

/// Continued fraction for the incomplete beta by the modified Lentz method.
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=10_000 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Student-t lower tail `P(T <= t)` and upper tail `P(T > t)`, each computed
/// directly so that small tails keep their precision.
pub fn student_t_tails(t: f64, dof: f64) -> (f64, f64) {
    if t.is_nan() {
        return (f64::NAN, f64::NAN);
    }
    let x = dof / (dof + t * t);
    let half = 0.5 * inc_beta(0.5 * dof, 0.5, x);
    if t >= 0.0 {
        (1.0 - half, half)
    } else {
        (half, 1.0 - half)
    }
}

/// Student-t distribution function.
pub fn student_t_cdf(t: f64, dof: f64) -> f64 {
    student_t_tails(t, dof).0
}

/// Upper tail `P(F > f)` of the F distribution with `(d1, d2)` degrees of freedom.
pub fn f_sf(f: f64, d1: f64, d2: f64) -> f64 {
    if !(f > 0.0) {
        return 1.0;
    }
    inc_beta(0.5 * d2, 0.5 * d1, d2 / (d2 + d1 * f))
}

// ---------------------------------------------------------------------------
// t-test

/// Two-sided significance level reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Significance {
    None,
    Pct10,
    Pct5,
    Pct1,
}

impl Significance {
    pub fn from_p(p: f64) -> Self {
        if p < 0.01 {
            Self::Pct1
        } else if p < 0.05 {
            Self::Pct5
        } else if p < 0.10 {
            Self::Pct10
        } else {
            Self::None
        }
    }

    /// Star notation: `***`, `**`, `*` or empty.
    pub fn stars(self) -> &'static str {
        match self {
            Self::None => "",
            Self::Pct10 => "*",
            Self::Pct5 => "**",
            Self::Pct1 => "***",
        }
    }

    /// Whether the result is significant at `level` (0.01, 0.05 or 0.10) or better.
    pub fn at_least(self, level: f64) -> bool {
        self >= Self::from_p(level * (1.0 - 1e-12))
    }
}

/// Direction of the second sample relative to the first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Up,
    Down,
    NoChange,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Up => "up",
            Self::Down => "down",
            Self::NoChange => "none",
        }
    }

    /// Arrow used in the comparison tables.
    pub fn arrow(self) -> &'static str {
        match self {
            Self::Up => "↑",
            Self::Down => "↓",
            Self::NoChange => "↔",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestResult {
    pub statistic: f64,
    pub dof: f64,
    pub p_two_sided: f64,
    /// `P(T <= t)`: small when `x` has the smaller mean.
    pub p_less: f64,
    pub p_greater: f64,
    pub significance: Significance,
    pub direction: Direction,
}

impl TestResult {
    fn from_statistic(statistic: f64, dof: f64) -> Self {
        let (p_less, p_greater) = student_t_tails(statistic, dof);
        let p_two_sided = (2.0 * p_less.min(p_greater)).min(1.0);
        let significance = Significance::from_p(p_two_sided);
        // two-sided gate first, then the one-sided alternative that is small
        let direction = match significance {
            Significance::None => Direction::NoChange,
            _ if p_less < p_greater => Direction::Up,
            _ => Direction::Down,
        };
        Self {
            statistic,
            dof,
            p_two_sided,
            p_less,
            p_greater,
            significance,
            direction,
        }
    }
}

/// Pooled-variance two-sample t-test of `mean(x) - mean(y)` with
/// `n_x + n_y - 2` degrees of freedom.
///
/// `direction` reads `y` against `x`: `Up` when `y` has the significantly
/// larger mean (the "less" alternative wins), `Down` when it has the smaller.
pub fn t_test_two_sample(x: &[f64], y: &[f64]) -> Result<TestResult, StatsError> {
    for s in [x, y] {
        if s.len() < 2 {
            return Err(StatsError::TooShort { needed: 2, got: s.len() });
        }
        if s.iter().any(|v| !v.is_finite()) {
            return Err(StatsError::NonFinite);
        }
    }
    let (nx, ny) = (x.len() as f64, y.len() as f64);
    let dof = nx + ny - 2.0;
    let diff = moments::mean(x) - moments::mean(y);
    let pooled = (moments::centered_ss(x) + moments::centered_ss(y)) / dof;
    let both: Vec<f64> = x.iter().chain(y).copied().collect();
    if moments::negligible_variance(pooled, &both) {
        return if diff.abs() <= 1e-13 * both.iter().fold(0.0f64, |m, v| m.max(v.abs())) {
            Ok(TestResult::from_statistic(0.0, dof))
        } else {
            Err(StatsError::ZeroVariance)
        };
    }
    let se = libm::sqrt(pooled * (1.0 / nx + 1.0 / ny));
    Ok(TestResult::from_statistic(diff / se, dof))
}

// ---------------------------------------------------------------------------
// ADF

/// Large-sample critical values for the constant-only ADF regression.
pub const ADF_CRITICAL: (f64, f64, f64) = (-3.43, -2.86, -2.57);
/// Shortest series accepted by [`adf_test`].
pub const ADF_MIN_LEN: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdfResult {
    pub statistic: f64,
    pub lag_used: usize,
    pub nobs: usize,
    pub reject_5pct: bool,
    /// 1%, 5% and 10%.
    pub critical_values: (f64, f64, f64),
}

/// Default maximum lag, `floor(12 (n / 100)^(1/4))`.
pub fn adf_default_max_lag(n: usize) -> usize {
    libm::floor(12.0 * libm::pow(n as f64 / 100.0, 0.25)) as usize
}

struct AdfRegression {
    fit: linalg::OlsFit,
    k: usize,
}

/// `dy_t` on `[1, y_{t-1}, dy_{t-1}, .., dy_{t-lag}]` for `t` from `start`.
fn adf_regression(y: &[f64], dy: &[f64], lag: usize, start: usize) -> Option<AdfRegression> {
    let k = 2 + lag;
    let rows = dy.len() - start;
    let mut x = Vec::with_capacity(rows * k);
    let mut target = Vec::with_capacity(rows);
    for t in start..dy.len() {
        x.push(1.0);
        // dy[t] = y[t + 1] - y[t]; the lagged level is y[t]
        x.push(y[t]);
        for i in 1..=lag {
            x.push(dy[t - i]);
        }
        target.push(dy[t]);
    }
    linalg::ols(&x, &target, k).map(|fit| AdfRegression { fit, k })
}

/// Augmented Dickey-Fuller test with a constant and no trend.
///
/// The lag order minimizes AIC over `0..=max_lag` on a common sample; the
/// chosen regression is then re-estimated on every observation it allows.
pub fn adf_test(series: &[f64], max_lag: Option<usize>) -> Result<AdfResult, StatsError> {
    let n = series.len();
    if n < ADF_MIN_LEN {
        return Err(StatsError::TooShort {
            needed: ADF_MIN_LEN,
            got: n,
        });
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let dy: Vec<f64> = series.windows(2).map(|w| w[1] - w[0]).collect();
    // leave at least ten residual degrees of freedom
    let max_lag = max_lag
        .unwrap_or_else(|| adf_default_max_lag(n))
        .min(dy.len().saturating_sub(12) / 2);

    let scale = dy.iter().map(|d| d * d).sum::<f64>().max(series.iter().map(|v| v * v).sum::<f64>());
    let degenerate = |r: &AdfRegression| r.fit.ssr <= 1e-20 * scale;

    let mut best: Option<(f64, usize)> = None;
    for lag in 0..=max_lag {
        let Some(reg) = adf_regression(series, &dy, lag, max_lag) else {
            continue;
        };
        if degenerate(&reg) {
            continue;
        }
        let nobs = reg.fit.nobs as f64;
        let aic = nobs * libm::log(reg.fit.ssr / nobs) + 2.0 * reg.k as f64;
        if best.map_or(true, |(b, _)| aic < b) {
            best = Some((aic, lag));
        }
    }
    let (_, lag) = best.ok_or(StatsError::ZeroVariance)?;
    let reg = adf_regression(series, &dy, lag, lag).ok_or(StatsError::ZeroVariance)?;
    if degenerate(&reg) {
        return Err(StatsError::ZeroVariance);
    }
    let dof = (reg.fit.nobs - reg.k) as f64;
    let s2 = reg.fit.ssr / dof;
    let statistic = reg.fit.coef[1] / libm::sqrt(s2 * reg.fit.xtx_inv_diag[1]);
    Ok(AdfResult {
        statistic,
        lag_used: lag,
        nobs: reg.fit.nobs,
        reject_5pct: statistic < ADF_CRITICAL.1,
        critical_values: ADF_CRITICAL,
    })
}

// ---------------------------------------------------------------------------
// ANOVA

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnovaResult {
    pub f_statistic: f64,
    pub dof_between: usize,
    pub dof_within: usize,
    pub p_value: f64,
}

/// Classical one-way ANOVA F test.
pub fn anova_oneway<S: AsRef<[f64]>>(groups: &[S]) -> Result<AnovaResult, StatsError> {
    if groups.len() < 2 {
        return Err(StatsError::TooFewGroups);
    }
    let mut total = 0usize;
    let mut grand = 0.0;
    for g in groups {
        let g = g.as_ref();
        if g.len() < 2 {
            return Err(StatsError::TooShort { needed: 2, got: g.len() });
        }
        if g.iter().any(|v| !v.is_finite()) {
            return Err(StatsError::NonFinite);
        }
        total += g.len();
        grand += g.iter().sum::<f64>();
    }
    let grand_mean = grand / total as f64;
    let (mut ssb, mut ssw) = (0.0, 0.0);
    for g in groups {
        let g = g.as_ref();
        let m = moments::mean(g);
        ssb += g.len() as f64 * (m - grand_mean) * (m - grand_mean);
        ssw += moments::centered_ss(g);
    }
    let dof_between = groups.len() - 1;
    let dof_within = total - groups.len();
    if !(ssw > 0.0) {
        return if ssb == 0.0 {
            Ok(AnovaResult {
                f_statistic: 0.0,
                dof_between,
                dof_within,
                p_value: 1.0,
            })
        } else {
            Err(StatsError::ZeroVariance)
        };
    }
    let f_statistic = (ssb / dof_between as f64) / (ssw / dof_within as f64);
    Ok(AnovaResult {
        f_statistic,
        dof_between,
        dof_within,
        p_value: f_sf(f_statistic, dof_between as f64, dof_within as f64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn identical_samples() {
        let x = [1.0, 2.0, 3.5, -1.0];
        let r = t_test_two_sample(&x, &x).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_relative_eq!(r.p_two_sided, 1.0, epsilon = 1e-12);
        assert_eq!(r.direction, Direction::NoChange);
    }

    #[test]
    fn constant_samples() {
        let r = t_test_two_sample(&[2.0; 5], &[2.0; 3]).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(t_test_two_sample(&[2.0; 5], &[1.0; 3]), Err(StatsError::ZeroVariance));
        assert!(matches!(t_test_two_sample(&[1.0], &[1.0, 2.0]), Err(StatsError::TooShort { .. })));
    }

    #[test]
    fn significance_levels() {
        assert_eq!(Significance::from_p(0.02), Significance::Pct5);
        assert_eq!(Significance::from_p(0.005).stars(), "***");
        assert_eq!(Significance::from_p(0.2), Significance::None);
        assert!(Significance::Pct5.at_least(0.05));
        assert!(!Significance::Pct10.at_least(0.05));
    }

    #[test]
    fn inc_beta_edges_and_symmetry() {
        assert_eq!(inc_beta(2.0, 3.0, 0.0), 0.0);
        assert_eq!(inc_beta(2.0, 3.0, 1.0), 1.0);
        // I_x(1, 1) = x and I_x(a, b) = 1 - I_{1-x}(b, a)
        assert_relative_eq!(inc_beta(1.0, 1.0, 0.3), 0.3, epsilon = 1e-14);
        assert_relative_eq!(inc_beta(2.5, 0.7, 0.4), 1.0 - inc_beta(0.7, 2.5, 0.6), epsilon = 1e-13);
    }

    #[test]
    fn f_test_of_one_numerator_dof_is_t_squared() {
        for &(t, d) in &[(1.3, 10.0), (2.5, 100.0), (0.4, 4818.0)] {
            let (lo, hi) = student_t_tails(t, d);
            assert_relative_eq!(f_sf(t * t, 1.0, d), 2.0 * lo.min(hi), max_relative = 1e-10);
        }
    }

    #[test]
    fn adf_rejects_on_constant_increments() {
        let y: Vec<f64> = (0..100).map(|t| 0.5 * t as f64).collect();
        assert_eq!(adf_test(&y, None), Err(StatsError::ZeroVariance));
        assert!(matches!(adf_test(&y[..24], None), Err(StatsError::TooShort { .. })));
    }

    #[test]
    fn adf_default_lag() {
        assert_eq!(adf_default_max_lag(100), 12);
        assert_eq!(adf_default_max_lag(500), 17);
    }

    #[test]
    fn anova_errors() {
        assert_eq!(anova_oneway(&[[1.0, 2.0]]), Err(StatsError::TooFewGroups));
        let g: [&[f64]; 2] = [&[1.0, 2.0], &[3.0]];
        assert!(matches!(anova_oneway(&g), Err(StatsError::TooShort { .. })));
        let same = anova_oneway(&[[1.0, 2.0, 3.0], [1.0, 2.0, 3.0]]).unwrap();
        assert_eq!(same.f_statistic, 0.0);
    }
}
