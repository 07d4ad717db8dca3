//! Small moment helpers shared across modules.

pub(crate) fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sum of squared deviations from the mean.
pub(crate) fn centered_ss(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum()
}

/// Population variance (1/n).
pub(crate) fn population_variance(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    centered_ss(xs) / xs.len() as f64
}

/// Sample variance (1/(n-1)). Zero for fewer than two points.
pub(crate) fn sample_variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    centered_ss(xs) / (xs.len() - 1) as f64
}

/// Whether a variance is indistinguishable from rounding noise around the
/// magnitude of the data (constant inputs rarely give an exact zero).
pub(crate) fn negligible_variance(var: f64, xs: &[f64]) -> bool {
    let scale = xs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    !(var > (1e-13 * scale) * (1e-13 * scale))
}
