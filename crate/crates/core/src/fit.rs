//! Ordinary least squares on (x, y) pairs, shared by the estimators and the
//! growth classifier.

use crate::math;

#[derive(Debug, Clone, Copy)]
pub struct LineFit {
    pub slope: f64,
    #[allow(dead_code)] // diagnostic value, read by tests
    pub intercept: f64,
    /// Residual sum of squares.
    pub rss: f64,
    /// Standard error of the slope (0 when the fit is exact or n <= 2).
    pub slope_stderr: f64,
}

/// Least-squares line through (xs, ys). Caller guarantees equal lengths >= 2
/// and non-degenerate xs.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> LineFit {
    debug_assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    let nf = n as f64;
    let x_mean = xs.iter().sum::<f64>() / nf;
    let y_mean = ys.iter().sum::<f64>() / nf;

    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 0..n {
        let dx = xs[i] - x_mean;
        sxx += dx * dx;
        sxy += dx * (ys[i] - y_mean);
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;

    let mut rss = 0.0;
    for i in 0..n {
        let r = ys[i] - (intercept + slope * xs[i]);
        rss += r * r;
    }
    let slope_stderr = if n > 2 {
        math::sqrt((rss / (n as f64 - 2.0)).max(0.0) / sxx)
    } else {
        0.0
    };
    LineFit {
        slope,
        intercept,
        rss,
        slope_stderr,
    }
}

/// 1 - R^2 of the fit: 0 for a perfect line, ~1 for no linear structure.
/// Degenerate (constant y) data reports 0.
pub fn misfit(_xs: &[f64], ys: &[f64], fit: &LineFit) -> f64 {
    let n = ys.len() as f64;
    let y_mean = ys.iter().sum::<f64>() / n;
    let syy: f64 = ys.iter().map(|y| (y - y_mean) * (y - y_mean)).sum();
    if syy == 0.0 {
        0.0
    } else {
        (fit.rss / syy).max(0.0)
    }
}
