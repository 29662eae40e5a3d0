//! Lyapunov exponent estimators over separation series and tangent dynamics.
//!
//! Three ways to read a separation history δ(t):
//! - standard: slope of ln δ vs t — the exponential rate χ;
//! - modified: slope of ln δ vs ln t — the polynomial degree λ with δ ~ t^λ;
//! - deformed: re-measure δ through τ_q⁻¹ first, then take the standard
//!   slope. Exponential separations become asymptotically linear on the
//!   deformed scale, so this estimate tends to zero with the window — only
//!   double-exponential growth keeps it positive.
//!
//! Tangent-dynamics estimators: Benettin-style renormalized evolution of the
//! scalar Jacobi pair, and a 2-vector Gram–Schmidt product for planar map
//! spectra.
//!
//! Series store ln δ internally: the estimators only ever consume logs, and
//! that keeps sensitivities like ξ ~ e^{693000} (far beyond f64 range)
//! representable.

use alloc::vec::Vec;
use core::fmt;

use crate::fit;
use crate::jacobi::{self, JacobiState};
use crate::math;
use crate::qcalc::{DeformParam, QcalcError};

/// Estimators reject series with fewer samples than this.
pub const MIN_SAMPLES: usize = 50;
/// Regression windows with fewer points than this are rejected.
pub const MIN_WINDOW: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub enum LyapunovError {
    /// Times not strictly increasing, lengths unequal, or values invalid.
    InvalidSeries(&'static str),
    TooShort { len: usize, needed: usize },
    InvalidTailFraction(f64),
    DegenerateWindow { len: usize },
    /// Modified estimator needs strictly positive window times.
    NonPositiveTime(f64),
    InvalidParameter(&'static str),
    SingularJacobian { index: usize },
    Deform(QcalcError),
}

impl fmt::Display for LyapunovError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidSeries(why) => write!(f, "invalid separation series: {why}"),
            Self::TooShort { len, needed } => {
                write!(f, "series has {len} samples, estimation needs {needed}")
            }
            Self::InvalidTailFraction(t) => {
                write!(f, "tail fraction {t} outside (0, 1]")
            }
            Self::DegenerateWindow { len } => {
                write!(f, "regression window of {len} points is below {MIN_WINDOW}")
            }
            Self::NonPositiveTime(t) => {
                write!(f, "window time {t} is not positive")
            }
            Self::InvalidParameter(why) => write!(f, "invalid parameter: {why}"),
            Self::SingularJacobian { index } => {
                write!(f, "singular Jacobian in stream at index {index}")
            }
            Self::Deform(e) => write!(f, "deformation failed: {e}"),
        }
    }
}

impl core::error::Error for LyapunovError {}

impl From<QcalcError> for LyapunovError {
    fn from(e: QcalcError) -> Self {
        Self::Deform(e)
    }
}

/// Sampled separation history (t, δ(t)), stored as (t, ln δ(t)).
#[derive(Debug, Clone, PartialEq)]
pub struct SeparationSeries {
    times: Vec<f64>,
    log_deltas: Vec<f64>,
}

impl SeparationSeries {
    /// From raw positive separations.
    pub fn from_deltas(times: Vec<f64>, deltas: Vec<f64>) -> Result<Self, LyapunovError> {
        if deltas.iter().any(|&d| !(d > 0.0) || !d.is_finite()) {
            return Err(LyapunovError::InvalidSeries("separations must be positive"));
        }
        let log_deltas = deltas.iter().map(|&d| math::ln(d)).collect();
        Self::from_log_deltas(times, log_deltas)
    }

    /// From log-separations (any finite values).
    pub fn from_log_deltas(times: Vec<f64>, log_deltas: Vec<f64>) -> Result<Self, LyapunovError> {
        if times.len() != log_deltas.len() {
            return Err(LyapunovError::InvalidSeries("length mismatch"));
        }
        if times.is_empty() {
            return Err(LyapunovError::InvalidSeries("empty"));
        }
        if times.iter().any(|t| !t.is_finite()) || log_deltas.iter().any(|s| !s.is_finite()) {
            return Err(LyapunovError::InvalidSeries("non-finite entry"));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(LyapunovError::InvalidSeries(
                "times must be strictly increasing",
            ));
        }
        Ok(Self { times, log_deltas })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn log_deltas(&self) -> &[f64] {
        &self.log_deltas
    }

    /// δ at index i; +∞ when the stored log exceeds f64 range.
    pub fn delta(&self, i: usize) -> f64 {
        math::exp(self.log_deltas[i])
    }
}

/// Estimator family tag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    Standard,
    Modified,
    Deformed { q: f64 },
}

/// Fitted growth rate with regression diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentEstimate {
    /// 1/time for Standard/Deformed; dimensionless degree for Modified.
    pub value: f64,
    pub stderr: f64,
    /// Time span of the fitted window.
    pub window: (f64, f64),
    pub method: Method,
}

fn tail_window(series: &SeparationSeries, tail_fraction: f64) -> Result<usize, LyapunovError> {
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(LyapunovError::InvalidTailFraction(tail_fraction));
    }
    let n = series.len();
    if n < MIN_SAMPLES {
        return Err(LyapunovError::TooShort {
            len: n,
            needed: MIN_SAMPLES,
        });
    }
    let count = ((n as f64 * tail_fraction) + 0.5) as usize;
    let count = count.clamp(1, n);
    if count < MIN_WINDOW {
        return Err(LyapunovError::DegenerateWindow { len: count });
    }
    Ok(n - count)
}

/// Exponential rate: least-squares slope of ln δ vs t over the final
/// `tail_fraction` of samples.
pub fn standard_lyapunov(
    series: &SeparationSeries,
    tail_fraction: f64,
) -> Result<ExponentEstimate, LyapunovError> {
    let start = tail_window(series, tail_fraction)?;
    let times = &series.times[start..];
    let logs = &series.log_deltas[start..];
    let fit = fit::linear_fit(times, logs);
    Ok(ExponentEstimate {
        value: fit.slope,
        stderr: fit.slope_stderr,
        window: (times[0], times[times.len() - 1]),
        method: Method::Standard,
    })
}

/// Polynomial degree: least-squares slope of ln δ vs ln t over the tail
/// window (δ ~ t^λ).
pub fn modified_lyapunov(
    series: &SeparationSeries,
    tail_fraction: f64,
) -> Result<ExponentEstimate, LyapunovError> {
    let start = tail_window(series, tail_fraction)?;
    let times = &series.times[start..];
    let logs = &series.log_deltas[start..];
    if times[0] <= 0.0 {
        return Err(LyapunovError::NonPositiveTime(times[0]));
    }
    let log_times: Vec<f64> = times.iter().map(|&t| math::ln(t)).collect();
    let fit = fit::linear_fit(&log_times, logs);
    Ok(ExponentEstimate {
        value: fit.slope,
        stderr: fit.slope_stderr,
        window: (times[0], times[times.len() - 1]),
        method: Method::Modified,
    })
}

/// The same series with every separation re-measured through τ_q⁻¹.
pub fn deformed_series(
    deform: &DeformParam,
    series: &SeparationSeries,
) -> Result<SeparationSeries, LyapunovError> {
    let mut logs = Vec::with_capacity(series.len());
    for &s in &series.log_deltas {
        let d = deform.deformed_distance_log(s)?;
        if !(d > 0.0) {
            return Err(LyapunovError::InvalidSeries(
                "deformed separation not positive",
            ));
        }
        logs.push(math::ln(d));
    }
    SeparationSeries::from_log_deltas(series.times.clone(), logs)
}

/// Standard estimator applied to the τ_q-re-measured separations. For any
/// exponentially growing series the estimate tends to 0 as the window grows.
pub fn deformed_lyapunov(
    deform: &DeformParam,
    series: &SeparationSeries,
    tail_fraction: f64,
) -> Result<ExponentEstimate, LyapunovError> {
    let transformed = deformed_series(deform, series)?;
    let est = standard_lyapunov(&transformed, tail_fraction)?;
    Ok(ExponentEstimate {
        method: Method::Deformed { q: deform.q() },
        ..est
    })
}

/// Largest exponent of the Jacobi tangent dynamics by renormalized
/// evolution: integrate (J, J'), rescale to unit norm every `renorm_every`
/// steps, accumulate log stretching factors, divide by total time.
pub fn benettin_flow_exponent(
    curvature: f64,
    init: JacobiState,
    total_time: f64,
    dt: f64,
    renorm_every: usize,
) -> Result<ExponentEstimate, LyapunovError> {
    if !(total_time > 0.0) || !total_time.is_finite() {
        return Err(LyapunovError::InvalidParameter("total time must be positive"));
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(LyapunovError::InvalidParameter("dt must be positive"));
    }
    if renorm_every == 0 {
        return Err(LyapunovError::InvalidParameter("renorm_every must be >= 1"));
    }
    if !init.value.is_finite() || !init.derivative.is_finite() {
        return Err(LyapunovError::InvalidParameter("non-finite initial state"));
    }
    let norm0 = math::hypot(init.value, init.derivative);
    if norm0 == 0.0 {
        return Err(LyapunovError::InvalidParameter("zero initial state"));
    }

    let steps = libm::ceil(total_time / dt) as u64;
    let mut state = JacobiState::new(init.value / norm0, init.derivative / norm0);
    let mut log_sum = 0.0;
    let mut block_rates: Vec<f64> = Vec::new();
    let mut block_start_time = 0.0;
    let mut elapsed = 0.0;
    for step in 0..steps {
        let h = if elapsed + dt > total_time {
            total_time - elapsed
        } else {
            dt
        };
        if h <= 0.0 {
            break;
        }
        state = jacobi::rk4_step(curvature, state, h);
        elapsed += h;
        if (step + 1) % renorm_every as u64 == 0 || step + 1 == steps {
            let r = math::hypot(state.value, state.derivative);
            let log_r = math::ln(r);
            log_sum += log_r;
            state = JacobiState::new(state.value / r, state.derivative / r);
            if elapsed > block_start_time {
                block_rates.push(log_r / (elapsed - block_start_time));
            }
            block_start_time = elapsed;
        }
    }
    let value = log_sum / total_time;
    let stderr = if block_rates.len() > 1 {
        let m = block_rates.len() as f64;
        let mean = block_rates.iter().sum::<f64>() / m;
        let var = block_rates.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (m - 1.0);
        math::sqrt(var / m)
    } else {
        0.0
    };
    Ok(ExponentEstimate {
        value,
        stderr,
        window: (0.0, total_time),
        method: Method::Standard,
    })
}

/// Two-exponent spectrum of a planar map from its Jacobian stream:
/// accumulate matrix products with per-step two-vector Gram–Schmidt,
/// averaging log stretching factors. Returned in decreasing order.
pub fn map_lyapunov_spectrum<I>(jacobians: I) -> Result<(f64, f64), LyapunovError>
where
    I: IntoIterator<Item = [[f64; 2]; 2]>,
{
    const MIN_STREAM: usize = 10_000;
    let mut u1 = [1.0, 0.0];
    let mut u2 = [0.0, 1.0];
    let mut acc1 = 0.0;
    let mut acc2 = 0.0;
    let mut count = 0usize;
    for (index, m) in jacobians.into_iter().enumerate() {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det.abs() < 1e-300 || !det.is_finite() {
            return Err(LyapunovError::SingularJacobian { index });
        }
        let w1 = apply2(&m, &u1);
        let r1 = math::hypot(w1[0], w1[1]);
        if r1 == 0.0 {
            return Err(LyapunovError::SingularJacobian { index });
        }
        u1 = [w1[0] / r1, w1[1] / r1];
        let w2 = apply2(&m, &u2);
        let proj = w2[0] * u1[0] + w2[1] * u1[1];
        let w2 = [w2[0] - proj * u1[0], w2[1] - proj * u1[1]];
        let r2 = math::hypot(w2[0], w2[1]);
        if r2 == 0.0 {
            return Err(LyapunovError::SingularJacobian { index });
        }
        u2 = [w2[0] / r2, w2[1] / r2];
        acc1 += math::ln(r1);
        acc2 += math::ln(r2);
        count += 1;
    }
    if count < MIN_STREAM {
        return Err(LyapunovError::TooShort {
            len: count,
            needed: MIN_STREAM,
        });
    }
    let a = acc1 / count as f64;
    let b = acc2 / count as f64;
    Ok(if a >= b { (a, b) } else { (b, a) })
}

#[inline]
fn apply2(m: &[[f64; 2]; 2], v: &[f64; 2]) -> [f64; 2] {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}
