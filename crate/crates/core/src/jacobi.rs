//! Jacobi fields along space-form geodesics: geodesic deviation in scalar
//! normal form J'' + K·J = 0.
//!
//! In a parallel orthonormal (Fermi) frame the normal components decouple,
//! so each one evolves by the same scalar equation with closed form
//! a·cosh(√−K t) + b·sinh(√−K t)/√−K for K < 0 (cos/sin for K > 0, affine
//! flat), with b = J'(0). The growth classifier decides between the
//! asymptotic regimes — exponential for K < 0, linear for K = 0 — by
//! competing least-squares fits on the tail of a separation series.

use alloc::vec::Vec;
use core::fmt;

use crate::fit;
use crate::lyapunov::SeparationSeries;
use crate::math;

#[derive(Debug, Clone, PartialEq)]
pub enum JacobiError {
    /// a and b initial-value lists differ in length.
    CoeffLengthMismatch { a: usize, b: usize },
    NotFinite,
    InvalidStep { dt: f64 },
    NegativeTime { t: f64 },
    /// Series too short for tail classification.
    TooShort { len: usize, needed: usize },
    /// Classification window degenerate (no time spread or too few points).
    DegenerateWindow,
    /// Exponential and polynomial models fit the tail equally well.
    AmbiguousFit,
}

impl fmt::Display for JacobiError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::CoeffLengthMismatch { a, b } => {
                write!(f, "initial values ({a}) and derivatives ({b}) differ in length")
            }
            Self::NotFinite => write!(f, "non-finite input"),
            Self::InvalidStep { dt } => write!(f, "step dt = {dt} must be positive"),
            Self::NegativeTime { t } => write!(f, "time t = {t} must be nonnegative"),
            Self::TooShort { len, needed } => {
                write!(f, "series has {len} samples, classification needs {needed}")
            }
            Self::DegenerateWindow => write!(f, "degenerate classification window"),
            Self::AmbiguousFit => write!(f, "model residuals tie exactly"),
        }
    }
}

impl core::error::Error for JacobiError {}

/// Initial values a_i = J_i(0) and derivatives b_i = J_i'(0), one pair per
/// tracked Fermi direction.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiCoeffs {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl JacobiCoeffs {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self, JacobiError> {
        if a.len() != b.len() {
            return Err(JacobiError::CoeffLengthMismatch {
                a: a.len(),
                b: b.len(),
            });
        }
        if a.iter().chain(&b).any(|x| !x.is_finite()) {
            return Err(JacobiError::NotFinite);
        }
        Ok(Self { a, b })
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }
}

/// Scalar Jacobi state (J, J').
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiState {
    pub value: f64,
    pub derivative: f64,
}

impl JacobiState {
    pub fn new(value: f64, derivative: f64) -> Self {
        Self { value, derivative }
    }
}

/// One scalar component of the closed-form solution of J'' + K·J = 0 with
/// J(0) = a, J'(0) = b.
pub fn jacobi_component(curvature: f64, a: f64, b: f64, t: f64) -> f64 {
    if curvature < 0.0 {
        let rate = math::sqrt(-curvature);
        a * math::cosh(rate * t) + b * math::sinh(rate * t) / rate
    } else if curvature > 0.0 {
        let rate = math::sqrt(curvature);
        a * math::cos(rate * t) + b * math::sin(rate * t) / rate
    } else {
        a + b * t
    }
}

/// Closed-form Jacobi field at parameter t, one value per Fermi direction.
pub fn jacobi_closed_form(curvature: f64, coeffs: &JacobiCoeffs, t: f64) -> Vec<f64> {
    coeffs
        .a
        .iter()
        .zip(&coeffs.b)
        .map(|(&a, &b)| jacobi_component(curvature, a, b, t))
        .collect()
}

/// 4th-order integration of J'' = −K·J from `init` to time t with step dt
/// (final partial step as needed).
pub fn jacobi_integrate(
    curvature: f64,
    init: JacobiState,
    t: f64,
    dt: f64,
) -> Result<JacobiState, JacobiError> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(JacobiError::InvalidStep { dt });
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(JacobiError::NegativeTime { t });
    }
    if !init.value.is_finite() || !init.derivative.is_finite() {
        return Err(JacobiError::NotFinite);
    }
    let mut state = init;
    let full_steps = (t / dt) as u64;
    let remainder = t - full_steps as f64 * dt;
    for _ in 0..full_steps {
        state = rk4_step(curvature, state, dt);
    }
    if remainder > 1e-12 * dt {
        state = rk4_step(curvature, state, remainder);
    }
    Ok(state)
}

#[inline]
pub(crate) fn rk4_step(curvature: f64, s: JacobiState, h: f64) -> JacobiState {
    let accel = |j: f64| -curvature * j;
    let (j, dj) = (s.value, s.derivative);
    let k1 = (dj, accel(j));
    let k2 = (dj + 0.5 * h * k1.1, accel(j + 0.5 * h * k1.0));
    let k3 = (dj + 0.5 * h * k2.1, accel(j + 0.5 * h * k2.0));
    let k4 = (dj + h * k3.1, accel(j + h * k3.0));
    JacobiState {
        value: j + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
        derivative: dj + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
    }
}

/// Asymptotic growth class of a separation series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GrowthClass {
    Bounded,
    Linear,
    Polynomial(f64),
    Exponential(f64),
}

const MIN_SAMPLES: usize = 50;
const MIN_WINDOW: usize = 10;
/// Tail variation below this fraction of the mean means Bounded.
const BOUNDED_VARIATION: f64 = 0.01;
/// A polynomial degree within this distance of 1 is reported Linear.
const LINEAR_BAND: f64 = 0.1;

/// Classifies the tail (latter half) of a separation series as Bounded,
/// Linear, Polynomial(degree) or Exponential(rate) by comparing the residual
/// of ln δ vs t against ln δ vs ln t; the strictly smaller residual wins.
pub fn classify_separation(series: &SeparationSeries) -> Result<GrowthClass, JacobiError> {
    let n = series.len();
    if n < MIN_SAMPLES {
        return Err(JacobiError::TooShort {
            len: n,
            needed: MIN_SAMPLES,
        });
    }
    let start = n / 2;
    let times = &series.times()[start..];
    let logs = &series.log_deltas()[start..];
    if times.len() < MIN_WINDOW || times[times.len() - 1] <= times[0] {
        return Err(JacobiError::DegenerateWindow);
    }

    // Bounded: tail variation below 1% of the tail mean, computed on ratios
    // so it stays finite for astronomically large separations.
    let max_log = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let spread = max_log - logs.iter().cloned().fold(f64::INFINITY, f64::min);
    if spread < 0.1 {
        let scaled: Vec<f64> = logs.iter().map(|&s| math::exp(s - max_log)).collect();
        let mean = scaled.iter().sum::<f64>() / scaled.len() as f64;
        let lo = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
        if (1.0 - lo) / mean < BOUNDED_VARIATION {
            return Ok(GrowthClass::Bounded);
        }
    }

    if times[0] <= 0.0 {
        return Err(JacobiError::DegenerateWindow);
    }
    let log_times: Vec<f64> = times.iter().map(|&t| math::ln(t)).collect();
    let exp_fit = fit::linear_fit(times, logs);
    let poly_fit = fit::linear_fit(&log_times, logs);

    if exp_fit.rss == poly_fit.rss {
        return Err(JacobiError::AmbiguousFit);
    }
    if exp_fit.rss < poly_fit.rss {
        Ok(GrowthClass::Exponential(exp_fit.slope))
    } else if (poly_fit.slope - 1.0).abs() <= LINEAR_BAND {
        Ok(GrowthClass::Linear)
    } else {
        Ok(GrowthClass::Polynomial(poly_fit.slope))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::vec::Vec;

    fn series_from(f: impl Fn(f64) -> f64, t0: f64, t1: f64, n: usize) -> SeparationSeries {
        let times: Vec<f64> = (0..n)
            .map(|i| t0 + (t1 - t0) * i as f64 / (n - 1) as f64)
            .collect();
        let deltas: Vec<f64> = times.iter().map(|&t| f(t)).collect();
        SeparationSeries::from_deltas(times, deltas).unwrap()
    }

    #[test]
    fn closed_form_matches_hand_values() {
        // J'' = J with J(0)=0, J'(0)=1 is sinh(t).
        let c = JacobiCoeffs::new(std::vec![0.0], std::vec![1.0]).unwrap();
        for t in [0.5f64, 1.0, 3.0, 10.0] {
            let j = jacobi_closed_form(-1.0, &c, t)[0];
            assert!((j - t.sinh()).abs() < 1e-12 * t.sinh().max(1.0));
        }
        // Flat: linear separation.
        let j = jacobi_closed_form(0.0, &c, 7.0)[0];
        assert_eq!(j, 7.0);
        // K = -4, a=1, b=0 at t=1: cosh(2).
        let c = JacobiCoeffs::new(std::vec![1.0], std::vec![0.0]).unwrap();
        let j = jacobi_closed_form(-4.0, &c, 1.0)[0];
        assert!((j - 2f64.cosh()).abs() < 1e-12);
    }

    #[test]
    fn closed_form_satisfies_ode_by_second_difference() {
        let c = JacobiCoeffs::new(std::vec![0.7], std::vec![-0.3]).unwrap();
        let h = 1e-4;
        for k in [-4.0, -1.0, 0.0, 1.0] {
            for t in [0.5, 1.5, 3.0] {
                let jm = jacobi_closed_form(k, &c, t - h)[0];
                let j0 = jacobi_closed_form(k, &c, t)[0];
                let jp = jacobi_closed_form(k, &c, t + h)[0];
                let second = (jp - 2.0 * j0 + jm) / (h * h);
                assert!((second + k * j0).abs() < 1e-5 * j0.abs().max(1.0));
            }
        }
    }

    #[test]
    fn coeffs_validation() {
        assert!(JacobiCoeffs::new(std::vec![1.0], std::vec![]).is_err());
        assert!(JacobiCoeffs::new(std::vec![f64::NAN], std::vec![0.0]).is_err());
    }

    #[test]
    fn integrate_matches_closed_form() {
        for k in [-4.0, -1.0, 1.0] {
            let exact = jacobi_component(k, 0.0, 1.0, 10.0);
            let got = jacobi_integrate(k, JacobiState::new(0.0, 1.0), 10.0, 1e-3).unwrap();
            assert!(
                (got.value - exact).abs() <= 1e-8 * exact.abs().max(1.0),
                "K={k}: {} vs {exact}",
                got.value
            );
        }
        // sinh(10) explicitly.
        let got = jacobi_integrate(-1.0, JacobiState::new(0.0, 1.0), 10.0, 1e-3).unwrap();
        assert!((got.value - 10f64.sinh()).abs() / 10f64.sinh() < 1e-8);
    }

    #[test]
    fn integrate_flat_constant_solution() {
        let got = jacobi_integrate(0.0, JacobiState::new(1.0, 0.0), 123.0, 0.37).unwrap();
        assert_eq!(got.value, 1.0);
        assert_eq!(got.derivative, 0.0);
    }

    #[test]
    fn integrate_sphere_zero_at_pi() {
        let got = jacobi_integrate(1.0, JacobiState::new(0.0, 1.0), core::f64::consts::PI, 1e-3)
            .unwrap();
        assert!(got.value.abs() < 1e-7);
    }

    #[test]
    fn integrate_rejects_bad_input() {
        assert!(jacobi_integrate(-1.0, JacobiState::new(0.0, 1.0), 1.0, 0.0).is_err());
        assert!(jacobi_integrate(-1.0, JacobiState::new(0.0, 1.0), 1.0, -1.0).is_err());
        assert!(jacobi_integrate(-1.0, JacobiState::new(0.0, 1.0), -1.0, 0.1).is_err());
        assert!(jacobi_integrate(-1.0, JacobiState::new(f64::NAN, 1.0), 1.0, 0.1).is_err());
    }

    #[test]
    fn wronskian_conserved_for_numeric_solutions() {
        // Decaying and growing modes keep all products O(1) so the drift is
        // actually measurable at 1e-9.
        for k in [-4.0f64, -1.0, 1.0] {
            let (s1, s2) = if k < 0.0 {
                let rate = (-k).sqrt();
                (JacobiState::new(1.0, -rate), JacobiState::new(1.0, rate))
            } else {
                (JacobiState::new(1.0, 0.0), JacobiState::new(0.0, 1.0))
            };
            let w0 = s1.value * s2.derivative - s2.value * s1.derivative;
            let mut a = s1;
            let mut b = s2;
            let dt = 1e-3;
            for step in 0..10_000 {
                a = rk4_step(k, a, dt);
                b = rk4_step(k, b, dt);
                if step % 100 == 0 {
                    let w = a.value * b.derivative - b.value * a.derivative;
                    assert!((w - w0).abs() <= 1e-9, "K={k} step={step}: {w} vs {w0}");
                }
            }
        }
    }

    #[test]
    fn classify_sinh_series_exponential() {
        let s = series_from(|t| t.sinh(), 5.0, 30.0, 200);
        match classify_separation(&s).unwrap() {
            GrowthClass::Exponential(rate) => assert!((rate - 1.0).abs() <= 0.02),
            other => panic!("expected exponential, got {other:?}"),
        }
    }

    #[test]
    fn classify_flat_jacobi_linear() {
        let s = series_from(|t| t, 0.5, 30.0, 200);
        assert_eq!(classify_separation(&s).unwrap(), GrowthClass::Linear);
    }

    #[test]
    fn classify_square_power_law() {
        let s = series_from(|t| t * t, 1.0, 100.0, 300);
        match classify_separation(&s).unwrap() {
            GrowthClass::Polynomial(deg) => assert!((deg - 2.0).abs() <= 0.05),
            other => panic!("expected polynomial, got {other:?}"),
        }
    }

    #[test]
    fn classify_constant_bounded() {
        let s = series_from(|t| 2.0 + 1e-4 * (t * 0.1).sin(), 1.0, 50.0, 120);
        assert_eq!(classify_separation(&s).unwrap(), GrowthClass::Bounded);
    }

    #[test]
    fn classify_dichotomy_on_true_jacobi_series() {
        // K <= 0 separations (J(0)=0, J'(0)=1) are only Linear or Exponential.
        for k in [-4.0f64, -1.0, -0.25, 0.0] {
            let s = series_from(|t| jacobi_component(k, 0.0, 1.0, t), 1.0, 30.0, 250);
            match classify_separation(&s).unwrap() {
                GrowthClass::Linear => assert_eq!(k, 0.0),
                GrowthClass::Exponential(rate) => {
                    assert!(k < 0.0);
                    assert!((rate - (-k).sqrt()).abs() <= 0.02 * (-k).sqrt().max(1.0));
                }
                other => panic!("K={k}: unexpected class {other:?}"),
            }
        }
    }

    #[test]
    fn classify_rejects_short_series() {
        let s = series_from(|t| t, 1.0, 5.0, 20);
        assert!(matches!(
            classify_separation(&s),
            Err(JacobiError::TooShort { .. })
        ));
    }
}
