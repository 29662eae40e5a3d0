//! Numerical laboratory for weak chaos: constant-curvature geometry, Jacobi
//! fields, q-deformed distance scales, and Lyapunov exponent estimators.
//!
//! The crate is `no_std` + `alloc`; all float math goes through [`libm`] so
//! results are identical across platforms. The companion `qchaos-cli` crate
//! carries IO, the experiment runner, and file formats.
//!
//! Module map:
//! - [`qcalc`] — the τ_q deformation, q-exponential/q-logarithm, Tsallis
//!   entropy and its composition law.
//! - [`spaceform`] — hyperboloid / affine / sphere model geometries with
//!   exact and numeric geodesic flows and the circle-defect curvature
//!   estimator.
//! - [`jacobi`] — geodesic deviation: closed form, numeric integration,
//!   and asymptotic growth classification.
//! - [`lyapunov`] — exponent estimators over separation series and tangent
//!   dynamics (standard, modified, deformed, Benettin, 2D map spectra).
//! - [`systems`] — concrete systems driving the estimators: geodesic
//!   separation, the torus cat map, and the logistic map at the edge of
//!   chaos.
//! - [`rng`] — the seeded counter-based generator used for initial
//!   condition sampling.
//!
//! The one-line story: an exponentially growing separation has a positive
//! exponent on the raw scale and a vanishing one on the τ_q scale.
//!
//! ```
//! use qchaos_core::lyapunov::{deformed_lyapunov, standard_lyapunov, SeparationSeries};
//! use qchaos_core::qcalc::DeformParam;
//!
//! // delta(t) = e^t, stored as ln delta = t.
//! let times: Vec<f64> = (1..=200).map(|i| 0.25 * i as f64).collect();
//! let series = SeparationSeries::from_log_deltas(times.clone(), times).unwrap();
//! assert!((standard_lyapunov(&series, 0.5).unwrap().value - 1.0).abs() < 1e-9);
//!
//! let q = DeformParam::new(0.5).unwrap();
//! assert!(deformed_lyapunov(&q, &series, 0.5).unwrap().value.abs() < 0.1);
//! ```

#![no_std]
// Validation guards are written `!(x > 0.0)` on purpose: the negated form
// rejects NaN, the "clearer" `x <= 0.0` silently accepts it.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod fit;
mod math;

pub mod jacobi;
pub mod lyapunov;
pub mod qcalc;
pub mod rng;
pub mod spaceform;
pub mod systems;
