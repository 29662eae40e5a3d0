//! q-deformed real calculus.
//!
//! The entropic index q ∈ (0,1) induces the deformation
//! τ_q(x) = ((2−q)^x − 1)/(1−q), its inverse, the q-exponential
//! exp_q(x) = [1+(1−q)x]^{1/(1−q)} with the standard cutoff, the
//! q-logarithm, the Tsallis entropy S_q(p) = (1 − Σ p_i^q)/(q−1) and its
//! composition law S_q(A⊗B) = S_q(A) + S_q(B) + (1−q)·S_q(A)·S_q(B).
//!
//! τ_q is evaluated as expm1(x·L)/expm1(L) with L = ln1p(1−q): the two are
//! algebraically identical (expm1(L) = 1−q) and the shared denominator makes
//! τ_q(0) = 0 and τ_q(1) = 1 exact while staying cancellation-free as q → 1.

use alloc::vec::Vec;
use core::fmt;

use crate::math;

/// Tolerance on Σ p_i = 1 at distribution construction.
pub const NORMALIZATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum QcalcError {
    /// q outside the open interval (0, 1).
    EntropicIndexOutOfRange(f64),
    /// Non-finite argument.
    NotFinite(f64),
    /// τ_q argument so large that (2−q)^x overflows f64.
    TauOverflow { x: f64 },
    /// τ_q⁻¹ argument at or below the lower end of the range −1/(1−q).
    BelowRange { y: f64, infimum: f64 },
    /// Negative separation passed to the deformed distance.
    NegativeDistance(f64),
    /// q-logarithm argument outside (0, ∞).
    NonPositive(f64),
    /// Distribution entry below zero.
    NegativeProbability { index: usize, value: f64 },
    /// Distribution entries do not sum to 1 within [`NORMALIZATION_TOL`].
    NotNormalized { sum: f64 },
}

impl fmt::Display for QcalcError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::EntropicIndexOutOfRange(q) => {
                write!(f, "entropic index q = {q} outside the open interval (0, 1)")
            }
            Self::NotFinite(x) => write!(f, "non-finite argument {x}"),
            Self::TauOverflow { x } => write!(f, "tau_q({x}) overflows f64"),
            Self::BelowRange { y, infimum } => {
                write!(f, "tau_q inverse of {y} undefined: range infimum is {infimum}")
            }
            Self::NegativeDistance(d) => write!(f, "separation {d} is negative"),
            Self::NonPositive(x) => write!(f, "q-logarithm argument {x} is not positive"),
            Self::NegativeProbability { index, value } => {
                write!(f, "probability p[{index}] = {value} is negative")
            }
            Self::NotNormalized { sum } => {
                write!(f, "probabilities sum to {sum}, not 1 within {NORMALIZATION_TOL:e}")
            }
        }
    }
}

impl core::error::Error for QcalcError {}

/// Entropic index q ∈ (0, 1) and the deformation machinery it induces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformParam {
    q: f64,
}

impl DeformParam {
    /// Rejects q outside the open interval (0, 1).
    pub fn new(q: f64) -> Result<Self, QcalcError> {
        if !(q > 0.0 && q < 1.0) {
            return Err(QcalcError::EntropicIndexOutOfRange(q));
        }
        Ok(Self { q })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    #[inline]
    fn one_minus_q(&self) -> f64 {
        1.0 - self.q
    }

    /// ln(2−q), the log of the deformation base.
    #[inline]
    pub fn log_base(&self) -> f64 {
        math::ln_1p(self.one_minus_q())
    }

    /// τ_q(x) = ((2−q)^x − 1)/(1−q). Strictly increasing, fixes 0 and 1,
    /// range (−1/(1−q), ∞).
    pub fn tau(&self, x: f64) -> Result<f64, QcalcError> {
        if !x.is_finite() {
            return Err(QcalcError::NotFinite(x));
        }
        let log_base = self.log_base();
        let z = x * log_base;
        if z > math::EXP_OVERFLOW {
            return Err(QcalcError::TauOverflow { x });
        }
        Ok(math::expm1(z) / math::expm1(log_base))
    }

    /// Inverse of [`Self::tau`]: ln(1+(1−q)y)/ln(2−q), defined for
    /// y > −1/(1−q).
    pub fn tau_inv(&self, y: f64) -> Result<f64, QcalcError> {
        if y.is_nan() {
            return Err(QcalcError::NotFinite(y));
        }
        let opq = self.one_minus_q();
        let p = opq * y;
        // Near the asymptote 1+(1−q)y is reconstructed with a single fma
        // rounding; away from it ln1p of the product keeps small-argument
        // precision.
        let shifted_log = if p <= -0.5 {
            let w = math::fma(opq, y, 1.0);
            if w <= 0.0 {
                return Err(QcalcError::BelowRange {
                    y,
                    infimum: -1.0 / opq,
                });
            }
            math::ln(w)
        } else {
            math::ln_1p(p)
        };
        Ok(shifted_log / self.log_base())
    }

    /// Separation re-measured on the τ_q scale: τ_q⁻¹(δ) for δ ≥ 0.
    pub fn deformed_distance(&self, delta: f64) -> Result<f64, QcalcError> {
        if delta.is_nan() {
            return Err(QcalcError::NotFinite(delta));
        }
        if delta < 0.0 {
            return Err(QcalcError::NegativeDistance(delta));
        }
        self.tau_inv(delta)
    }

    /// [`Self::deformed_distance`] of exp(s), usable when the separation
    /// itself is beyond f64 range. Exact identity:
    /// ln(1+(1−q)e^s) = s + ln(1−q) + ln1p(e^{−s}/(1−q)).
    pub fn deformed_distance_log(&self, log_delta: f64) -> Result<f64, QcalcError> {
        if log_delta.is_nan() {
            return Err(QcalcError::NotFinite(log_delta));
        }
        let opq = self.one_minus_q();
        if log_delta <= 60.0 {
            self.deformed_distance(math::exp(log_delta))
        } else {
            let tail = math::ln_1p(math::exp(-log_delta) / opq);
            Ok((log_delta + math::ln(opq) + tail) / self.log_base())
        }
    }

    /// q-exponential [1+(1−q)x]^{1/(1−q)}, 0 below the cutoff
    /// 1+(1−q)x ≤ 0. Solves dξ/dx = λ ξ^q growth profiles with ξ(0) = 1.
    pub fn q_exp(&self, x: f64) -> f64 {
        let opq = self.one_minus_q();
        let p = opq * x;
        if p <= -1.0 {
            return 0.0;
        }
        math::exp(math::ln_1p(p) / opq)
    }

    /// q-logarithm (x^{1−q} − 1)/(1−q), inverse of [`Self::q_exp`] on
    /// x > 0.
    pub fn q_ln(&self, x: f64) -> Result<f64, QcalcError> {
        if x.is_nan() {
            return Err(QcalcError::NotFinite(x));
        }
        if x <= 0.0 {
            return Err(QcalcError::NonPositive(x));
        }
        let opq = self.one_minus_q();
        Ok(math::expm1(opq * math::ln(x)) / opq)
    }

    /// Tsallis entropy S_q(p) = (1 − Σ p_i^q)/(q − 1).
    pub fn tsallis_entropy(&self, p: &Distribution) -> f64 {
        let sum_pq: f64 = p
            .probabilities()
            .iter()
            .map(|&pi| math::powf(pi, self.q))
            .sum();
        (1.0 - sum_pq) / (self.q - 1.0)
    }

    /// Composition law for independent systems:
    /// S_q(A⊗B) = sa + sb + (1−q)·sa·sb.
    pub fn compose_entropies(&self, sa: f64, sb: f64) -> f64 {
        sa + sb + self.one_minus_q() * sa * sb
    }
}

/// Finite probability distribution, validated at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    probabilities: Vec<f64>,
}

impl Distribution {
    pub fn new(probabilities: Vec<f64>) -> Result<Self, QcalcError> {
        let mut sum = 0.0;
        for (index, &value) in probabilities.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(QcalcError::NegativeProbability { index, value });
            }
            sum += value;
        }
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(QcalcError::NotNormalized { sum });
        }
        Ok(Self { probabilities })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    /// Joint distribution of two independent systems (outer product).
    pub fn product(&self, other: &Distribution) -> Result<Distribution, QcalcError> {
        let mut joint = Vec::with_capacity(self.len() * other.len());
        for &a in &self.probabilities {
            for &b in &other.probabilities {
                joint.push(a * b);
            }
        }
        Distribution::new(joint)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::vec;

    fn d(q: f64) -> DeformParam {
        DeformParam::new(q).unwrap()
    }

    #[test]
    fn rejects_q_outside_open_interval() {
        for q in [0.0, 1.0, -0.3, 1.7, f64::NAN] {
            assert!(DeformParam::new(q).is_err());
        }
        assert!(DeformParam::new(1e-9).is_ok());
        assert!(DeformParam::new(1.0 - 1e-9).is_ok());
    }

    #[test]
    fn tau_fixed_points_exact() {
        for q in [0.1, 0.3, 0.5, 0.7, 0.9, 1.0 - 1e-9] {
            let p = d(q);
            assert_eq!(p.tau(0.0).unwrap(), 0.0);
            assert_eq!(p.tau(1.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn tau_hand_values() {
        // ((2-q)^x - 1)/(1-q) at q=0.5, x=2: (1.5^2 - 1)/0.5 = 2.5.
        assert!((d(0.5).tau(2.0).unwrap() - 2.5).abs() < 1e-12);
    }

    #[test]
    fn tau_approaches_identity_as_q_to_1() {
        let p = d(1.0 - 1e-6);
        assert!((p.tau(7.0).unwrap() - 7.0).abs() < 1e-4);
        for x in [-10.0, -3.0, 0.25, 5.0, 10.0] {
            assert!((p.tau(x).unwrap() - x).abs() < 1e-4);
        }
    }

    #[test]
    fn tau_overflow_reported() {
        let err = d(0.1).tau(2000.0).unwrap_err();
        assert!(matches!(err, QcalcError::TauOverflow { .. }));
        assert!(d(0.1).tau(f64::INFINITY).is_err());
    }

    #[test]
    fn tau_inv_hand_values() {
        let p = d(0.5);
        assert!((p.tau_inv(2.5).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(p.tau_inv(0.0).unwrap(), 0.0);
    }

    #[test]
    fn tau_inv_domain_boundary() {
        // Infimum of the range at q = 0.5 is -1/(1-q) = -2.
        let p = d(0.5);
        assert!(matches!(
            p.tau_inv(-2.0).unwrap_err(),
            QcalcError::BelowRange { .. }
        ));
        assert!(p.tau_inv(-2.0 + 1e-9).is_ok());
        assert!(p.tau_inv(-3.0).is_err());
    }

    #[test]
    fn round_trip_on_positive_axis() {
        for q in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let p = d(q);
            let mut x = 0.0;
            while x <= 50.0 {
                let back = p.tau_inv(p.tau(x).unwrap()).unwrap();
                assert!(
                    (back - x).abs() <= 1e-10,
                    "q={q} x={x} back={back}"
                );
                x += 0.5;
            }
        }
    }

    #[test]
    fn deformed_distance_basics() {
        let p = d(0.5);
        assert_eq!(p.deformed_distance(0.0).unwrap(), 0.0);
        // ln(1 + 0.5 e^10)/ln 1.5
        let expected = (1.0 + 0.5 * 10f64.exp()).ln() / 1.5f64.ln();
        assert!((p.deformed_distance(10f64.exp()).unwrap() - expected).abs() < 1e-10);
        assert!(p.deformed_distance(-1.0).is_err());
    }

    #[test]
    fn deformed_exponential_series_becomes_linear() {
        // delta(t) = e^t pointwise: asymptotic slope 1/ln(2-q).
        let p = d(0.5);
        let slope_inf = 1.0 / 1.5f64.ln();
        let at = |t: f64| p.deformed_distance_log(t).unwrap();
        let slope_tail = (at(40.0) - at(30.0)) / 10.0;
        assert!((slope_tail - slope_inf).abs() < 1e-10);
    }

    #[test]
    fn deformed_distance_log_matches_direct_and_extends() {
        let p = d(0.3);
        // Exact-formula side of the branch agrees with the direct path.
        for s in [-5.0, 0.0, 10.0, 59.9] {
            let via_log = p.deformed_distance_log(s).unwrap();
            let direct = p.deformed_distance(s.exp()).unwrap();
            assert!((via_log - direct).abs() <= 1e-12 * direct.abs().max(1.0));
        }
        // Across the asymptotic branch the two formulations still agree.
        for s in [60.1, 200.0] {
            let via_log = p.deformed_distance_log(s).unwrap();
            let direct = p.deformed_distance(s.exp()).unwrap();
            assert!((via_log - direct).abs() <= 1e-9);
        }
        // Beyond f64 range for the raw separation.
        let big = p.deformed_distance_log(1e5).unwrap();
        let expected = (1e5 + 0.7f64.ln()) / 1.7f64.ln();
        assert!((big - expected).abs() < 1e-9);
    }

    #[test]
    fn q_exp_hand_values_and_cutoff() {
        let p = d(0.5);
        assert!((p.q_exp(2.0) - 4.0).abs() < 1e-12);
        assert_eq!(p.q_exp(0.0), 1.0);
        assert_eq!(d(0.3).q_exp(0.0), 1.0);
        // Cutoff at 1+(1-q)x <= 0.
        assert_eq!(p.q_exp(-2.0), 0.0);
        assert_eq!(p.q_exp(-5.0), 0.0);
        // q -> 1 limit recovers exp.
        let near = d(1.0 - 1e-6);
        assert!((near.q_exp(3.0) - 3f64.exp()).abs() < 1e-4);
    }

    #[test]
    fn q_ln_hand_values_and_domain() {
        let p = d(0.5);
        assert!((p.q_ln(4.0).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(p.q_ln(1.0).unwrap(), 0.0);
        assert_eq!(d(0.2).q_ln(1.0).unwrap(), 0.0);
        assert!(matches!(
            p.q_ln(0.0).unwrap_err(),
            QcalcError::NonPositive(_)
        ));
        assert!(p.q_ln(-3.0).is_err());
    }

    #[test]
    fn q_round_trip_holds_on_support() {
        for q in [0.1, 0.3, 0.5, 0.7, 0.9] {
            let p = d(q);
            let cutoff = -1.0 / (1.0 - q);
            // Sweep from just above the cutoff to large x.
            for k in 0..200 {
                let x = cutoff + 1e-9 + (50.0 - cutoff) * (k as f64) / 199.0;
                let z = p.q_exp(x);
                assert!(z > 0.0);
                let back = p.q_ln(z).unwrap();
                assert!((back - x).abs() <= 1e-10, "q={q} x={x} back={back}");
            }
        }
    }

    #[test]
    fn entropy_deterministic_and_half_half() {
        let p = d(0.5);
        let deterministic = Distribution::new(vec![1.0, 0.0]).unwrap();
        assert_eq!(p.tsallis_entropy(&deterministic), 0.0);
        let fair = Distribution::new(vec![0.5, 0.5]).unwrap();
        let expected = 2.0 * (2f64.sqrt() - 1.0); // (1 - 2*0.5^0.5)/(-0.5)
        assert!((p.tsallis_entropy(&fair) - expected).abs() < 1e-12);
    }

    #[test]
    fn entropy_shannon_limit() {
        let p = d(1.0 - 1e-7);
        let fair = Distribution::new(vec![0.5, 0.5]).unwrap();
        assert!((p.tsallis_entropy(&fair) - 2f64.ln()).abs() < 1e-6);
    }

    #[test]
    fn entropy_nonnegative_on_random_distributions() {
        let mut gen = crate::rng::SplitMix64::new(11);
        for _ in 0..200 {
            let n = 2 + (gen.next_u64() % 7) as usize;
            let mut raw: Vec<f64> = (0..n).map(|_| gen.next_f64() + 1e-6).collect();
            let sum: f64 = raw.iter().sum();
            raw.iter_mut().for_each(|x| *x /= sum);
            let dist = Distribution::new(raw).unwrap();
            for q in [0.2, 0.5, 0.8] {
                assert!(d(q).tsallis_entropy(&dist) >= 0.0);
            }
        }
    }

    #[test]
    fn compose_with_zero_is_identity() {
        assert_eq!(d(0.5).compose_entropies(0.0, 0.8), 0.8);
    }

    #[test]
    fn compose_matches_product_distribution() {
        let p = d(0.5);
        let fair = Distribution::new(vec![0.5, 0.5]).unwrap();
        let joint = fair.product(&fair).unwrap();
        let s = p.tsallis_entropy(&fair);
        let direct = p.tsallis_entropy(&joint);
        let composed = p.compose_entropies(s, s);
        assert!((direct - composed).abs() < 1e-12);
    }

    #[test]
    fn compose_additivity_near_q_one() {
        // compose(1,2) = 3 + 2(1-q) exactly; at q = 1-1e-6 that is 3 + 2e-6.
        let q = 1.0 - 1e-6;
        let composed = d(q).compose_entropies(1.0, 2.0);
        assert!((composed - (3.0 + 2.0 * (1.0 - q))).abs() < 1e-15);
        assert!((composed - 3.0).abs() < 1e-5);
    }

    #[test]
    fn distribution_validation() {
        assert!(Distribution::new(vec![0.5, 0.6]).is_err());
        assert!(Distribution::new(vec![0.5, -0.5, 1.0]).is_err());
        assert!(Distribution::new(vec![0.25; 4]).is_ok());
        // Off by more than 1e-12 rejected, inside accepted.
        assert!(Distribution::new(vec![0.5, 0.5 - 1e-10]).is_err());
        assert!(Distribution::new(vec![0.5, 0.5 - 1e-14]).is_ok());
    }
}
