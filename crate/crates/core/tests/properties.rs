//! Property tests for the q-calculus algebra and the estimator contracts.

use proptest::prelude::*;
use qchaos_core::lyapunov::{modified_lyapunov, standard_lyapunov, SeparationSeries};
use qchaos_core::qcalc::{DeformParam, Distribution};

fn grid_q() -> impl Strategy<Value = f64> {
    prop_oneof![
        Just(0.1),
        Just(0.3),
        Just(0.5),
        Just(0.7),
        Just(0.9),
    ]
}

proptest! {
    // Round trip on the growth side of the deformation, where the estimators
    // actually operate (separations are nonnegative). The negative tail is
    // exercised by the acceptance suite's full [-50, 50] sweep.
    #[test]
    fn tau_round_trip_growth_side(q in grid_q(), x in 0.0f64..50.0) {
        let d = DeformParam::new(q).unwrap();
        let y = d.tau(x).unwrap();
        let back = d.tau_inv(y).unwrap();
        prop_assert!((back - x).abs() <= 1e-10, "q={q} x={x} back={back}");
    }

    #[test]
    fn tau_strictly_increasing(q in grid_q(), x in -50.0f64..49.0, gap in 0.5f64..1.0) {
        let d = DeformParam::new(q).unwrap();
        let lo = d.tau(x).unwrap();
        let hi = d.tau(x + gap).unwrap();
        prop_assert!(hi > lo);
    }

    #[test]
    fn tau_inv_strictly_increasing(q in grid_q(), y in 0.0f64..1e6, gap in 0.5f64..2.0) {
        let d = DeformParam::new(q).unwrap();
        let lo = d.tau_inv(y).unwrap();
        let hi = d.tau_inv(y + gap).unwrap();
        prop_assert!(hi > lo);
    }

    #[test]
    fn q_exp_monotone_on_support(q in grid_q(), x in -1.0f64..50.0, gap in 0.5f64..1.0) {
        let d = DeformParam::new(q).unwrap();
        // Stay above the cutoff 1+(1-q)x > 0.
        let cutoff = -1.0 / (1.0 - q);
        let x = x.max(cutoff + 0.1);
        prop_assert!(d.q_exp(x + gap) > d.q_exp(x));
    }

    #[test]
    fn q_ln_inverts_q_exp(q in grid_q(), x in -1.5f64..50.0) {
        let d = DeformParam::new(q).unwrap();
        let cutoff = -1.0 / (1.0 - q);
        prop_assume!(x > cutoff + 1e-6);
        let z = d.q_exp(x);
        prop_assert!(z > 0.0);
        let back = d.q_ln(z).unwrap();
        prop_assert!((back - x).abs() <= 1e-10, "q={q} x={x} back={back}");
    }

    #[test]
    fn deformed_distance_monotone_and_zero(q in grid_q(), a in 0.0f64..1e8, gap in 1.0f64..10.0) {
        let d = DeformParam::new(q).unwrap();
        prop_assert_eq!(d.deformed_distance(0.0).unwrap(), 0.0);
        let lo = d.deformed_distance(a).unwrap();
        let hi = d.deformed_distance(a + gap).unwrap();
        prop_assert!(hi > lo);
    }

    // Composition law against the brute-force product distribution, up to
    // 8x8 outcomes.
    #[test]
    fn tsallis_composition_matches_product(
        q in grid_q(),
        raw_a in proptest::collection::vec(1e-3f64..1.0, 2..=8),
        raw_b in proptest::collection::vec(1e-3f64..1.0, 2..=8),
    ) {
        let d = DeformParam::new(q).unwrap();
        let normalize = |raw: Vec<f64>| {
            let sum: f64 = raw.iter().sum();
            Distribution::new(raw.into_iter().map(|x| x / sum).collect()).unwrap()
        };
        let pa = normalize(raw_a);
        let pb = normalize(raw_b);
        let joint = pa.product(&pb).unwrap();
        let direct = d.tsallis_entropy(&joint);
        let composed = d.compose_entropies(d.tsallis_entropy(&pa), d.tsallis_entropy(&pb));
        prop_assert!((direct - composed).abs() <= 1e-12, "direct={direct} composed={composed}");
    }

    #[test]
    fn entropy_nonnegative_and_zero_on_deterministic(q in grid_q(), n in 2usize..8) {
        let d = DeformParam::new(q).unwrap();
        let mut p = vec![0.0; n];
        p[0] = 1.0;
        let deterministic = Distribution::new(p).unwrap();
        prop_assert_eq!(d.tsallis_entropy(&deterministic), 0.0);
    }

    // Estimators ignore the separation scale: multiplying deltas by a
    // constant shifts logs, slopes are unchanged.
    #[test]
    fn slope_estimators_scale_invariant(rate in 0.1f64..3.0, scale_log in -5.0f64..5.0) {
        let times: Vec<f64> = (1..=100).map(|i| 0.3 * i as f64).collect();
        let logs: Vec<f64> = times.iter().map(|&t| rate * t).collect();
        let shifted: Vec<f64> = logs.iter().map(|s| s + scale_log).collect();
        let base = SeparationSeries::from_log_deltas(times.clone(), logs).unwrap();
        let scaled = SeparationSeries::from_log_deltas(times, shifted).unwrap();
        let a = standard_lyapunov(&base, 0.5).unwrap().value;
        let b = standard_lyapunov(&scaled, 0.5).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-9);
        let c = modified_lyapunov(&base, 0.5).unwrap().value;
        let e = modified_lyapunov(&scaled, 0.5).unwrap().value;
        prop_assert!((c - e).abs() <= 1e-9);
    }
}
