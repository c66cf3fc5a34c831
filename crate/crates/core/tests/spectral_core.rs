mod common;

use std::f64::consts::{E, PI};

use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use spectral_complexity::*;

/// 40-digit evaluations of `u(ln u − 1) + 7/8`, `u = E/2π`, and of its
/// inverse at 1.
const RVM_AT_FIRST_ZERO: f64 = 0.449_277_854_454_431_5;
const RVM_INVERSE_OF_ONE: f64 = 17.847_836_512_849_62;

#[test]
fn riemann_average_reference_values() {
    let m = CountingModel::RiemannVonMangoldt;
    let v = evaluate_average(&m, 14.134725).unwrap();
    assert!((v - RVM_AT_FIRST_ZERO).abs() < 1e-12);
    assert!((v - 0.4496).abs() < 1e-3);
    assert!((evaluate_average(&m, 2.0 * PI * E).unwrap() - 0.875).abs() < 1e-15);
    assert!((invert_average(&m, 0.875).unwrap() - 2.0 * PI * E).abs() < 1e-6);
}

#[test]
fn riemann_inverse_matches_independent_bisection() {
    let m = CountingModel::RiemannVonMangoldt;
    let f = |x: f64| {
        let u = x / TWO_PI;
        u * (u.ln() - 1.0) + 0.875
    };
    let (mut lo, mut hi) = (TWO_PI, 100.0);
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x = invert_average(&m, 1.0).unwrap();
    assert!((x - lo).abs() < 1e-9);
    assert!((x - RVM_INVERSE_OF_ONE).abs() < 1e-9);
    assert!((evaluate_average(&m, x).unwrap() - 1.0).abs() <= 1e-10);
}

#[test]
fn weyl_examples() {
    let m = CountingModel::weyl(PI);
    assert!((evaluate_average(&m, 5.0).unwrap() - 5.0).abs() < 1e-15);
    let m = CountingModel::weyl(2.0);
    // Bisection contract: |N̄(x) − y| ≤ 1e-10, slope 2/π.
    assert!((invert_average(&m, 4.0).unwrap() - 2.0 * PI).abs() < 1e-9);
}

#[test]
fn riemann_zeros_unfold_to_zero_mean() {
    let z = zeta_zeros(10_000);
    let u = unfold(&z, &CountingModel::RiemannVonMangoldt).unwrap();
    assert!(u.mean_delta().abs() < 0.05, "mean δ {}", u.mean_delta());
    assert!(u.deltas().iter().all(|d| d.abs() < 3.0));
    for (n, (k, d)) in u.values().iter().zip(u.deltas()).enumerate() {
        assert_eq!(*d, k - (n + 1) as f64);
    }
    // First zero: N̄ + ½.
    assert!((u.values()[0] - (RVM_AT_FIRST_ZERO + 0.5)).abs() < 1e-6);
}

#[test]
fn riemann_refold_recovers_zeros() {
    let z = zeta_zeros(2000);
    let u = unfold(&z, &CountingModel::RiemannVonMangoldt).unwrap();
    let back = u.refold().unwrap();
    for (a, b) in back.iter().zip(z.values()) {
        assert!(((a - b) / b).abs() < 1e-10);
    }
}

#[test]
fn linear_fit_of_noisy_box_spectrum() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let noise = Normal::new(0.0, 0.05).unwrap();
    let v: Vec<f64> = (1..=400)
        .map(|n| n as f64 * PI / 2.0 + noise.sample(&mut rng))
        .collect();
    let s = SpectralSequence::new(v, "noisy box").unwrap();
    match fit_linear_average(&s).unwrap() {
        CountingModel::WeylLinear { total_length, .. } => {
            assert!(
                (total_length / 2.0 - 1.0).abs() < 0.02,
                "L0 = {total_length}"
            );
        }
        other => panic!("unexpected model {other:?}"),
    }
}

#[test]
fn local_spacing_unfolding_has_unit_mean_spacing() {
    let z = zeta_zeros(10_000);
    let u = unfold(&z, &CountingModel::LocalSpacing).unwrap();
    let mean = (u.values()[u.len() - 1] - u.values()[0]) / (u.len() - 1) as f64;
    assert!((mean - 1.0).abs() < 0.01, "mean spacing {mean}");
}

#[test]
fn validation_errors() {
    assert_eq!(
        validate_sequence(&[1.0, 1.0], "x").unwrap_err(),
        SequenceError::NonMonotone(1)
    );
    assert_eq!(
        validate_sequence(&[1.0, f64::NAN], "x").unwrap_err(),
        SequenceError::NonFinite(1)
    );
    assert!(matches!(
        validate_sequence(&[1.0], "x"),
        Err(SequenceError::TooShort { .. })
    ));
    assert!(validate_sequence(&[14.13, 21.02, 25.01], "x").is_ok());
}

fn model_and_domain() -> impl Strategy<Value = (CountingModel, f64, f64)> {
    prop_oneof![
        Just((CountingModel::RiemannVonMangoldt, TWO_PI, 1e6)),
        (0.1f64..50.0, -3.0f64..3.0).prop_map(|(l, c)| (
            CountingModel::WeylLinear {
                total_length: l,
                offset: c
            },
            1e-3,
            1e4
        )),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn invert_evaluate_round_trip((m, lo, hi) in model_and_domain(), t in 0.0f64..1.0) {
        let x = lo + (hi - lo) * t;
        let y = evaluate_average(&m, x).unwrap();
        let back = invert_average(&m, y).unwrap();
        prop_assert!((back - x).abs() <= 1e-8 * x.max(1.0), "{x} → {y} → {back}");
    }

    #[test]
    fn average_is_strictly_increasing((m, lo, hi) in model_and_domain(), t1 in 0.0f64..1.0, t2 in 0.0f64..1.0) {
        let (a, b) = (t1.min(t2), t1.max(t2));
        prop_assume!(b - a > 1e-9);
        let x1 = lo + (hi - lo) * a;
        let x2 = lo + (hi - lo) * b;
        prop_assert!(evaluate_average(&m, x1).unwrap() < evaluate_average(&m, x2).unwrap());
    }

    #[test]
    fn unfold_refold_round_trip(
        start in 7.0f64..1000.0,
        gaps in prop::collection::vec(0.01f64..5.0, 2..200),
        weyl in any::<bool>(),
    ) {
        let mut v = vec![start];
        for g in &gaps {
            v.push(v.last().unwrap() + g);
        }
        let s = SpectralSequence::new(v.clone(), "random").unwrap();
        let m = if weyl { CountingModel::weyl(3.7) } else { CountingModel::RiemannVonMangoldt };
        let u = unfold(&s, &m).unwrap();
        prop_assert!(u.values().windows(2).all(|w| w[0] < w[1]));
        let back = u.refold().unwrap();
        for (a, b) in back.iter().zip(&v) {
            prop_assert!(((a - b) / b).abs() < 1e-6);
        }
    }
}
