use proptest::prelude::*;

use super::*;
use crate::decode::dem_from_parts;

fn toy() -> DetectorErrorModel {
    // Repetition code of length 3 with boundary: any two flips defeat it.
    dem_from_parts(
        2,
        1,
        &[(0.1, vec![0], vec![0]), (0.15, vec![0, 1], vec![]), (0.05, vec![1], vec![])],
    )
}

#[test]
fn wilson_brackets_estimate() {
    for (k, n) in [(0, 10), (3, 10), (10, 10), (17, 100_000)] {
        let (lo, hi) = wilson_interval(k, n, 0.99);
        let p = k as f64 / n as f64;
        assert!(lo <= p && p <= hi && lo >= 0.0 && hi <= 1.0);
    }
    let (lo, hi) = wilson_interval(50, 100, 0.99);
    assert!((lo - 0.3753).abs() < 1e-3 && (hi - 0.6247).abs() < 1e-3);
}

#[test]
fn noiseless_model_never_fails() {
    let dem = dem_from_parts(1, 1, &[(0.0, vec![0], vec![0])]);
    let r = run_monte_carlo(&dem, &DecoderConfig::default(), 1000, 3, ErrorType::BitFlip).unwrap();
    assert_eq!(r.failures, 0);
    assert_eq!(r.ci99.0, 0.0);
}

#[test]
fn toy_failure_rate_matches_enumeration() {
    let dem = toy();
    let d = Decoder::new(&dem, DecoderConfig::default()).unwrap();
    let mut expected = 0.0;
    for mask in 0u32..8 {
        let fired: Vec<usize> = (0..3).filter(|j| mask >> j & 1 == 1).collect();
        let w: f64 = (0..3).map(|j| if mask >> j & 1 == 1 { dem.mechanisms[j].prob } else { 1.0 - dem.mechanisms[j].prob }).product();
        if injection_fails(&d, &fired).unwrap() {
            expected += w;
        }
    }
    let shots = 100_000;
    let r = run_monte_carlo(&dem, &DecoderConfig::default(), shots, 7, ErrorType::BitFlip).unwrap();
    let sigma = (expected * (1.0 - expected) / shots as f64).sqrt();
    assert!((r.p_l_estimate - expected).abs() < 3.0 * sigma, "{} vs {expected}", r.p_l_estimate);
    assert_eq!(r.failures_per_observable[0], r.failures);
}

#[test]
fn monte_carlo_is_independent_of_worker_count() {
    let dem = toy();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_monte_carlo(&dem, &DecoderConfig::default(), 5000, 99, ErrorType::PhaseFlip).unwrap())
    };
    assert_eq!(run(1), run(3));
    let other = run_monte_carlo(&dem, &DecoderConfig::default(), 5000, 100, ErrorType::PhaseFlip).unwrap();
    assert_ne!(run(1).failures, 0);
    assert!(other.seed != run(1).seed);
}

#[test]
fn fault_units_map_units_to_mechanisms() {
    let mut dem = dem_from_parts(2, 1, &[(2e-3 / 30.0 * 2.0, vec![0], vec![0]), (5.0 * 2e-3, vec![1], vec![])]);
    dem.reference_p = 2e-3;
    dem.fault_units = 200.0;
    let fu = FaultUnits::of(&dem);
    assert_eq!(fu.units, vec![2, 150]);
    assert_eq!(fu.total, 200);
    assert_eq!(fu.silent(), 48);
    assert_eq!(fu.mechanism(0), Some(0));
    assert_eq!(fu.mechanism(1), Some(0));
    assert_eq!(fu.mechanism(2), Some(1));
    assert_eq!(fu.mechanism(151), Some(1));
    assert_eq!(fu.mechanism(152), None);
}

#[test]
fn spectrum_low_weights() {
    let dem = toy();
    let pts = sample_failure_spectrum(&dem, &DecoderConfig::default(), &[0, 1, 2, 3], 100, 1).unwrap();
    assert_eq!(pts[0].f_hat, 0.0);
    assert_eq!(pts[1].f_hat, 0.0);
    assert!(pts[1].exhaustive && pts[2].exhaustive);
    // Every pair leaves a syndrome with a cheaper single-mechanism explanation
    // of opposite logical parity.
    assert!((pts[2].f_hat - 1.0).abs() < 1e-12);
    assert!(sample_failure_spectrum(&dem, &DecoderConfig::default(), &[4], 10, 1).is_err());
}

fn synthetic(ln_f0: f64, gamma: f64, w0: usize) -> Vec<SpectrumPoint> {
    let fit = FailureSpectrumFit::new(ln_f0, gamma, w0, 100_000, 12);
    (w0..=w0 + 10)
        .map(|w| {
            let f = fit.f(w);
            SpectrumPoint { weight: w, samples: 100_000, failures: f * 1e5, f_hat: f, ci99: (f, f), exhaustive: false }
        })
        .collect()
}

#[test]
fn fit_recovers_synthetic_parameters() {
    let fit = fit_failure_spectrum(&synthetic(-8.92, 4.19, 3), 3, 12, 142_560).unwrap();
    assert!((fit.ln_f0() / -8.92 - 1.0).abs() < 0.02, "{}", fit.ln_f0());
    assert!((fit.gamma / 4.19 - 1.0).abs() < 0.02, "{}", fit.gamma);
    assert!((fit.a - 0.999_755_859_375).abs() < 1e-12);
}

#[test]
fn fit_rejects_empty_spectrum() {
    let zeros: Vec<SpectrumPoint> = (3..8)
        .map(|w| SpectrumPoint { weight: w, samples: 100, failures: 0.0, f_hat: 0.0, ci99: (0.0, 0.03), exhaustive: false })
        .collect();
    assert!(matches!(fit_failure_spectrum(&zeros, 3, 12, 1000), Err(HarnessError::InsufficientData(_))));
}

#[test]
fn prediction_at_zero_rate_is_zero() {
    assert_eq!(predict_logical_error(&FailureSpectrumFit::new(-8.92, 4.19, 3, 142_560, 12), 0.0), 0.0);
}

#[test]
fn low_rate_asymptote() {
    let fit = FailureSpectrumFit::new(-8.92, 4.19, 3, 142_560, 12);
    let p: f64 = 1e-6;
    let q = p / 30.0;
    let lead = fit.f(3) * (ln_choose(142_560, 3) + 3.0 * q.ln() + (142_560.0 - 3.0) * (-q).ln_1p()).exp();
    let full = predict_logical_error(&fit, p);
    assert!((full / lead - 1.0).abs() < 0.05, "{full} {lead}");
    // f(w0) = a(1 − e^{−f0/a}) ≈ f0
    assert!((fit.f(3) / fit.f0 - 1.0).abs() < 1e-3);
}

/// Untruncated sum over every weight, independent of the library's loop.
fn direct_sum(ln_f0: f64, gamma: f64, w0: u64, n: u64, k: usize, p: f64) -> f64 {
    let a = 1.0 - 0.5f64.powi(k as i32);
    let q = p / 30.0;
    let mut lnc = 0.0; // ln C(n, w), built incrementally
    let mut total = 0.0;
    for w in 0..=n {
        if w > 0 {
            lnc += ((n - w + 1) as f64).ln() - (w as f64).ln();
        }
        if w < w0 {
            continue;
        }
        let f = a * (1.0 - (-(ln_f0.exp() / a) * (w as f64 / w0 as f64).powf(gamma)).exp());
        total += (f.ln() + lnc + w as f64 * q.ln() + (n - w) as f64 * (1.0 - q).ln()).exp();
    }
    total
}

#[test]
fn prediction_matches_direct_summation() {
    let oracle = direct_sum(-8.92, 4.19, 3, 142_560, 12, 1e-3);
    let fit = FailureSpectrumFit::new(-8.92, 4.19, 3, 142_560, 12);
    let got = predict_logical_error(&fit, 1e-3);
    assert!((got / oracle - 1.0).abs() < 2e-3, "{got} {oracle}");
    // Frozen from the direct sum.
    assert!((oracle / REFERENCE_72_MEMORY_Z - 1.0).abs() < 1e-9, "{oracle:.15e}");
}

const REFERENCE_72_MEMORY_Z: f64 = 2.581404199662073e-3;

#[test]
fn band_brackets_centre_and_csv_has_header() {
    let mut fit = fit_failure_spectrum(&synthetic(-8.0, 4.0, 3), 3, 12, 100_000).unwrap();
    fit.covariance = [[0.04, 0.0], [0.0, 0.01]];
    let curve = prediction_curve(&fit, 1e-3, 5e-3, 5);
    assert_eq!(curve.len(), 5);
    for c in &curve {
        assert!(c.ci_lo <= c.p_l && c.p_l <= c.ci_hi && c.ci_lo < c.ci_hi);
    }
    let csv = curve_to_csv(&curve);
    assert!(csv.starts_with("p,p_l,ci_lo,ci_hi\n"));
    assert_eq!(csv.lines().count(), 6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn prediction_is_monotone_in_rate(ln_f0 in -16.0f64..-4.0, gamma in 1.0f64..7.0, w0 in 1usize..7, a in 0.0f64..1e-2, b in 0.0f64..1e-2) {
        let fit = FailureSpectrumFit::new(ln_f0, gamma, w0, 50_000, 12);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(predict_logical_error(&fit, lo) <= predict_logical_error(&fit, hi) * (1.0 + 1e-6));
    }

    #[test]
    fn spectrum_is_monotone_and_saturates(ln_f0 in -16.0f64..0.0, gamma in 0.5f64..7.0, w0 in 1usize..7, k in 1usize..17) {
        let fit = FailureSpectrumFit::new(ln_f0, gamma, w0, 1000, k);
        prop_assert_eq!(fit.f(w0 - 1), 0.0);
        let mut prev = 0.0;
        for w in w0..w0 + 40 {
            let f = fit.f(w);
            prop_assert!(f >= prev && f <= fit.a);
            prev = f;
        }
        prop_assert!((fit.f(1_000_000) - fit.a).abs() < 1e-9 || ln_f0 + gamma * (1e6f64 / w0 as f64).ln() < 3.0);
    }

    #[test]
    fn wilson_interval_contains_estimate(k in 0u64..1000, extra in 0u64..1000) {
        let n = k + extra.max(1);
        let (lo, hi) = wilson_interval(k, n, 0.99);
        let p = k as f64 / n as f64;
        prop_assert!(lo <= p && p <= hi);
    }
}
