use fluctlab::limit::{build_limit_state, LimitState, ObservablePair, ObservableSet};
use fluctlab::model::{Shape, Spectrum};
use fluctlab::partition::enumerate_pairings;
use fluctlab::scaling::ScalingConfig;
use fluctlab::window::{WindowKind, WindowProfile, DEFAULT_RESOLUTION};
use fluctlab::Error;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `∫ f²` for the mollified step on the line.
const F_L2_N1: f64 = 2.7712640200964636;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn labels(m: usize) -> Vec<String> {
    (1..=m).map(|i| format!("A{i}")).collect()
}

/// `M M^†` for a random complex `M`: hermitian and positive.
fn random_covariance(m: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a: Vec<Vec<Complex64>> =
        (0..m).map(|_| (0..m).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()).collect();
    (0..m).map(|i| (0..m).map(|j| (0..m).map(|k| a[i][k] * a[j][k].conj()).sum()).collect()).collect()
}

fn single(s: f64) -> LimitState {
    LimitState::new(labels(1), vec![vec![c(s, 0.0)]]).unwrap()
}

#[test]
fn low_order_moments() {
    let st = LimitState::new(labels(3), random_covariance(3, 1)).unwrap();
    assert_eq!(st.wick_moment(&[0, 2]).unwrap(), st.covariance[0][2]);
    assert_eq!(st.wick_moment(&[]).unwrap(), c(1.0, 0.0));
    let s = single(0.7);
    assert!((s.wick_moment(&[0, 0, 0, 0]).unwrap().re - 3.0 * 0.49).abs() < 1e-15);
}

#[test]
fn six_point_moment_matches_brute_force_pairings() {
    let st = LimitState::new(labels(4), random_covariance(4, 7)).unwrap();
    let seq = [0, 3, 1, 1, 2, 0];
    let mut want = c(0.0, 0.0);
    for p in enumerate_pairings(6).unwrap() {
        let mut prod = c(1.0, 0.0);
        for b in p.blocks() {
            prod *= st.covariance[seq[b[0]]][seq[b[1]]];
        }
        want += prod;
    }
    assert!((st.wick_moment(&seq).unwrap() - want).norm() < 1e-13);
}

#[test]
fn moment_rejects_bad_input() {
    let st = single(1.0);
    assert!(matches!(st.wick_moment(&[0, 1]), Err(Error::Config(_))));
    assert!(matches!(st.wick_moment(&[0; 18]), Err(Error::OrderTooLarge(18))));
}

#[test]
fn weyl_series_matches_gaussian_closed_form() {
    let w = single(0.0).weyl_expectation(0, 3).unwrap();
    assert_eq!((w.partial_sum, w.closed_form), (1.0, 1.0));
    // the first omitted term is 0.5^7/7! = 1.55e-6
    let w = single(1.0).weyl_expectation(0, 6).unwrap();
    let err = (w.partial_sum - (-0.5f64).exp()).abs();
    assert!(err < 1.6e-6 && err <= w.tail_bound);
    let w = single(1.0).weyl_expectation(0, 7).unwrap();
    assert!((w.partial_sum - (-0.5f64).exp()).abs() < 1e-7);
    for s in [0.1, 1.0, 4.0] {
        let w = single(s).weyl_expectation(0, 8).unwrap();
        assert!(w.within_bound(), "s={s}: {w:?}");
    }
}

#[test]
fn weyl_terms_are_exponential_coefficients() {
    let s = 1.7;
    let st = single(s);
    let mut prev = 0.0;
    let mut fact = 1.0;
    for n in 0..=8 {
        if n > 0 {
            fact *= n as f64;
        }
        let p = st.weyl_expectation(0, n).unwrap().partial_sum;
        let want = (-0.5 * s).powi(n as i32) / fact;
        assert!((p - prev - want).abs() < 1e-13, "n={n}");
        prev = p;
    }
}

#[test]
fn weyl_series_converges_geometrically_beyond_s() {
    let s = 3.0;
    let st = single(s);
    let err = |n| {
        let w = st.weyl_expectation(0, n).unwrap();
        (w.partial_sum - w.closed_form).abs()
    };
    for n in 3..8 {
        assert!(err(n + 1) <= 0.5 * err(n), "n={n}");
    }
}

#[test]
fn product_of_weyl_operators() {
    let st = LimitState::new(labels(2), random_covariance(2, 3)).unwrap();
    assert!(st.symplectic[0][1] != 0.0);
    let r = st.ccr_product_check(0, 1, 5).unwrap();
    assert!(r.discrepancy < r.tail_bound);
    // i = j is the Weyl operator of 2A
    let r = st.ccr_product_check(1, 1, 6).unwrap();
    assert!((r.closed_form - c((-2.0 * st.symmetric[1][1]).exp(), 0.0)).norm() < 1e-15);
    // real covariance: no phase
    let real = LimitState::new(labels(2), vec![vec![c(1.0, 0.0), c(0.3, 0.0)], vec![c(0.3, 0.0), c(0.5, 0.0)]]).unwrap();
    let r = real.ccr_product_check(0, 1, 6).unwrap();
    assert_eq!(r.closed_form.im, 0.0);
    assert!((r.closed_form.re - (-0.5f64 * 2.1).exp()).abs() < 1e-15);
}

#[test]
fn inconsistent_covariance_fails_product_check() {
    // small entries keep the tail bound tight
    let cov = random_covariance(2, 5).into_iter().map(|r| r.into_iter().map(|z| z * 0.1).collect()).collect();
    let mut st = LimitState::new(labels(2), cov).unwrap();
    st.symplectic[0][1] += 0.5;
    st.symplectic[1][0] -= 0.5;
    assert!(matches!(st.ccr_product_check(0, 1, 6), Err(Error::Consistency(_))));
}

#[test]
fn limit_state_rejects_invalid_covariances() {
    let not_psd = vec![vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(2.0, 0.0), c(1.0, 0.0)]];
    assert!(matches!(LimitState::new(labels(2), not_psd), Err(Error::InvalidLimitState(_))));
    let not_hermitian = vec![vec![c(1.0, 0.0), c(0.1, 0.2)], vec![c(0.1, 0.2), c(1.0, 0.0)]];
    assert!(matches!(LimitState::new(labels(2), not_hermitian), Err(Error::InvalidLimitState(_))));
    // positive symmetric part but too large a commutator
    let uncertain = vec![vec![c(1.0, 0.0), c(0.0, 1.5)], vec![c(0.0, -1.5), c(1.0, 0.0)]];
    assert!(matches!(LimitState::new(labels(2), uncertain), Err(Error::InvalidLimitState(_))));
}

#[test]
fn commutator_criterion_values() {
    let w = WindowProfile::shared(WindowKind::MollifiedStep, 1, DEFAULT_RESOLUTION).unwrap();
    let f = Spectrum::single(1, 2.0, Shape::Gaussian { width: 1.0 });
    let g = Spectrum::single(1, 2.0, Shape::Lorentzian { kappa: 3.0 });
    let pair = ObservablePair { f: f.clone(), g };
    let r = pair.commutator_criterion(&w, 1e-8).unwrap();
    assert!(r.trivial && r.value.norm() < 1e-8);
    let pair = ObservablePair { f, g: Spectrum::single(1, 1.0, Shape::Lorentzian { kappa: 3.0 }) };
    let r = pair.commutator_criterion(&w, 1e-8).unwrap();
    assert!(!r.trivial);
    assert!((r.value.re - F_L2_N1).abs() < 1e-8);
    let sweep = pair.commutator_sweep(&w, &ScalingConfig::default()).unwrap();
    assert!((sweep.limit_estimate.re - r.value.re).abs() < 1e-2 * r.value.re);
}

#[test]
fn commutator_needs_integrable_pairs() {
    let w = WindowProfile::shared(WindowKind::MollifiedStep, 1, DEFAULT_RESOLUTION).unwrap();
    let f = Spectrum::single(1, 1.0, Shape::Matern { beta: 0.75 });
    let pair = ObservablePair { f: f.clone(), g: f };
    assert!(matches!(pair.commutator_criterion(&w, 1e-8), Err(Error::Unsupported(_))));
}

#[test]
fn assembled_limit_states() {
    let w = WindowProfile::shared(WindowKind::MollifiedStep, 1, DEFAULT_RESOLUTION).unwrap();
    let cfg = ScalingConfig::default();
    let gauss = |amp: f64| Spectrum::single(1, amp, Shape::Gaussian { width: 1.0 });
    let set = ObservableSet { labels: labels(1), cross: vec![vec![gauss(1.5)]], alpha: None };
    let st = build_limit_state(&set, &w, &cfg).unwrap();
    assert!((st.covariance[0][0].re - 1.5 * F_L2_N1).abs() < 1e-5 * F_L2_N1);
    assert_eq!(st.symplectic[0][0], 0.0);

    let off = gauss(1.0).scaled(c(0.3, 0.4));
    let off_t = gauss(1.0).scaled(c(0.3, -0.4));
    let set = ObservableSet { labels: labels(2), cross: vec![vec![gauss(1.0), off], vec![off_t, gauss(2.0)]], alpha: None };
    let st = build_limit_state(&set, &w, &cfg).unwrap();
    assert!((st.symplectic[0][1] - 0.8 * F_L2_N1).abs() < 1e-4);
    assert!(st.checks.uncertainty && st.checks.antisymmetric && st.checks.symmetric_psd);

    let empty = ObservableSet { labels: vec![], cross: vec![], alpha: None };
    assert!(build_limit_state(&empty, &w, &cfg).unwrap().is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn odd_moments_vanish(seed in 0u64..1000, len in 0usize..7) {
        let st = LimitState::new(labels(3), random_covariance(3, seed)).unwrap();
        let seq: Vec<usize> = (0..2 * len + 1).map(|k| (k * 7 + seed as usize) % 3).collect();
        prop_assert_eq!(st.wick_moment(&seq).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn positive_covariances_pass_all_checks(seed in 0u64..1000, m in 1usize..5) {
        let st = LimitState::new(labels(m), random_covariance(m, seed)).unwrap();
        prop_assert!(st.checks.symmetric_psd && st.checks.antisymmetric && st.checks.uncertainty);
        for i in 0..m {
            prop_assert_eq!(st.symplectic[i][i], 0.0);
        }
    }

    #[test]
    fn product_series_within_bound(seed in 0u64..1000) {
        let st = LimitState::new(labels(2), random_covariance(2, seed)).unwrap();
        let r = st.ccr_product_check(0, 1, 6).unwrap();
        prop_assert!(r.discrepancy <= r.tail_bound);
    }
}
