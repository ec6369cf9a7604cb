use std::f64::consts::PI;

use fluctlab::window::{smoothstep, WindowKind, WindowProfile, DEFAULT_RESOLUTION};
use proptest::prelude::*;

fn mollified(n: usize) -> std::sync::Arc<WindowProfile> {
    WindowProfile::shared(WindowKind::MollifiedStep, n, DEFAULT_RESOLUTION).unwrap()
}

// Reference values from 30-digit quadrature of the defining integrals.
const N1: [(f64, f64); 4] = [
    (0.37, 1.1332524804358807),
    (1.234, 0.60286360198133783),
    (2.345, -0.11184624173801578),
    (5.5, 0.068986170912340001),
];
const N2: [(f64, f64); 3] = [(0.0, 1.1447642045329748), (0.37, 1.0975563991003195), (1.234, 0.69227575543303663)];
const N3: [(f64, f64); 4] = [
    (0.0, 0.94492879186345527),
    (0.37, 0.91275244817930875),
    (1.234, 0.6308328234723661),
    (2.345, 0.15636293510068434),
];

#[test]
fn transform_matches_reference_values() {
    for (n, table) in [(1, &N1[..]), (2, &N2[..]), (3, &N3[..])] {
        let w = mollified(n);
        for &(k, want) in table {
            let got = w.fourier(k);
            assert!((got - want).abs() < 1e-9, "n={n} k={k}: {got} vs {want}");
        }
    }
}

#[test]
fn origin_value_is_the_volume() {
    let w = mollified(1);
    assert!((w.fourier(0.0) - 3.0 / (2.0 * PI).sqrt()).abs() < 1e-12);
    for n in 1..=3 {
        let w = mollified(n);
        let want = w.volume() * (2.0 * PI).powf(-(n as f64) / 2.0);
        assert!((w.fourier(0.0) - want).abs() < 1e-10, "n={n}");
    }
}

#[test]
fn plancherel_holds() {
    let w = mollified(1);
    assert!((w.l2_squared() - 2.7712640200964636).abs() < 1e-10);
    for n in 1..=3 {
        let w = mollified(n);
        let rel = (w.hat_l2_squared() / w.l2_squared() - 1.0).abs();
        assert!(rel < 1e-6, "n={n} rel={rel}");
    }
}

#[test]
fn midgrid_values_match_direct_quadrature() {
    // independent route: Gauss–Legendre on the profile itself
    let w = mollified(1);
    for i in [3usize, 77, 400, 2001] {
        let k = (i as f64 + 0.5) / 32.0;
        let direct = 2.0 / (2.0 * PI).sqrt()
            * (k.sin() / k + fluctlab::quadrature::integrate(1.0, 2.0, 64, 24, |s| w.value(s) * (k * s).cos()));
        assert!((w.fourier(k) - direct).abs() < 1e-8, "k={k} {} {direct}", w.fourier(k));
    }
}

#[test]
fn derivatives_match_finite_differences() {
    let w = mollified(3);
    let h = 1e-3;
    for &k in &[0.3, 1.7, 4.2] {
        for j in 0..4 {
            let fd = (w.radial_derivative(j, k + h) - w.radial_derivative(j, k - h)) / (2.0 * h);
            let d = w.radial_derivative(j + 1, k);
            assert!((fd - d).abs() < 1e-6 * (1.0 + d.abs()), "j={j} k={k}: {fd} vs {d}");
        }
    }
}

#[test]
fn profile_shape() {
    let w = mollified(2);
    assert_eq!(w.value(0.5), 1.0);
    assert_eq!(w.value(1.0), 1.0);
    assert_eq!(w.value(2.0), 0.0);
    assert!((w.value(1.5) - 0.5).abs() < 1e-14);
}

#[test]
fn smoothstep_is_c3_at_the_joins() {
    let k = 3;
    let h = 1e-3;
    // third finite difference at the ends stays bounded by O(h)
    for x0 in [0.0f64, 1.0] {
        let d3 = |x: f64| {
            (smoothstep(k, x + 2.0 * h) - 2.0 * smoothstep(k, x + h) + 2.0 * smoothstep(k, x - h)
                - smoothstep(k, x - 2.0 * h))
                / (2.0 * h * h * h)
        };
        assert!(d3(x0).abs() < 1.0, "x0={x0} d3={}", d3(x0));
    }
    let s = WindowProfile::shared(WindowKind::Smoothstep { order: 3 }, 1, DEFAULT_RESOLUTION).unwrap();
    assert!(s.fourier(300.0).abs() < 1e-6 * s.fourier(0.0));
}

#[test]
fn beyond_table_is_flagged() {
    let w = mollified(1);
    let v = w.fourier_checked(w.kappa_max() + 1.0);
    assert!(v.extrapolated && v.value == 0.0);
    assert!(w.fourier_strict(w.kappa_max() + 1.0).is_err());
}

#[test]
fn disk_cache_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let built = WindowProfile::load_or_build(WindowKind::MollifiedStep, 1, 1024, dir.path()).unwrap();
    let loaded = WindowProfile::load_or_build(WindowKind::MollifiedStep, 1, 1024, dir.path()).unwrap();
    for &k in &[0.0, 0.77, 13.1] {
        assert_eq!(built.fourier(k).to_bits(), loaded.fourier(k).to_bits());
    }
}

#[test]
fn rejects_bad_parameters() {
    assert!(WindowProfile::new(WindowKind::MollifiedStep, 1, 512).is_err());
    assert!(WindowProfile::new(WindowKind::MollifiedStep, 4, 2048).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scaled_transform_is_rescaling(r in 1.0f64..64.0, k in 0.0f64..2.0) {
        let w = mollified(1);
        prop_assert_eq!(w.scaled_fourier(r, k), r * w.fourier(r * k));
    }

    #[test]
    fn transform_is_bounded_by_origin(k in 0.0f64..300.0) {
        let w = mollified(3);
        prop_assert!(w.fourier(k).abs() <= w.fourier(0.0) + 1e-12);
    }

    #[test]
    fn tail_is_rapidly_decreasing(p in 40.0f64..300.0) {
        let w = mollified(1);
        prop_assert!(w.tail_sup(p) * p.powi(3) < 10.0);
    }
}
