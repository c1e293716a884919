mod common;

use std::f64::consts::PI;

use common::*;
use kpfourier::kernels::*;
use kpfourier::Error;
use proptest::prelude::*;

#[test]
fn sine_integral_reference_values() {
    assert_eq!(sine_integral(0.0), 0.0);
    assert!((sine_integral(PI) - SI_PI).abs() < 1e-13);
    assert!((sine_integral(2.0 * PI) - SI_2PI).abs() < 1e-13);
    assert!(sine_integral(PI) > sine_integral(2.0 * PI));
    // asymptote
    assert!((sine_integral(1e8) - PI / 2.0).abs() < 1e-7);
    assert_eq!(sine_integral(f64::INFINITY), PI / 2.0);
}

#[test]
fn sine_integral_maximum_on_fine_grid_is_at_pi() {
    let (mut best, mut arg) = (f64::MIN, 0.0);
    for k in 0..=20_000 {
        let x = k as f64 * 1e-3;
        let v = sine_integral(x);
        if v > best {
            best = v;
            arg = x;
        }
    }
    assert!((arg - PI).abs() < 1e-3, "argmax {arg}");
    assert!(best <= sine_integral(PI));
}

#[test]
fn sine_integral_matches_simpson_on_moderate_args() {
    // composite Simpson of sin t / t, independent of the library's series
    let simpson = |x: f64| {
        let n = 20_000;
        let h = x / n as f64;
        let g = |t: f64| if t == 0.0 { 1.0 } else { t.sin() / t };
        let mut s = g(0.0) + g(x);
        for k in 1..n {
            s += g(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    };
    for x in [0.3, 1.0, 2.5, 4.0, 7.0, 12.0, 25.0] {
        assert!((sine_integral(x) - simpson(x)).abs() < 1e-11, "x = {x}");
    }
}

#[test]
fn dirichlet_window_examples() {
    let k = KernelSpec::new(1.0, 2.0).unwrap();
    assert!((dirichlet_window(&k, 0.0) - 1.0 / PI).abs() < 1e-15);
    assert!(dirichlet_window(&k, PI).abs() < 1e-15);
    let want = (2f64.sin() - 1f64.sin()) / PI;
    assert!((dirichlet_window(&k, 1.0) - want).abs() < 1e-15);
    assert!((want - 0.0215898).abs() < 1e-7);
}

#[test]
fn dirichlet_window_branches_agree_at_switch() {
    for (a, b) in [(0.5, 4.0), (1.0, 2.0), (0.01, 300.0), (3.0, 1000.0)] {
        let k = KernelSpec::new(a, b).unwrap();
        let t0 = k.tau0();
        let direct = ((b * t0).sin() - (a * t0).sin()) / (PI * t0);
        let below = dirichlet_window(&k, t0 * (1.0 - 1e-14));
        let above = dirichlet_window(&k, t0 * (1.0 + 1e-14));
        assert!((below - direct).abs() < 1e-12 && (above - direct).abs() < 1e-12, "({a}, {b})");
    }
}

#[test]
fn kernel_spec_rejects_bad_frequencies() {
    assert!(matches!(KernelSpec::new(1.0, 1.0), Err(Error::InvalidArgument(_))));
    assert!(KernelSpec::new(0.0, 1.0).is_err());
    assert!(KernelSpec::new(2.0, 1.0).is_err());
    assert!(KernelSpec::new(1.0, f64::INFINITY).is_err());
}

#[test]
fn sin_window_primitive_examples() {
    let k = KernelSpec::new(1.0, 2.0).unwrap();
    assert_eq!(sin_window_primitive(&k, 0.0), 0.0);
    let want = (SI_2PI - SI_PI) / PI;
    assert!((sin_window_primitive(&k, PI) - want).abs() < 1e-13);
    assert!((want + 0.1380782).abs() < 1e-7);
}

#[test]
fn cos_window_examples() {
    assert_eq!(cos_window(0.3, 1.7, 0.0), 1.7 - 0.3);
    for t in [-3.0, 0.2, 5.0] {
        assert!((cos_window(0.0, 2.5, t) - (2.5 * t).sin() / t).abs() < 1e-14);
    }
    let v = cos_window(1.0, 2.0, 1.0);
    assert!((v - (2f64.sin() - 1f64.sin())).abs() < 1e-15);
    assert!((v - 0.067826).abs() < 1e-6);
}

#[test]
fn lacunary_constants() {
    assert!((LacunarySequence::pow2().a - 2.0).abs() < 1e-9);
    assert!((LacunarySequence::geometric(3.0).unwrap().a - 1.5).abs() < 1e-9);
    assert!(matches!(lacunary_certify(|j| j as f64, 10, 1e-12), Err(Error::NotLacunary(_))));
    assert!(LacunarySequence::geometric(1.0).is_err());
    assert!(lacunary_certify(|j| 5.0 - j as f64, 4, 1e-12).is_err());
}

#[test]
fn lacunary_sums_examples() {
    let s = LacunarySequence::pow2();
    assert_eq!(lm1_sum(1.0, &s, 0), 0.0);
    assert_eq!(lm2_tail(1.0, &s, 5, 0), 0.0);
    assert_eq!(lm1_bound(&s), 10.0);
    for t in [1.0, 100.0] {
        assert!(lm1_sum(t, &s, 30) <= 10.0);
    }
    assert!((lm2_bound(1.0, &s, 5) - 0.1875).abs() < 1e-12);
    assert!(lm2_tail(1.0, &s, 5, 30) <= 0.1875);
    assert!((lm2_bound(0.5, &s, 8) - 0.046875).abs() < 1e-12);
    assert!(lm2_tail(0.5, &s, 8, 30) <= 0.046875);
}

#[test]
fn interval_max_matches_scan() {
    for (t, lo, hi) in [(1.0, 0.0, 2.0), (1.0, 2.0, 4.0), (0.7, 3.0, 20.0), (5.0, 0.5, 1.0)] {
        let base = sine_integral(t * lo);
        let scan = (0..=20_000).map(|k| lo + (hi - lo) * k as f64 / 20_000.0).map(|v| (sine_integral(t * v) - base).abs()).fold(0.0, f64::max);
        let m = interval_max(t, lo, hi);
        assert!(m >= scan - 1e-12 && m - scan < 1e-6, "({t}, {lo}, {hi}): {m} vs {scan}");
    }
}

#[test]
fn lacunary_bounds_on_probe_set() {
    for seq in [LacunarySequence::pow2(), LacunarySequence::geometric(3.0).unwrap(), LacunarySequence::geometric(1.5).unwrap()] {
        for k in -2..=3 {
            for sign in [1.0, -1.0] {
                let t = sign * 10f64.powi(k);
                let mut prev = 0.0;
                for n in 0..=40 {
                    let v = lm1_sum(t, &seq, n);
                    assert!(v >= prev - 1e-15 && v <= lm1_bound(&seq), "t {t} n {n}");
                    prev = v;
                }
                for m in 1..=12 {
                    assert!(lm2_tail(t, &seq, m, 60) <= lm2_bound(t, &seq, m), "t {t} m {m}");
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn si_is_odd(x in -1e4f64..1e4) {
        prop_assert!((sine_integral(-x) + sine_integral(x)).abs() <= 1e-15 * sine_integral(x).abs().max(1.0));
    }

    #[test]
    fn si_between_zero_and_its_max(x in 0f64..500.0) {
        let v = sine_integral(x);
        prop_assert!(v >= 0.0 && v <= sine_integral(PI) + 1e-15);
    }

    #[test]
    fn primitive_bounded_by_si_pi(a in 0.01f64..10.0, d in 0.01f64..50.0, z in -100f64..100.0) {
        let k = KernelSpec::new(a, a + d).unwrap();
        prop_assert!(sin_window_primitive(&k, z).abs() <= SI_PI / PI + 1e-12);
    }

    #[test]
    fn geometric_constant(r in 1.2f64..8.0) {
        let s = LacunarySequence::geometric(r).unwrap();
        prop_assert!((s.a - r / (r - 1.0)).abs() < 1e-9);
    }
}
