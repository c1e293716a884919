mod common;

use common::*;
use kpfourier::catalog::{self, catalog, ClassTag};
use kpfourier::transform::*;
use kpfourier::{BvFunction2, Error};
use num_complex::Complex64;

fn recip() -> BvFunction2 {
    catalog::reciprocal().function
}

const PROBE: [(f64, f64); 5] = [(1.0, 1.0), (2.0, 0.5), (-1.0, 3.0), (0.5, -2.0), (-3.0, -1.0)];

fn gamma_pair(xi: f64, eta: f64) -> Complex64 {
    gamma0_ref(xi) * gamma0_ref(eta)
}

#[test]
fn zero_function() {
    for route in [Route::Direct, Route::Stieltjes] {
        let r = kpft_point(&BvFunction2::zero(), 1.0, 2.0, route, &TransformOptions::with_tol(1e-6)).unwrap();
        assert!(r.converged && r.value.norm() == 0.0);
    }
}

#[test]
fn reciprocal_matches_incomplete_gamma_product() {
    let r = kpft_direct(&recip(), 1.0, 1.0, 1e-7).unwrap();
    let want = gamma0_1() * gamma0_1();
    assert!(r.converged);
    assert!((r.value - want).norm() < 1e-6, "{} vs {want}", r.value);
    for (xi, eta) in PROBE {
        let v = kpft_direct(&recip(), xi, eta, 1e-6).unwrap().value;
        assert!((v - gamma_pair(xi, eta)).norm() < 1e-5, "({xi}, {eta})");
    }
}

#[test]
fn exp2_closed_form() {
    let v = kpft_direct(&catalog::exp2().function, 1.0, 2.0, 1e-8).unwrap().value;
    assert!((v.re - 0.4).abs() < 1e-7 && v.im.abs() < 1e-7);
}

#[test]
fn stieltjes_route_examples() {
    let d = kpft_direct(&recip(), 1.0, 1.0, 1e-6).unwrap().value;
    let s = kpft_stieltjes(&recip(), 1.0, 1.0, 1e-4).unwrap().value;
    assert!((d - s).norm() < 1e-3);
    let s = kpft_stieltjes(&recip(), 2.0, 0.5, 1e-4).unwrap().value;
    assert!((s - gamma_pair(2.0, 0.5)).norm() < 1e-3, "{s}");
}

#[test]
fn grid_examples() {
    let o = TransformOptions::with_tol(1e-6);
    assert!(kpft_grid(&recip(), &[], Route::Direct, &o).unwrap().is_empty());
    let freqs = [(1.0, 1.0), (1.0, 2.0), (2.0, 1.0)];
    let g = kpft_grid(&recip(), &freqs, Route::Direct, &o).unwrap();
    assert_eq!(g.len(), 3);
    for k in 0..3 {
        assert!(g.converged[k] && g.rungs[k] > 0);
        assert!((g.values[k].unwrap() - gamma_pair(freqs[k].0, freqs[k].1)).norm() < 1e-5);
    }
    let bad = kpft_grid(&recip(), &[(1.0, 1.0), (0.0, 1.0)], Route::Direct, &o);
    assert!(matches!(bad, Err(Error::AxisFrequency { .. })));
}

#[test]
fn continuity_examples() {
    let z = continuity_probe(&BvFunction2::zero(), 1.0, 1.0, &[0.2, 0.1], 1e-3, Route::Direct).unwrap();
    assert!(z.oscillations.iter().all(|&o| o == 0.0));
    let r = continuity_probe(&recip(), 1.0, 1.0, &[0.2, 0.1, 0.05], 1e-1, Route::Oracle).unwrap();
    assert!(r.oscillations.windows(2).all(|w| w[1] < w[0]), "{:?}", r.oscillations);
    let r = continuity_probe(&recip(), 1.0, 1.0, &[0.2, 0.1, 0.05], 1e-1, Route::Direct).unwrap();
    assert!(r.nonincreasing && r.passed, "{r:?}");
    assert!(matches!(continuity_probe(&recip(), 0.05, 1.0, &[0.1], 1e-3, Route::Direct), Err(Error::InvalidArgument(_))));
}

#[test]
fn routes_agree_on_catalog() {
    let tol = 1e-3;
    let o = TransformOptions::with_tol(tol);
    for e in catalog().entries().iter().filter(|e| e.function.vanishes_at_infinity == Some(true)) {
        for (xi, eta) in PROBE {
            let d = kpft_direct_with(&e.function, xi, eta, &o).unwrap().value;
            let s = kpft_stieltjes_with(&e.function, xi, eta, &o).unwrap().value;
            assert!((d - s).norm() <= 3.0 * tol, "{} ({xi}, {eta}): {d} vs {s}", e.name);
        }
    }
}

#[test]
fn oracles_agree_on_catalog() {
    let tol = 1e-6;
    for e in catalog().entries() {
        let Some(or) = e.function.transform_oracle() else { continue };
        for (xi, eta) in PROBE {
            let d = kpft_direct(&e.function, xi, eta, tol).unwrap().value;
            let w = or.eval(xi, eta);
            assert!((d - w).norm() <= 10.0 * tol * w.norm().max(1.0), "{} ({xi}, {eta}): {d} vs {w}", e.name);
        }
    }
}

#[test]
fn integrable_entries_match_closed_forms() {
    for (xi, eta) in PROBE {
        let v = kpft_direct(&catalog::exp2().function, xi, eta, 1e-8).unwrap().value;
        assert!((v.re - exp2_ref(xi, eta)).abs() < 1e-7 && v.im.abs() < 1e-7);
    }
    let g = &catalog::gauss_corr().function;
    for (xi, eta, want) in [(1.0, 1.0, GAUSS_CORR_1_1), (1.0, -2.0, GAUSS_CORR_1_M2)] {
        let v = kpft_direct(g, xi, eta, 1e-8).unwrap().value;
        assert!((v.re - want).abs() < 1e-7 && v.im.abs() < 1e-7, "{v}");
    }
}

#[test]
fn linearity() {
    let tol = 1e-5;
    let (f, g) = (recip(), catalog::box_entry().function);
    let h = BvFunction2::linear_combination(2.0, &f, -0.5, &g).with_vanishing(true);
    for (xi, eta) in [(1.0, 1.0), (2.0, 0.5)] {
        let lhs = kpft_direct(&h, xi, eta, tol).unwrap().value;
        let rhs = kpft_direct(&f, xi, eta, tol).unwrap().value * 2.0 - kpft_direct(&g, xi, eta, tol).unwrap().value * 0.5;
        assert!((lhs - rhs).norm() <= 3.0 * tol * rhs.norm().max(1.0), "{lhs} vs {rhs}");
    }
}

#[test]
fn conjugate_symmetry() {
    let tol = 1e-6;
    for e in catalog().entries().iter().filter(|e| e.has(ClassTag::BvZero)) {
        for (xi, eta) in PROBE {
            let a = kpft_direct(&e.function, xi, eta, tol).unwrap().value;
            let b = kpft_direct(&e.function, -xi, -eta, tol).unwrap().value;
            assert!((a - b.conj()).norm() <= 10.0 * tol * a.norm().max(1.0), "{}", e.name);
        }
    }
}

#[test]
fn rungs_grow_towards_the_axis() {
    let rungs: Vec<usize> = [1.0, 0.1, 0.01].iter().map(|&xi| kpft_direct(&recip(), xi, 1.0, 1e-6).unwrap().ladder.rungs.len()).collect();
    assert!(rungs.windows(2).all(|w| w[1] > w[0]), "{rungs:?}");
    let v = kpft_direct(&recip(), 0.1, 1.0, 1e-6).unwrap().value;
    assert!((v - gamma_pair(0.1, 1.0)).norm() < 1e-4);
}

#[test]
fn precondition_and_generic_path() {
    let one = BvFunction2::new(|_, _| 1.0);
    assert!(matches!(kpft_direct(&one, 1.0, 1.0, 1e-4), Err(Error::Precondition(_))));
    let o = TransformOptions { force_generic: true, ..TransformOptions::with_tol(1e-6) };
    let g = kpft_direct_with(&recip(), 1.0, 1.0, &o).unwrap().value;
    assert!((g - gamma0_1() * gamma0_1()).norm() < 1e-5);
    let o = TransformOptions { force_generic: true, ..TransformOptions::with_tol(1e-3) };
    let s = kpft_stieltjes_with(&recip(), 1.0, 1.0, &o).unwrap().value;
    assert!((s - gamma0_1() * gamma0_1()).norm() < 3e-3);
}

#[test]
fn route_parsing() {
    assert_eq!("direct".parse::<Route>().unwrap(), Route::Direct);
    assert_eq!("oracle".parse::<Route>().unwrap(), Route::Oracle);
    assert!("fast".parse::<Route>().is_err());
}
