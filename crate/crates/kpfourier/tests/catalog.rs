mod common;

use common::*;
use kpfourier::bv::vitali_variation;
use kpfourier::catalog::*;
use kpfourier::transform::kpft_direct;
use kpfourier::{BvFunction2, Error, Rect2};

#[test]
fn gamma0_against_reference() {
    for s in [1.0, 2.0, 0.5, 3.0, 0.1, 0.01, -1.0, -0.5] {
        let g = gamma0_oracle(s).unwrap();
        let want = gamma0_ref(s);
        assert!((g - want).norm() < 1e-12 * want.norm().max(1.0), "s {s}: {g} vs {want}");
    }
    assert!(gamma0_oracle(0.0).is_err());
    assert!(gamma0_oracle(f64::NAN).is_err());
}

#[test]
fn gamma0_symmetry_and_growth() {
    for s in [0.3, 1.0, 7.5, 40.0] {
        let (a, b) = (gamma0_oracle(s).unwrap(), gamma0_oracle(-s).unwrap());
        assert!((a - b.conj()).norm() < 1e-14);
    }
    let m: Vec<f64> = [0.01, 0.1, 1.0].iter().map(|&s| gamma0_oracle(s).unwrap().norm()).collect();
    assert!(m[0] > m[1] && m[1] > m[2]);
}

#[test]
fn catalog_contents() {
    let c = catalog();
    assert!(c.entries().len() >= 5);
    assert_eq!(c.names(), vec!["reciprocal", "exp2", "box", "additive", "zero", "gauss_corr"]);
    let r = c.get("reciprocal").unwrap();
    assert_eq!(r.function.eval(2.0, 3.0), 1.0 / 6.0);
    assert!(r.has(ClassTag::BvZero) && !r.has(ClassTag::L1));
    assert!(c.get("exp2").unwrap().has(ClassTag::BvZero) && c.get("exp2").unwrap().has(ClassTag::L1));
    let or = c.get("exp2").unwrap().function.transform_oracle().unwrap();
    assert_eq!(or.eval(0.0, 0.0).re, 4.0);
    assert!(c.get("nope").is_none());
    let s = c.summaries();
    assert_eq!(s[0].tags, vec!["BV_V", "BV_H", "BV_0"]);
    assert!(s[0].breaks_x.contains(&1.0));
}

#[test]
fn register_rules() {
    let mut c = Catalog::new();
    c.register(zero()).unwrap();
    assert!(matches!(c.register(zero()), Err(Error::Catalog(_))));
    let one = CatalogEntry {
        name: "one".into(),
        function: BvFunction2::new(|_, _| 1.0),
        tags: vec![ClassTag::BvV, ClassTag::BvZero],
        description: String::new(),
        window_hint: None,
        continuity_points: vec![],
    };
    assert!(matches!(c.register(one), Err(Error::Catalog(_))));
    c.register(reciprocal()).unwrap();
    // a wrong oracle is caught by the spot check
    let mut bad = exp2();
    bad.name = "bad".into();
    bad.function = bad.function.with_transform_oracle(kpfourier::function::TransformOracle::general(|_, _| num_complex::Complex64::new(2.0, 0.0)));
    assert!(matches!(c.register(bad), Err(Error::Catalog(_))));
}

#[test]
fn claimed_variations_match_estimates() {
    for e in catalog().entries() {
        let Some(v) = e.function.known_variation else { continue };
        let est = vitali_variation(&e.function, &Rect2::plane(), 1e-6, 8).unwrap().value;
        assert!((est - v).abs() <= 1e-2 * v.max(1e-12) || (v == 0.0 && est == 0.0), "{}: {est} vs {v}", e.name);
    }
}

#[test]
fn oracle_spot_checks() {
    for e in catalog().entries() {
        let Some(or) = e.function.transform_oracle() else { continue };
        for (xi, eta) in [(1.0, 1.0), (2.0, -0.5), (-1.5, 3.0)] {
            let d = kpft_direct(&e.function, xi, eta, 1e-5).unwrap().value;
            assert!((d - or.eval(xi, eta)).norm() < 1e-3, "{}", e.name);
        }
    }
}

#[test]
fn continuity_points_have_equal_quadrant_limits() {
    for e in catalog().entries() {
        for &(x, y) in &e.continuity_points {
            if let Some(q) = e.function.quadrant_limits_meta(x, y) {
                assert!(q.is_continuous(1e-12), "{} at ({x}, {y})", e.name);
                assert!((q.average() - e.function.eval(x, y)).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn non_integrable_witness() {
    let c = catalog();
    assert!(c.entries().iter().any(|e| e.has(ClassTag::BvZero) && !e.has(ClassTag::L1)));
    assert!(c.entries().iter().any(|e| e.has(ClassTag::BvZero) && e.has(ClassTag::L1)));
    // the reciprocal is not integrable: its integral over [1, L]^2 is (ln L)^2
    let f = &c.get("reciprocal").unwrap().function;
    let mass = |l: f64| {
        let n = 4000;
        let h = l.ln() / n as f64;
        // midpoint rule in log coordinates, t = e^s
        let mut line = 0.0;
        for k in 0..n {
            let t = ((k as f64 + 0.5) * h).exp();
            line += f.eval(t, 1.0) * t * h;
        }
        line * line
    };
    for l in [1e2, 1e4, 1e8] {
        assert!((mass(l) - l.ln().powi(2)).abs() < 1e-4 * l.ln().powi(2));
    }
}
