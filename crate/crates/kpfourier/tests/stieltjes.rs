mod common;

use common::*;
use kpfourier::bv::mixed_difference;
use kpfourier::catalog::{self, catalog};
use kpfourier::function::{Field1, Field2};
use kpfourier::geometry::linspace;
use kpfourier::stieltjes::*;
use kpfourier::{BvFunction2, Rect2};
use num_complex::Complex64;
use proptest::prelude::*;

fn one() -> Field2 {
    Field2::constant(c(1.0, 0.0))
}

fn recip() -> BvFunction2 {
    catalog::reciprocal().function
}

fn sq(lo: f64, hi: f64) -> Rect2 {
    Rect2::square(lo, hi).unwrap()
}

fn cos_cos() -> Field2 {
    let c1 = || Field1::new(|t: f64| Complex64::new(t.cos(), 0.0));
    Field2::product(c1(), c1())
}

#[test]
fn constant_integrand_gives_mixed_difference() {
    let fs = [recip(), BvFunction2::new(|x, y| (x * y).sin() + x * x), catalog::gauss_corr().function];
    for f in &fs {
        for r in [sq(1.0, 2.0), Rect2::new(-0.7, 1.3, 0.2, 2.9).unwrap(), sq(0.5, 4.0)] {
            let v = rs_integral(&one(), f, &r, 1e-10).unwrap().value;
            let d = mixed_difference(f, &r).unwrap();
            assert!((v.re - d).abs() <= 1e3 * f64::EPSILON * d.abs().max(1.0) && v.im == 0.0, "{v} vs {d}");
        }
    }
    let v = rs_integral(&one(), &BvFunction2::new(|x, y| x * y), &sq(0.0, 1.0), 1e-10).unwrap().value;
    assert!((v.re - 1.0).abs() < 1e-13);
}

#[test]
fn cos_sum_against_fine_brute_force() {
    let f = recip();
    let n = 4096;
    let xs = linspace(1.0, 2.0, n);
    let mut brute = 0.0;
    for i in 0..n {
        let tx = 0.5 * (xs[i] + xs[i + 1]);
        for j in 0..n {
            let ty = 0.5 * (xs[j] + xs[j + 1]);
            let d = 1.0 / (xs[i + 1] * xs[j + 1]) - 1.0 / (xs[i] * xs[j + 1]) - 1.0 / (xs[i + 1] * xs[j]) + 1.0 / (xs[i] * xs[j]);
            brute += (tx + ty).cos() * d;
        }
    }
    let r = rs_integral(&Field2::cos_sum(1.0, 1.0), &f, &sq(1.0, 2.0), 1e-10).unwrap();
    assert!((r.value.re - brute).abs() < 1e-6, "{} vs {brute}", r.value.re);
    assert!((r.value.re - (-0.2152318250431754)).abs() < 1e-9);
}

#[test]
fn tags_agree_in_the_limit() {
    let f = recip().field().without_terms();
    let g = Field2::cos_sum(1.0, 2.0).without_terms();
    let xs = linspace(1.0, 3.0, 1024);
    let vals: Vec<Complex64> = [Tag::Center, Tag::LowerLeft, Tag::UpperRight].iter().map(|&t| rs_sum_tagged(&g, &f, &xs, &xs, t).unwrap()).collect();
    assert!((vals[0] - vals[1]).norm() < 1e-3 && (vals[0] - vals[2]).norm() < 1e-3);
}

#[test]
fn improper_examples() {
    let l = rs_improper(&one(), &recip(), 1e-6, 2.0).unwrap();
    assert!(l.value().norm() < 1e-5, "{:?}", l.value());
    let z = rs_improper(&Field2::cos_sum(1.0, 1.0), &BvFunction2::zero(), 1e-6, 2.0).unwrap();
    assert!(z.values.iter().all(|v| v.norm() == 0.0));
    let o = ImproperOptions::periodic(1e-6, std::f64::consts::PI);
    let w = rs_improper_with(&Field2::plane_wave(1.0, 1.0), &recip(), &o).unwrap().value();
    let want = -gamma0_1() * gamma0_1();
    assert!((w - want).norm() < 1e-3, "{w} vs {want}");
}

#[test]
fn ladder_factors_agree() {
    let g = Field2::product(Field1::new(|t: f64| c((-0.1 * t * t).exp(), 0.0)), Field1::new(|t: f64| c(1.0 / (1.0 + t * t), 0.0)));
    let tol = 1e-5;
    let a = rs_improper(&g, &recip(), tol, 2.0).unwrap().value();
    let b = rs_improper(&g, &recip(), tol, 3.0).unwrap().value();
    assert!((a - b).norm() <= 2.0 * tol * a.norm().max(1.0), "{a} vs {b}");
}

#[test]
fn parts_compact_examples() {
    let (l, r) = integration_by_parts_compact(&Field2::cos_sum(1.0, 1.0), &BvFunction2::constant(2.5), &sq(0.0, 3.0), 1e-9).unwrap();
    assert!(l.norm() < 1e-12 && r.norm() < 1e-12);
    let f = recip();
    let (l, r) = integration_by_parts_compact(&one(), &f, &sq(0.5, 3.0), 1e-9).unwrap();
    let d = mixed_difference(&f, &sq(0.5, 3.0)).unwrap();
    assert!((l.re - d).abs() < 1e-12 && (r.re - d).abs() < 1e-12);
    let (l, r) = integration_by_parts_compact(&Field2::cos_sum(1.0, 1.0), &f, &sq(1.0, 4.0), 1e-9).unwrap();
    assert!((l - r).norm() < 1e-5, "{l} vs {r}");
}

#[test]
fn parts_compact_catalog_matrix() {
    let tol = 1e-8;
    let gs = [Field2::cos_sum(1.0, 1.0), Field2::plane_wave(0.7, -1.3), cos_cos()];
    let rects = [sq(1.0, 4.0), Rect2::new(-1.5, 2.0, -0.25, 1.75).unwrap(), Rect2::new(0.3, 2.2, -2.0, 0.5).unwrap()];
    for e in catalog().entries() {
        for g in &gs {
            for r in &rects {
                let (l, rhs) = integration_by_parts_compact(g, &e.function, r, tol).unwrap();
                assert!((l - rhs).norm() <= 10.0 * tol * l.norm().max(1.0), "{} on {r:?}: {l} vs {rhs}", e.name);
            }
        }
    }
}

#[test]
fn parts_improper_examples() {
    let o = ImproperOptions::periodic(1e-5, std::f64::consts::PI);
    let (l, r) = parts_identity_improper(&cos_cos(), &BvFunction2::zero(), &o).unwrap();
    assert!(l.norm() == 0.0 && r.norm() == 0.0);
    let (l, r) = parts_identity_improper(&one(), &recip(), &ImproperOptions::graded(1e-6, 2.0)).unwrap();
    assert!(l.norm() < 1e-5 && r.norm() < 1e-12);
    let (l, r) = parts_identity_improper(&cos_cos(), &recip(), &o).unwrap();
    assert!((l - r).norm() < 1e-3);
    assert!((l.re - PARTS_COS_COS).abs() < 1e-4 && (r.re - PARTS_COS_COS).abs() < 1e-4, "{l} {r}");
}

#[test]
fn reduction_examples() {
    let (s, q) = reduce_to_riemann(&one(), &one(), &sq(0.0, 1.0), 1e-10).unwrap();
    assert!((s.re - 1.0).abs() < 1e-12 && (q.re - 1.0).abs() < 1e-12);
    let zero = Field2::constant(c(0.0, 0.0));
    let (s, q) = reduce_to_riemann(&Field2::cos_sum(1.0, 1.0), &zero, &sq(0.0, 1.0), 1e-10).unwrap();
    assert!(s.norm() == 0.0 && q.norm() == 0.0);
    let e = || Field1::new(|t: f64| c((-t).exp(), 0.0));
    let (s, q) = reduce_to_riemann(&Field2::cos_sum(1.0, 1.0), &Field2::product(e(), e()), &sq(0.0, 2.0), 1e-9).unwrap();
    // Re of ((e^{2(i-1)} - 1)/(i-1))^2
    let z = ((c(-2.0, 2.0)).exp() - 1.0) / c(-1.0, 1.0);
    let exact = (z * z).re;
    assert!((s - q).norm() < 1e-6 && (q.re - exact).abs() < 1e-9, "{s} {q} {exact}");
}

#[test]
fn domination_examples() {
    let o = ImproperOptions::graded(1e-3, 2.0);
    let (l, r) = domination_check(&Field2::cos_sum(1.0, 1.0), &BvFunction2::zero(), &o).unwrap();
    assert!(l == 0.0 && r == 0.0);
    let (l, r) = domination_check(&one(), &recip(), &ImproperOptions::graded(1e-6, 2.0)).unwrap();
    assert!(l < 1e-5 && (r - 4.0).abs() < 1e-3, "{l} {r}");
    let (l, r) = domination_check(&Field2::cos_sum(1.0, 1.0), &recip(), &o).unwrap();
    assert!(l <= r, "{l} {r}");
    assert!((l - 0.2764).abs() < 1e-3);
}

#[test]
fn cos_window_identity_on_catalog() {
    for name in ["reciprocal", "exp2", "box"] {
        let f = &catalog().get(name).unwrap().function;
        let (q, s) = cos_window_identity(f, (0.5, 2.0), (1.0, 3.0), 1e-5).unwrap();
        assert!((q - s).norm() < 1e-4, "{name}: {q} vs {s}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bilinear(a in -2f64..2.0, b in -2f64..2.0, k in 0.2f64..3.0, lo in 0.5f64..2.0, w in 0.5f64..3.0) {
        let r = Rect2::new(lo, lo + w, lo - 0.3, lo + w).unwrap();
        let tol = 1e-6;
        let f1 = recip();
        let f2 = catalog::exp2().function;
        let g1 = Field2::cos_sum(k, 1.0);
        let g2 = Field2::plane_wave(1.0, -k);
        let v = |g: &Field2, f: &BvFunction2| rs_integral(g, f, &r, tol).unwrap().value;
        let fmix = BvFunction2::linear_combination(a, &f1, b, &f2);
        let lhs = v(&g1, &fmix);
        let rhs = v(&g1, &f1) * a + v(&g1, &f2) * b;
        prop_assert!((lhs - rhs).norm() < 1e-5 * (1.0 + rhs.norm()));
        let gmix = Field2::from_terms(g1.terms().unwrap().iter().map(|(p, q)| (p.scaled(c(a, 0.0)), q.clone())).chain(g2.terms().unwrap().iter().map(|(p, q)| (p.scaled(c(b, 0.0)), q.clone()))).collect());
        let lhs = v(&gmix, &f1);
        let rhs = v(&g1, &f1) * a + v(&g2, &f1) * b;
        prop_assert!((lhs - rhs).norm() < 1e-5 * (1.0 + rhs.norm()));
    }
}
