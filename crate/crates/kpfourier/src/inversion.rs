//! Pointwise inversion over annular frequency regions, in kernel form and
//! on the frequency side, plus the series bounds over lacunary blocks.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bv::{vitali_variation_with, VariationOptions};
use crate::engine::{improper_quad_1d, improper_quad_2d, quad_1d, quad_2d, start_length};
use crate::error::{Error, Result};
use crate::function::{BvFunction2, Factor, Field1, Field2, QuadrantLimits};
use crate::geometry::Rect2;
use crate::kernels::{dirichlet_window, lm1_bound, sinc_field, sine_integral, KernelSpec, LacunarySequence};
use crate::ladder::{Axis, LadderOptions};
use crate::quadrature::{gl16, mapped, CNeumaier};
use crate::transform::{kpft_point, Route, TransformOptions};

/// `{(s, t): alpha1 <= |s| <= beta1, alpha2 <= |t| <= beta2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnularRegion {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
}

impl AnnularRegion {
    pub fn new(alpha1: f64, alpha2: f64, beta1: f64, beta2: f64) -> Result<Self> {
        KernelSpec::new(alpha1, beta1)?;
        KernelSpec::new(alpha2, beta2)?;
        Ok(AnnularRegion { alpha1, alpha2, beta1, beta2 })
    }

    /// Same `alpha` and `beta` on both axes.
    pub fn square(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(alpha, alpha, beta, beta)
    }

    pub fn specs(&self) -> (KernelSpec, KernelSpec) {
        (KernelSpec { alpha: self.alpha1, beta: self.beta1 }, KernelSpec { alpha: self.alpha2, beta: self.beta2 })
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct InversionResult {
    pub value: f64,
    pub region: AnnularRegion,
    pub target: f64,
    pub residual: f64,
    /// Rungs used by the window ladders (summed over terms).
    pub rungs: usize,
}

/// Quadrant limits from metadata, otherwise from the diagonal sequences
/// `f(x +- h0 2^-k, y +- h0 2^-k)`.
pub fn quadrant_limits(f: &BvFunction2, x: f64, y: f64, h0: f64, levels: usize, tol: f64) -> Result<QuadrantLimits> {
    if let Some(q) = f.quadrant_limits_meta(x, y) {
        return Ok(q);
    }
    let dir = |sx: f64, sy: f64, name: &str| -> Result<f64> {
        let mut prev: Option<f64> = None;
        for k in 0..=levels {
            let h = h0 * 0.5f64.powi(k as i32);
            let v = f.try_eval(x + sx * h, y + sy * h)?;
            if let Some(p) = prev {
                if (v - p).abs() < tol {
                    return Ok(v);
                }
            }
            prev = Some(v);
        }
        Err(Error::LimitNotDetected { direction: format!("{name} at ({x}, {y})") })
    };
    Ok(QuadrantLimits {
        pp: dir(1.0, 1.0, "(+,+)")?,
        pm: dir(1.0, -1.0, "(+,-)")?,
        mp: dir(-1.0, 1.0, "(-,+)")?,
        mm: dir(-1.0, -1.0, "(-,-)")?,
    })
}

fn starts(f: &BvFunction2) -> (f64, f64) {
    let px: Vec<f64> = f.breaks_x.iter().chain(&f.anchors_x).copied().filter(|v| v.is_finite()).collect();
    let py: Vec<f64> = f.breaks_y.iter().chain(&f.anchors_y).copied().filter(|v| v.is_finite()).collect();
    (start_length(&px, f.scale), start_length(&py, f.scale))
}

/// `integral of u(t) sin(w t) / (pi t) dt` over the line.
fn sinc_line(u: &Factor, w: f64, tol: f64) -> Result<(f64, usize)> {
    let start = start_length(&[u.breaks.as_slice(), u.anchors.as_slice()].concat(), u.scale);
    let field = u.field().mul(&sinc_field(w));
    let lad = improper_quad_1d(&field, Axis::periodic(PI / w, start), &LadderOptions::with_tol(tol))?;
    Ok((lad.value().re, lad.len()))
}

/// Kernel form with its rung count.
pub fn kernel_form_detailed(f: &BvFunction2, x: f64, y: f64, region: &AnnularRegion, tol: f64) -> Result<(f64, usize)> {
    let g = f.shifted(x, y);
    let r = region;
    if let Some((u, v)) = g.factors() {
        let (jb1, n1) = sinc_line(u, r.beta1, 0.25 * tol)?;
        let (ja1, n2) = sinc_line(u, r.alpha1, 0.25 * tol)?;
        let (jb2, n3) = sinc_line(v, r.beta2, 0.25 * tol)?;
        let (ja2, n4) = sinc_line(v, r.alpha2, 0.25 * tol)?;
        return Ok(((jb1 - ja1) * (jb2 - ja2), n1 + n2 + n3 + n4));
    }
    let (sx, sy) = starts(&g);
    let fl = g.field();
    let mut total = 0.0;
    let mut rungs = 0;
    for (w1, w2, sign) in [(r.beta1, r.beta2, 1.0), (r.beta1, r.alpha2, -1.0), (r.alpha1, r.beta2, -1.0), (r.alpha1, r.alpha2, 1.0)] {
        let field = fl.mul(&Field2::product(sinc_field(w1), sinc_field(w2)));
        let lad = improper_quad_2d(&field, Axis::periodic(PI / w1, sx), Axis::periodic(PI / w2, sy), &LadderOptions::with_tol(0.25 * tol))?;
        total += sign * lad.value().re;
        rungs += lad.len();
    }
    Ok((total, rungs))
}

/// `integral f(x + t1, y + t2) h1(t1) h2(t2) dA` over the plane (Pringsheim),
/// `h` the difference windows of the region.
pub fn kernel_form_inversion(f: &BvFunction2, x: f64, y: f64, region: &AnnularRegion, tol: f64) -> Result<f64> {
    kernel_form_detailed(f, x, y, region, tol).map(|r| r.0)
}

/// The kernel integrand with the window product, for callers that want to
/// integrate it themselves.
pub fn window_kernel(region: &AnnularRegion) -> Field2 {
    let (k1, k2) = region.specs();
    Field2::product(
        Field1::new(move |t| Complex64::new(dirichlet_window(&k1, t), 0.0)).with_anchors(&[0.0]),
        Field1::new(move |t| Complex64::new(dirichlet_window(&k2, t), 0.0)).with_anchors(&[0.0]),
    )
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FrequencySide {
    pub value: f64,
    pub imag_residual: f64,
}

fn reach(f: &BvFunction2, x: bool) -> f64 {
    let pts = if x { &f.breaks_x } else { &f.breaks_y };
    pts.iter().filter(|v| v.is_finite()).fold(0.0f64, |m, v| m.max(v.abs())) + 1.0
}

/// `sum over s = +-1 of integral over [lo, hi] of phi(s w) exp(i x s w) dw`.
fn signed_line(phi: &(dyn Fn(f64) -> Complex64 + Sync), x: f64, lo: f64, hi: f64, width: f64) -> Complex64 {
    let n = ((hi - lo) / width).ceil().max(1.0) as usize;
    let h = (hi - lo) / n as f64;
    let parts: Vec<Complex64> = (0..n)
        .into_par_iter()
        .map(|k| {
            let mut s = CNeumaier::new();
            for (w, wt) in mapped(gl16(), lo + k as f64 * h, lo + (k + 1) as f64 * h) {
                s.add((phi(w) * Complex64::from_polar(1.0, x * w) + phi(-w) * Complex64::from_polar(1.0, -x * w)) * wt);
            }
            s.total()
        })
        .collect();
    parts.into_iter().fold(CNeumaier::new(), |mut s, v| {
        s.add(v);
        s
    })
    .total()
}

/// Evaluator for `F(f)` on the chosen route.
fn transform_eval(f: &BvFunction2, route: Route, tol: f64) -> Arc<dyn Fn(f64, f64) -> Complex64 + Send + Sync> {
    let o = TransformOptions::with_tol(tol);
    match (route, f.transform_oracle()) {
        (Route::Oracle, Some(or)) => {
            let or = or.clone();
            Arc::new(move |a, b| or.eval(a, b))
        }
        _ => {
            let f = f.clone();
            Arc::new(move |a, b| kpft_point(&f, a, b, route, &o).map(|p| p.value).unwrap_or(Complex64::new(f64::NAN, f64::NAN)))
        }
    }
}

/// `(1/(4 pi^2)) integral over the region of F(f)(s,t) exp(i(xs + yt))`.
pub fn frequency_side_inversion(f: &BvFunction2, x: f64, y: f64, region: &AnnularRegion, tol: f64, route: Route) -> Result<FrequencySide> {
    let r = region;
    let wx = 0.5 * PI / (x.abs() + reach(f, true));
    let wy = 0.5 * PI / (y.abs() + reach(f, false));
    let z = if let (Route::Oracle, Some((a, b))) = (route, f.transform_oracle().and_then(|o| o.factors.clone())) {
        let px = signed_line(&*a, x, r.alpha1, r.beta1, wx);
        let py = signed_line(&*b, y, r.alpha2, r.beta2, wy);
        px * py
    } else {
        if route == Route::Oracle && f.transform_oracle().is_none() {
            return Err(Error::Catalog("oracle route needs a transform oracle".into()));
        }
        let tf = transform_eval(f, route, tol);
        let mut s = CNeumaier::new();
        for (s1, s2) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
            let tf = tf.clone();
            let field = Field2::new(move |a, b| tf(s1 * a, s2 * b) * Complex64::from_polar(1.0, x * s1 * a + y * s2 * b));
            s.add(quad_2d(&field, Rect2 { x_lo: r.alpha1, x_hi: r.beta1, y_lo: r.alpha2, y_hi: r.beta2 }, wx, wy)?);
        }
        s.total()
    };
    let z = z / (4.0 * PI * PI);
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::NonFinite { x: f64::NAN, y: f64::NAN });
    }
    Ok(FrequencySide { value: z.re, imag_residual: z.im.abs() })
}

#[derive(Debug, Clone, Serialize)]
pub struct StudyStage {
    pub alpha: (f64, f64),
    pub beta: (f64, f64),
    pub result: Option<InversionResult>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StudyReport {
    pub point: (f64, f64),
    pub target: f64,
    pub limits: QuadrantLimits,
    pub stages: Vec<StudyStage>,
    pub pass_tol: f64,
    pub passed: bool,
}

impl StudyReport {
    pub fn residuals(&self) -> Vec<Option<f64>> {
        self.stages.iter().map(|s| s.result.map(|r| r.residual)).collect()
    }

    pub fn final_residual(&self) -> Option<f64> {
        self.stages.last().and_then(|s| s.result.map(|r| r.residual))
    }
}

/// Default engine tolerance for the kernel form inside studies.
pub const STUDY_INNER_TOL: f64 = 1e-6;

/// Kernel-form inversion along a ladder of regions (same ladder on both axes).
pub fn inversion_study(f: &BvFunction2, x: f64, y: f64, alphas: &[f64], betas: &[f64], pass_tol: f64) -> Result<StudyReport> {
    inversion_study_with(f, x, y, alphas, betas, pass_tol, STUDY_INNER_TOL)
}

pub fn inversion_study_with(
    f: &BvFunction2,
    x: f64,
    y: f64,
    alphas: &[f64],
    betas: &[f64],
    pass_tol: f64,
    inner_tol: f64,
) -> Result<StudyReport> {
    if alphas.len() != betas.len() || alphas.is_empty() {
        return Err(Error::InvalidArgument("alpha and beta ladders must be nonempty and of equal length".into()));
    }
    let regions: Vec<AnnularRegion> = alphas.iter().zip(betas).map(|(&a, &b)| AnnularRegion::square(a, b)).collect::<Result<_>>()?;
    let limits = quadrant_limits(f, x, y, 1e-3, 30, 1e-10)?;
    let target = limits.average();
    let stages = regions
        .iter()
        .map(|r| match kernel_form_detailed(f, x, y, r, inner_tol) {
            Ok((value, rungs)) => StudyStage {
                alpha: (r.alpha1, r.alpha2),
                beta: (r.beta1, r.beta2),
                result: Some(InversionResult { value, region: *r, target, residual: (value - target).abs(), rungs }),
                error: None,
            },
            Err(e) => StudyStage { alpha: (r.alpha1, r.alpha2), beta: (r.beta1, r.beta2), result: None, error: Some(e.to_string()) },
        })
        .collect::<Vec<_>>();
    let res: Vec<Option<f64>> = stages.iter().map(|s| s.result.map(|r| r.residual)).collect();
    let n = res.len();
    let last_two = res[n.saturating_sub(2)..].iter().all(|r| matches!(r, Some(v) if *v < pass_tol));
    let tail3: Vec<Option<f64>> = res[n.saturating_sub(3)..].to_vec();
    let monotone = tail3.iter().all(Option::is_some) && tail3.windows(2).all(|w| w[1].unwrap() <= w[0].unwrap());
    Ok(StudyReport { point: (x, y), target, limits, stages, pass_tol, passed: last_two && monotone })
}

/// `g(t1,t2) = f(x-t1,y-t2) + f(x-t1,y+t2) + f(x+t1,y-t2) + f(x+t1,y+t2)`.
pub fn quadrant_sum_function(f: &BvFunction2, x: f64, y: f64) -> BvFunction2 {
    let var = f.known_variation.map(|v| 4.0 * v);
    let out = if let Some((u, v)) = f.factors() {
        let su = u.shifted(x).reflected().plus(&u.shifted(x));
        let sv = v.shifted(y).reflected().plus(&v.shifted(y));
        BvFunction2::separable(su, sv)
    } else {
        let h = f.handle();
        let mirror = |b: &[f64], c: f64| -> Vec<f64> { b.iter().flat_map(|&p| [p - c, c - p]).collect() };
        BvFunction2::new(move |a, b| h(x - a, y - b) + h(x - a, y + b) + h(x + a, y - b) + h(x + a, y + b))
            .with_breaks(&mirror(&f.breaks_x, x), &mirror(&f.breaks_y, y))
            .with_anchors(&mirror(&f.anchors_x, x), &mirror(&f.anchors_y, y))
            .with_scale(f.scale)
    };
    let out = match var {
        Some(v) => out.with_known_variation(v),
        None => out,
    };
    match f.vanishes_at_infinity {
        Some(b) => out.with_vanishing(b),
        None => out,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PaiRow {
    pub k1: KernelSpec,
    pub k2: KernelSpec,
    pub a1: f64,
    pub a2: f64,
    pub difference: f64,
    pub bound: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PaiReport {
    pub delta0: f64,
    /// Sampled `sup |g|` on the quadrant outside `[0, delta0)^2`.
    pub sup_tail: f64,
    /// `Var(g, [delta0, inf) x [0, inf))`, `Var(g, [0, inf) x [delta0, inf))`.
    pub variation_tails: [f64; 2],
    pub epsilon: f64,
    pub rows: Vec<PaiRow>,
    pub passed: bool,
}

/// `12 Si(pi)^2 eps`.
pub fn pai_bound(eps: f64) -> f64 {
    let s = sine_integral(PI);
    12.0 * s * s * eps
}

/// Differences between the `[0,a1]^2` and `[0,a2]^2` integrals of
/// `g h1 h2` against the uniform bound.
pub fn pai_uniform_tail(
    f: &BvFunction2,
    x: f64,
    y: f64,
    a1: f64,
    a2: f64,
    delta0: f64,
    specs: &[(KernelSpec, KernelSpec)],
) -> Result<PaiReport> {
    if !(a2 > a1 && a1 >= delta0 && delta0 > 0.0) {
        return Err(Error::InvalidArgument("need a2 > a1 >= delta0 > 0".into()));
    }
    let g = quadrant_sum_function(f, x, y);
    let inf = f64::INFINITY;
    let vopts = VariationOptions::with_tol(1e-6);
    let v1 = vitali_variation_with(&g, &Rect2 { x_lo: delta0, x_hi: inf, y_lo: 0.0, y_hi: inf }, &vopts)?.value;
    let v2 = vitali_variation_with(&g, &Rect2 { x_lo: 0.0, x_hi: inf, y_lo: delta0, y_hi: inf }, &vopts)?.value;
    let mut sup: f64 = 0.0;
    let line: Vec<f64> = (0..=256).map(|k| 4.0 * delta0 * k as f64 / 256.0).collect();
    for &t in &line {
        sup = sup.max(g.eval(delta0, t).abs()).max(g.eval(t, delta0).abs());
    }
    for k in 0..=16 {
        let th = 0.5 * PI * k as f64 / 16.0;
        for j in 0..=40 {
            let r = delta0 * 2f64.powf(j as f64 / 4.0);
            let (p, q) = (r * th.cos(), r * th.sin());
            if p.max(q) >= delta0 {
                sup = sup.max(g.eval(p, q).abs());
            }
        }
    }
    let eps = sup.max(v1).max(v2);
    let bound = pai_bound(eps);
    let integral = |k1: KernelSpec, k2: KernelSpec, a: f64| -> Result<f64> {
        let wx = 0.5 * PI / k1.beta;
        let wy = 0.5 * PI / k2.beta;
        let h1 = Field1::new(move |t| Complex64::new(dirichlet_window(&k1, t), 0.0));
        let h2 = Field1::new(move |t| Complex64::new(dirichlet_window(&k2, t), 0.0));
        if let Some((u, v)) = g.factors() {
            let ix = quad_1d(&u.field().mul(&h1), 0.0, a, wx)?;
            let iy = quad_1d(&v.field().mul(&h2), 0.0, a, wy)?;
            return Ok((ix * iy).re);
        }
        Ok(quad_2d(&g.field().mul(&Field2::product(h1, h2)), Rect2 { x_lo: 0.0, x_hi: a, y_lo: 0.0, y_hi: a }, wx, wy)?.re)
    };
    let rows: Vec<PaiRow> = specs
        .iter()
        .map(|&(k1, k2)| {
            let d = (integral(k1, k2, a2)? - integral(k1, k2, a1)?).abs();
            Ok(PaiRow { k1, k2, a1, a2, difference: d, bound, margin: bound - d })
        })
        .collect::<Result<_>>()?;
    let passed = rows.iter().all(|r| r.difference <= r.bound);
    Ok(PaiReport { delta0, sup_tail: sup, variation_tails: [v1, v2], epsilon: eps, rows, passed })
}

/// Cumulative integrals `int_lo^k phi` at the knots, Gauss-Legendre panels
/// of width at most `width` inside each knot interval.
fn cumulative_1d(phi: &(dyn Fn(f64) -> Complex64 + Sync), knots: &[f64], width: f64) -> Vec<Complex64> {
    let cells: Vec<Complex64> = knots
        .par_windows(2)
        .map(|w| {
            let n = ((w[1] - w[0]) / width).ceil().max(1.0) as usize;
            let h = (w[1] - w[0]) / n as f64;
            let mut s = CNeumaier::new();
            for k in 0..n {
                for (t, wt) in mapped(gl16(), w[0] + k as f64 * h, w[0] + (k + 1) as f64 * h) {
                    s.add(phi(t) * wt);
                }
            }
            s.total()
        })
        .collect();
    let mut out = vec![Complex64::new(0.0, 0.0)];
    let mut acc = CNeumaier::new();
    for c in cells {
        acc.add(c);
        out.push(acc.total());
    }
    out
}

fn sample_knots(lo: f64, hi: f64, samples: usize) -> Vec<f64> {
    let n = samples.max(1);
    (0..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect()
}

/// Sampled `max |A_{i,j}(u, v)|` over `[u_{i-1}, u_i] x [v_{j-1}, v_j]`,
/// `A_{i,j}(u, v)` the frequency-side integral over the region with inner
/// edges `(u_{i-1}, v_{j-1})` and outer edges `(u, v)`. A lower bound for
/// the supremum.
pub fn moricz_block_sup(
    f: &BvFunction2,
    x: f64,
    y: f64,
    seq1: &LacunarySequence,
    seq2: &LacunarySequence,
    i: usize,
    j: usize,
    samples: usize,
) -> Result<f64> {
    if i < 2 || j < 2 {
        return Err(Error::InvalidArgument("block indices start at 2".into()));
    }
    let (u0, u1) = (seq1.at(i - 1), seq1.at(i));
    let (v0, v1) = (seq2.at(j - 1), seq2.at(j));
    let ku = sample_knots(u0, u1, samples.saturating_sub(1));
    let kv = sample_knots(v0, v1, samples.saturating_sub(1));
    let wx = 0.5 * PI / (x.abs() + reach(f, true));
    let wy = 0.5 * PI / (y.abs() + reach(f, false));
    let norm = 1.0 / (4.0 * PI * PI);
    if let Some((a, b)) = f.transform_oracle().and_then(|o| o.factors.clone()) {
        let pa = move |w: f64| a(w) * Complex64::from_polar(1.0, x * w) + a(-w) * Complex64::from_polar(1.0, -x * w);
        let pb = move |w: f64| b(w) * Complex64::from_polar(1.0, y * w) + b(-w) * Complex64::from_polar(1.0, -y * w);
        let cu = cumulative_1d(&pa, &ku, wx);
        let cv = cumulative_1d(&pb, &kv, wy);
        let mu = cu.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mv = cv.iter().map(|z| z.norm()).fold(0.0, f64::max);
        return Ok(norm * mu * mv);
    }
    let tf = transform_eval(f, if f.transform_oracle().is_some() { Route::Oracle } else { Route::Direct }, 1e-6);
    let phi = move |a: f64, b: f64| {
        let mut s = Complex64::new(0.0, 0.0);
        for (s1, s2) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
            s += tf(s1 * a, s2 * b) * Complex64::from_polar(1.0, s1 * x * a + s2 * y * b);
        }
        s
    };
    // Cell integrals over the sample grid, then 2D prefix sums.
    let nu = ku.len();
    let nv = kv.len();
    let cells: Vec<Vec<Complex64>> = (0..nu - 1)
        .into_par_iter()
        .map(|p| {
            (0..nv - 1)
                .map(|q| {
                    let field = Field2::new(phi.clone());
                    quad_2d(&field, Rect2 { x_lo: ku[p], x_hi: ku[p + 1], y_lo: kv[q], y_hi: kv[q + 1] }, wx, wy)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut best: f64 = 0.0;
    let mut pre = vec![vec![Complex64::new(0.0, 0.0); nv]; nu];
    for p in 1..nu {
        for q in 1..nv {
            pre[p][q] = cells[p - 1][q - 1] + pre[p - 1][q] + pre[p][q - 1] - pre[p - 1][q - 1];
            best = best.max(pre[p][q].norm());
        }
    }
    Ok(norm * best)
}

#[derive(Debug, Clone, Serialize)]
pub struct MoriczSeries {
    pub partial_sum: f64,
    pub bound: f64,
    pub variation: f64,
    /// `(i, j, M_ij)` in row-major order.
    pub blocks: Vec<(usize, usize, f64)>,
}

/// `(3 A1 + 4)(3 A2 + 4) / pi^2`.
pub fn moricz_constant(seq1: &LacunarySequence, seq2: &LacunarySequence) -> f64 {
    lm1_bound(seq1) * lm1_bound(seq2) / (PI * PI)
}

fn block_table(
    f: &BvFunction2,
    x: f64,
    y: f64,
    seq1: &LacunarySequence,
    seq2: &LacunarySequence,
    idx: Vec<(usize, usize)>,
    samples: usize,
) -> Result<Vec<(usize, usize, f64)>> {
    idx.into_par_iter()
        .map(|(i, j)| moricz_block_sup(f, x, y, seq1, seq2, i, j, samples).map(|m| (i, j, m)))
        .collect()
}

/// Partial double sum of block suprema for `2 <= i <= n`, `2 <= j <= m`,
/// with the bound `(3A1+4)(3A2+4)/pi^2 * Var(f)`.
pub fn moricz_series(
    f: &BvFunction2,
    x: f64,
    y: f64,
    seq1: &LacunarySequence,
    seq2: &LacunarySequence,
    n: usize,
    m: usize,
    samples: usize,
) -> Result<MoriczSeries> {
    if n < 2 || m < 2 {
        return Err(Error::InvalidArgument("N and M must be at least 2".into()));
    }
    let variation = vitali_variation_with(f, &Rect2::plane(), &VariationOptions::with_tol(1e-6))?.value;
    let idx: Vec<(usize, usize)> = (2..=n).flat_map(|i| (2..=m).map(move |j| (i, j))).collect();
    let blocks = block_table(f, x, y, seq1, seq2, idx, samples)?;
    let partial_sum = blocks.iter().map(|b| b.2).sum();
    Ok(MoriczSeries { partial_sum, bound: moricz_constant(seq1, seq2) * variation, variation, blocks })
}

/// Sum of block suprema with `i > n0` or `j > m0`, all indices up to `cap`.
pub fn moricz_tail(
    f: &BvFunction2,
    x: f64,
    y: f64,
    seq1: &LacunarySequence,
    seq2: &LacunarySequence,
    n0: usize,
    m0: usize,
    cap: usize,
    samples: usize,
) -> Result<f64> {
    let idx: Vec<(usize, usize)> = (2..=cap).flat_map(|i| (2..=cap).map(move |j| (i, j))).filter(|&(i, j)| i > n0 || j > m0).collect();
    Ok(block_table(f, x, y, seq1, seq2, idx, samples)?.iter().map(|b| b.2).sum())
}

#[derive(Debug, Clone, Serialize)]
pub struct UniformityReport {
    pub points: Vec<(f64, f64)>,
    /// `residuals[p][s]`: point `p`, ladder stage `s`.
    pub residuals: Vec<Vec<Option<f64>>>,
    /// Worst residual per stage over the points that succeeded.
    pub max_residual: Vec<f64>,
    /// Points where the metadata does not certify continuity.
    pub discontinuous_points: Vec<(f64, f64)>,
}

/// Inversion studies on a `grid x grid` lattice inside the ball of `radius`
/// around `center`. Diagnostic only.
pub fn uniformity_scan(
    f: &BvFunction2,
    center: (f64, f64),
    radius: f64,
    grid: usize,
    alphas: &[f64],
    betas: &[f64],
    inner_tol: f64,
) -> Result<UniformityReport> {
    if !(radius > 0.0) || grid == 0 {
        return Err(Error::InvalidArgument("radius must be positive and grid nonzero".into()));
    }
    let half = radius / 2f64.sqrt();
    let offs: Vec<f64> = if grid == 1 { vec![0.0] } else { (0..grid).map(|k| -half + 2.0 * half * k as f64 / (grid - 1) as f64).collect() };
    let points: Vec<(f64, f64)> = offs.iter().flat_map(|&a| offs.iter().map(move |&b| (center.0 + a, center.1 + b))).collect();
    let discontinuous_points =
        points.iter().copied().filter(|&(x, y)| f.quadrant_limits_meta(x, y).map_or(false, |q| !q.is_continuous(1e-12))).collect();
    let residuals: Vec<Vec<Option<f64>>> = points
        .par_iter()
        .map(|&(x, y)| match inversion_study_with(f, x, y, alphas, betas, f64::INFINITY, inner_tol) {
            Ok(r) => r.residuals(),
            Err(_) => vec![None; alphas.len()],
        })
        .collect();
    let max_residual = (0..alphas.len())
        .map(|s| residuals.iter().filter_map(|r| r[s]).fold(0.0, f64::max))
        .collect();
    Ok(UniformityReport { points, residuals, max_residual, discontinuous_points })
}
