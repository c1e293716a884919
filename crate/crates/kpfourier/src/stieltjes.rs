//! Riemann-Stieltjes integrals in two variables: compact rectangles,
//! Pringsheim limits over the plane, integration by parts and the
//! reduction to ordinary integrals.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bv::base_cuts;
use crate::engine::{improper_quad_2d, improper_rs_2d, quad_2d, rs_sum_1d, rs_sum_2d, start_length};
use crate::error::{Error, Result};
use crate::function::{BvFunction2, Field1, Field2};
use crate::geometry::Rect2;
use crate::kernels::{cos_window, sin_window_primitive, KernelSpec};
use crate::ladder::{Axis, LadderOptions, PringsheimLadder};
use crate::quadrature::{gl8, mapped, rs_cuts, CNeumaier, Neumaier};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StieltjesResult {
    pub value: Complex64,
    pub partition_norm: f64,
    pub refinement_levels: usize,
    pub est_error: f64,
}

/// Where the integrand is sampled in each cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tag {
    Center,
    LowerLeft,
    UpperRight,
}

#[derive(Debug, Clone, Copy)]
pub struct RsOptions {
    pub tol: f64,
    /// Cells per side at level 0.
    pub n0: usize,
    pub max_levels: usize,
    /// Cap on cells per side for the dense (non-product) path.
    pub dense_cap: usize,
}

impl RsOptions {
    pub fn with_tol(tol: f64) -> Self {
        RsOptions { tol, n0: 16, max_levels: 18, dense_cap: 4096 }
    }
}

fn merged(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = a.iter().chain(b).copied().collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn stable(prev: Complex64, cur: Complex64, tol: f64) -> bool {
    (cur - prev).norm() <= tol * cur.norm().max(1.0)
}

/// Values of a midpoint-tagged sum under repeated halving of the mesh. When
/// the last two ratios of successive differences are both close to 4 (the
/// `h^2` regime), the Richardson-corrected values are tested as well.
#[derive(Default)]
struct Halving {
    values: Vec<Complex64>,
    deltas: Vec<f64>,
}

impl Halving {
    /// Accepted value and its error estimate, if any.
    fn push(&mut self, v: Complex64, tol: f64) -> Option<(Complex64, f64)> {
        self.values.push(v);
        let n = self.values.len();
        if n < 2 {
            return None;
        }
        let p = self.values[n - 2];
        self.deltas.push((v - p).norm());
        if stable(p, v, tol) {
            return Some((v, (v - p).norm()));
        }
        if n < 4 {
            return None;
        }
        let d: Vec<Complex64> = (n - 3..n).map(|k| self.values[k] - self.values[k - 1]).collect();
        let quadratic = |a: Complex64, b: Complex64| {
            let r = a.norm() / b.norm();
            r > 3.5 && r < 4.5
        };
        if quadratic(d[0], d[1]) && quadratic(d[1], d[2]) {
            let r0 = self.values[n - 2] + d[1] / 3.0;
            let r1 = v + d[2] / 3.0;
            if stable(r0, r1, tol) {
                return Some((r1, (r1 - r0).norm()));
            }
        }
        None
    }
}

/// Dyadic refinement of a 2D sum until the relative change drops below tol.
fn refine_2d(integrand: &Field2, integrator: &Field2, rect: &Rect2, o: &RsOptions) -> Result<StieltjesResult> {
    if !rect.is_compact() {
        return Err(Error::InvalidArgument("rs_integral needs a compact rectangle".into()));
    }
    if !(o.tol > 0.0) {
        return Err(Error::InvalidArgument("tol must be positive".into()));
    }
    let bx = merged(&integrand.breaks_x, &integrator.breaks_x);
    let by = merged(&integrand.breaks_y, &integrator.breaks_y);
    let factored = integrand.terms().is_some() && integrator.terms().is_some();
    let cap = if factored { 1 << 22 } else { o.dense_cap };
    let mut seq = Halving::default();
    let mut n = o.n0.max(1);
    for level in 0..=o.max_levels {
        if n > cap {
            break;
        }
        let xs = rs_cuts(rect.x_lo, rect.x_hi, n, &bx);
        let ys = rs_cuts(rect.y_lo, rect.y_hi, n, &by);
        let v = rs_sum_2d(integrand, integrator, &xs, &ys)?;
        if let Some((value, est_error)) = seq.push(v, o.tol) {
            let h = (rect.x_hi - rect.x_lo).hypot(rect.y_hi - rect.y_lo) / n as f64;
            return Ok(StieltjesResult { value, partition_norm: h, refinement_levels: level, est_error });
        }
        n *= 2;
    }
    Err(Error::NonConvergence { deltas: seq.deltas })
}

/// `integral over rect of g df`, cell-centre tags, dyadic refinement.
pub fn rs_integral(g: &Field2, f: &BvFunction2, rect: &Rect2, tol: f64) -> Result<StieltjesResult> {
    refine_2d(g, &f.field(), rect, &RsOptions::with_tol(tol))
}

/// Same with explicit options and an arbitrary complex integrator.
pub fn rs_integral_with(integrand: &Field2, integrator: &Field2, rect: &Rect2, o: &RsOptions) -> Result<StieltjesResult> {
    refine_2d(integrand, integrator, rect, o)
}

/// One Stieltjes sum on a tensor grid with the chosen tags (no factoring).
pub fn rs_sum_tagged(integrand: &Field2, integrator: &Field2, xs: &[f64], ys: &[f64], tag: Tag) -> Result<Complex64> {
    let pick = |a: f64, b: f64| match tag {
        Tag::Center => 0.5 * (a + b),
        Tag::LowerLeft => a,
        Tag::UpperRight => b,
    };
    let nodes: Vec<Vec<Complex64>> = xs.par_iter().map(|&x| ys.iter().map(|&y| integrator.eval(x, y)).collect()).collect();
    let rows: Vec<Complex64> = (0..xs.len() - 1)
        .into_par_iter()
        .map(|i| {
            let mut s = CNeumaier::new();
            let tx = pick(xs[i], xs[i + 1]);
            for j in 0..ys.len() - 1 {
                let d = nodes[i + 1][j + 1] - nodes[i][j + 1] - nodes[i + 1][j] + nodes[i][j];
                s.add(integrand.eval(tx, pick(ys[j], ys[j + 1])) * d);
            }
            s.total()
        })
        .collect();
    let mut s = CNeumaier::new();
    for r in rows {
        s.add(r);
    }
    let v = s.total();
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { x: f64::NAN, y: f64::NAN })
    }
}

/// How the improper ladders grow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LadderKind {
    /// Windows `[-L, L]` with `L` growing by `factor`.
    Graded { factor: f64 },
    /// Edges at multiples of `half_period` with binomial averaging; for
    /// oscillating integrands or integrators.
    Periodic { half_period: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct ImproperOptions {
    pub tol: f64,
    pub x: LadderKind,
    pub y: LadderKind,
    /// Cells per block at the first pass; doubled until passes agree.
    pub cells0: usize,
    pub max_refine: usize,
    pub ladder: LadderOptions,
}

impl ImproperOptions {
    pub fn graded(tol: f64, factor: f64) -> Self {
        let k = LadderKind::Graded { factor };
        ImproperOptions { tol, x: k, y: k, cells0: 32, max_refine: 6, ladder: LadderOptions::with_tol(tol) }
    }

    pub fn periodic(tol: f64, half_period: f64) -> Self {
        let k = LadderKind::Periodic { half_period };
        ImproperOptions { x: k, y: k, ..Self::graded(tol, 2.0) }
    }
}

fn axis(kind: LadderKind, start: f64) -> Axis {
    match kind {
        LadderKind::Graded { factor } => Axis::graded(start, factor),
        LadderKind::Periodic { half_period } => Axis::periodic(half_period, start),
    }
}

fn axes_for(integrand: &Field2, integrator: &Field2, o: &ImproperOptions) -> (Axis, Axis) {
    let px: Vec<f64> = [&integrand.breaks_x, &integrand.anchors_x, &integrator.breaks_x, &integrator.anchors_x]
        .into_iter()
        .flatten()
        .copied()
        .filter(|v| v.is_finite())
        .collect();
    let py: Vec<f64> = [&integrand.breaks_y, &integrand.anchors_y, &integrator.breaks_y, &integrator.anchors_y]
        .into_iter()
        .flatten()
        .copied()
        .filter(|v| v.is_finite())
        .collect();
    let scale = integrand.scale.min(integrator.scale);
    (axis(o.x, start_length(&px, scale)), axis(o.y, start_length(&py, scale)))
}

/// Improper Stieltjes integral over the plane for arbitrary fields; the
/// block resolution is doubled until two passes agree.
pub fn rs_improper_fields(integrand: &Field2, integrator: &Field2, o: &ImproperOptions) -> Result<PringsheimLadder> {
    let (ax, ay) = axes_for(integrand, integrator, o);
    let dense = !(integrand.terms().is_some() && integrator.terms().is_some());
    let mut cells = o.cells0.max(2);
    let mut prev: Option<PringsheimLadder> = None;
    let mut deltas = Vec::new();
    for _ in 0..=o.max_refine {
        if dense && cells > 128 {
            break;
        }
        let lad = improper_rs_2d(integrand, integrator, ax, ay, cells, &o.ladder)?;
        if let Some(p) = &prev {
            let d = (lad.value() - p.value()).norm();
            deltas.push(d);
            if d <= o.tol * lad.value().norm().max(1.0) {
                return Ok(lad);
            }
        }
        prev = Some(lad);
        cells *= 2;
    }
    Err(Error::NonConvergence { deltas })
}

/// `integral over the plane of g df` as a Pringsheim limit on graded square windows.
pub fn rs_improper(g: &Field2, f: &BvFunction2, tol: f64, ladder_factor: f64) -> Result<PringsheimLadder> {
    rs_improper_fields(g, &f.field(), &ImproperOptions::graded(tol, ladder_factor))
}

/// `rs_improper` with explicit ladder options.
pub fn rs_improper_with(g: &Field2, f: &BvFunction2, o: &ImproperOptions) -> Result<PringsheimLadder> {
    rs_improper_fields(g, &f.field(), o)
}

fn refine_1d(integrand: &Field1, integrator: &Field1, lo: f64, hi: f64, tol: f64, edge: &'static str) -> Result<Complex64> {
    let breaks = merged(&integrand.breaks, &integrator.breaks);
    let mut seq = Halving::default();
    let mut n = 16usize;
    for _ in 0..20 {
        let v = rs_sum_1d(integrand, integrator, &rs_cuts(lo, hi, n, &breaks))?;
        if let Some((v, _)) = seq.push(v, tol) {
            return Ok(v);
        }
        n *= 2;
    }
    Err(Error::EdgeNonConvergence { edge, deltas: seq.deltas })
}

/// The two sides of integration by parts on a compact rectangle
/// `[a,b] x [c,d]`:
///
/// `integral g df = [fg](b,d) - [fg](a,d) - [fg](b,c) + [fg](a,c)
///   - integral f(b,.) dg(b,.) + integral f(a,.) dg(a,.)
///   - integral f(.,d) dg(.,d) + integral f(.,c) dg(.,c) + integral f dg`.
pub fn integration_by_parts_compact(g: &Field2, f: &BvFunction2, rect: &Rect2, tol: f64) -> Result<(Complex64, Complex64)> {
    let fl = f.field();
    let lhs = refine_2d(g, &fl, rect, &RsOptions::with_tol(tol))?.value;
    let (a, b, c, d) = (rect.x_lo, rect.x_hi, rect.y_lo, rect.y_hi);
    let fg = |x: f64, y: f64| Ok::<_, Error>(f.try_eval(x, y)? * g.eval(x, y));
    let corners = fg(b, d)? - fg(a, d)? - fg(b, c)? + fg(a, c)?;
    let vertical = |x: f64| {
        let (ff, gg) = (f.handle(), g.clone());
        (
            Field1::new(move |t| Complex64::new(ff(x, t), 0.0)).with_breaks(&f.breaks_y),
            Field1::new(move |t| gg.eval(x, t)).with_breaks(&g.breaks_y),
        )
    };
    let horizontal = |y: f64| {
        let (ff, gg) = (f.handle(), g.clone());
        (
            Field1::new(move |t| Complex64::new(ff(t, y), 0.0)).with_breaks(&f.breaks_x),
            Field1::new(move |t| gg.eval(t, y)).with_breaks(&g.breaks_x),
        )
    };
    let (p, q) = vertical(b);
    let e_right = refine_1d(&p, &q, c, d, tol, "right")?;
    let (p, q) = vertical(a);
    let e_left = refine_1d(&p, &q, c, d, tol, "left")?;
    let (p, q) = horizontal(d);
    let e_top = refine_1d(&p, &q, a, b, tol, "top")?;
    let (p, q) = horizontal(c);
    let e_bottom = refine_1d(&p, &q, a, b, tol, "bottom")?;
    let inner = refine_2d(&fl, g, rect, &RsOptions::with_tol(tol))?.value;
    let rhs = corners - e_right + e_left - e_top + e_bottom + inner;
    Ok((lhs, rhs))
}

/// `(integral g df, integral f dg)` over the plane; the edge terms vanish in
/// the limit when `f` vanishes at infinity and `g` is bounded.
pub fn parts_identity_improper(g: &Field2, f: &BvFunction2, o: &ImproperOptions) -> Result<(Complex64, Complex64)> {
    let fl = f.field();
    let lhs = rs_improper_fields(g, &fl, o)?.value();
    let rhs = rs_improper_fields(&fl, g, o)?.value();
    Ok((lhs, rhs))
}

/// `(integral g dh, integral g rho dA)` with `h(t1,t2)` the integral of `rho`
/// over `[a,t1] x [c,t2]`, tabulated by cumulative cell quadrature.
pub fn reduce_to_riemann(g: &Field2, density: &Field2, rect: &Rect2, tol: f64) -> Result<(Complex64, Complex64)> {
    if !rect.is_compact() {
        return Err(Error::InvalidArgument("reduce_to_riemann needs a compact rectangle".into()));
    }
    let riemann = quad_2d(&g.mul(density), *rect, 0.125 * (rect.x_hi - rect.x_lo), 0.125 * (rect.y_hi - rect.y_lo))?;
    let mut seq = Halving::default();
    let mut n = 8usize;
    while n <= 2048 {
        let xs = rs_cuts(rect.x_lo, rect.x_hi, n, &density.breaks_x);
        let ys = rs_cuts(rect.y_lo, rect.y_hi, n, &density.breaks_y);
        let h = cumulative_table(density, &xs, &ys)?;
        let mut s = CNeumaier::new();
        for i in 0..xs.len() - 1 {
            let cx = 0.5 * (xs[i] + xs[i + 1]);
            for j in 0..ys.len() - 1 {
                let dh = h[i + 1][j + 1] - h[i][j + 1] - h[i + 1][j] + h[i][j];
                s.add(g.eval(cx, 0.5 * (ys[j] + ys[j + 1])) * dh);
            }
        }
        if let Some((v, _)) = seq.push(s.total(), tol) {
            return Ok((v, riemann));
        }
        n *= 2;
    }
    Err(Error::NonConvergence { deltas: seq.deltas })
}

/// `h` at the grid nodes: 2D prefix sums of per-cell Gauss-Legendre integrals.
fn cumulative_table(rho: &Field2, xs: &[f64], ys: &[f64]) -> Result<Vec<Vec<Complex64>>> {
    let cells: Vec<Vec<Complex64>> = (0..xs.len() - 1)
        .into_par_iter()
        .map(|i| {
            (0..ys.len() - 1)
                .map(|j| {
                    let mut s = CNeumaier::new();
                    for (x, wx) in mapped(gl8(), xs[i], xs[i + 1]) {
                        for (y, wy) in mapped(gl8(), ys[j], ys[j + 1]) {
                            s.add(rho.eval(x, y) * (wx * wy));
                        }
                    }
                    s.total()
                })
                .collect()
        })
        .collect();
    let (nx, ny) = (xs.len(), ys.len());
    let mut h = vec![vec![ZERO; ny]; nx];
    for i in 1..nx {
        for j in 1..ny {
            h[i][j] = cells[i - 1][j - 1] + h[i - 1][j] + h[i][j - 1] - h[i - 1][j - 1];
        }
    }
    if h.iter().flatten().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFinite { x: f64::NAN, y: f64::NAN });
    }
    Ok(h)
}

/// `t -> Var(u, (-inf, t])` tabulated on a fine grid; between nodes the last
/// node value plus `|u(t) - u(node)|`.
#[derive(Clone)]
pub struct CumulativeVariation {
    nodes: Vec<f64>,
    cum: Vec<f64>,
    u: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl CumulativeVariation {
    pub fn new(u: Arc<dyn Fn(f64) -> f64 + Send + Sync>, breaks: &[f64], scale: f64, half_width: f64) -> Self {
        let mut nodes = base_cuts(-half_width, half_width, breaks, scale, 0.25);
        for _ in 0..4 {
            let mut next = Vec::with_capacity(2 * nodes.len());
            for w in nodes.windows(2) {
                next.push(w[0]);
                next.push(0.5 * (w[0] + w[1]));
            }
            next.push(*nodes.last().unwrap());
            nodes = next;
        }
        let mut cum = Vec::with_capacity(nodes.len());
        let mut s = Neumaier::new();
        let mut prev = u(nodes[0]);
        cum.push(0.0);
        for &t in &nodes[1..] {
            let v = u(t);
            s.add((v - prev).abs());
            cum.push(s.total());
            prev = v;
        }
        CumulativeVariation { nodes, cum, u }
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t < self.nodes[0] {
            return 0.0;
        }
        let k = self.nodes.partition_point(|&n| n <= t) - 1;
        self.cum[k] + ((self.u)(t) - (self.u)(self.nodes[k])).abs()
    }

    pub fn total(&self) -> f64 {
        *self.cum.last().unwrap()
    }
}

/// `V(f; t1, t2)` on the plane: products of cumulative factor variations for
/// separable `f`, otherwise a bilinear interpolation of a cumulative
/// `|Delta f|` table on `[-w, w]^2`.
pub fn variation_integrator(f: &BvFunction2, half_width: f64) -> Result<Field2> {
    if let Some((u, v)) = f.factors() {
        let cu = CumulativeVariation::new(u.handle(), &u.breaks, u.scale, half_width);
        let cv = CumulativeVariation::new(v.handle(), &v.breaks, v.scale, half_width);
        let a = Field1::new(move |t| Complex64::new(cu.eval(t), 0.0)).with_breaks(&u.breaks);
        let b = Field1::new(move |t| Complex64::new(cv.eval(t), 0.0)).with_breaks(&v.breaks);
        return Ok(Field2::product(a, b));
    }
    let refine = |mut c: Vec<f64>| {
        for _ in 0..3 {
            let mut next = Vec::with_capacity(2 * c.len());
            for w in c.windows(2) {
                next.push(w[0]);
                next.push(0.5 * (w[0] + w[1]));
            }
            next.push(*c.last().unwrap());
            c = next;
        }
        c
    };
    let xs = refine(base_cuts(-half_width, half_width, &f.breaks_x, f.scale, 0.25));
    let ys = refine(base_cuts(-half_width, half_width, &f.breaks_y, f.scale, 0.25));
    let vals: Vec<Vec<f64>> =
        xs.par_iter().map(|&x| ys.iter().map(|&y| f.try_eval(x, y)).collect::<Result<Vec<_>>>()).collect::<Result<_>>()?;
    let (nx, ny) = (xs.len(), ys.len());
    let mut p = vec![vec![0.0; ny]; nx];
    for i in 1..nx {
        for j in 1..ny {
            let d = (vals[i][j] - vals[i - 1][j] - vals[i][j - 1] + vals[i - 1][j - 1]).abs();
            p[i][j] = d + p[i - 1][j] + p[i][j - 1] - p[i - 1][j - 1];
        }
    }
    let locate = |c: &[f64], t: f64| -> (usize, f64) {
        if t <= c[0] {
            return (0, 0.0);
        }
        if t >= c[c.len() - 1] {
            return (c.len() - 2, 1.0);
        }
        let k = c.partition_point(|&n| n <= t) - 1;
        (k, (t - c[k]) / (c[k + 1] - c[k]))
    };
    let out = Field2::new(move |x, y| {
        let (i, s) = locate(&xs, x);
        let (j, t) = locate(&ys, y);
        let v = (1.0 - s) * (1.0 - t) * p[i][j] + s * (1.0 - t) * p[i + 1][j] + (1.0 - s) * t * p[i][j + 1] + s * t * p[i + 1][j + 1];
        Complex64::new(v, 0.0)
    });
    Ok(out.with_breaks(&f.breaks_x, &f.breaks_y))
}

/// `(|integral g df|, integral |g| dV)` over the plane.
pub fn domination_check(g: &Field2, f: &BvFunction2, o: &ImproperOptions) -> Result<(f64, f64)> {
    let lhs = rs_improper_with(g, f, o)?.value().norm();
    let vfield = variation_integrator(f, 4096.0)?;
    let rhs = rs_improper_fields(&g.abs(), &vfield, o)?.value().re;
    Ok((lhs, rhs))
}

/// Both sides of the cosine-window identity on `[u1,u2] x [v1,v2]`:
/// `integral f(t1,t2) C_u(t1) C_v(t2) dA` against `integral f d(S_u S_v)`,
/// with `C` the cosine window and `S` its primitive.
pub fn cos_window_identity(f: &BvFunction2, u: (f64, f64), v: (f64, f64), tol: f64) -> Result<(Complex64, Complex64)> {
    let cw = |(a, b): (f64, f64)| Field1::new(move |t| Complex64::new(cos_window(a, b, t), 0.0)).with_anchors(&[0.0]);
    let sw = |(a, b): (f64, f64)| -> Result<Field1> {
        let k = KernelSpec::new(a, b)?;
        Ok(Field1::new(move |t| Complex64::new(std::f64::consts::PI * sin_window_primitive(&k, t), 0.0)).with_anchors(&[0.0]))
    };
    let w = u.1.max(v.1);
    let half = std::f64::consts::PI / w.max(1e-12);
    let o = ImproperOptions::periodic(tol, half);
    let fl = f.field();
    let density = fl.mul(&Field2::product(cw(u), cw(v)));
    let probe = [fl.breaks_x.as_slice(), fl.anchors_x.as_slice()].concat();
    let start = start_length(&probe, fl.scale);
    let quad = improper_quad_2d(&density, Axis::periodic(half, start), Axis::periodic(half, start), &o.ladder)?.value();
    let st = rs_improper_fields(&fl, &Field2::product(sw(u)?, sw(v)?), &o)?.value();
    Ok((quad, st))
}
