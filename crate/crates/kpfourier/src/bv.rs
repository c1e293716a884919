//! Mixed differences, Vitali and Hardy variation, tails, the total-variation
//! function and a grid version of the variation measure.
//!
//! Suprema over partitions are approached from below by nested refinement:
//! every level inserts the midpoint of every cell, so by the triangle
//! inequality the sums never decrease. Unbounded rectangles go through a
//! ladder of windows `[-2^k, 2^k]` intersected with the rectangle.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::BvFunction2;
use crate::geometry::{GridPartition, Rect2};
use crate::quadrature::Neumaier;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariationEstimate {
    pub value: f64,
    pub partition_norm: f64,
    pub refinement_levels: usize,
    pub lower_bound_only: bool,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct VariationOptions {
    /// Relative change between two levels that counts as converged.
    pub tol: f64,
    pub max_levels: usize,
    /// Relative change between windows for unbounded rectangles.
    pub window_tol: f64,
    /// Largest window exponent tried (`2^max_window_exp`).
    pub max_window_exp: i32,
    /// Step of the `asinh` grid used as level 0.
    pub theta_step: f64,
    /// Node budget per level.
    pub max_nodes: usize,
}

impl Default for VariationOptions {
    fn default() -> Self {
        VariationOptions { tol: 1e-6, max_levels: 8, window_tol: 1e-4, max_window_exp: 30, theta_step: 0.25, max_nodes: 1 << 24 }
    }
}

impl VariationOptions {
    pub fn with_tol(tol: f64) -> Self {
        VariationOptions { tol, window_tol: tol.max(1e-4), ..Default::default() }
    }
}

/// `f(b,d) - f(a,d) - f(b,c) + f(a,c)`.
pub fn mixed_difference(f: &BvFunction2, rect: &Rect2) -> Result<f64> {
    if !rect.is_compact() {
        return Err(Error::InvalidArgument("mixed difference needs a compact rectangle".into()));
    }
    let (a, b, c, d) = (rect.x_lo, rect.x_hi, rect.y_lo, rect.y_hi);
    Ok(f.try_eval(b, d)? - f.try_eval(a, d)? - f.try_eval(b, c)? + f.try_eval(a, c)?)
}

/// Level-0 cuts of `[lo, hi]`: uniform in `asinh(t / scale)`, plus breakpoints.
pub(crate) fn base_cuts(lo: f64, hi: f64, breaks: &[f64], scale: f64, step: f64) -> Vec<f64> {
    let c = if scale.is_finite() && scale > 0.0 { scale } else { 1.0 };
    let (ta, tb) = ((lo / c).asinh(), (hi / c).asinh());
    let n = (((tb - ta) / step).ceil() as usize).max(4);
    let mut cuts: Vec<f64> = (0..=n).map(|k| c * (ta + (tb - ta) * k as f64 / n as f64).sinh()).collect();
    cuts[0] = lo;
    cuts[n] = hi;
    cuts.extend(breaks.iter().copied().filter(|&b| b > lo && b < hi));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts
}

fn refine(cuts: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * cuts.len());
    for w in cuts.windows(2) {
        out.push(w[0]);
        let m = 0.5 * (w[0] + w[1]);
        if m > w[0] && m < w[1] {
            out.push(m);
        }
    }
    out.push(*cuts.last().unwrap());
    out
}

fn max_gap(cuts: &[f64]) -> f64 {
    cuts.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
}

/// `sum |f(c[k+1]) - f(c[k])|`.
pub fn line_sum(u: &(dyn Fn(f64) -> f64 + Sync), cuts: &[f64]) -> Result<f64> {
    let mut s = Neumaier::new();
    let mut prev = u(cuts[0]);
    if !prev.is_finite() {
        return Err(Error::NonFinite { x: cuts[0], y: f64::NAN });
    }
    for &c in &cuts[1..] {
        let v = u(c);
        if !v.is_finite() {
            return Err(Error::NonFinite { x: c, y: f64::NAN });
        }
        s.add((v - prev).abs());
        prev = v;
    }
    Ok(s.total())
}

/// `sum |Delta f|` over the tensor grid; rows in parallel, fixed reduction order.
pub fn grid_sum(f: &BvFunction2, xs: &[f64], ys: &[f64]) -> Result<f64> {
    let nodes: Vec<Vec<f64>> = xs
        .par_iter()
        .map(|&x| ys.iter().map(|&y| f.try_eval(x, y)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let rows: Vec<f64> = (0..xs.len() - 1)
        .into_par_iter()
        .map(|i| {
            let mut s = Neumaier::new();
            for j in 0..ys.len() - 1 {
                let (a, b, c, d) = (nodes[i + 1][j + 1], nodes[i][j + 1], nodes[i + 1][j], nodes[i][j]);
                let delta = (a - b - c + d).abs();
                // differences at rounding level carry no variation
                if delta > 8.0 * f64::EPSILON * (a.abs() + b.abs() + c.abs() + d.abs()) {
                    s.add(delta);
                }
            }
            s.total()
        })
        .collect();
    let mut s = Neumaier::new();
    for r in rows {
        s.add(r);
    }
    Ok(s.total())
}

/// Golden-section search for the extremum of `u` in `[a, b]`; `sign` is
/// +1 for a maximum, -1 for a minimum.
fn golden_extremum(u: &(dyn Fn(f64) -> f64 + Sync), mut a: f64, mut b: f64, sign: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (sign * u(c), sign * u(d));
    for _ in 0..80 {
        if !(b - a > 4.0 * f64::EPSILON * (a.abs() + b.abs())) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = sign * u(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = sign * u(d);
        }
    }
    if fc > fd {
        c
    } else {
        d
    }
}

/// `line_sum` with every sampled local extremum sharpened by a golden-section
/// search between its neighbours, and both end cells searched for a hidden
/// maximum and minimum. Still a lower bound for the variation.
fn polished_sum(u: &(dyn Fn(f64) -> f64 + Sync), cuts: &[f64]) -> Result<f64> {
    let n = cuts.len();
    let vals: Vec<f64> = cuts.iter().map(|&c| u(c)).collect();
    if let Some(k) = vals.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { x: cuts[k], y: f64::NAN });
    }
    let mut pts: Vec<(f64, f64)> = cuts.iter().copied().zip(vals.iter().copied()).collect();
    let mut probe = |a: f64, b: f64, sign: f64, than: f64| {
        let t = golden_extremum(u, a, b, sign);
        let v = u(t);
        if v.is_finite() && sign * (v - than) > 0.0 {
            pts.push((t, v));
        }
    };
    for k in 1..n - 1 {
        let (l, m, r) = (vals[k - 1], vals[k], vals[k + 1]);
        if m > l && m > r {
            probe(cuts[k - 1], cuts[k + 1], 1.0, m);
        } else if m < l && m < r {
            probe(cuts[k - 1], cuts[k + 1], -1.0, m);
        }
    }
    for k in [0, n - 2] {
        let (a, b) = (cuts[k], cuts[k + 1]);
        probe(a, b, 1.0, vals[k].max(vals[k + 1]));
        probe(a, b, -1.0, vals[k].min(vals[k + 1]));
    }
    pts.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut s = Neumaier::new();
    for w in pts.windows(2) {
        s.add((w[1].1 - w[0].1).abs());
    }
    Ok(s.total())
}

fn converged(prev: f64, cur: f64, tol: f64) -> bool {
    (cur == 0.0 && prev == 0.0) || (cur - prev).abs() <= tol * cur.abs()
}

/// Out of levels: accept if the last increments shrink geometrically and
/// their projected sum is within `10 tol`.
fn settled(history: &[f64], tol: f64) -> bool {
    let n = history.len();
    if n < 5 {
        return false;
    }
    let d_last = history[n - 1] - history[n - 2];
    let d_old = history[n - 4] - history[n - 5];
    if d_last == 0.0 {
        return true;
    }
    if !(d_old > 0.0) {
        return false;
    }
    let q = (d_last / d_old).cbrt();
    q < 0.6 && d_last * q / (1.0 - q) <= 10.0 * tol * history[n - 1].abs()
}

/// Nested refinement on a compact rectangle.
fn compact_2d(f: &BvFunction2, r: &Rect2, opts: &VariationOptions) -> Result<VariationEstimate> {
    if let Some((u, v)) = f.factors() {
        let ex = compact_1d(&|t| u.eval(t), &u.breaks, r.x_lo, r.x_hi, u.scale, opts)?;
        let ey = compact_1d(&|t| v.eval(t), &v.breaks, r.y_lo, r.y_hi, v.scale, opts)?;
        return Ok(VariationEstimate {
            value: ex.value * ey.value,
            partition_norm: ex.partition_norm.hypot(ey.partition_norm),
            refinement_levels: ex.refinement_levels.max(ey.refinement_levels),
            lower_bound_only: true,
        });
    }
    let mut xs = base_cuts(r.x_lo, r.x_hi, &f.breaks_x, f.scale, opts.theta_step);
    let mut ys = base_cuts(r.y_lo, r.y_hi, &f.breaks_y, f.scale, opts.theta_step);
    let mut history = vec![grid_sum(f, &xs, &ys)?];
    for level in 1..=opts.max_levels {
        let (nx, ny) = (refine(&xs), refine(&ys));
        if nx.len() * ny.len() > opts.max_nodes {
            break;
        }
        xs = nx;
        ys = ny;
        let v = grid_sum(f, &xs, &ys)?.max(*history.last().unwrap());
        let prev = *history.last().unwrap();
        history.push(v);
        // a sign-coherent coarse grid can repeat its sum exactly once
        if converged(prev, v, opts.tol) && history.len() >= 3 && converged(history[history.len() - 3], prev, opts.tol) {
            return Ok(VariationEstimate {
                value: v,
                partition_norm: max_gap(&xs).hypot(max_gap(&ys)),
                refinement_levels: level,
                lower_bound_only: true,
            });
        }
    }
    finish(history, max_gap(&xs).hypot(max_gap(&ys)), opts.tol)
}

fn finish(history: Vec<f64>, norm: f64, tol: f64) -> Result<VariationEstimate> {
    if settled(&history, tol) {
        let value = *history.last().unwrap();
        return Ok(VariationEstimate { value, partition_norm: norm, refinement_levels: history.len() - 1, lower_bound_only: true });
    }
    Err(Error::VariationUnbounded { last: *history.last().unwrap(), history })
}

fn compact_1d(
    u: &(dyn Fn(f64) -> f64 + Sync),
    breaks: &[f64],
    lo: f64,
    hi: f64,
    scale: f64,
    opts: &VariationOptions,
) -> Result<VariationEstimate> {
    let mut xs = base_cuts(lo, hi, breaks, scale, opts.theta_step);
    let mut history = vec![polished_sum(u, &xs)?];
    // 1D refinement is cheap; allow a few more levels than in 2D.
    for level in 1..=opts.max_levels + 6 {
        xs = refine(&xs);
        let prev = *history.last().unwrap();
        let v = polished_sum(u, &xs)?.max(prev);
        history.push(v);
        if converged(prev, v, opts.tol) && history.len() >= 3 && converged(history[history.len() - 3], prev, opts.tol) {
            return Ok(VariationEstimate { value: v, partition_norm: max_gap(&xs), refinement_levels: level, lower_bound_only: true });
        }
    }
    finish(history, max_gap(&xs), opts.tol)
}

fn first_window_exp(points: impl Iterator<Item = f64>) -> i32 {
    let far = points.filter(|v| v.is_finite()).fold(0.0f64, |m, v| m.max(v.abs()));
    ((far + 1.0).log2().ceil() as i32).max(1)
}

/// Window ladder over `k`; `window(k)` returns the estimate on the k-th window.
fn window_ladder(
    k0: i32,
    opts: &VariationOptions,
    mut window: impl FnMut(f64) -> Result<VariationEstimate>,
) -> Result<VariationEstimate> {
    let mut history: Vec<f64> = Vec::new();
    let mut small = 0;
    let mut last: Option<VariationEstimate> = None;
    for k in k0..=opts.max_window_exp {
        let mut e = window(2f64.powi(k))?;
        if let Some(p) = &last {
            e.value = e.value.max(p.value);
            if converged(p.value, e.value, opts.window_tol) {
                small += 1;
            } else {
                small = 0;
            }
        }
        history.push(e.value);
        last = Some(e);
        if small >= 2 {
            return Ok(e);
        }
    }
    Err(Error::VariationUnbounded { last: history.last().copied().unwrap_or(0.0), history })
}

/// Vitali variation with explicit options.
pub fn vitali_variation_with(f: &BvFunction2, rect: &Rect2, opts: &VariationOptions) -> Result<VariationEstimate> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument("tol must be positive".into()));
    }
    if rect.is_compact() {
        return compact_2d(f, rect, opts);
    }
    let pts = [rect.x_lo, rect.x_hi, rect.y_lo, rect.y_hi]
        .into_iter()
        .chain(f.breaks_x.iter().copied())
        .chain(f.breaks_y.iter().copied())
        .chain(f.anchors_x.iter().copied())
        .chain(f.anchors_y.iter().copied());
    window_ladder(first_window_exp(pts), opts, |l| {
        let w = Rect2 { x_lo: -l, x_hi: l, y_lo: -l, y_hi: l };
        match rect.intersect(&w) {
            Some(r) => compact_2d(f, &r, opts),
            None => Ok(VariationEstimate { value: 0.0, partition_norm: 0.0, refinement_levels: 0, lower_bound_only: true }),
        }
    })
}

/// Vitali variation `Var(f, rect)`; `rect` may have infinite sides.
pub fn vitali_variation(f: &BvFunction2, rect: &Rect2, tol: f64, max_levels: usize) -> Result<VariationEstimate> {
    vitali_variation_with(f, rect, &VariationOptions { tol, max_levels, ..VariationOptions::with_tol(tol) })
}

/// One-dimensional variation of `u` over `[lo, hi]` (ends may be infinite).
pub fn variation_1d(
    u: &(dyn Fn(f64) -> f64 + Sync),
    breaks: &[f64],
    lo: f64,
    hi: f64,
    scale: f64,
    opts: &VariationOptions,
) -> Result<VariationEstimate> {
    if lo.is_finite() && hi.is_finite() {
        return compact_1d(u, breaks, lo, hi, scale, opts);
    }
    let inner = VariationOptions { tol: opts.tol.min(0.1 * opts.window_tol), ..*opts };
    let pts = [lo, hi].into_iter().chain(breaks.iter().copied());
    window_ladder(first_window_exp(pts), opts, |l| {
        let (a, b) = (lo.max(-l), hi.min(l));
        if a < b {
            compact_1d(u, breaks, a, b, scale, &inner)
        } else {
            Ok(VariationEstimate { value: 0.0, partition_norm: 0.0, refinement_levels: 0, lower_bound_only: true })
        }
    })
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HardyVariation {
    pub vitali: VariationEstimate,
    pub section_x: VariationEstimate,
    pub section_y: VariationEstimate,
    /// `(x0, y0)`: `section_x` is taken along `y = y0`, `section_y` along `x = x0`.
    pub anchors: (f64, f64),
}

fn midline(lo: f64, hi: f64) -> f64 {
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => 0.5 * (lo + hi),
        (true, false) => lo,
        (false, true) => hi,
        (false, false) => 0.0,
    }
}

/// Vitali variation plus the variations of the sections `f(., y0)` and `f(x0, .)`.
pub fn hardy_variation(f: &BvFunction2, rect: &Rect2, anchors: Option<(f64, f64)>, tol: f64) -> Result<HardyVariation> {
    let opts = VariationOptions::with_tol(tol);
    let (x0, y0) = anchors.unwrap_or((midline(rect.x_lo, rect.x_hi), midline(rect.y_lo, rect.y_hi)));
    let vitali = vitali_variation_with(f, rect, &opts)?;
    let section_x = variation_1d(&|t| f.eval(t, y0), &f.breaks_x, rect.x_lo, rect.x_hi, f.scale, &opts)?;
    let section_y = variation_1d(&|t| f.eval(x0, t), &f.breaks_y, rect.y_lo, rect.y_hi, f.scale, &opts)?;
    Ok(HardyVariation { vitali, section_x, section_y, anchors: (x0, y0) })
}

/// `Var(f, [m,inf) x R)`, `Var(f, (-inf,-m] x R)`, `Var(f, R x [m,inf))`, `Var(f, R x (-inf,-m])`.
pub fn tail_variation(f: &BvFunction2, m: f64, tol: f64) -> Result<[f64; 4]> {
    if !(m > 0.0) {
        return Err(Error::InvalidArgument("tail start must be positive".into()));
    }
    let inf = f64::INFINITY;
    let rects = [
        Rect2 { x_lo: m, x_hi: inf, y_lo: -inf, y_hi: inf },
        Rect2 { x_lo: -inf, x_hi: -m, y_lo: -inf, y_hi: inf },
        Rect2 { x_lo: -inf, x_hi: inf, y_lo: m, y_hi: inf },
        Rect2 { x_lo: -inf, x_hi: inf, y_lo: -inf, y_hi: -m },
    ];
    let opts = VariationOptions::with_tol(tol);
    let mut out = [0.0; 4];
    for (o, r) in out.iter_mut().zip(rects) {
        *o = vitali_variation_with(f, &r, &opts)?.value;
    }
    Ok(out)
}

/// `V(f; t1, t2) = Var(f, (-inf, t1] x (-inf, t2])`.
pub fn total_variation_function(f: &BvFunction2, t1: f64, t2: f64, tol: f64) -> Result<f64> {
    let r = Rect2::new(f64::NEG_INFINITY, t1, f64::NEG_INFINITY, t2)?;
    Ok(vitali_variation_with(f, &r, &VariationOptions::with_tol(tol))?.value)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VariationMeasure {
    pub grid: GridPartition,
    /// Row-major over x cells, then y cells.
    pub masses: Vec<f64>,
    pub total: f64,
}

impl VariationMeasure {
    pub fn mass(&self, i: usize, j: usize) -> f64 {
        self.masses[i * (self.grid.y_cuts.len() - 1) + j]
    }
}

/// Cell-local Vitali variation of every cell of `grid`.
pub fn variation_measure(f: &BvFunction2, grid: &GridPartition, tol: f64) -> Result<VariationMeasure> {
    let opts = VariationOptions::with_tol(tol);
    let cells: Vec<Rect2> = grid.cells().collect();
    let masses: Vec<f64> = cells
        .par_iter()
        .map(|c| compact_2d(f, c, &opts).map(|e| e.value))
        .collect::<Result<_>>()?;
    let mut s = Neumaier::new();
    for &m in &masses {
        s.add(m);
    }
    Ok(VariationMeasure { grid: grid.clone(), masses, total: s.total() })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TailViolation {
    pub x: f64,
    pub y: f64,
    pub value: f64,
    /// Which bound: `x+`, `x-`, `y+`, `y-`.
    pub side: String,
    pub bound: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SectionalViolation {
    /// `x` for sections `f(x, .)`, `y` for `f(., y)`.
    pub axis: String,
    pub anchor: f64,
    pub last_value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub samples: usize,
    pub tail_violations: Vec<TailViolation>,
    pub sectional_violations: Vec<SectionalViolation>,
    pub errors: Vec<String>,
}

impl DiagnosticsReport {
    pub fn passed(&self) -> bool {
        self.tail_violations.is_empty() && self.sectional_violations.is_empty() && self.errors.is_empty()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DiagnosticOptions {
    pub sample_box: Rect2,
    pub grid: usize,
    /// Relative slack on the tail bounds (the estimates are lower bounds).
    pub slack: f64,
    /// Section values at the last ladder radius must be below this.
    pub vanish_tol: f64,
    pub variation_tol: f64,
}

impl Default for DiagnosticOptions {
    fn default() -> Self {
        DiagnosticOptions {
            sample_box: Rect2 { x_lo: -4.0, x_hi: 4.0, y_lo: -4.0, y_hi: 4.0 },
            grid: 20,
            slack: 1e-3,
            vanish_tol: 1e-2,
            variation_tol: 1e-3,
        }
    }
}

/// Decay diagnostics with default sampling.
pub fn bv_zero_diagnostics(f: &BvFunction2, ladder: &[f64]) -> DiagnosticsReport {
    bv_zero_diagnostics_with(f, ladder, &DiagnosticOptions::default())
}

/// (a) `|f(x,y)|` against the four half-plane tail variations through the
/// point, (b) sections `f(a, y)`, `f(x, b)` along the radius ladder.
pub fn bv_zero_diagnostics_with(f: &BvFunction2, ladder: &[f64], o: &DiagnosticOptions) -> DiagnosticsReport {
    let n = o.grid.max(2);
    let xs = crate::geometry::linspace(o.sample_box.x_lo, o.sample_box.x_hi, n - 1);
    let ys = crate::geometry::linspace(o.sample_box.y_lo, o.sample_box.y_hi, n - 1);
    let inf = f64::INFINITY;
    // Estimates are lower bounds, so a coarse estimate that already exceeds
    // |f| settles a line; only the remaining lines are refined.
    let bounds = |tol: f64, x: bool, t: f64| -> Result<(f64, f64)> {
        let vopts = VariationOptions::with_tol(tol);
        let half = |r: Rect2| vitali_variation_with(f, &r, &vopts).map(|e| e.value);
        if x {
            Ok((
                half(Rect2 { x_lo: t, x_hi: inf, y_lo: -inf, y_hi: inf })?,
                half(Rect2 { x_lo: -inf, x_hi: t, y_lo: -inf, y_hi: inf })?,
            ))
        } else {
            Ok((
                half(Rect2 { x_lo: -inf, x_hi: inf, y_lo: t, y_hi: inf })?,
                half(Rect2 { x_lo: -inf, x_hi: inf, y_lo: -inf, y_hi: t })?,
            ))
        }
    };
    let coarse = o.variation_tol.max(1e-2);
    let mut xb: Vec<Result<(f64, f64)>> = xs.par_iter().map(|&x| bounds(coarse, true, x)).collect();
    let mut yb: Vec<Result<(f64, f64)>> = ys.par_iter().map(|&y| bounds(coarse, false, y)).collect();
    let line_max_x: Vec<f64> = xs.iter().map(|&x| ys.iter().map(|&y| f.eval(x, y).abs()).fold(0.0, f64::max)).collect();
    let line_max_y: Vec<f64> = ys.iter().map(|&y| xs.iter().map(|&x| f.eval(x, y).abs()).fold(0.0, f64::max)).collect();
    let short = |b: &Result<(f64, f64)>, m: f64| match b {
        Ok((p, q)) => m > p.min(*q),
        Err(_) => true,
    };
    for (i, &x) in xs.iter().enumerate() {
        if short(&xb[i], line_max_x[i]) {
            xb[i] = bounds(o.variation_tol, true, x);
        }
    }
    for (j, &y) in ys.iter().enumerate() {
        if short(&yb[j], line_max_y[j]) {
            yb[j] = bounds(o.variation_tol, false, y);
        }
    }
    let mut errors = Vec::new();
    let mut tail_violations = Vec::new();
    for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in ys.iter().enumerate() {
            let v = f.eval(x, y).abs();
            let (bx, by) = match (&xb[i], &yb[j]) {
                (Ok(a), Ok(b)) => (*a, *b),
                (Err(e), _) | (_, Err(e)) => {
                    if i == 0 || j == 0 {
                        errors.push(format!("({x}, {y}): {e}"));
                    }
                    continue;
                }
            };
            for (side, bound) in [("x+", bx.0), ("x-", bx.1), ("y+", by.0), ("y-", by.1)] {
                if v > bound * (1.0 + o.slack) + 1e-12 {
                    tail_violations.push(TailViolation { x, y, value: v, side: side.into(), bound });
                }
            }
        }
    }
    errors.dedup();
    let mut sectional_violations = Vec::new();
    if let Some(&last) = ladder.iter().max_by(|a, b| a.total_cmp(b)) {
        for &y in &ys {
            let tail = f.eval(last, y).abs().max(f.eval(-last, y).abs());
            if !(tail <= o.vanish_tol) {
                sectional_violations.push(SectionalViolation { axis: "y".into(), anchor: y, last_value: tail });
            }
        }
        for &x in &xs {
            let tail = f.eval(x, last).abs().max(f.eval(x, -last).abs());
            if !(tail <= o.vanish_tol) {
                sectional_violations.push(SectionalViolation { axis: "x".into(), anchor: x, last_value: tail });
            }
        }
    }
    DiagnosticsReport { samples: xs.len() * ys.len(), tail_violations, sectional_violations, errors }
}

/// Quick decay probe along rays and sections, used as a precondition.
pub fn decay_probe(f: &BvFunction2, radii: &[f64], tol: f64) -> bool {
    if let Some(v) = f.vanishes_at_infinity {
        return v;
    }
    let Some(&r) = radii.iter().max_by(|a, b| a.total_cmp(b)) else {
        return true;
    };
    let mut worst = 0.0f64;
    for k in 0..16 {
        let th = std::f64::consts::TAU * k as f64 / 16.0 + 0.1;
        worst = worst.max(f.eval(r * th.cos(), r * th.sin()).abs());
    }
    for s in [-2.0, -1.0, 0.0, 1.0, 2.0, 3.0] {
        for v in [f.eval(r, s), f.eval(-r, s), f.eval(s, r), f.eval(s, -r)] {
            worst = worst.max(v.abs());
        }
    }
    worst <= tol
}
