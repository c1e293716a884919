//! Panel quadrature and Stieltjes sums over blocks, plus the improper
//! drivers built from them.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::function::{Field1, Field2};
use crate::geometry::Rect2;
use crate::ladder::{binomial_weights, drive, Axis, AxisKind, LadderOptions, Line, Plane, PringsheimLadder};
use crate::quadrature::{gl8, mapped, panels, rs_cuts, sliver, CNeumaier, WidthRule};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

fn finite(z: Complex64, x: f64, y: f64) -> Result<Complex64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonFinite { x, y })
    }
}

fn clip(lo: f64, hi: f64, s: Option<(f64, f64)>, pad: bool) -> Option<(f64, f64)> {
    let (a, b) = match s {
        Some((a, b)) if pad => (a - sliver(a), b + sliver(b)),
        Some(s) => s,
        None => return Some((lo, hi)),
    };
    let (a, b) = (lo.max(a), hi.min(b));
    (a < b).then_some((a, b))
}

fn rect_support(r: Option<Rect2>, x: bool) -> Option<(f64, f64)> {
    r.map(|r| if x { (r.x_lo, r.x_hi) } else { (r.y_lo, r.y_hi) })
}

fn meet(a: Option<(f64, f64)>, b: Option<(f64, f64)>) -> Option<(f64, f64)> {
    match (a, b) {
        (Some(a), Some(b)) => Some((a.0.max(b.0), a.1.min(b.1))),
        (Some(a), None) | (None, Some(a)) => Some(a),
        (None, None) => None,
    }
}

fn width_rule(max_width: f64, scale: f64) -> WidthRule {
    let scale = if scale.is_finite() { scale } else { max_width };
    WidthRule { max_width, scale: scale.min(max_width) }
}

/// Widest panel allowed on blocks of `axis`.
pub(crate) fn panel_width(axis: &Axis) -> f64 {
    match axis.kind {
        AxisKind::Periodic { half_period } => 0.5 * half_period,
        AxisKind::Graded { .. } => f64::INFINITY,
    }
}

/// First window length: past every breakpoint and anchor by one scale.
pub(crate) fn start_length(points: &[f64], scale: f64) -> f64 {
    let far = points.iter().fold(0.0f64, |m, b| m.max(b.abs()));
    let s = if scale.is_finite() { scale.min(1.0) } else { 1.0 };
    far + s.max(0.25)
}

/// Gauss-Legendre panels over `[lo, hi]` clipped to the support.
pub fn quad_1d(phi: &Field1, lo: f64, hi: f64, max_width: f64) -> Result<Complex64> {
    let Some((a, b)) = clip(lo, hi, phi.support, false) else {
        return Ok(ZERO);
    };
    let mw = if max_width.is_finite() { max_width } else { b - a };
    let mut s = CNeumaier::new();
    for (p, q) in panels(a, b, &phi.breaks, &phi.anchors, width_rule(mw, phi.scale)) {
        for (t, w) in mapped(gl8(), p, q) {
            s.add(finite(phi.eval(t), t, f64::NAN)? * w);
        }
    }
    Ok(s.total())
}

/// Tensor panels over a rectangle; product fields factor into 1D rules.
pub fn quad_2d(field: &Field2, rect: Rect2, max_wx: f64, max_wy: f64) -> Result<Complex64> {
    if let Some(terms) = field.terms() {
        let mut s = CNeumaier::new();
        for (a, b) in terms {
            let ia = quad_1d(a, rect.x_lo, rect.x_hi, max_wx)?;
            if ia == ZERO {
                continue;
            }
            s.add(ia * quad_1d(b, rect.y_lo, rect.y_hi, max_wy)?);
        }
        return Ok(s.total());
    }
    let Some((x0, x1)) = clip(rect.x_lo, rect.x_hi, rect_support(field.support, true), false) else {
        return Ok(ZERO);
    };
    let Some((y0, y1)) = clip(rect.y_lo, rect.y_hi, rect_support(field.support, false), false) else {
        return Ok(ZERO);
    };
    let mwx = if max_wx.is_finite() { max_wx } else { x1 - x0 };
    let mwy = if max_wy.is_finite() { max_wy } else { y1 - y0 };
    let px = panels(x0, x1, &field.breaks_x, &field.anchors_x, width_rule(mwx, field.scale));
    let py = panels(y0, y1, &field.breaks_y, &field.anchors_y, width_rule(mwy, field.scale));
    let ynodes: Vec<(f64, f64)> = py.iter().flat_map(|&(p, q)| mapped(gl8(), p, q)).collect();
    let rows: Vec<Complex64> = px
        .par_iter()
        .map(|&(p, q)| {
            let mut s = CNeumaier::new();
            for (x, wx) in mapped(gl8(), p, q) {
                for &(y, wy) in &ynodes {
                    s.add(finite(field.eval(x, y), x, y)? * (wx * wy));
                }
            }
            Ok(s.total())
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().fold(CNeumaier::new(), |mut s, v| {
        s.add(v);
        s
    })
    .total())
}

/// `sum integrand(mid) * (integrator(c[k+1]) - integrator(c[k]))`.
pub fn rs_sum_1d(integrand: &Field1, integrator: &Field1, cuts: &[f64]) -> Result<Complex64> {
    let mut s = CNeumaier::new();
    let mut prev = finite(integrator.eval(cuts[0]), cuts[0], f64::NAN)?;
    for w in cuts.windows(2) {
        let next = finite(integrator.eval(w[1]), w[1], f64::NAN)?;
        let m = 0.5 * (w[0] + w[1]);
        let g = finite(integrand.eval(m), m, f64::NAN)?;
        s.add(g * (next - prev));
        prev = next;
    }
    Ok(s.total())
}

/// Tensor-grid Stieltjes sum with cell-centre tags.
pub fn rs_sum_2d(integrand: &Field2, integrator: &Field2, xs: &[f64], ys: &[f64]) -> Result<Complex64> {
    if let (Some(ta), Some(tb)) = (integrand.terms(), integrator.terms()) {
        let mut s = CNeumaier::new();
        for (a, b) in ta {
            for (c, d) in tb {
                let sx = rs_sum_1d(a, c, xs)?;
                if sx == ZERO {
                    continue;
                }
                s.add(sx * rs_sum_1d(b, d, ys)?);
            }
        }
        return Ok(s.total());
    }
    rs_sum_2d_dense(integrand, integrator, xs, ys)
}

/// The same sum without any factoring; the definition of record.
pub fn rs_sum_2d_dense(integrand: &Field2, integrator: &Field2, xs: &[f64], ys: &[f64]) -> Result<Complex64> {
    let nodes: Vec<Vec<Complex64>> = xs
        .par_iter()
        .map(|&x| ys.iter().map(|&y| finite(integrator.eval(x, y), x, y)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let rows: Vec<Complex64> = (0..xs.len() - 1)
        .into_par_iter()
        .map(|i| {
            let mut s = CNeumaier::new();
            let cx = 0.5 * (xs[i] + xs[i + 1]);
            for j in 0..ys.len() - 1 {
                let d = nodes[i + 1][j + 1] - nodes[i][j + 1] - nodes[i + 1][j] + nodes[i][j];
                if d == ZERO {
                    continue;
                }
                let cy = 0.5 * (ys[j] + ys[j + 1]);
                s.add(finite(integrand.eval(cx, cy), cx, cy)? * d);
            }
            Ok(s.total())
        })
        .collect::<Result<_>>()?;
    let mut s = CNeumaier::new();
    for r in rows {
        s.add(r);
    }
    Ok(s.total())
}

fn merged(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = a.iter().chain(b).copied().collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Stieltjes sum over one block with about `cells` cells, clipped to where
/// the terms can be nonzero.
pub(crate) fn rs_block_1d(integrand: &Field1, integrator: &Field1, lo: f64, hi: f64, cells: usize) -> Result<Complex64> {
    let region = meet(pad(integrand.support), pad(integrator.support));
    let Some((a, b)) = clip(lo, hi, region, false) else {
        return Ok(ZERO);
    };
    let n = ((cells as f64) * (b - a) / (hi - lo)).ceil().max(1.0) as usize;
    let cuts = rs_cuts(a, b, n, &merged(&integrand.breaks, &integrator.breaks));
    rs_sum_1d(integrand, integrator, &cuts)
}

fn pad(s: Option<(f64, f64)>) -> Option<(f64, f64)> {
    s.map(|(a, b)| (a - sliver(a), b + sliver(b)))
}

pub(crate) fn rs_block_2d(integrand: &Field2, integrator: &Field2, r: Rect2, cells: usize) -> Result<Complex64> {
    let rx = meet(pad(rect_support(integrand.support, true)), pad(rect_support(integrator.support, true)));
    let ry = meet(pad(rect_support(integrand.support, false)), pad(rect_support(integrator.support, false)));
    let (Some((x0, x1)), Some((y0, y1))) = (clip(r.x_lo, r.x_hi, rx, false), clip(r.y_lo, r.y_hi, ry, false)) else {
        return Ok(ZERO);
    };
    let nx = ((cells as f64) * (x1 - x0) / (r.x_hi - r.x_lo)).ceil().max(1.0) as usize;
    let ny = ((cells as f64) * (y1 - y0) / (r.y_hi - r.y_lo)).ceil().max(1.0) as usize;
    let xs = rs_cuts(x0, x1, nx, &merged(&integrand.breaks_x, &integrator.breaks_x));
    let ys = rs_cuts(y0, y1, ny, &merged(&integrand.breaks_y, &integrator.breaks_y));
    rs_sum_2d_dense(integrand, integrator, &xs, &ys)
}

/// Improper integral over the line.
pub fn improper_quad_1d(phi: &Field1, axis: Axis, opts: &LadderOptions) -> Result<PringsheimLadder> {
    let weights = binomial_weights(opts.averaging);
    let mw = panel_width(&axis);
    let mut line = Line::new(axis, |a, b| quad_1d(phi, a, b, mw));
    drive(&[axis], opts, |w| line.value(&w[0], &weights))
}

/// Improper integral over the plane; product fields run as products of lines.
pub fn improper_quad_2d(field: &Field2, ax: Axis, ay: Axis, opts: &LadderOptions) -> Result<PringsheimLadder> {
    let weights = binomial_weights(opts.averaging);
    let (mwx, mwy) = (panel_width(&ax), panel_width(&ay));
    if let Some(terms) = field.terms() {
        let mut lines: Vec<_> = terms
            .iter()
            .map(|(a, b)| (Line::new(ax, move |p, q| quad_1d(a, p, q, mwx)), Line::new(ay, move |p, q| quad_1d(b, p, q, mwy))))
            .collect();
        return drive(&[ax, ay], opts, |w| {
            let mut s = CNeumaier::new();
            for (lx, ly) in lines.iter_mut() {
                let vx = lx.value(&w[0], &weights)?;
                s.add(vx * ly.value(&w[1], &weights)?);
            }
            Ok(s.total())
        });
    }
    let mut plane = Plane::new(ax, ay, |r: Rect2| quad_2d(field, r, mwx, mwy));
    drive(&[ax, ay], opts, |w| plane.value(&w[0], &w[1], &weights))
}

/// Improper Stieltjes integral `integral of integrand d(integrator)` over the line.
pub fn improper_rs_1d(integrand: &Field1, integrator: &Field1, axis: Axis, cells: usize, opts: &LadderOptions) -> Result<PringsheimLadder> {
    let weights = binomial_weights(opts.averaging);
    let mut line = Line::new(axis, |a, b| rs_block_1d(integrand, integrator, a, b, cells));
    drive(&[axis], opts, |w| line.value(&w[0], &weights))
}

/// Improper Stieltjes integral over the plane with `cells` cells per block side.
pub fn improper_rs_2d(
    integrand: &Field2,
    integrator: &Field2,
    ax: Axis,
    ay: Axis,
    cells: usize,
    opts: &LadderOptions,
) -> Result<PringsheimLadder> {
    let weights = binomial_weights(opts.averaging);
    if let (Some(ta), Some(tb)) = (integrand.terms(), integrator.terms()) {
        let mut lines = Vec::new();
        for (a, b) in ta {
            for (c, d) in tb {
                lines.push((
                    Line::new(ax, move |p, q| rs_block_1d(a, c, p, q, cells)),
                    Line::new(ay, move |p, q| rs_block_1d(b, d, p, q, cells)),
                ));
            }
        }
        return drive(&[ax, ay], opts, |w| {
            let mut s = CNeumaier::new();
            for (lx, ly) in lines.iter_mut() {
                let vx = lx.value(&w[0], &weights)?;
                s.add(vx * ly.value(&w[1], &weights)?);
            }
            Ok(s.total())
        });
    }
    let mut plane = Plane::new(ax, ay, |r: Rect2| rs_block_2d(integrand, integrator, r, cells));
    drive(&[ax, ay], opts, |w| plane.value(&w[0], &w[1], &weights))
}
