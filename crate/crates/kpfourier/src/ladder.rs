//! Pringsheim window ladders.
//!
//! A window is a union of blocks along each axis. On a periodic axis the
//! block edges are multiples of a half-period once the window is wider than
//! one half-period (before that, the edges double from a start length). On
//! a graded axis the edges grow geometrically. Block values are cached, so
//! a rung only pays for the blocks it adds.

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Rect2;
use crate::quadrature::CNeumaier;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum AxisKind {
    Periodic { half_period: f64 },
    Graded { factor: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Axis {
    pub kind: AxisKind,
    pub start: f64,
}

impl Axis {
    pub fn periodic(half_period: f64, start: f64) -> Self {
        Axis { kind: AxisKind::Periodic { half_period }, start: start.max(1e-12) }
    }

    pub fn graded(start: f64, factor: f64) -> Self {
        Axis { kind: AxisKind::Graded { factor: factor.max(1.0 + 1e-9) }, start: start.max(1e-12) }
    }

    fn n_pre(&self) -> usize {
        match self.kind {
            AxisKind::Periodic { half_period } => {
                let mut n = 0;
                while n < 80 && self.start * 2f64.powi(n as i32) < half_period {
                    n += 1;
                }
                n
            }
            AxisKind::Graded { .. } => 0,
        }
    }

    /// Distance from the origin of edge `k` (`edge(0) = 0`).
    pub fn edge(&self, k: usize) -> f64 {
        if k == 0 {
            return 0.0;
        }
        match self.kind {
            AxisKind::Periodic { half_period } => {
                let np = self.n_pre();
                if k <= np {
                    self.start * 2f64.powi(k as i32 - 1)
                } else {
                    (k - np) as f64 * half_period
                }
            }
            AxisKind::Graded { factor } => self.start * factor.powi(k as i32 - 1),
        }
    }

    /// Block `k >= 0` is `[edge(k), edge(k+1)]`; block `-k-1` is its mirror.
    pub fn block(&self, idx: i64) -> (f64, f64) {
        if idx >= 0 {
            let k = idx as usize;
            (self.edge(k), self.edge(k + 1))
        } else {
            let k = (-idx - 1) as usize;
            (-self.edge(k + 1), -self.edge(k))
        }
    }

    fn rung(&self, r: usize, prev: Option<usize>, stretch: f64) -> RungWindow {
        let next = |i: usize| prev.map_or(i, |p| i.max(p + 1));
        match self.kind {
            AxisKind::Graded { .. } => RungWindow { left: r + 1, right: r + 1, average: false },
            AxisKind::Periodic { half_period } => {
                let np = self.n_pre();
                if r < np {
                    return RungWindow { left: r + 1, right: r + 1, average: false };
                }
                let len = self.start * 2f64.powi(r as i32);
                let m = ((len / half_period).ceil() as usize).max(1);
                let right = next(np + m);
                let m = right - np;
                let left = np + ((stretch * m as f64).ceil() as usize).max(1);
                RungWindow { left, right, average: true }
            }
        }
    }
}

/// Block counts of one axis at one rung; `average` means the value is the
/// binomially weighted mean over the next few half-periods on each side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RungWindow {
    pub left: usize,
    pub right: usize,
    pub average: bool,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LadderOptions {
    pub tol: f64,
    /// Number of consecutive small deltas required.
    pub k_consecutive: usize,
    pub max_rungs: usize,
    /// Order of the edge averaging on periodic axes (0 switches it off).
    pub averaging: usize,
    /// Left windows are `stretch` times longer than right ones (1 = symmetric).
    pub stretch: f64,
    /// Cap on blocks per side before giving up.
    pub max_blocks: usize,
}

impl Default for LadderOptions {
    fn default() -> Self {
        LadderOptions { tol: 1e-8, k_consecutive: 3, max_rungs: 40, averaging: 3, stretch: 1.0, max_blocks: 1 << 16 }
    }
}

impl LadderOptions {
    pub fn with_tol(tol: f64) -> Self {
        LadderOptions { tol, ..Default::default() }
    }
}

/// Truncation ladder of an improper integral.
#[derive(Debug, Clone, Serialize)]
pub struct PringsheimLadder {
    pub rungs: Vec<Rect2>,
    pub values: Vec<Complex64>,
    pub deltas: Vec<f64>,
    pub converged: bool,
    pub stall_count: usize,
}

impl PringsheimLadder {
    pub fn value(&self) -> Complex64 {
        self.values.last().copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub(crate) fn binomial_weights(order: usize) -> Vec<f64> {
    let mut w = vec![1.0];
    for _ in 0..order {
        let mut n = vec![0.0; w.len() + 1];
        for (i, x) in w.iter().enumerate() {
            n[i] += 0.5 * x;
            n[i + 1] += 0.5 * x;
        }
        w = n;
    }
    w
}

/// Largest block index an axis window touches, averaging included.
pub(crate) fn reach(w: &RungWindow, order: usize) -> (usize, usize) {
    if w.average {
        (w.left + order, w.right + order)
    } else {
        (w.left, w.right)
    }
}

/// Runs the rung loop. `eval` receives one window per axis and must return
/// the (averaged) truncated value.
pub(crate) fn drive(
    axes: &[Axis],
    opts: &LadderOptions,
    mut eval: impl FnMut(&[RungWindow]) -> Result<Complex64>,
) -> Result<PringsheimLadder> {
    let k = opts.k_consecutive.max(1);
    let mut ladder = PringsheimLadder { rungs: vec![], values: vec![], deltas: vec![], converged: false, stall_count: 0 };
    let mut prev: Vec<Option<usize>> = vec![None; axes.len()];
    let mut rising = 0usize;
    for r in 0..opts.max_rungs {
        let windows: Vec<RungWindow> =
            axes.iter().zip(&prev).map(|(a, p)| a.rung(r, *p, opts.stretch)).collect();
        if windows.iter().any(|w| {
            let (l, rr) = reach(w, opts.averaging);
            l.max(rr) > opts.max_blocks
        }) {
            break;
        }
        for (p, w) in prev.iter_mut().zip(&windows) {
            *p = Some(w.right);
        }
        let v = eval(&windows)?;
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite { x: f64::NAN, y: f64::NAN });
        }
        let ext = |i: usize| {
            let a = &axes[i];
            (-a.edge(windows[i].left), a.edge(windows[i].right))
        };
        let (x0, x1) = ext(0);
        let (y0, y1) = if axes.len() > 1 { ext(1) } else { (f64::NEG_INFINITY, f64::INFINITY) };
        ladder.rungs.push(Rect2 { x_lo: x0, x_hi: x1, y_lo: y0, y_hi: y1 });
        if let Some(last) = ladder.values.last() {
            let d = (v - last).norm();
            let warming = windows
                .iter()
                .zip(axes)
                .any(|(w, a)| matches!(a.kind, AxisKind::Periodic { .. }) && !w.average);
            if let (Some(&pd), false) = (ladder.deltas.last(), warming) {
                if d >= pd && d > opts.tol {
                    ladder.stall_count += 1;
                    rising += 1;
                } else {
                    rising = 0;
                }
            }
            ladder.deltas.push(d);
        }
        ladder.values.push(v);
        let n = ladder.deltas.len();
        if n >= k && ladder.deltas[n - k..].iter().all(|&d| d <= opts.tol) {
            ladder.converged = true;
            return Ok(ladder);
        }
        if rising > k {
            break;
        }
    }
    Err(Error::PringsheimStall { values: ladder.values, deltas: ladder.deltas })
}

/// Cached block values along one axis.
pub(crate) struct Line<F> {
    axis: Axis,
    block: F,
    right: Vec<Complex64>,
    left: Vec<Complex64>,
    pre_right: Vec<Complex64>,
    pre_left: Vec<Complex64>,
}

impl<F> Line<F>
where
    F: Fn(f64, f64) -> Result<Complex64> + Sync,
{
    pub fn new(axis: Axis, block: F) -> Self {
        let z = Complex64::new(0.0, 0.0);
        Line { axis, block, right: vec![], left: vec![], pre_right: vec![z], pre_left: vec![z] }
    }

    pub fn ensure(&mut self, left: usize, right: usize) -> Result<()> {
        let axis = self.axis;
        let block = &self.block;
        let grow = |have: usize, want: usize, sign: i64| -> Result<Vec<Complex64>> {
            (have..want)
                .into_par_iter()
                .map(|k| {
                    let idx = if sign > 0 { k as i64 } else { -(k as i64) - 1 };
                    let (a, b) = axis.block(idx);
                    block(a, b)
                })
                .collect()
        };
        let new_r = grow(self.right.len(), right, 1)?;
        let new_l = grow(self.left.len(), left, -1)?;
        for (vals, pre, new) in [(&mut self.right, &mut self.pre_right, new_r), (&mut self.left, &mut self.pre_left, new_l)] {
            for v in new {
                let mut s = CNeumaier::new();
                s.add(*pre.last().unwrap());
                s.add(v);
                pre.push(s.total());
                vals.push(v);
            }
        }
        Ok(())
    }

    pub fn sum(&self, left: usize, right: usize) -> Complex64 {
        self.pre_left[left] + self.pre_right[right]
    }

    /// Averaged window value for one rung.
    pub fn value(&mut self, w: &RungWindow, weights: &[f64]) -> Result<Complex64> {
        let order = weights.len() - 1;
        let (l, r) = reach(w, order);
        self.ensure(l, r)?;
        if !w.average {
            return Ok(self.sum(w.left, w.right));
        }
        let mut s = CNeumaier::new();
        for (a, wa) in weights.iter().enumerate() {
            for (b, wb) in weights.iter().enumerate() {
                s.add(self.sum(w.left + a, w.right + b) * (wa * wb));
            }
        }
        Ok(s.total())
    }
}

/// Cached block values on the plane.
pub(crate) struct Plane<F> {
    ax: Axis,
    ay: Axis,
    block: F,
    map: HashMap<(i64, i64), Complex64>,
    ext: (usize, usize, usize, usize),
    prefix: Vec<Complex64>,
}

impl<F> Plane<F>
where
    F: Fn(Rect2) -> Result<Complex64> + Sync,
{
    pub fn new(ax: Axis, ay: Axis, block: F) -> Self {
        Plane { ax, ay, block, map: HashMap::new(), ext: (0, 0, 0, 0), prefix: vec![Complex64::new(0.0, 0.0)] }
    }

    fn ensure(&mut self, lx: usize, rx: usize, ly: usize, ry: usize) -> Result<()> {
        let (elx, erx, ely, ery) = self.ext;
        let ext = (elx.max(lx), erx.max(rx), ely.max(ly), ery.max(ry));
        if ext == self.ext && !self.map.is_empty() {
            return Ok(());
        }
        let mut missing = Vec::new();
        for ix in -(ext.0 as i64)..ext.1 as i64 {
            for iy in -(ext.2 as i64)..ext.3 as i64 {
                if !self.map.contains_key(&(ix, iy)) {
                    missing.push((ix, iy));
                }
            }
        }
        let (ax, ay, block) = (self.ax, self.ay, &self.block);
        let vals: Vec<Complex64> = missing
            .par_iter()
            .map(|&(ix, iy)| {
                let (x0, x1) = ax.block(ix);
                let (y0, y1) = ay.block(iy);
                block(Rect2 { x_lo: x0, x_hi: x1, y_lo: y0, y_hi: y1 })
            })
            .collect::<Result<_>>()?;
        for (k, v) in missing.into_iter().zip(vals) {
            self.map.insert(k, v);
        }
        self.ext = ext;
        let nx = ext.0 + ext.1;
        let ny = ext.2 + ext.3;
        let mut prefix = vec![Complex64::new(0.0, 0.0); (nx + 1) * (ny + 1)];
        for i in 0..nx {
            let ix = i as i64 - ext.0 as i64;
            let mut row = CNeumaier::new();
            for j in 0..ny {
                let iy = j as i64 - ext.2 as i64;
                row.add(self.map[&(ix, iy)]);
                prefix[(i + 1) * (ny + 1) + j + 1] = prefix[i * (ny + 1) + j + 1] + row.total();
            }
        }
        self.prefix = prefix;
        Ok(())
    }

    fn sum(&self, lx: usize, rx: usize, ly: usize, ry: usize) -> Complex64 {
        let ny = self.ext.2 + self.ext.3;
        let at = |i: usize, j: usize| self.prefix[i * (ny + 1) + j];
        let (i0, i1) = (self.ext.0 - lx, self.ext.0 + rx);
        let (j0, j1) = (self.ext.2 - ly, self.ext.2 + ry);
        at(i1, j1) - at(i0, j1) - at(i1, j0) + at(i0, j0)
    }

    pub fn value(&mut self, wx: &RungWindow, wy: &RungWindow, weights: &[f64]) -> Result<Complex64> {
        let order = weights.len() - 1;
        let (lx, rx) = reach(wx, order);
        let (ly, ry) = reach(wy, order);
        self.ensure(lx, rx, ly, ry)?;
        let one = [1.0];
        let w_x: &[f64] = if wx.average { weights } else { &one };
        let w_y: &[f64] = if wy.average { weights } else { &one };
        let mut s = CNeumaier::new();
        for (a, wa) in w_x.iter().enumerate() {
            for (b, wb) in w_x.iter().enumerate() {
                for (c, wc) in w_y.iter().enumerate() {
                    for (d, wd) in w_y.iter().enumerate() {
                        let v = self.sum(wx.left + a, wx.right + b, wy.left + c, wy.right + d);
                        s.add(v * (wa * wb * wc * wd));
                    }
                }
            }
        }
        Ok(s.total())
    }
}
