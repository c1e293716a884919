//! Rectangles with possibly infinite sides and finite grid partitions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect2 {
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
}

impl Rect2 {
    pub fn new(x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64) -> Result<Self> {
        let bad = |v: f64| v.is_nan();
        if bad(x_lo) || bad(x_hi) || bad(y_lo) || bad(y_hi) || !(x_lo < x_hi) || !(y_lo < y_hi) {
            return Err(Error::InvalidArgument(format!(
                "rectangle [{x_lo}, {x_hi}] x [{y_lo}, {y_hi}] is empty or malformed"
            )));
        }
        Ok(Rect2 { x_lo, x_hi, y_lo, y_hi })
    }

    /// Square `[lo, hi]^2`.
    pub fn square(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, hi, lo, hi)
    }

    pub fn plane() -> Self {
        Rect2 {
            x_lo: f64::NEG_INFINITY,
            x_hi: f64::INFINITY,
            y_lo: f64::NEG_INFINITY,
            y_hi: f64::INFINITY,
        }
    }

    pub fn is_compact(&self) -> bool {
        self.x_lo.is_finite() && self.x_hi.is_finite() && self.y_lo.is_finite() && self.y_hi.is_finite()
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x_lo && x <= self.x_hi && y >= self.y_lo && y <= self.y_hi
    }

    pub fn intersect(&self, other: &Rect2) -> Option<Rect2> {
        let r = Rect2 {
            x_lo: self.x_lo.max(other.x_lo),
            x_hi: self.x_hi.min(other.x_hi),
            y_lo: self.y_lo.max(other.y_lo),
            y_hi: self.y_hi.min(other.y_hi),
        };
        (r.x_lo < r.x_hi && r.y_lo < r.y_hi).then_some(r)
    }

    pub fn translate(&self, dx: f64, dy: f64) -> Rect2 {
        Rect2 {
            x_lo: self.x_lo + dx,
            x_hi: self.x_hi + dx,
            y_lo: self.y_lo + dy,
            y_hi: self.y_hi + dy,
        }
    }

    pub fn diagonal(&self) -> f64 {
        (self.x_hi - self.x_lo).hypot(self.y_hi - self.y_lo)
    }

    /// True if `self` lies strictly inside `other` (for nested ladders).
    pub fn strictly_inside(&self, other: &Rect2) -> bool {
        other.x_lo <= self.x_lo
            && self.x_hi <= other.x_hi
            && other.y_lo <= self.y_lo
            && self.y_hi <= other.y_hi
            && self != other
    }
}

/// Tensor grid on a compact rectangle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPartition {
    pub x_cuts: Vec<f64>,
    pub y_cuts: Vec<f64>,
    pub norm: f64,
}

impl GridPartition {
    pub fn new(x_cuts: Vec<f64>, y_cuts: Vec<f64>) -> Result<Self> {
        for cuts in [&x_cuts, &y_cuts] {
            if cuts.len() < 2 || cuts.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidArgument("a grid needs at least two finite cuts per axis".into()));
            }
            if cuts.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(Error::InvalidArgument("grid cuts must be strictly increasing".into()));
            }
        }
        let mut norm = 0.0f64;
        for wx in x_cuts.windows(2) {
            for wy in y_cuts.windows(2) {
                norm = norm.max((wx[1] - wx[0]).hypot(wy[1] - wy[0]));
            }
        }
        Ok(GridPartition { x_cuts, y_cuts, norm })
    }

    /// `nx` by `ny` equal cells on a compact rectangle.
    pub fn uniform(rect: &Rect2, nx: usize, ny: usize) -> Result<Self> {
        if !rect.is_compact() || nx == 0 || ny == 0 {
            return Err(Error::InvalidArgument("uniform grid needs a compact rectangle and positive counts".into()));
        }
        Self::new(linspace(rect.x_lo, rect.x_hi, nx), linspace(rect.y_lo, rect.y_hi, ny))
    }

    pub fn rect(&self) -> Rect2 {
        Rect2 {
            x_lo: self.x_cuts[0],
            x_hi: *self.x_cuts.last().unwrap(),
            y_lo: self.y_cuts[0],
            y_hi: *self.y_cuts.last().unwrap(),
        }
    }

    pub fn cells(&self) -> impl Iterator<Item = Rect2> + '_ {
        self.x_cuts.windows(2).flat_map(move |wx| {
            self.y_cuts.windows(2).map(move |wy| Rect2 {
                x_lo: wx[0],
                x_hi: wx[1],
                y_lo: wy[0],
                y_hi: wy[1],
            })
        })
    }

    pub fn cell_count(&self) -> usize {
        (self.x_cuts.len() - 1) * (self.y_cuts.len() - 1)
    }
}

/// `n` equal pieces of `[a, b]`, endpoints exact.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..=n).map(|k| a + (b - a) * (k as f64) / (n as f64)).collect();
    v[n] = b;
    v
}
