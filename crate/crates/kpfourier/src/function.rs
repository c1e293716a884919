//! Function handles.
//!
//! [`BvFunction2`] is the real function under study. [`Field1`] and
//! [`Field2`] are the complex integrands and integrators the engines work
//! with; a `Field2` may carry a sum-of-products decomposition, which lets
//! tensor-grid sums factor into 1D sums.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Rect2;

pub type RealFn1 = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type RealFn2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type CplxFn1 = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;
pub type CplxFn2 = Arc<dyn Fn(f64, f64) -> Complex64 + Send + Sync>;

const DEFAULT_SCALE: f64 = 0.5;

fn merged(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = a.iter().chain(b).copied().collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn hull(a: Option<(f64, f64)>, b: Option<(f64, f64)>) -> Option<(f64, f64)> {
    match (a, b) {
        (Some(a), Some(b)) => Some((a.0.min(b.0), a.1.max(b.1))),
        _ => None,
    }
}

fn meet(a: Option<(f64, f64)>, b: Option<(f64, f64)>) -> Option<(f64, f64)> {
    match (a, b) {
        (Some(a), Some(b)) => Some((a.0.max(b.0), a.1.min(b.1))),
        (Some(a), None) | (None, Some(a)) => Some(a),
        (None, None) => None,
    }
}

fn support_breaks(s: Option<(f64, f64)>) -> Vec<f64> {
    match s {
        Some((a, b)) => [a, b].into_iter().filter(|v| v.is_finite()).collect(),
        None => Vec::new(),
    }
}

/// A real function of one variable, with jump/kink locations, grading
/// anchors and an optional support interval outside which it is 0.
#[derive(Clone)]
pub struct Factor {
    f: RealFn1,
    pub breaks: Vec<f64>,
    pub anchors: Vec<f64>,
    pub support: Option<(f64, f64)>,
    pub scale: f64,
}

impl fmt::Debug for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Factor")
            .field("breaks", &self.breaks)
            .field("support", &self.support)
            .finish_non_exhaustive()
    }
}

impl Factor {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Factor { f: Arc::new(f), breaks: Vec::new(), anchors: vec![0.0], support: None, scale: DEFAULT_SCALE }
    }

    pub fn with_breaks(mut self, breaks: &[f64]) -> Self {
        self.breaks = merged(&self.breaks, breaks);
        self
    }

    /// The factor is declared 0 outside `[lo, hi]`; the finite ends become breakpoints.
    pub fn with_support(mut self, lo: f64, hi: f64) -> Self {
        self.support = Some((lo, hi));
        self.breaks = merged(&self.breaks, &support_breaks(self.support));
        self
    }

    pub fn with_anchors(mut self, anchors: &[f64]) -> Self {
        self.anchors = sorted(anchors.to_vec());
        self
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    pub fn handle(&self) -> RealFn1 {
        self.f.clone()
    }

    /// `t -> self(s + t)`.
    pub fn shifted(&self, s: f64) -> Factor {
        let f = self.f.clone();
        Factor {
            f: Arc::new(move |t| f(s + t)),
            breaks: self.breaks.iter().map(|b| b - s).collect(),
            anchors: self.anchors.iter().map(|b| b - s).collect(),
            support: self.support.map(|(a, b)| (a - s, b - s)),
            scale: self.scale,
        }
    }

    /// `t -> self(-t)`.
    pub fn reflected(&self) -> Factor {
        let f = self.f.clone();
        Factor {
            f: Arc::new(move |t| f(-t)),
            breaks: sorted(self.breaks.iter().map(|b| -b).collect()),
            anchors: sorted(self.anchors.iter().map(|b| -b).collect()),
            support: self.support.map(|(a, b)| (-b, -a)),
            scale: self.scale,
        }
    }

    pub fn plus(&self, other: &Factor) -> Factor {
        let (f, g) = (self.f.clone(), other.f.clone());
        Factor {
            f: Arc::new(move |t| f(t) + g(t)),
            breaks: merged(&self.breaks, &other.breaks),
            anchors: merged(&self.anchors, &other.anchors),
            support: hull(self.support, other.support),
            scale: self.scale.min(other.scale),
        }
    }

    pub fn times(&self, c: f64) -> Factor {
        let f = self.f.clone();
        Factor { f: Arc::new(move |t| c * f(t)), ..self.clone() }
    }

    pub fn field(&self) -> Field1 {
        let f = self.f.clone();
        Field1 {
            f: Arc::new(move |t| Complex64::new(f(t), 0.0)),
            breaks: self.breaks.clone(),
            anchors: self.anchors.clone(),
            support: self.support,
            scale: self.scale,
        }
    }
}

/// Complex function of one variable with the same structural metadata.
#[derive(Clone)]
pub struct Field1 {
    f: CplxFn1,
    pub breaks: Vec<f64>,
    pub anchors: Vec<f64>,
    pub support: Option<(f64, f64)>,
    pub scale: f64,
}

impl Field1 {
    pub fn new(f: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> Self {
        Field1 { f: Arc::new(f), breaks: Vec::new(), anchors: Vec::new(), support: None, scale: f64::INFINITY }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(move |_| c)
    }

    /// `t -> exp(-i w t)`.
    pub fn wave(w: f64) -> Self {
        Self::new(move |t| Complex64::from_polar(1.0, -w * t))
    }

    pub fn with_breaks(mut self, breaks: &[f64]) -> Self {
        self.breaks = merged(&self.breaks, breaks);
        self
    }

    pub fn with_anchors(mut self, anchors: &[f64]) -> Self {
        self.anchors = merged(&self.anchors, anchors);
        self
    }

    #[inline]
    pub fn eval(&self, t: f64) -> Complex64 {
        (self.f)(t)
    }

    pub fn mul(&self, other: &Field1) -> Field1 {
        let (f, g) = (self.f.clone(), other.f.clone());
        Field1 {
            f: Arc::new(move |t| f(t) * g(t)),
            breaks: merged(&self.breaks, &other.breaks),
            anchors: merged(&self.anchors, &other.anchors),
            support: meet(self.support, other.support),
            scale: self.scale.min(other.scale),
        }
    }

    pub fn scaled(&self, c: Complex64) -> Field1 {
        let f = self.f.clone();
        Field1 { f: Arc::new(move |t| c * f(t)), ..self.clone() }
    }

    /// The part of the line where the field can be nonzero, if bounded.
    pub fn support(&self) -> Option<(f64, f64)> {
        self.support
    }
}

/// Complex function of two variables, optionally a finite sum of products.
#[derive(Clone)]
pub struct Field2 {
    f: CplxFn2,
    terms: Option<Vec<(Field1, Field1)>>,
    pub breaks_x: Vec<f64>,
    pub breaks_y: Vec<f64>,
    pub anchors_x: Vec<f64>,
    pub anchors_y: Vec<f64>,
    pub support: Option<Rect2>,
    pub scale: f64,
}

impl Field2 {
    pub fn new(f: impl Fn(f64, f64) -> Complex64 + Send + Sync + 'static) -> Self {
        Field2 {
            f: Arc::new(f),
            terms: None,
            breaks_x: Vec::new(),
            breaks_y: Vec::new(),
            anchors_x: Vec::new(),
            anchors_y: Vec::new(),
            support: None,
            scale: f64::INFINITY,
        }
    }

    pub fn from_terms(terms: Vec<(Field1, Field1)>) -> Self {
        let tt = terms.clone();
        let f: CplxFn2 = Arc::new(move |x, y| {
            let mut s = Complex64::new(0.0, 0.0);
            for (a, b) in &tt {
                s += a.eval(x) * b.eval(y);
            }
            s
        });
        let mut out = Field2 { f, ..Field2::new(|_, _| Complex64::new(0.0, 0.0)) };
        let mut sx = Some((f64::INFINITY, f64::NEG_INFINITY));
        let mut sy = sx;
        for (a, b) in &terms {
            out.breaks_x = merged(&out.breaks_x, &a.breaks);
            out.breaks_y = merged(&out.breaks_y, &b.breaks);
            out.anchors_x = merged(&out.anchors_x, &a.anchors);
            out.anchors_y = merged(&out.anchors_y, &b.anchors);
            out.scale = out.scale.min(a.scale).min(b.scale);
            sx = hull(sx, a.support);
            sy = hull(sy, b.support);
        }
        out.support = match (sx, sy) {
            (Some(x), Some(y)) if !terms.is_empty() => Rect2::new(x.0, x.1, y.0, y.1).ok(),
            _ => None,
        };
        out.terms = Some(terms);
        out
    }

    pub fn product(a: Field1, b: Field1) -> Self {
        Self::from_terms(vec![(a, b)])
    }

    pub fn constant(c: Complex64) -> Self {
        Self::product(Field1::constant(c), Field1::constant(Complex64::new(1.0, 0.0)))
    }

    /// `exp(-i (xi t1 + eta t2))`.
    pub fn plane_wave(xi: f64, eta: f64) -> Self {
        Self::product(Field1::wave(xi), Field1::wave(eta))
    }

    /// `cos(a t1 + b t2)` as `cos cos - sin sin`.
    pub fn cos_sum(a: f64, b: f64) -> Self {
        let c = |w: f64| Field1::new(move |t: f64| Complex64::new((w * t).cos(), 0.0));
        let s = |w: f64, sign: f64| Field1::new(move |t: f64| Complex64::new(sign * (w * t).sin(), 0.0));
        Self::from_terms(vec![(c(a), c(b)), (s(a, -1.0), s(b, 1.0))])
    }

    pub fn with_breaks(mut self, bx: &[f64], by: &[f64]) -> Self {
        self.breaks_x = merged(&self.breaks_x, bx);
        self.breaks_y = merged(&self.breaks_y, by);
        self
    }

    pub fn with_anchors(mut self, ax: &[f64], ay: &[f64]) -> Self {
        self.anchors_x = merged(&self.anchors_x, ax);
        self.anchors_y = merged(&self.anchors_y, ay);
        self
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    #[inline]
    pub fn eval(&self, x: f64, y: f64) -> Complex64 {
        (self.f)(x, y)
    }

    pub fn terms(&self) -> Option<&[(Field1, Field1)]> {
        self.terms.as_deref()
    }

    /// Same function, decomposition dropped: forces the generic 2D path.
    pub fn without_terms(&self) -> Field2 {
        Field2 { terms: None, ..self.clone() }
    }

    pub fn mul(&self, other: &Field2) -> Field2 {
        let terms = match (&self.terms, &other.terms) {
            (Some(a), Some(b)) => {
                let mut t = Vec::with_capacity(a.len() * b.len());
                for (ax, ay) in a {
                    for (bx, by) in b {
                        t.push((ax.mul(bx), ay.mul(by)));
                    }
                }
                Some(t)
            }
            _ => None,
        };
        if let Some(t) = terms {
            let mut out = Field2::from_terms(t);
            out.support = meet2(self.support, other.support);
            return out;
        }
        let (f, g) = (self.f.clone(), other.f.clone());
        Field2 {
            f: Arc::new(move |x, y| f(x, y) * g(x, y)),
            terms: None,
            breaks_x: merged(&self.breaks_x, &other.breaks_x),
            breaks_y: merged(&self.breaks_y, &other.breaks_y),
            anchors_x: merged(&self.anchors_x, &other.anchors_x),
            anchors_y: merged(&self.anchors_y, &other.anchors_y),
            support: meet2(self.support, other.support),
            scale: self.scale.min(other.scale),
        }
    }

    /// Pointwise modulus; keeps a single-term decomposition.
    pub fn abs(&self) -> Field2 {
        if let Some([(a, b)]) = self.terms.as_deref() {
            let (fa, fb) = (a.f.clone(), b.f.clone());
            let na = Field1 { f: Arc::new(move |t| Complex64::new(fa(t).norm(), 0.0)), ..a.clone() };
            let nb = Field1 { f: Arc::new(move |t| Complex64::new(fb(t).norm(), 0.0)), ..b.clone() };
            return Field2::product(na, nb);
        }
        let f = self.f.clone();
        Field2 { f: Arc::new(move |x, y| Complex64::new(f(x, y).norm(), 0.0)), terms: None, ..self.clone() }
    }

    /// Support expanded to the hull used by the engines; `None` is the plane.
    pub fn support_or_plane(&self) -> Rect2 {
        self.support.unwrap_or_else(Rect2::plane)
    }
}

fn meet2(a: Option<Rect2>, b: Option<Rect2>) -> Option<Rect2> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.intersect(&b).unwrap_or(Rect2 { x_lo: 0.0, x_hi: 0.0, y_lo: 0.0, y_hi: 0.0 })),
        (Some(a), None) | (None, Some(a)) => Some(a),
        (None, None) => None,
    }
}

/// One-sided limits at a point: `f(x+,y+), f(x+,y-), f(x-,y+), f(x-,y-)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadrantLimits {
    pub pp: f64,
    pub pm: f64,
    pub mp: f64,
    pub mm: f64,
}

impl QuadrantLimits {
    pub fn all(v: f64) -> Self {
        QuadrantLimits { pp: v, pm: v, mp: v, mm: v }
    }

    pub fn average(&self) -> f64 {
        0.25 * (self.pp + self.pm + self.mp + self.mm)
    }

    pub fn is_continuous(&self, tol: f64) -> bool {
        let v = [self.pp, self.pm, self.mp, self.mm];
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        hi - lo <= tol
    }
}

/// One-sided limits of a 1D factor at `t`: `(u(t-), u(t+))`.
pub type SideLimits = Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>;

/// Closed-form transform, optionally as a product of 1D transforms.
#[derive(Clone)]
pub struct TransformOracle {
    pub full: CplxFn2,
    pub factors: Option<(CplxFn1, CplxFn1)>,
}

impl TransformOracle {
    pub fn separable(
        a: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
        b: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        let a: CplxFn1 = Arc::new(a);
        let b: CplxFn1 = Arc::new(b);
        let (fa, fb) = (a.clone(), b.clone());
        TransformOracle { full: Arc::new(move |x, y| fa(x) * fb(y)), factors: Some((a, b)) }
    }

    pub fn general(f: impl Fn(f64, f64) -> Complex64 + Send + Sync + 'static) -> Self {
        TransformOracle { full: Arc::new(f), factors: None }
    }

    pub fn eval(&self, xi: f64, eta: f64) -> Complex64 {
        (self.full)(xi, eta)
    }

    /// Transform of `f(x + t1, y + t2)`.
    pub fn shifted(&self, x: f64, y: f64) -> Self {
        let phase = move |w: f64, s: f64| Complex64::from_polar(1.0, w * s);
        let full = self.full.clone();
        TransformOracle {
            full: Arc::new(move |a, b| full(a, b) * phase(a, x) * phase(b, y)),
            factors: self.factors.clone().map(|(fa, fb)| {
                let ga: CplxFn1 = Arc::new(move |a| fa(a) * phase(a, x));
                let gb: CplxFn1 = Arc::new(move |b| fb(b) * phase(b, y));
                (ga, gb)
            }),
        }
    }
}

/// A real function on the plane, with whatever structure is known about it.
#[derive(Clone)]
pub struct BvFunction2 {
    f: RealFn2,
    pub support: Option<Rect2>,
    separable: Option<(Factor, Factor)>,
    pub breaks_x: Vec<f64>,
    pub breaks_y: Vec<f64>,
    pub anchors_x: Vec<f64>,
    pub anchors_y: Vec<f64>,
    pub scale: f64,
    quadrant: Option<Arc<dyn Fn(f64, f64) -> QuadrantLimits + Send + Sync>>,
    pub known_variation: Option<f64>,
    oracle: Option<TransformOracle>,
    /// Declared decay at infinity; `None` means "probe it".
    pub vanishes_at_infinity: Option<bool>,
}

impl fmt::Debug for BvFunction2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BvFunction2")
            .field("support", &self.support)
            .field("separable", &self.separable.is_some())
            .field("breaks_x", &self.breaks_x)
            .field("breaks_y", &self.breaks_y)
            .field("known_variation", &self.known_variation)
            .finish_non_exhaustive()
    }
}

impl BvFunction2 {
    pub fn new(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        BvFunction2 {
            f: Arc::new(f),
            support: None,
            separable: None,
            breaks_x: Vec::new(),
            breaks_y: Vec::new(),
            anchors_x: vec![0.0],
            anchors_y: vec![0.0],
            scale: DEFAULT_SCALE,
            quadrant: None,
            known_variation: None,
            oracle: None,
            vanishes_at_infinity: None,
        }
    }

    /// `f(x, y) = u(x) v(y)`; structure is inherited from the factors.
    pub fn separable(u: Factor, v: Factor) -> Self {
        let (fu, fv) = (u.handle(), v.handle());
        let support = match (u.support, v.support) {
            (None, None) => None,
            (a, b) => {
                let (xa, xb) = a.unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
                let (ya, yb) = b.unwrap_or((f64::NEG_INFINITY, f64::INFINITY));
                Rect2::new(xa, xb, ya, yb).ok()
            }
        };
        BvFunction2 {
            f: Arc::new(move |x, y| fu(x) * fv(y)),
            support,
            breaks_x: u.breaks.clone(),
            breaks_y: v.breaks.clone(),
            anchors_x: u.anchors.clone(),
            anchors_y: v.anchors.clone(),
            scale: u.scale.min(v.scale),
            separable: Some((u, v)),
            ..BvFunction2::new(|_, _| 0.0)
        }
    }

    pub fn zero() -> Self {
        let z = Factor::new(|_| 0.0);
        BvFunction2::separable(z.clone(), z)
            .with_known_variation(0.0)
            .with_quadrant_limits(|_, _| QuadrantLimits::all(0.0))
            .with_transform_oracle(TransformOracle::separable(|_| Complex64::new(0.0, 0.0), |_| Complex64::new(0.0, 0.0)))
            .with_vanishing(true)
    }

    pub fn constant(c: f64) -> Self {
        let one = Factor::new(|_| 1.0);
        BvFunction2::separable(Factor::new(move |_| c), one)
            .with_known_variation(0.0)
            .with_quadrant_limits(move |_, _| QuadrantLimits::all(c))
    }

    pub fn with_support(mut self, rect: Rect2) -> Self {
        self.support = Some(rect);
        let fx: Vec<f64> = [rect.x_lo, rect.x_hi].into_iter().filter(|v| v.is_finite()).collect();
        let fy: Vec<f64> = [rect.y_lo, rect.y_hi].into_iter().filter(|v| v.is_finite()).collect();
        self.breaks_x = merged(&self.breaks_x, &fx);
        self.breaks_y = merged(&self.breaks_y, &fy);
        self
    }

    pub fn with_breaks(mut self, bx: &[f64], by: &[f64]) -> Self {
        self.breaks_x = merged(&self.breaks_x, bx);
        self.breaks_y = merged(&self.breaks_y, by);
        self
    }

    pub fn with_anchors(mut self, ax: &[f64], ay: &[f64]) -> Self {
        self.anchors_x = sorted(ax.to_vec());
        self.anchors_y = sorted(ay.to_vec());
        self
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn with_known_variation(mut self, v: f64) -> Self {
        self.known_variation = Some(v);
        self
    }

    pub fn with_quadrant_limits(mut self, q: impl Fn(f64, f64) -> QuadrantLimits + Send + Sync + 'static) -> Self {
        self.quadrant = Some(Arc::new(q));
        self
    }

    /// Quadrant limits of a separable function from one-sided limits of its factors.
    pub fn with_side_limits(self, u: SideLimits, v: SideLimits) -> Self {
        self.with_quadrant_limits(move |x, y| {
            let (um, up) = u(x);
            let (vm, vp) = v(y);
            QuadrantLimits { pp: up * vp, pm: up * vm, mp: um * vp, mm: um * vm }
        })
    }

    pub fn with_transform_oracle(mut self, o: TransformOracle) -> Self {
        self.oracle = Some(o);
        self
    }

    pub fn with_vanishing(mut self, v: bool) -> Self {
        self.vanishes_at_infinity = Some(v);
        self
    }

    #[inline]
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        (self.f)(x, y)
    }

    pub fn try_eval(&self, x: f64, y: f64) -> Result<f64> {
        let v = (self.f)(x, y);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite { x, y })
        }
    }

    pub fn handle(&self) -> RealFn2 {
        self.f.clone()
    }

    pub fn factors(&self) -> Option<(&Factor, &Factor)> {
        self.separable.as_ref().map(|(u, v)| (u, v))
    }

    /// Drops the product structure (the generic engines then run).
    pub fn without_factors(&self) -> Self {
        BvFunction2 { separable: None, ..self.clone() }
    }

    pub fn quadrant_limits_meta(&self, x: f64, y: f64) -> Option<QuadrantLimits> {
        self.quadrant.as_ref().map(|q| q(x, y))
    }

    pub fn transform_oracle(&self) -> Option<&TransformOracle> {
        self.oracle.as_ref()
    }

    /// Complex view, with the product structure when known.
    pub fn field(&self) -> Field2 {
        if let Some((u, v)) = &self.separable {
            let mut out = Field2::product(u.field(), v.field());
            out.support = self.support;
            return out;
        }
        let f = self.f.clone();
        Field2 {
            f: Arc::new(move |x, y| Complex64::new(f(x, y), 0.0)),
            terms: None,
            breaks_x: self.breaks_x.clone(),
            breaks_y: self.breaks_y.clone(),
            anchors_x: self.anchors_x.clone(),
            anchors_y: self.anchors_y.clone(),
            support: self.support,
            scale: self.scale,
        }
    }

    /// `(t1, t2) -> f(x + t1, y + t2)`.
    pub fn shifted(&self, x: f64, y: f64) -> Self {
        let f = self.f.clone();
        let q = self.quadrant.clone();
        BvFunction2 {
            f: Arc::new(move |a, b| f(x + a, y + b)),
            support: self.support.map(|r| r.translate(-x, -y)),
            separable: self.separable.as_ref().map(|(u, v)| (u.shifted(x), v.shifted(y))),
            breaks_x: self.breaks_x.iter().map(|b| b - x).collect(),
            breaks_y: self.breaks_y.iter().map(|b| b - y).collect(),
            anchors_x: self.anchors_x.iter().map(|b| b - x).collect(),
            anchors_y: self.anchors_y.iter().map(|b| b - y).collect(),
            scale: self.scale,
            quadrant: q.map(|q| -> Arc<dyn Fn(f64, f64) -> QuadrantLimits + Send + Sync> {
                Arc::new(move |a, b| q(x + a, y + b))
            }),
            known_variation: self.known_variation,
            oracle: self.oracle.as_ref().map(|o| o.shifted(x, y)),
            vanishes_at_infinity: self.vanishes_at_infinity,
        }
    }

    /// `a f + b g`. The product structure is lost unless one side is zero-weighted.
    pub fn linear_combination(a: f64, f: &BvFunction2, b: f64, g: &BvFunction2) -> Self {
        let (ff, gg) = (f.f.clone(), g.f.clone());
        let support = match (f.support, g.support) {
            (Some(r), Some(s)) => Rect2::new(r.x_lo.min(s.x_lo), r.x_hi.max(s.x_hi), r.y_lo.min(s.y_lo), r.y_hi.max(s.y_hi)).ok(),
            _ => None,
        };
        let oracle = match (&f.oracle, &g.oracle) {
            (Some(o1), Some(o2)) => {
                let (p, q) = (o1.full.clone(), o2.full.clone());
                Some(TransformOracle::general(move |x, y| a * p(x, y) + b * q(x, y)))
            }
            _ => None,
        };
        let quadrant = match (&f.quadrant, &g.quadrant) {
            (Some(p), Some(q)) => {
                let (p, q) = (p.clone(), q.clone());
                let h: Arc<dyn Fn(f64, f64) -> QuadrantLimits + Send + Sync> = Arc::new(move |x, y| {
                    let (l, r) = (p(x, y), q(x, y));
                    QuadrantLimits {
                        pp: a * l.pp + b * r.pp,
                        pm: a * l.pm + b * r.pm,
                        mp: a * l.mp + b * r.mp,
                        mm: a * l.mm + b * r.mm,
                    }
                });
                Some(h)
            }
            _ => None,
        };
        BvFunction2 {
            f: Arc::new(move |x, y| a * ff(x, y) + b * gg(x, y)),
            support,
            separable: None,
            breaks_x: merged(&f.breaks_x, &g.breaks_x),
            breaks_y: merged(&f.breaks_y, &g.breaks_y),
            anchors_x: merged(&f.anchors_x, &g.anchors_x),
            anchors_y: merged(&f.anchors_y, &g.anchors_y),
            scale: f.scale.min(g.scale),
            quadrant,
            known_variation: None,
            oracle,
            vanishes_at_infinity: match (f.vanishes_at_infinity, g.vanishes_at_infinity) {
                (Some(true), Some(true)) => Some(true),
                _ => None,
            },
        }
    }
}
