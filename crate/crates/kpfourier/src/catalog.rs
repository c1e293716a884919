//! Test functions with metadata and independent oracles.

use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bv::bv_zero_diagnostics;
use crate::error::{Error, Result};
use crate::function::{BvFunction2, Factor, QuadrantLimits, SideLimits, TransformOracle};
use crate::geometry::Rect2;
use crate::quadrature::{gl16, mapped, CNeumaier};
use crate::transform::kpft_direct;

/// Function classes an entry can claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassTag {
    /// Bounded Vitali variation on the plane.
    BvV,
    /// Bounded Hardy variation on the plane.
    BvH,
    /// Bounded Vitali variation and vanishing at infinity.
    BvZero,
    /// Lebesgue integrable.
    L1,
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassTag::BvV => "BV_V",
            ClassTag::BvH => "BV_H",
            ClassTag::BvZero => "BV_0",
            ClassTag::L1 => "L1",
        })
    }
}

#[derive(Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub function: BvFunction2,
    pub tags: Vec<ClassTag>,
    pub description: String,
    /// Where the interesting part of the function lives (for plots and scans).
    pub window_hint: Option<Rect2>,
    /// Points where `f` is known to be continuous.
    pub continuity_points: Vec<(f64, f64)>,
}

impl fmt::Debug for CatalogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CatalogEntry").field("name", &self.name).field("tags", &self.tags).finish_non_exhaustive()
    }
}

impl CatalogEntry {
    pub fn has(&self, tag: ClassTag) -> bool {
        self.tags.contains(&tag)
    }
}

/// JSON view of an entry.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EntrySummary {
    pub name: String,
    pub tags: Vec<String>,
    pub description: String,
    pub separable: bool,
    pub breaks_x: Vec<f64>,
    pub breaks_y: Vec<f64>,
    pub known_variation: Option<f64>,
    pub has_transform_oracle: bool,
    pub has_quadrant_limits: bool,
    pub window_hint: Option<Rect2>,
}

/// `Gamma(0, i s)`, the integral of `exp(-i s t) / t` over `[1, inf)`.
///
/// Gauss-Legendre panels (at most a quarter period wide) on `[1, T]` with
/// `|s| T >= 40`, then the asymptotic series of `E1(i s T)` for the rest.
pub fn gamma0_oracle(s: f64) -> Result<Complex64> {
    if s == 0.0 || !s.is_finite() {
        return Err(Error::InvalidArgument(format!("gamma0_oracle needs a finite nonzero argument, got {s}")));
    }
    let a = s.abs();
    let t_end = (40.0 / a).max(1.0);
    let mut acc = CNeumaier::new();
    if t_end > 1.0 {
        let width = (0.25 * PI / a).min(0.5);
        let n = ((t_end - 1.0) / width).ceil() as usize;
        let h = (t_end - 1.0) / n as f64;
        for k in 0..n {
            let (p, q) = (1.0 + k as f64 * h, 1.0 + (k + 1) as f64 * h);
            for (t, w) in mapped(gl16(), p, q) {
                acc.add(Complex64::from_polar(w / t, -s * t));
            }
        }
    }
    // E1(z) ~ exp(-z)/z * sum (-1)^k k! / z^k, z = i s T.
    let z = Complex64::new(0.0, s * t_end);
    let mut term = Complex64::new(1.0, 0.0);
    let mut series = CNeumaier::new();
    series.add(term);
    for k in 1..60 {
        let next = -term * (k as f64) / z;
        if next.norm() >= term.norm() || next.norm() < 1e-18 {
            break;
        }
        term = next;
        series.add(term);
    }
    acc.add((-z).exp() / z * series.total());
    Ok(acc.total())
}

fn gamma0(s: f64) -> Complex64 {
    gamma0_oracle(s).unwrap_or(Complex64::new(f64::NAN, f64::NAN))
}

fn step_limits(jumps: Vec<(f64, f64, f64)>, u: Arc<dyn Fn(f64) -> f64 + Send + Sync>) -> SideLimits {
    // jumps: (point, left value, right value)
    Arc::new(move |t| {
        for &(p, l, r) in &jumps {
            if t == p {
                return (l, r);
            }
        }
        let v = u(t);
        (v, v)
    })
}

/// `u(x) u(y)` with `u(t) = 1/t` for `t >= 1` and 0 otherwise.
pub fn reciprocal() -> CatalogEntry {
    let u = Factor::new(|t| if t >= 1.0 { 1.0 / t } else { 0.0 }).with_support(1.0, f64::INFINITY).with_anchors(&[1.0]);
    let side = step_limits(vec![(1.0, 0.0, 1.0)], u.handle());
    let f = BvFunction2::separable(u.clone(), u)
        .with_side_limits(side.clone(), side)
        .with_known_variation(4.0)
        .with_transform_oracle(TransformOracle::separable(gamma0, gamma0))
        .with_vanishing(true);
    CatalogEntry {
        name: "reciprocal".into(),
        function: f,
        tags: vec![ClassTag::BvV, ClassTag::BvH, ClassTag::BvZero],
        description: "1/(xy) on x, y >= 1, else 0; jumps along x = 1 and y = 1".into(),
        window_hint: Rect2::new(0.0, 8.0, 0.0, 8.0).ok(),
        continuity_points: vec![(2.0, 3.0), (2.5, 3.0), (3.0, 2.5), (3.0, 3.0)],
    }
}

/// `exp(-|x|) exp(-|y|)`.
pub fn exp2() -> CatalogEntry {
    let u = Factor::new(|t: f64| (-t.abs()).exp()).with_breaks(&[0.0]).with_scale(1.0);
    let lap = |w: f64| Complex64::new(2.0 / (1.0 + w * w), 0.0);
    let f = BvFunction2::separable(u.clone(), u)
        .with_quadrant_limits(|x, y| QuadrantLimits::all((-x.abs() - y.abs()).exp()))
        .with_known_variation(4.0)
        .with_transform_oracle(TransformOracle::separable(lap, lap))
        .with_vanishing(true);
    CatalogEntry {
        name: "exp2".into(),
        function: f,
        tags: vec![ClassTag::BvV, ClassTag::BvH, ClassTag::BvZero, ClassTag::L1],
        description: "exp(-|x|) exp(-|y|); integrable, kinks along the axes".into(),
        window_hint: Rect2::new(-4.0, 4.0, -4.0, 4.0).ok(),
        continuity_points: vec![(0.5, 0.5), (1.0, -1.0), (0.0, 0.0)],
    }
}

fn indicator(lo: f64, hi: f64) -> Factor {
    Factor::new(move |t| if t >= lo && t < hi { 1.0 } else { 0.0 }).with_support(lo, hi)
}

/// Transform of the indicator of `[lo, hi)`.
fn indicator_transform(lo: f64, hi: f64) -> impl Fn(f64) -> Complex64 + Send + Sync + Clone {
    move |w: f64| {
        if w.abs() < 1e-8 {
            return Complex64::new(hi - lo, -0.5 * w * (hi * hi - lo * lo));
        }
        (Complex64::from_polar(1.0, -w * lo) - Complex64::from_polar(1.0, -w * hi)) / Complex64::new(0.0, w)
    }
}

/// Indicator of `[-1, 1) x [-1/2, 3/2)`.
pub fn box_entry() -> CatalogEntry {
    let u = indicator(-1.0, 1.0);
    let v = indicator(-0.5, 1.5);
    let su = step_limits(vec![(-1.0, 0.0, 1.0), (1.0, 1.0, 0.0)], u.handle());
    let sv = step_limits(vec![(-0.5, 0.0, 1.0), (1.5, 1.0, 0.0)], v.handle());
    let f = BvFunction2::separable(u, v)
        .with_side_limits(su, sv)
        .with_known_variation(4.0)
        .with_transform_oracle(TransformOracle::separable(indicator_transform(-1.0, 1.0), indicator_transform(-0.5, 1.5)))
        .with_vanishing(true);
    CatalogEntry {
        name: "box".into(),
        function: f,
        tags: vec![ClassTag::BvV, ClassTag::BvH, ClassTag::BvZero, ClassTag::L1],
        description: "indicator of [-1,1) x [-1/2,3/2); jumps at x = -1, 1 and y = -1/2, 3/2".into(),
        window_hint: Rect2::new(-2.0, 2.0, -1.5, 2.5).ok(),
        continuity_points: vec![(0.0, 0.0), (0.5, 1.0)],
    }
}

/// `x + y`: zero Vitali variation, unbounded sections.
pub fn additive() -> CatalogEntry {
    let f = BvFunction2::new(|x, y| x + y)
        .with_known_variation(0.0)
        .with_quadrant_limits(|x, y| QuadrantLimits::all(x + y))
        .with_vanishing(false);
    CatalogEntry {
        name: "additive".into(),
        function: f,
        tags: vec![ClassTag::BvV],
        description: "x + y; every mixed difference vanishes, sections have unbounded variation".into(),
        window_hint: Rect2::new(-1.0, 1.0, -1.0, 1.0).ok(),
        continuity_points: vec![(0.0, 0.0)],
    }
}

pub fn zero() -> CatalogEntry {
    CatalogEntry {
        name: "zero".into(),
        function: BvFunction2::zero(),
        tags: vec![ClassTag::BvV, ClassTag::BvH, ClassTag::BvZero, ClassTag::L1],
        description: "identically 0".into(),
        window_hint: None,
        continuity_points: vec![(0.0, 0.0), (2.0, 3.0)],
    }
}

/// `exp(-(x^2 + xy + y^2))`, a smooth bump that does not factor.
pub fn gauss_corr() -> CatalogEntry {
    let c = 2.0 * PI / 3f64.sqrt();
    let f = BvFunction2::new(|x, y| (-(x * x + x * y + y * y)).exp())
        .with_scale(0.5)
        .with_quadrant_limits(|x, y| QuadrantLimits::all((-(x * x + x * y + y * y)).exp()))
        .with_transform_oracle(TransformOracle::general(move |a, b| Complex64::new(c * (-(a * a - a * b + b * b) / 3.0).exp(), 0.0)))
        .with_vanishing(true);
    CatalogEntry {
        name: "gauss_corr".into(),
        function: f,
        tags: vec![ClassTag::BvV, ClassTag::BvH, ClassTag::BvZero, ClassTag::L1],
        description: "exp(-(x^2 + xy + y^2)); smooth, not a product".into(),
        window_hint: Rect2::new(-3.0, 3.0, -3.0, 3.0).ok(),
        continuity_points: vec![(0.0, 0.0), (0.5, -0.25), (0.3, 0.2)],
    }
}

/// Radii used by the decay diagnostics at registration.
pub const DIAGNOSTIC_LADDER: [f64; 4] = [10.0, 100.0, 1e3, 1e4];

#[derive(Debug, Clone, Default)]
pub struct Catalog {
    entries: Vec<CatalogEntry>,
}

impl Catalog {
    pub fn new() -> Self {
        Catalog::default()
    }

    /// The built-in entries, each registered through [`Catalog::register`].
    pub fn standard() -> Result<Self> {
        let mut c = Catalog::new();
        for e in [reciprocal(), exp2(), box_entry(), additive(), zero(), gauss_corr()] {
            c.register(e)?;
        }
        Ok(c)
    }

    /// Adds an entry after checking the name, the decay claim and the
    /// transform oracle.
    pub fn register(&mut self, entry: CatalogEntry) -> Result<()> {
        if self.entries.iter().any(|e| e.name == entry.name) {
            return Err(Error::Catalog(format!("duplicate entry name {:?}", entry.name)));
        }
        if entry.has(ClassTag::BvZero) {
            let report = bv_zero_diagnostics(&entry.function, &DIAGNOSTIC_LADDER);
            if !report.passed() {
                return Err(Error::Catalog(format!(
                    "{:?} claims BV_0 but the decay diagnostics fail ({} tail, {} sectional violations, {} errors)",
                    entry.name,
                    report.tail_violations.len(),
                    report.sectional_violations.len(),
                    report.errors.len()
                )));
            }
        }
        if let (Some(o), true) = (entry.function.transform_oracle(), entry.has(ClassTag::BvZero)) {
            let want = o.eval(1.0, 1.0);
            let got = kpft_direct(&entry.function, 1.0, 1.0, 1e-5)?.value;
            if (want - got).norm() > 1e-3 {
                return Err(Error::Catalog(format!("{:?}: transform oracle {want} disagrees with the direct route {got} at (1,1)", entry.name)));
            }
        }
        self.entries.push(entry);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&CatalogEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.name.as_str()).collect()
    }

    pub fn summaries(&self) -> Vec<EntrySummary> {
        self.entries
            .iter()
            .map(|e| EntrySummary {
                name: e.name.clone(),
                tags: e.tags.iter().map(|t| t.to_string()).collect(),
                description: e.description.clone(),
                separable: e.function.factors().is_some(),
                breaks_x: e.function.breaks_x.clone(),
                breaks_y: e.function.breaks_y.clone(),
                known_variation: e.function.known_variation,
                has_transform_oracle: e.function.transform_oracle().is_some(),
                has_quadrant_limits: e.function.quadrant_limits_meta(0.0, 0.0).is_some(),
                window_hint: e.window_hint,
            })
            .collect()
    }
}

/// The standard catalog, built once per process.
pub fn catalog() -> &'static Catalog {
    static C: OnceLock<Catalog> = OnceLock::new();
    C.get_or_init(|| Catalog::standard().expect("built-in catalog entries register"))
}
