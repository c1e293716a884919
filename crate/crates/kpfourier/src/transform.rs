//! The transform `F(f)(xi, eta)`, the limit of
//! `integral over [a,b] x [c,d] of f(t1,t2) exp(-i(xi t1 + eta t2))`
//! as all four sides go to infinity, computed directly or through
//! `-(1/(xi eta)) integral exp(-i(xi t1 + eta t2)) df`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bv::decay_probe;
use crate::engine::{improper_quad_2d, start_length};
use crate::error::{Error, Result};
use crate::function::{BvFunction2, Field2};
use crate::ladder::{Axis, LadderOptions, PringsheimLadder};
use crate::stieltjes::{rs_improper_fields, ImproperOptions, LadderKind};

#[derive(Debug, Clone, Serialize)]
pub struct PringsheimResult {
    pub value: Complex64,
    pub ladder: PringsheimLadder,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Direct,
    Stieltjes,
    Oracle,
}

impl std::str::FromStr for Route {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Route::Direct),
            "stieltjes" => Ok(Route::Stieltjes),
            "oracle" => Ok(Route::Oracle),
            _ => Err(Error::InvalidArgument(format!("unknown route {s:?} (direct, stieltjes, oracle)"))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TransformOptions {
    pub tol: f64,
    /// Drop the product structure and run the 2D engine.
    pub force_generic: bool,
    /// Skip the decay precondition.
    pub skip_precondition: bool,
    /// Radii used by the decay probe.
    pub probe_radius: f64,
    pub ladder: LadderOptions,
    /// Starting cells per block for the Stieltjes route.
    pub cells0: usize,
}

impl TransformOptions {
    pub fn with_tol(tol: f64) -> Self {
        TransformOptions {
            tol,
            force_generic: false,
            skip_precondition: false,
            probe_radius: 1e4,
            ladder: LadderOptions::with_tol(tol),
            cells0: 32,
        }
    }
}

fn check_frequency(xi: f64, eta: f64) -> Result<()> {
    if xi == 0.0 || eta == 0.0 || !xi.is_finite() || !eta.is_finite() {
        return Err(Error::AxisFrequency { xi, eta });
    }
    Ok(())
}

fn precondition(f: &BvFunction2, o: &TransformOptions) -> Result<()> {
    if o.skip_precondition || decay_probe(f, &[o.probe_radius], 1e-2) {
        Ok(())
    } else {
        Err(Error::Precondition("function does not appear to vanish at infinity (override to proceed)".into()))
    }
}

fn starts(f: &BvFunction2) -> (f64, f64) {
    let px: Vec<f64> = f.breaks_x.iter().chain(&f.anchors_x).copied().filter(|v| v.is_finite()).collect();
    let py: Vec<f64> = f.breaks_y.iter().chain(&f.anchors_y).copied().filter(|v| v.is_finite()).collect();
    (start_length(&px, f.scale), start_length(&py, f.scale))
}

/// Direct route with default options.
pub fn kpft_direct(f: &BvFunction2, xi: f64, eta: f64, tol: f64) -> Result<PringsheimResult> {
    kpft_direct_with(f, xi, eta, &TransformOptions::with_tol(tol))
}

/// Truncated oscillatory integrals on windows whose edges sit at multiples
/// of the half-periods `pi/|xi|`, `pi/|eta|`.
pub fn kpft_direct_with(f: &BvFunction2, xi: f64, eta: f64, o: &TransformOptions) -> Result<PringsheimResult> {
    check_frequency(xi, eta)?;
    precondition(f, o)?;
    let (sx, sy) = starts(f);
    let ax = Axis::periodic(PI / xi.abs(), sx);
    let ay = Axis::periodic(PI / eta.abs(), sy);
    let mut field = f.field().mul(&Field2::plane_wave(xi, eta));
    if o.force_generic {
        field = field.without_terms();
    }
    let ladder = improper_quad_2d(&field, ax, ay, &o.ladder).map_err(limit_error)?;
    Ok(PringsheimResult { value: ladder.value(), converged: ladder.converged, ladder })
}

fn limit_error(e: Error) -> Error {
    match e {
        Error::PringsheimStall { deltas, .. } => Error::LimitNotDetected { direction: format!("window ladder, deltas {deltas:?}") },
        other => other,
    }
}

/// Stieltjes route with default options.
pub fn kpft_stieltjes(f: &BvFunction2, xi: f64, eta: f64, tol: f64) -> Result<PringsheimResult> {
    kpft_stieltjes_with(f, xi, eta, &TransformOptions::with_tol(tol))
}

/// `-(1/(xi eta)) integral exp(-i(xi t1 + eta t2)) df` over the plane.
pub fn kpft_stieltjes_with(f: &BvFunction2, xi: f64, eta: f64, o: &TransformOptions) -> Result<PringsheimResult> {
    check_frequency(xi, eta)?;
    precondition(f, o)?;
    let mut fl = f.field();
    let mut wave = Field2::plane_wave(xi, eta);
    if o.force_generic {
        fl = fl.without_terms();
        wave = wave.without_terms();
    }
    let io = ImproperOptions {
        tol: o.tol,
        x: LadderKind::Periodic { half_period: PI / xi.abs() },
        y: LadderKind::Periodic { half_period: PI / eta.abs() },
        cells0: o.cells0,
        max_refine: 7,
        ladder: o.ladder,
    };
    // The Stieltjes sum refines until two passes agree to a relative tolerance;
    // scale by 1/(xi eta) afterwards.
    let scale = -1.0 / (xi * eta);
    let io = ImproperOptions { tol: o.tol / scale.abs().max(1.0), ..io };
    let mut ladder = rs_improper_fields(&wave, &fl, &io).map_err(limit_error)?;
    for v in ladder.values.iter_mut() {
        *v *= scale;
    }
    for d in ladder.deltas.iter_mut() {
        *d *= scale.abs();
    }
    Ok(PringsheimResult { value: ladder.value(), converged: ladder.converged, ladder })
}

#[derive(Debug, Clone, Serialize)]
pub struct TransformGrid {
    pub frequencies: Vec<(f64, f64)>,
    pub values: Vec<Option<Complex64>>,
    pub converged: Vec<bool>,
    pub errors: Vec<Option<String>>,
    /// Rungs used per point (0 for the oracle route or on failure).
    pub rungs: Vec<usize>,
}

impl TransformGrid {
    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }
}

/// One transform value through the chosen route.
pub fn kpft_point(f: &BvFunction2, xi: f64, eta: f64, route: Route, o: &TransformOptions) -> Result<PringsheimResult> {
    match route {
        Route::Direct => kpft_direct_with(f, xi, eta, o),
        Route::Stieltjes => kpft_stieltjes_with(f, xi, eta, o),
        Route::Oracle => {
            check_frequency(xi, eta)?;
            let or = f.transform_oracle().ok_or_else(|| Error::Catalog("function has no transform oracle".into()))?;
            let v = or.eval(xi, eta);
            let ladder = PringsheimLadder { rungs: vec![], values: vec![v], deltas: vec![], converged: true, stall_count: 0 };
            Ok(PringsheimResult { value: v, ladder, converged: true })
        }
    }
}

/// Batch evaluation; validation rejects axis frequencies, later failures are
/// recorded per point.
pub fn kpft_grid(f: &BvFunction2, freqs: &[(f64, f64)], route: Route, o: &TransformOptions) -> Result<TransformGrid> {
    for &(xi, eta) in freqs {
        check_frequency(xi, eta)?;
    }
    let out: Vec<Result<PringsheimResult>> = freqs.par_iter().map(|&(xi, eta)| kpft_point(f, xi, eta, route, o)).collect();
    let mut g = TransformGrid { frequencies: freqs.to_vec(), values: vec![], converged: vec![], errors: vec![], rungs: vec![] };
    for r in out {
        match r {
            Ok(p) => {
                g.values.push(Some(p.value));
                g.converged.push(p.converged);
                g.errors.push(None);
                g.rungs.push(p.ladder.rungs.len());
            }
            Err(e) => {
                g.values.push(None);
                g.converged.push(false);
                g.errors.push(Some(e.to_string()));
                g.rungs.push(0);
            }
        }
    }
    Ok(g)
}

#[derive(Debug, Clone, Serialize)]
pub struct ContinuityReport {
    pub center: (f64, f64),
    pub center_value: Complex64,
    pub radii: Vec<f64>,
    /// `max |F(p) - F(center)|` over the eight compass points at each radius.
    pub oscillations: Vec<f64>,
    pub nonincreasing: bool,
    pub passed: bool,
}

/// Oscillation of the transform on shrinking circles around a point.
pub fn continuity_probe(f: &BvFunction2, xi0: f64, eta0: f64, radii: &[f64], tol: f64, route: Route) -> Result<ContinuityReport> {
    check_frequency(xi0, eta0)?;
    if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0)) || radii.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidArgument("radii must be positive and strictly decreasing".into()));
    }
    if radii[0] >= xi0.abs().min(eta0.abs()) {
        return Err(Error::InvalidArgument(format!(
            "ball of radius {} around ({xi0}, {eta0}) reaches a coordinate axis",
            radii[0]
        )));
    }
    let o = TransformOptions::with_tol((0.1 * tol).min(1e-5));
    let center_value = kpft_point(f, xi0, eta0, route, &o)?.value;
    let mut pts = Vec::new();
    for &r in radii {
        for k in 0..8 {
            let th = PI * k as f64 / 4.0;
            pts.push((xi0 + r * th.cos(), eta0 + r * th.sin()));
        }
    }
    let vals: Vec<Result<Complex64>> = pts.par_iter().map(|&(x, y)| kpft_point(f, x, y, route, &o).map(|p| p.value)).collect();
    let mut oscillations = Vec::with_capacity(radii.len());
    for chunk in vals.chunks(8) {
        let mut m = 0.0f64;
        for v in chunk {
            m = m.max((v.as_ref().map_err(Clone::clone)? - center_value).norm());
        }
        oscillations.push(m);
    }
    let nonincreasing = oscillations.windows(2).all(|w| w[1] <= w[0]);
    let passed = nonincreasing && *oscillations.last().unwrap() < tol;
    Ok(ContinuityReport { center: (xi0, eta0), center_value, radii: radii.to_vec(), oscillations, nonincreasing, passed })
}
