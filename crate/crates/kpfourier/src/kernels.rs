//! Sine integral, Dirichlet difference windows and lacunary sequences.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::Field1;
use crate::quadrature::{gl16, mapped, Neumaier};

const SERIES_LIMIT: f64 = 3.0;
const TABLE_LIMIT: usize = 50;

fn si_series(x: f64) -> f64 {
    // sum (-1)^k x^(2k+1) / ((2k+1) (2k+1)!)
    let x2 = x * x;
    let mut term = x;
    let mut s = Neumaier::new();
    s.add(x);
    let mut k = 0u32;
    loop {
        k += 1;
        let n = (2 * k) as f64;
        term *= -x2 / (n * (n + 1.0));
        let add = term / (n + 1.0);
        s.add(add);
        if add.abs() < 1e-18 * s.total().abs().max(1e-300) {
            break;
        }
    }
    s.total()
}

fn sinc(t: f64) -> f64 {
    if t.abs() < 1e-4 {
        1.0 - t * t / 6.0
    } else {
        t.sin() / t
    }
}

fn panel(a: f64, b: f64) -> f64 {
    let mut s = Neumaier::new();
    for (t, w) in mapped(gl16(), a, b) {
        s.add(w * sinc(t));
    }
    s.total()
}

fn si_table() -> &'static [f64] {
    static T: OnceLock<Vec<f64>> = OnceLock::new();
    T.get_or_init(|| {
        let mut t = vec![0.0; TABLE_LIMIT + 1];
        let k0 = SERIES_LIMIT as usize;
        t[k0] = si_series(SERIES_LIMIT);
        for k in k0..TABLE_LIMIT {
            t[k + 1] = t[k] + panel(k as f64, (k + 1) as f64);
        }
        t
    })
}

fn si_asymptotic(x: f64) -> f64 {
    // Si(x) = pi/2 - f(x) cos x - g(x) sin x
    let inv2 = 1.0 / (x * x);
    let (mut f, mut g) = (Neumaier::new(), Neumaier::new());
    let mut tf = 1.0;
    let mut tg = 1.0;
    f.add(tf);
    g.add(tg);
    for k in 1..60 {
        let n = 2.0 * k as f64;
        let nf = -tf * (n - 1.0) * n * inv2;
        let ng = -tg * n * (n + 1.0) * inv2;
        if nf.abs() > tf.abs() || nf.abs() < 1e-18 {
            break;
        }
        tf = nf;
        tg = ng;
        f.add(tf);
        g.add(tg);
    }
    FRAC_PI_2 - f.total() / x * x.cos() - g.total() * inv2 * x.sin()
}

/// `Si(x)`, the integral of `sin t / t` from 0 to `x`.
pub fn sine_integral(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let a = x.abs();
    let v = if a <= SERIES_LIMIT {
        si_series(a)
    } else if a <= TABLE_LIMIT as f64 {
        let k = a.floor() as usize;
        si_table()[k] + panel(k as f64, a)
    } else if a.is_finite() {
        si_asymptotic(a)
    } else {
        FRAC_PI_2
    };
    v.copysign(x)
}

/// Frequencies `0 < alpha < beta` of a difference window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub alpha: f64,
    pub beta: f64,
}

impl KernelSpec {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if alpha > 0.0 && alpha < beta && beta.is_finite() {
            Ok(KernelSpec { alpha, beta })
        } else {
            Err(Error::InvalidArgument(format!("kernel needs 0 < alpha < beta < inf, got ({alpha}, {beta})")))
        }
    }

    pub fn tau0(&self) -> f64 {
        1e-3 * (1.0f64).min(1.0 / self.beta)
    }
}

fn odd_power_series(a: f64, b: f64, t: f64) -> f64 {
    // (sin bt - sin at)/t near t = 0
    let d = |p: i32| b.powi(p) - a.powi(p);
    let t2 = t * t;
    d(1) - d(3) * t2 / 6.0 + d(5) * t2 * t2 / 120.0
}

/// `(sin(beta t) - sin(alpha t)) / (pi t)`.
pub fn dirichlet_window(spec: &KernelSpec, t: f64) -> f64 {
    if t.abs() < spec.tau0() {
        odd_power_series(spec.alpha, spec.beta, t) / PI
    } else {
        ((spec.beta * t).sin() - (spec.alpha * t).sin()) / (PI * t)
    }
}

/// Integral of the window from 0 to `z`: `(Si(beta z) - Si(alpha z)) / pi`.
pub fn sin_window_primitive(spec: &KernelSpec, z: f64) -> f64 {
    (sine_integral(spec.beta * z) - sine_integral(spec.alpha * z)) / PI
}

/// `(sin(u2 t) - sin(u1 t)) / t`, the integral of `cos(t tau)` over `[u1, u2]`.
pub fn cos_window(u1: f64, u2: f64, t: f64) -> f64 {
    let w = u1.abs().max(u2.abs());
    let tau0 = 1e-3 * (1.0f64).min(1.0 / w.max(1e-300));
    if t.abs() < tau0 {
        odd_power_series(u1, u2, t)
    } else {
        ((u2 * t).sin() - (u1 * t).sin()) / t
    }
}

/// `sin(w t) / (pi t)` with the removable point handled.
pub fn sinc_pi(w: f64, t: f64) -> f64 {
    let x = w * t;
    if x.abs() < 1e-4 {
        w * (1.0 - x * x / 6.0) / PI
    } else {
        x.sin() / (PI * t)
    }
}

/// `sin(w t) / (pi t)` as an engine field.
pub(crate) fn sinc_field(w: f64) -> Field1 {
    Field1::new(move |t| Complex64::new(sinc_pi(w, t), 0.0)).with_anchors(&[0.0])
}

pub type Rule = Arc<dyn Fn(usize) -> f64 + Send + Sync>;

/// An increasing positive sequence `u_1 < u_2 < ...` with its lacunary constant.
#[derive(Clone)]
pub struct LacunarySequence {
    rule: Rule,
    /// `u_1 ..= u_probe` as certified.
    pub u: Vec<f64>,
    pub a: f64,
    pub tail_eps: f64,
}

impl fmt::Debug for LacunarySequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LacunarySequence").field("u", &self.u).field("a", &self.a).finish()
    }
}

impl LacunarySequence {
    /// `u_j`, with the convention `u_0 = 0`.
    pub fn at(&self, j: usize) -> f64 {
        if j == 0 {
            0.0
        } else {
            (self.rule)(j)
        }
    }

    /// `{2^j}`.
    pub fn pow2() -> Self {
        lacunary_certify(|j| 2f64.powi(j as i32), 40, 1e-15).expect("powers of two are lacunary")
    }

    /// `{r^j}` for `r > 1`.
    pub fn geometric(r: f64) -> Result<Self> {
        if !(r > 1.0) {
            return Err(Error::NotLacunary(format!("ratio {r} must exceed 1")));
        }
        lacunary_certify(move |j| r.powi(j as i32), 40, 1e-15)
    }
}

const TERM_BUDGET: usize = 1_000_000;
const DIVERGENCE_CAP: f64 = 1e6;

/// `u_m * sum_{j >= m} 1 / u_j` for `m = 1..=probe_m`; `A` is the largest.
pub fn lacunary_certify(rule: impl Fn(usize) -> f64 + Send + Sync + 'static, probe_m: usize, tail_eps: f64) -> Result<LacunarySequence> {
    let rule: Rule = Arc::new(rule);
    if probe_m == 0 || !(tail_eps > 0.0) {
        return Err(Error::InvalidArgument("probe_m must be positive and tail_eps > 0".into()));
    }
    let u: Vec<f64> = (1..=probe_m).map(|j| rule(j)).collect();
    if u.iter().any(|v| !(v.is_finite() && *v > 0.0)) || u.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::NotLacunary("rule is not positive and strictly increasing on the probed range".into()));
    }
    let mut a = 1.0f64;
    for m in 1..=probe_m {
        let um = u[m - 1];
        let mut s = Neumaier::new();
        let mut prev_term = f64::NAN;
        let mut done = false;
        for j in m..m + TERM_BUDGET {
            let uj = rule(j);
            if !(uj > 0.0) {
                return Err(Error::NotLacunary(format!("u_{j} is not positive")));
            }
            let term = um / uj;
            s.add(term);
            if s.total() > DIVERGENCE_CAP {
                return Err(Error::NotLacunary(format!("u_m * tail exceeds {DIVERGENCE_CAP} at m = {m}")));
            }
            if term < tail_eps * s.total() {
                let q = term / prev_term;
                if q.is_finite() && q < 1.0 {
                    s.add(term * q / (1.0 - q));
                }
                done = true;
                break;
            }
            prev_term = term;
        }
        if !done {
            return Err(Error::NotLacunary(format!("tail not summable within {TERM_BUDGET} terms at m = {m}")));
        }
        a = a.max(s.total());
    }
    Ok(LacunarySequence { rule, u, a, tail_eps })
}

/// `max over v in [lo, hi]` of `|Si(t v) - Si(t lo)|`, from the extrema of Si.
pub fn interval_max(t: f64, lo: f64, hi: f64) -> f64 {
    let s = t.abs();
    let (sa, sb) = (s * lo, s * hi);
    let base = sine_integral(sa);
    let mut best = (sine_integral(sb) - base).abs();
    let k = (sa / PI).ceil().max(1.0);
    for kk in [k, k + 1.0] {
        let c = kk * PI;
        if c <= sb {
            best = best.max((sine_integral(c) - base).abs());
        }
    }
    best
}

/// Partial sum over `j = 1..=terms` of the per-interval maxima.
pub fn lm1_sum(t: f64, seq: &LacunarySequence, terms: usize) -> f64 {
    let mut s = Neumaier::new();
    for j in 1..=terms {
        s.add(interval_max(t, seq.at(j - 1), seq.at(j)));
    }
    s.total()
}

/// The same maxima summed over `j = m+1 ..= m+terms`.
pub fn lm2_tail(t: f64, seq: &LacunarySequence, m: usize, terms: usize) -> f64 {
    let mut s = Neumaier::new();
    for j in m + 1..=m + terms {
        s.add(interval_max(t, seq.at(j - 1), seq.at(j)));
    }
    s.total()
}

/// `3A + 4`.
pub fn lm1_bound(seq: &LacunarySequence) -> f64 {
    3.0 * seq.a + 4.0
}

/// `3A / (|t| u_m)`.
pub fn lm2_bound(t: f64, seq: &LacunarySequence, m: usize) -> f64 {
    3.0 * seq.a / (t.abs() * seq.at(m))
}
