//! Compensated sums, Gauss-Legendre rules and panel layout.

use std::sync::OnceLock;

use num_complex::Complex64;

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CNeumaier {
    re: Neumaier,
    im: Neumaier,
}

impl CNeumaier {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn total(&self) -> Complex64 {
        Complex64::new(self.re.total(), self.im.total())
    }
}

pub fn sum_f64<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut s = Neumaier::new();
    for x in it {
        s.add(x);
    }
    s.total()
}

pub fn sum_c64<I: IntoIterator<Item = Complex64>>(it: I) -> Complex64 {
    let mut s = CNeumaier::new();
    for z in it {
        s.add(z);
    }
    s.total()
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

pub(crate) struct Rule {
    pub x: Vec<f64>,
    pub w: Vec<f64>,
}

pub(crate) fn gl8() -> &'static Rule {
    static R: OnceLock<Rule> = OnceLock::new();
    R.get_or_init(|| {
        let (x, w) = gauss_legendre(8);
        Rule { x, w }
    })
}

pub(crate) fn gl16() -> &'static Rule {
    static R: OnceLock<Rule> = OnceLock::new();
    R.get_or_init(|| {
        let (x, w) = gauss_legendre(16);
        Rule { x, w }
    })
}

/// Mapped nodes and weights of `rule` on [a, b].
pub(crate) fn mapped(rule: &Rule, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    rule.x.iter().zip(&rule.w).map(move |(x, w)| (c + h * x, h * w))
}

/// Panel width policy: never wider than `max_width`, and never wider than
/// `max(scale, distance to the nearest anchor / 2)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct WidthRule {
    pub max_width: f64,
    pub scale: f64,
}

fn distance(a: f64, b: f64, anchors: &[f64]) -> f64 {
    let mut d = f64::INFINITY;
    for &c in anchors {
        let dc = if c >= a && c <= b { 0.0 } else { (a - c).abs().min((b - c).abs()) };
        d = d.min(dc);
    }
    d
}

/// Splits [lo, hi] at the breakpoints inside it, then bisects until every
/// panel satisfies the width rule. Panels near anchors come out small,
/// far ones grow geometrically up to `max_width`.
pub(crate) fn panels(lo: f64, hi: f64, breaks: &[f64], anchors: &[f64], rule: WidthRule) -> Vec<(f64, f64)> {
    let mut cuts = vec![lo];
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&b| b > lo && b < hi).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    cuts.extend(inner);
    cuts.push(hi);
    let zero = [0.0];
    let anchors = if anchors.is_empty() { &zero[..] } else { anchors };
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        split(w[0], w[1], anchors, rule, &mut out, 0);
    }
    out
}

fn split(a: f64, b: f64, anchors: &[f64], rule: WidthRule, out: &mut Vec<(f64, f64)>, depth: u32) {
    let limit = rule.max_width.min(rule.scale.max(0.5 * distance(a, b, anchors)));
    if b - a <= limit || depth > 60 {
        out.push((a, b));
        return;
    }
    let m = 0.5 * (a + b);
    split(a, m, anchors, rule, out, depth + 1);
    split(m, b, anchors, rule, out, depth + 1);
}

/// Relative sliver half-width placed around jump lines in Stieltjes sums.
pub(crate) fn sliver(b: f64) -> f64 {
    1e-9 * b.abs().max(1.0)
}

/// `n` equal cells on [lo, hi] plus narrow cells around every breakpoint
/// strictly inside, so a jump lands in a cell of width ~1e-9.
pub(crate) fn rs_cuts(lo: f64, hi: f64, n: usize, breaks: &[f64]) -> Vec<f64> {
    let n = n.max(1);
    let mut cuts: Vec<f64> = (0..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect();
    cuts[n] = hi;
    for &b in breaks {
        let e = sliver(b);
        for c in [b - e, b, b + e] {
            if c > lo && c < hi {
                cuts.push(c);
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * a.abs().max(1.0));
    cuts
}
