use std::collections::BTreeMap;

use kpfourier::bv::{hardy_variation, tail_variation};
use kpfourier::catalog::catalog;
use kpfourier::inversion::{inversion_study_with, moricz_series, uniformity_scan, STUDY_INNER_TOL};
use kpfourier::kernels::{lm1_bound, lm1_sum, lm2_bound, lm2_tail, LacunarySequence};
use kpfourier::transform::{kpft_point, Route, TransformOptions};
use kpfourier::{BvFunction2, Rect2};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::table::{num, opt, Table};

fn function(c: &RunConfig, default: Option<&str>) -> Result<(String, BvFunction2), CliError> {
    let name = c.str("function").or(default).ok_or_else(|| CliError::Config("--function is required".into()))?;
    let e = catalog()
        .get(name)
        .ok_or_else(|| CliError::Config(format!("unknown function {name:?} (known: {})", catalog().names().join(", "))))?;
    Ok((name.to_string(), e.function.clone()))
}

fn required_pairs(c: &RunConfig, key: &str) -> Result<Vec<(f64, f64)>, CliError> {
    let p = c.pairs(key)?;
    if p.is_empty() {
        return Err(CliError::Config(format!("--{key} is required")));
    }
    Ok(p)
}

/// Explicit `--alpha`/`--beta` lists, else `alpha_k = 4^(1-k)`, `beta_k = 4^k`.
fn ladders(c: &RunConfig) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    match (c.list("alpha")?, c.list("beta")?) {
        (Some(a), Some(b)) => {
            if a.len() != b.len() || a.is_empty() {
                return Err(CliError::Config("--alpha and --beta need the same nonzero length".into()));
            }
            Ok((a, b))
        }
        (None, None) => {
            let n: usize = c.parse_or("ladder", 4)?;
            if n == 0 || n > 8 {
                return Err(CliError::Config(format!("--ladder must be in 1..=8, got {n}")));
            }
            Ok(((1..=n).map(|k| 4f64.powi(1 - k as i32)).collect(), (1..=n).map(|k| 4f64.powi(k as i32)).collect()))
        }
        _ => Err(CliError::Config("give both --alpha and --beta or neither".into())),
    }
}

pub fn transform(c: &RunConfig) -> Result<(Table, Option<CliError>), CliError> {
    let (name, f) = function(c, None)?;
    let freqs = required_pairs(c, "freq")?;
    let route: Route = c.str_or("route", "direct").parse()?;
    let tol = c.positive("tol", 1e-6)?;
    let o = TransformOptions { force_generic: c.flag("force-generic")?, ..TransformOptions::with_tol(tol) };
    let mut t = Table::new(
        &["function", "xi", "eta", "route", "rung", "x_lo", "x_hi", "y_lo", "y_hi", "re", "im", "delta", "converged"],
        &c.hash(),
        tol,
    );
    let rname = c.str_or("route", "direct").to_string();
    for (xi, eta) in freqs {
        let r = kpft_point(&f, xi, eta, route, &o)?;
        let l = &r.ladder;
        for k in 0..l.values.len() {
            let rect = l.rungs.get(k);
            let delta = if k == 0 { None } else { l.deltas.get(k - 1).copied() };
            t.push(vec![
                json!(name),
                num(xi),
                num(eta),
                json!(rname),
                json!(k),
                opt(rect.map(|r| r.x_lo)),
                opt(rect.map(|r| r.x_hi)),
                opt(rect.map(|r| r.y_lo)),
                opt(rect.map(|r| r.y_hi)),
                num(l.values[k].re),
                num(l.values[k].im),
                opt(delta),
                json!(r.converged),
            ]);
        }
    }
    Ok((t, None))
}

pub fn invert(c: &RunConfig) -> Result<(Table, Option<CliError>), CliError> {
    let (name, f) = function(c, None)?;
    let points = required_pairs(c, "point")?;
    let (alphas, betas) = ladders(c)?;
    let tol = c.positive("tol", 5e-2)?;
    let inner = c.positive("inner-tol", STUDY_INNER_TOL)?;
    let mut t = Table::new(
        &["function", "x", "y", "stage", "alpha", "beta", "value", "target", "residual", "rungs", "passed", "error"],
        &c.hash(),
        tol,
    );
    let mut failure = None;
    for (x, y) in points {
        let s = inversion_study_with(&f, x, y, &alphas, &betas, tol, inner)?;
        for (k, st) in s.stages.iter().enumerate() {
            if let Some(e) = &st.error {
                failure.get_or_insert_with(|| CliError::Numeric(format!("stage {} at ({x}, {y}): {e}", k + 1)));
            }
            t.push(vec![
                json!(name),
                num(x),
                num(y),
                json!(k + 1),
                num(st.alpha.0),
                num(st.beta.0),
                opt(st.result.as_ref().map(|r| r.value)),
                num(s.target),
                opt(st.result.as_ref().map(|r| r.residual)),
                st.result.map_or(Value::Null, |r| json!(r.rungs)),
                json!(s.passed),
                st.error.as_ref().map_or(Value::Null, |e| json!(e)),
            ]);
        }
    }
    Ok((t, failure))
}

pub fn study(c: &RunConfig) -> Result<(Table, Option<CliError>), CliError> {
    let (name, f) = function(c, None)?;
    let center = match required_pairs(c, "point")?.as_slice() {
        [p] => *p,
        _ => return Err(CliError::Config("study takes exactly one --point (the center)".into())),
    };
    let (alphas, betas) = ladders(c)?;
    let radius = c.positive("radius", 0.5)?;
    let grid: usize = c.parse_or("grid", 3)?;
    let tol = c.positive("inner-tol", STUDY_INNER_TOL)?;
    let rep = uniformity_scan(&f, center, radius, grid, &alphas, &betas, tol)?;
    let mut t = Table::new(&["function", "x", "y", "stage", "alpha", "beta", "residual", "continuous"], &c.hash(), tol);
    let mut failure = None;
    for (p, row) in rep.points.iter().zip(&rep.residuals) {
        let continuous = !rep.discontinuous_points.contains(p);
        for (k, r) in row.iter().enumerate() {
            if r.is_none() {
                failure.get_or_insert_with(|| CliError::Numeric(format!("inversion failed at ({}, {})", p.0, p.1)));
            }
            t.push(vec![json!(name), num(p.0), num(p.1), json!(k + 1), num(alphas[k]), num(betas[k]), opt(*r), json!(continuous)]);
        }
    }
    Ok((t, failure))
}

pub fn variation(c: &RunConfig) -> Result<(Table, Option<CliError>), CliError> {
    let (name, f) = function(c, None)?;
    let rect = match c.list("rect")? {
        None => Rect2::plane(),
        Some(v) if v.len() == 4 => Rect2::new(v[0], v[1], v[2], v[3])?,
        Some(_) => return Err(CliError::Config("--rect takes x_lo,x_hi,y_lo,y_hi".into())),
    };
    let tol = c.positive("tol", 1e-6)?;
    let tails = c.list("tails")?.unwrap_or_else(|| vec![2.0, 4.0, 8.0]);
    let mut t = Table::new(&["function", "quantity", "m", "x_lo", "x_hi", "y_lo", "y_hi", "value", "levels"], &c.hash(), tol);
    let h = hardy_variation(&f, &rect, None, tol)?;
    let r = rect;
    let mut row = |q: &str, m: Option<f64>, r: Rect2, v: f64, levels: Option<usize>| {
        t.push(vec![
            json!(name),
            json!(q),
            opt(m),
            num(r.x_lo),
            num(r.x_hi),
            num(r.y_lo),
            num(r.y_hi),
            num(v),
            levels.map_or(Value::Null, |l| json!(l)),
        ]);
    };
    row("vitali", None, r, h.vitali.value, Some(h.vitali.refinement_levels));
    row("section_x", None, r, h.section_x.value, Some(h.section_x.refinement_levels));
    row("section_y", None, r, h.section_y.value, Some(h.section_y.refinement_levels));
    row("hardy", None, r, h.vitali.value + h.section_x.value + h.section_y.value, None);
    let inf = f64::INFINITY;
    for m in tails {
        let v = tail_variation(&f, m, tol)?;
        let rects = [
            ("tail_right", Rect2 { x_lo: m, x_hi: inf, y_lo: -inf, y_hi: inf }),
            ("tail_left", Rect2 { x_lo: -inf, x_hi: -m, y_lo: -inf, y_hi: inf }),
            ("tail_top", Rect2 { x_lo: -inf, x_hi: inf, y_lo: m, y_hi: inf }),
            ("tail_bottom", Rect2 { x_lo: -inf, x_hi: inf, y_lo: -inf, y_hi: -m }),
        ];
        for ((q, rr), v) in rects.into_iter().zip(v) {
            row(q, Some(m), rr, v, None);
        }
    }
    Ok((t, None))
}

fn sequence(c: &RunConfig) -> Result<(String, LacunarySequence), CliError> {
    let rule = c.str_or("rule", "pow2");
    let seq = match rule.split_once(':') {
        None if rule == "pow2" => LacunarySequence::pow2(),
        Some(("geometric", r)) => {
            LacunarySequence::geometric(r.parse().map_err(|_| CliError::Config(format!("rule: bad ratio {r:?}")))?)?
        }
        _ => return Err(CliError::Config(format!("unknown rule {rule:?} (pow2, geometric:R)"))),
    };
    Ok((rule.to_string(), seq))
}

pub fn lacunary(c: &RunConfig) -> Result<(Table, Option<CliError>), CliError> {
    let (rule, seq) = sequence(c)?;
    let modes: Vec<&str> = ["lm1", "lm2", "moricz"].into_iter().filter(|k| c.flag(k).unwrap_or(false)).collect();
    for k in ["lm1", "lm2", "moricz"] {
        c.flag(k)?;
    }
    let mode = match modes.as_slice() {
        [] => "lm1",
        [m] => m,
        _ => return Err(CliError::Config("choose one of --lm1, --lm2, --moricz".into())),
    };
    let hash = c.hash();
    if mode == "moricz" {
        let (name, f) = function(c, Some("reciprocal"))?;
        let (x, y) = c.pairs("point")?.first().copied().unwrap_or((0.0, 0.0));
        let n: usize = c.parse_or("n", 6)?;
        let samples: usize = c.parse_or("samples", 5)?;
        let s = moricz_series(&f, x, y, &seq, &seq, n, n, samples)?;
        let mut t = Table::new(&["rule", "function", "x", "y", "i", "j", "block_sup", "partial_sum", "variation", "bound"], &hash, 1e-6);
        let mut sums: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for &(i, j, v) in &s.blocks {
            let part: f64 = s.blocks.iter().filter(|b| b.0 <= i && b.1 <= j).map(|b| b.2).sum();
            sums.insert((i, j), part);
            t.push(vec![json!(rule), json!(name), num(x), num(y), json!(i), json!(j), num(v), num(part), num(s.variation), num(s.bound)]);
        }
        let failure = sums
            .iter()
            .find(|(_, &p)| p > s.bound)
            .map(|((i, j), p)| CliError::Numeric(format!("partial sum {p} at ({i}, {j}) exceeds the bound {}", s.bound)));
        return Ok((t, failure));
    }
    let ts = c.list("t")?.unwrap_or_else(|| vec![1.0]);
    if ts.iter().any(|&t| t == 0.0 || !t.is_finite()) {
        return Err(CliError::Config("--t values must be finite and nonzero".into()));
    }
    let terms: usize = c.parse_or("terms", 60)?;
    let mut t = Table::new(&["rule", "quantity", "t", "m", "terms", "value", "bound"], &hash, 0.0);
    for &tv in &ts {
        if mode == "lm1" {
            t.push(vec![json!(rule), json!("lm1"), num(tv), Value::Null, json!(terms), num(lm1_sum(tv, &seq, terms)), num(lm1_bound(&seq))]);
        } else {
            let ms = c.list("m")?.unwrap_or_else(|| vec![3.0, 5.0, 8.0]);
            for m in ms {
                if m < 1.0 || m.fract() != 0.0 {
                    return Err(CliError::Config(format!("--m values must be positive integers, got {m}")));
                }
                let m = m as usize;
                t.push(vec![
                    json!(rule),
                    json!("lm2"),
                    num(tv),
                    json!(m),
                    json!(terms),
                    num(lm2_tail(tv, &seq, m, terms)),
                    num(lm2_bound(tv, &seq, m)),
                ]);
            }
        }
    }
    Ok((t, None))
}

pub fn catalog_dump(c: &RunConfig) -> Result<(Table, Option<CliError>), CliError> {
    let mut t = Table::new(
        &["name", "tags", "separable", "known_variation", "transform_oracle", "quadrant_limits", "continuity_points", "description"],
        &c.hash(),
        0.0,
    );
    for (s, e) in catalog().summaries().into_iter().zip(catalog().entries()) {
        let pts: Vec<String> = e.continuity_points.iter().map(|(x, y)| format!("{x},{y}")).collect();
        t.push(vec![
            json!(s.name),
            json!(s.tags.join("|")),
            json!(s.separable),
            opt(s.known_variation),
            json!(s.has_transform_oracle),
            json!(s.has_quadrant_limits),
            json!(pts.join(";")),
            json!(s.description),
        ]);
    }
    Ok((t, None))
}
