use std::fmt::Write as _;

use anyhow::{bail, ensure, Context, Result};
use serde_json::json;
use symroot_core::oracle::{
    agreement_harness, boundary_distance_ok, min_eigenvalue_on_sphere, DirectionSampler, HarnessConfig,
};
use symroot_core::pd2d::{
    check_field, classify, definiteness_polynomial, det_hessian_coeffs, format_bound, interval_table,
    is_positive_definite, necessary_conditions, Minor2D,
};
use symroot_core::pd3d::{base_matrix, det_coeffs, leading_minors, necessary_conditions_3d, numeric_pd_check_3d};
use symroot_core::riemann::{curvature, verify_constant_curvature, DerivativeMode};
use symroot_core::sympoly::{monomial_to_charpoly_2d, monomial_to_charpoly_3d};
use symroot_core::{CoefficientSet2D, CoefficientSet3D};

use crate::config::MetricConfig;
use crate::output::{num, opt, Outcome};
use crate::{Cli, CoefficientSource, Command, GlobalOpts};

const DEFAULT_SPHERE_SAMPLES: usize = 2000;
const DEFAULT_CIRCLE_SAMPLES: usize = 720;
const DEFAULT_FIELD_GRID: usize = 61;
const DEFAULT_CURVATURE_GRID: usize = 10;
const DEFAULT_TOL_EXACT: f64 = 1e-6;
const DEFAULT_TOL_FD: f64 = 1e-4;

pub fn run(cli: &Cli) -> Result<Outcome> {
    let g = &cli.global;
    match &cli.command {
        Command::Check2d(src) => check2d(&load_source(src, 2)?),
        Command::Check3d(src) => check3d(&load_source(src, 3)?, g),
        Command::Table { l, m } => table(&parse_list(l)?, &parse_list(m)?),
        Command::Curvature { config, constant_k, finite_difference, step } => {
            let mode = if *finite_difference { DerivativeMode::FiniteDifference(*step) } else { DerivativeMode::Exact };
            curvature_cmd(&MetricConfig::load(config)?, *constant_k, mode, g)
        }
        Command::OracleCompare { config, random, margin } => match (config, random) {
            (_, Some(n)) => oracle_random(*n, *margin, g),
            (Some(path), None) => oracle_single(&MetricConfig::load(path)?, *margin, g),
            (None, None) => bail!("give a config or --random N"),
        },
        Command::ClassifyField { config } => classify_field(&MetricConfig::load(config)?),
    }
}

fn load_source(src: &CoefficientSource, dimension: usize) -> Result<MetricConfig> {
    if let Some(path) = &src.config {
        let config = MetricConfig::load(path)?;
        ensure!(config.dimension == dimension, "{} is a {}-dimensional config", path.display(), config.dimension);
        return Ok(config);
    }
    let c = src.coefficients.as_deref().context("give a config or --coefficients")?;
    match (dimension, c) {
        (2, &[l, m, n]) => Ok(MetricConfig::monomial_2d(CoefficientSet2D::new(l, m, n))),
        (3, &[l, m, n, q]) => Ok(MetricConfig::monomial_3d(CoefficientSet3D::new(l, m, n, q))),
        _ => bail!("expected {} coefficients, got {}", dimension + 1, c.len()),
    }
}

/// Comma-separated numbers or inclusive integer ranges `a..b`.
pub fn parse_list(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some((a, b)) = item.split_once("..") {
            let (a, b): (i64, i64) = (a.trim().parse()?, b.trim().parse()?);
            ensure!(a <= b, "empty range `{item}`");
            out.extend((a..=b).map(|v| v as f64));
        } else {
            out.push(item.parse().with_context(|| format!("not a number: `{item}`"))?);
        }
    }
    ensure!(!out.is_empty(), "empty list `{text}`");
    Ok(out)
}

fn check2d(config: &MetricConfig) -> Result<Outcome> {
    let c = config.constant_2d()?;
    let class = classify(&c);
    let conditions = necessary_conditions(&c);
    let det = det_hessian_coeffs(&c);
    let poly = definiteness_polynomial(&c);
    let pass = class.verdict.is_positive_definite();

    let mut text = String::new();
    writeln!(text, "coefficients   l = {}, m = {}, n = {}", c.l, c.m, c.n)?;
    let cp = monomial_to_charpoly_2d(c);
    writeln!(text, "charpoly       a = {}, b = {}, c = {}", cp.a, cp.b, cp.c)?;
    writeln!(
        text,
        "det A          {} (y1^4 + y2^4) + {} (y1^3 y2 + y1 y2^3) + {} y1^2 y2^2",
        det.c40, det.c31, det.c22
    )?;
    writeln!(
        text,
        "P(z)           {} z^2 + {} z + {}   discriminant {}",
        poly.alpha,
        poly.beta,
        poly.gamma,
        poly.discriminant()
    )?;
    writeln!(text, "conditions")?;
    for check in &conditions.checks {
        writeln!(text, "  [{}] {}", if check.holds { "ok" } else { "FAIL" }, check.name)?;
    }
    let b = class.bounds;
    write!(text, "n window       ]{}, {}[", format_bound(b.lower), format_bound(b.upper))?;
    if let Some(cv) = b.critical {
        write!(text, "   critical {}", format_bound(cv))?;
    }
    writeln!(text)?;
    write!(text, "verdict        {}", class.verdict.label())?;
    if let Some(r) = &class.reason {
        write!(text, " ({r})")?;
    }
    writeln!(text)?;
    if let Some(w) = &class.witness {
        let minor = match w.minor {
            Minor2D::LeadingEntry => "A11",
            Minor2D::Determinant => "det A",
        };
        match (w.integer_direction, w.integer_value) {
            (Some([a, b]), Some(v)) => writeln!(text, "witness        {minor}({a}, {b}) = {v}")?,
            _ => writeln!(
                text,
                "witness        {minor} at ({:.6}, {:.6}) = {:.6e}",
                w.direction[0], w.direction[1], w.value
            )?,
        }
    }

    let json = json!({
        "command": "check2d",
        "config": config,
        "coefficients": c,
        "charpoly": cp,
        "necessary_conditions": conditions,
        "det_hessian": det,
        "definiteness_polynomial": {
            "alpha": poly.alpha, "beta": poly.beta, "gamma": poly.gamma,
            "delta1": poly.delta1, "delta2": poly.delta2, "discriminant": poly.discriminant(),
        },
        "positive_definite": pass,
        "verdict": class.verdict.label(),
        "classification": class,
    });
    let w = class.witness.as_ref();
    let row = vec![
        num(c.l),
        num(c.m),
        num(c.n),
        class.verdict.label().to_string(),
        num(b.lower),
        num(b.upper),
        opt(b.critical),
        w.and_then(|w| w.integer_direction).map(|d| format!("{} {}", d[0], d[1])).unwrap_or_default(),
        opt(w.and_then(|w| w.integer_value)),
    ];
    Ok(Outcome {
        pass,
        text,
        json,
        csv_header: header(&[
            "l",
            "m",
            "n",
            "verdict",
            "lower",
            "upper",
            "critical",
            "witness_direction",
            "witness_value",
        ]),
        csv_rows: vec![row],
    })
}

fn check3d(config: &MetricConfig, g: &GlobalOpts) -> Result<Outcome> {
    let c = config.constant_3d()?;
    let conditions = necessary_conditions_3d(&c);
    let det = det_coeffs(&c);
    let base = base_matrix(&c);
    let corner = leading_minors(&base);
    let numeric = numeric_pd_check_3d(&c, g.samples.unwrap_or(DEFAULT_SPHERE_SAMPLES))?;
    let pass = conditions.all_hold && numeric.pd_evidence;

    let mut text = String::new();
    writeln!(text, "coefficients   l = {}, m = {}, n = {}, q = {}", c.l, c.m, c.n, c.q)?;
    let cp = monomial_to_charpoly_3d(c);
    writeln!(text, "charpoly       a = {}, b = {}, c = {}, d = {}", cp.a, cp.b, cp.c, cp.d)?;
    writeln!(
        text,
        "det A          a..g = {}, {}, {}, {}, {}, {}, {}",
        det.a, det.b, det.c, det.d, det.e, det.f, det.g
    )?;
    writeln!(text, "base minors    {}, {}, {}", corner[0], corner[1], corner[2])?;
    let mark = |ok: bool| if ok { "ok" } else { "FAIL" };
    writeln!(text, "conditions")?;
    writeln!(text, "  [{}] l > 0", mark(conditions.l_positive))?;
    writeln!(
        text,
        "  [{}] {} < q < {}",
        mark(conditions.q_in_range),
        conditions.q_lower.map(num).unwrap_or_else(|| "-".into()),
        num(conditions.q_upper)
    )?;
    writeln!(text, "  [{}] restriction to y3 = 0 is positive definite", mark(conditions.planar.positive_definite))?;
    writeln!(text, "numeric        {} directions", numeric.directions)?;
    for m in &numeric.minima {
        writeln!(text, "  min minor {}  {:.6e}", m.order, m.value)?;
    }
    writeln!(text, "verdict        {}", if pass { "pd-evidence" } else { "not-pd" })?;

    let json = json!({
        "command": "check3d",
        "config": config,
        "coefficients": c,
        "charpoly": cp,
        "necessary_conditions": conditions,
        "det_coeffs": det,
        "base_matrix": base,
        "base_minors": corner,
        "numeric": numeric,
        "positive_definite": pass,
        "verdict": if pass { "pd-evidence" } else { "not-pd" },
    });
    let row = vec![
        num(c.l),
        num(c.m),
        num(c.n),
        num(c.q),
        conditions.all_hold.to_string(),
        numeric.pd_evidence.to_string(),
        num(numeric.minima[0].value),
        num(numeric.minima[1].value),
        num(numeric.minima[2].value),
    ];
    Ok(Outcome {
        pass,
        text,
        json,
        csv_header: header(&["l", "m", "n", "q", "necessary", "pd_evidence", "min_minor1", "min_minor2", "min_minor3"]),
        csv_rows: vec![row],
    })
}

fn table(ls: &[f64], ms: &[f64]) -> Result<Outcome> {
    let t = interval_table(ls, ms);
    let cells: Vec<Vec<String>> =
        (0..t.ms.len()).map(|r| (0..t.ls.len()).map(|c| t.cell_text(r, c)).collect()).collect();
    let mut csv_header = vec!["|m|".to_string()];
    csv_header.extend(t.ls.iter().map(|&l| format_bound(l)));
    let csv_rows =
        t.ms.iter()
            .zip(&cells)
            .map(|(&m, row)| std::iter::once(format_bound(m)).chain(row.iter().cloned()).collect())
            .collect();
    let json = json!({ "command": "table", "l": t.ls, "m": t.ms, "intervals": t.cells, "cells": cells });
    Ok(Outcome { pass: true, text: t.render_text(), json, csv_header, csv_rows })
}

fn points_2d(config: &MetricConfig, default_grid: usize) -> Result<Vec<[f64; 2]>> {
    config
        .sample_points(default_grid)?
        .into_iter()
        .map(|x| match x.as_slice() {
            &[a, b] => Ok([a, b]),
            _ => bail!("curvature points must have two coordinates, got {x:?}"),
        })
        .collect()
}

fn curvature_cmd(
    config: &MetricConfig,
    constant_k: Option<f64>,
    mode: DerivativeMode,
    g: &GlobalOpts,
) -> Result<Outcome> {
    ensure!(config.dimension == 2, "curvature needs a 2-dimensional config");
    let p = config.p_field()?;
    let points = points_2d(config, DEFAULT_CURVATURE_GRID)?;
    let k = constant_k.or(config.solution.as_ref().map(|s| s.k));

    if let Some(k) = k {
        let tol = g.tol.unwrap_or(match mode {
            DerivativeMode::Exact => DEFAULT_TOL_EXACT,
            DerivativeMode::FiniteDifference(_) => DEFAULT_TOL_FD,
        });
        let r = verify_constant_curvature(&p, k, &points, tol, mode);
        let mut text = String::new();
        writeln!(text, "p(x)           {p}")?;
        writeln!(text, "target K       {k}")?;
        writeln!(
            text,
            "points         {} evaluated, {} skipped near |p| = 1, {} errors",
            r.evaluated.len(),
            r.singular.len(),
            r.errors.len()
        )?;
        if let Some(w) = &r.worst {
            writeln!(text, "max |K - k|    {:.3e} at ({}, {})", w.residual, w.x[0], w.x[1])?;
        }
        for e in &r.errors {
            writeln!(text, "  error: {e}")?;
        }
        writeln!(text, "verdict        {} (tol {tol:e})", if r.passes { "pass" } else { "fail" })?;
        let csv_rows =
            r.evaluated.iter().map(|e| vec![num(e.x[0]), num(e.x[1]), num(e.gauss), num(e.residual)]).collect();
        let json = json!({ "command": "curvature", "config": config, "p": p, "verification": r, "pass": r.passes });
        return Ok(Outcome {
            pass: r.passes,
            text,
            json,
            csv_header: header(&["x1", "x2", "gauss", "residual"]),
            csv_rows,
        });
    }

    let mut data = Vec::new();
    let mut errors = Vec::new();
    for &x in &points {
        match curvature(&p, x, mode) {
            Ok(d) => data.push(d),
            Err(e) => errors.push(format!("({}, {}): {e}", x[0], x[1])),
        }
    }
    let mut text = String::new();
    writeln!(text, "p(x)           {p}")?;
    writeln!(text, "{:>12} {:>12} {:>14} {:>14}", "x1", "x2", "p", "K")?;
    for d in &data {
        writeln!(text, "{:>12.6} {:>12.6} {:>14.6e} {:>14.6e}", d.x[0], d.x[1], d.p, d.gauss)?;
    }
    for e in &errors {
        writeln!(text, "error: {e}")?;
    }
    let csv_rows = data.iter().map(|d| vec![num(d.x[0]), num(d.x[1]), num(d.p), num(d.scalar), num(d.gauss)]).collect();
    let pass = errors.is_empty();
    let json =
        json!({ "command": "curvature", "config": config, "p": p, "points": data, "errors": errors, "pass": pass });
    Ok(Outcome { pass, text, json, csv_header: header(&["x1", "x2", "p", "scalar", "gauss"]), csv_rows })
}

fn oracle_random(samples: usize, margin: f64, g: &GlobalOpts) -> Result<Outcome> {
    let defaults = HarnessConfig::default();
    let config = HarnessConfig {
        samples,
        margin,
        seed: g.seed.unwrap_or(defaults.seed),
        directions: g.samples.unwrap_or(defaults.directions),
        ..defaults
    };
    let r = agreement_harness(&config)?;
    let pass = r.disagreements.is_empty();
    let mut text = String::new();
    writeln!(text, "samples        {} in [{}, {}]^3, seed {}", r.compared, config.lo, config.hi, config.seed)?;
    writeln!(text, "redrawn        {} near the boundary (margin {:e})", r.redrawn_near_boundary, config.margin)?;
    writeln!(text, "agree          {} positive definite, {} not", r.agree_positive, r.agree_negative)?;
    writeln!(text, "disagreements  {}", r.disagreements.len())?;
    for d in &r.disagreements {
        let c = d.coefficients;
        writeln!(
            text,
            "  ({}, {}, {}) criterion {} oracle {:.3e}",
            c.l, c.m, c.n, d.criterion, d.oracle_min_eigenvalue
        )?;
    }
    let csv_rows = r
        .disagreements
        .iter()
        .map(|d| {
            let c = d.coefficients;
            vec![num(c.l), num(c.m), num(c.n), d.criterion.to_string(), num(d.oracle_min_eigenvalue)]
        })
        .collect();
    let json = json!({ "command": "oracle-compare", "report": r, "pass": pass });
    Ok(Outcome {
        pass,
        text,
        json,
        csv_header: header(&["l", "m", "n", "criterion", "oracle_min_eigenvalue"]),
        csv_rows,
    })
}

fn oracle_single(config: &MetricConfig, margin: f64, g: &GlobalOpts) -> Result<Outcome> {
    let (criterion, oracle, near_boundary) = match config.dimension {
        2 => {
            let c = config.constant_2d()?;
            let sampler = DirectionSampler::new(2, g.samples.unwrap_or(DEFAULT_CIRCLE_SAMPLES))?;
            let oracle = min_eigenvalue_on_sphere(&c.to_dense(), &sampler)?;
            (is_positive_definite(&c).positive_definite, oracle, !boundary_distance_ok(&c, margin))
        }
        _ => {
            let c = config.constant_3d()?;
            let samples = g.samples.unwrap_or(DEFAULT_SPHERE_SAMPLES);
            let symbolic = numeric_pd_check_3d(&c, samples)?.pd_evidence;
            let oracle = min_eigenvalue_on_sphere(&c.to_dense(), &DirectionSampler::new(3, samples)?)?;
            (symbolic, oracle, false)
        }
    };
    let agree = criterion == oracle.pd_evidence();
    let pass = agree || near_boundary;
    let mut text = String::new();
    writeln!(text, "criterion      {}", if criterion { "positive definite" } else { "not positive definite" })?;
    writeln!(
        text,
        "oracle         min eigenvalue {:.6e} over {} directions at ({})",
        oracle.value,
        oracle.directions,
        oracle.direction.iter().map(|v| format!("{v:.6}")).collect::<Vec<_>>().join(", ")
    )?;
    if near_boundary {
        writeln!(text, "note           coefficients lie within the boundary margin; agreement is not decisive")?;
    }
    writeln!(text, "verdict        {}", if agree { "agree" } else { "disagree" })?;
    let json = json!({
        "command": "oracle-compare",
        "config": config,
        "criterion": criterion,
        "oracle": oracle,
        "near_boundary": near_boundary,
        "agree": agree,
        "pass": pass,
    });
    let row = vec![criterion.to_string(), num(oracle.value), near_boundary.to_string(), agree.to_string()];
    Ok(Outcome {
        pass,
        text,
        json,
        csv_header: header(&["criterion", "oracle_min_eigenvalue", "near_boundary", "agree"]),
        csv_rows: vec![row],
    })
}

fn classify_field(config: &MetricConfig) -> Result<Outcome> {
    let fields = config.fields_2d()?;
    let region = config.region.as_ref().context("classify-field needs a `region`")?;
    let grid = match config.grid.as_deref() {
        None => [DEFAULT_FIELD_GRID; 2],
        Some(&[a, b]) => [a, b],
        Some(other) => bail!("grid must have two axes, got {}", other.len()),
    };
    let r = check_field(&fields, region, grid)?;
    let csv_rows = r
        .points
        .iter()
        .map(|p| {
            let (l, m, n) = p.coefficients.map_or((None, None, None), |c| (Some(c.l), Some(c.m), Some(c.n)));
            vec![
                num(p.x[0]),
                num(p.x[1]),
                opt(l),
                opt(m),
                opt(n),
                p.verdict.map(|v| v.label().to_string()).unwrap_or_else(|| "error".into()),
                opt(p.bounds.map(|b| b.lower)),
                opt(p.bounds.map(|b| b.upper)),
                opt(p.bounds.and_then(|b| b.critical)),
            ]
        })
        .collect();
    let pass = r.positive_definite_everywhere;
    let json = json!({ "command": "classify-field", "config": config, "report": r, "pass": pass });
    Ok(Outcome {
        pass,
        text: r.summary(),
        json,
        csv_header: header(&["x1", "x2", "l", "m", "n", "verdict", "lower", "upper", "critical"]),
        csv_rows,
    })
}

fn header(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::parse_list;

    #[test]
    fn lists_and_ranges() {
        assert_eq!(parse_list("1,2,3,4").unwrap(), [1.0, 2.0, 3.0, 4.0]);
        assert_eq!(parse_list("0..3, 7").unwrap(), [0.0, 1.0, 2.0, 3.0, 7.0]);
        assert_eq!(parse_list("-1..1").unwrap(), [-1.0, 0.0, 1.0]);
        assert_eq!(parse_list("0.5").unwrap(), [0.5]);
        assert!(parse_list("").is_err());
        assert!(parse_list("3..1").is_err());
        assert!(parse_list("x").is_err());
    }
}
