// SPDX-License-Identifier: Apache-2.0
//! Command execution. Each command computes all of its artifacts in memory
//! and hands them back for writing.

use std::fmt;
use std::io::Read;
use std::path::PathBuf;

use anyhow::{anyhow, Context, Result};
use serde_json::{json, Value};

use tropvert::invariants::{
    bps_aggregate, bps_invert_checked, commutator_coeffs_from, commutator_diagram, commutator_required_order,
    m_p_d, partition_key, r_d, r_rd, GradedPartition, GwGeometry, GwLine, InvariantTable, SeriesKind,
};
use tropvert::rational;
use tropvert::scattering::{scatter_at_origin, scatter_by_perturbation, ScatteringDiagram, WallKind};
use tropvert::tropical::{curve_from_ray, ntrop_with_curves, TropicalCurveRecord, WeightData};
use tropvert::verify::{check_consistency, verify_commutator, VerifyConfig, VerifyReport};
use tropvert::LatticeVector;

use crate::args::*;
use crate::output::Artifact;
use crate::svg;

pub const SEED_ENV: &str = "TROPVERT_SEED";

/// An invalid configuration or argument value (exit code 2).
#[derive(Debug)]
pub struct SchemaError(pub String);

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration: {}", self.0)
    }
}

impl std::error::Error for SchemaError {}

pub fn schema(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(SchemaError(msg.into()))
}

/// Failing checks of a verification run that still produced its report.
#[derive(Debug)]
pub struct ChecksFailed(pub Vec<String>);

impl fmt::Display for ChecksFailed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "failing checks: {}", self.0.join(", "))
    }
}

impl std::error::Error for ChecksFailed {}

#[derive(Clone, Debug)]
pub enum Task {
    Scatter(ScatterArgs),
    Commutator(CommutatorArgs),
    Gw(GwArgs),
    GradedGw(GradedGwArgs),
    TropicalCount(TropicalCountArgs),
    Bps(BpsArgs),
    Multicover(MulticoverArgs),
    Verify(VerifyArgs),
}

impl Task {
    pub const NAMES: [&'static str; 8] =
        ["scatter", "commutator", "gw", "graded-gw", "tropical-count", "bps", "multicover", "verify"];

    /// Builds a task from the command name and the remaining keys of a
    /// configuration object.
    pub fn from_config(command: &str, params: Value) -> Result<Task> {
        fn parse<T: serde::de::DeserializeOwned>(v: Value) -> Result<T> {
            serde_json::from_value(v).map_err(|e| schema(e.to_string()))
        }
        Ok(match command {
            "scatter" => Task::Scatter(parse(params)?),
            "commutator" => Task::Commutator(parse(params)?),
            "gw" => Task::Gw(parse(params)?),
            "graded-gw" => Task::GradedGw(parse(params)?),
            "tropical-count" => Task::TropicalCount(parse(params)?),
            "bps" => Task::Bps(parse(params)?),
            "multicover" => Task::Multicover(parse(params)?),
            "verify" => Task::Verify(parse(params)?),
            other => return Err(schema(format!("unknown command {other:?}; expected one of {}", Task::NAMES.join(", ")))),
        })
    }
}

/// The outcome of a command: artifacts to write and, for verification, the
/// failing checks.
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub failure: Option<ChecksFailed>,
}

impl Outcome {
    fn ok(artifacts: Vec<Artifact>) -> Self {
        Outcome { artifacts, failure: None }
    }
}

/// The seed in force: the environment variable if set, then the explicit
/// value, then zero.
pub fn resolve_seed(explicit: Option<u64>) -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s.trim().parse().map_err(|_| schema(format!("{SEED_ENV}={s:?} is not a non-negative integer"))),
        Err(_) => Ok(explicit.unwrap_or(0)),
    }
}

fn check_order(order: u32) -> Result<()> {
    if order == 0 {
        return Err(schema("order must be at least 1"));
    }
    Ok(())
}

fn check_format(out: &OutputArgs, allowed: &[Format], default: Format) -> Result<Format> {
    let f = out.format.unwrap_or(default);
    if !allowed.contains(&f) {
        return Err(schema(format!("format {f:?} is not available for this command")));
    }
    Ok(f)
}

fn no_curves(out: &OutputArgs, command: &str) -> Result<()> {
    if out.curves.is_some() || out.emit_curves {
        return Err(schema(format!("{command} does not produce tropical curves")));
    }
    Ok(())
}

fn no_svg(out: &OutputArgs, command: &str) -> Result<()> {
    if out.svg.is_some() || out.emit_svg {
        return Err(schema(format!("{command} does not produce a picture")));
    }
    Ok(())
}

fn read_source(src: &str) -> Result<String> {
    if src == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(src).with_context(|| format!("cannot read {src}"))
    }
}

fn load_diagram(src: &str) -> Result<ScatteringDiagram> {
    let text = read_source(src)?;
    let value: Value = serde_json::from_str(&text).map_err(|e| schema(format!("{src}: {e}")))?;
    ScatteringDiagram::from_json(&value).map_err(|e| schema(format!("{src}: {e}")))
}

fn table_artifact(table: &InvariantTable, path: Option<PathBuf>, format: Format) -> Result<Artifact> {
    match format {
        Format::Csv => Ok(Artifact::new(path, table.to_csv())),
        Format::Json => Artifact::json(path, &table.to_json()),
    }
}

fn curves_json(curves: &[TropicalCurveRecord], extra: Value) -> Value {
    let mut v = extra;
    v["curves"] = Value::Array(curves.iter().map(TropicalCurveRecord::to_json).collect());
    v
}

pub fn execute(task: &Task, out: &OutputArgs) -> Result<Outcome> {
    let curves_path = out.curves_path().map_err(schema)?;
    let svg_path = out.svg_path().map_err(schema)?;
    match task {
        Task::Scatter(a) => scatter(a, out, curves_path, svg_path),
        Task::Commutator(a) => {
            no_curves(out, "commutator")?;
            commutator(a, out, svg_path)
        }
        Task::Gw(a) => {
            no_curves(out, "gw")?;
            no_svg(out, "gw")?;
            gw(a, out)
        }
        Task::GradedGw(a) => {
            no_curves(out, "graded-gw")?;
            no_svg(out, "graded-gw")?;
            graded_gw(a, out)
        }
        Task::TropicalCount(a) => tropical_count(a, out, curves_path, svg_path),
        Task::Bps(a) => {
            no_curves(out, "bps")?;
            no_svg(out, "bps")?;
            bps(a, out)
        }
        Task::Multicover(a) => {
            no_curves(out, "multicover")?;
            no_svg(out, "multicover")?;
            multicover(a, out)
        }
        Task::Verify(a) => {
            no_curves(out, "verify")?;
            no_svg(out, "verify")?;
            verify(a, out)
        }
    }
}

fn scatter(a: &ScatterArgs, out: &OutputArgs, curves: Option<PathBuf>, svg: Option<PathBuf>) -> Result<Outcome> {
    check_format(out, &[Format::Json], Format::Json)?;
    let mut d = match (&a.input, &a.diagram) {
        (Some(src), None) => load_diagram(src)?,
        (None, Some(v)) => ScatteringDiagram::from_json(v).map_err(|e| schema(format!("diagram: {e}")))?,
        (Some(_), Some(_)) => return Err(schema("give either input or diagram, not both")),
        (None, None) => return Err(schema("scatter needs an input diagram")),
    };
    let ring_order = d.context().order();
    let order = a.order.unwrap_or(ring_order);
    check_order(order)?;
    if order > ring_order {
        return Err(schema(format!("order {order} exceeds the order {ring_order} of the input ring")));
    }
    if order < ring_order {
        d = d.truncate_to(&d.context().with_order(order)?)?;
    }
    if curves.is_some() && a.method != Method::Perturbation {
        return Err(schema("tropical curves are only available with --method perturbation"));
    }
    let mut artifacts = Vec::new();
    let scattered = match a.method {
        Method::Direct => scatter_at_origin(&d)?.minimalize()?,
        Method::Perturbation => {
            let res = scatter_by_perturbation(&d, order, resolve_seed(a.seed)?)?;
            if let Some(path) = curves {
                let p = &res.perturbed;
                let mut recs = Vec::new();
                for (idx, w) in p.walls().iter().enumerate() {
                    if w.kind == WallKind::Ray {
                        recs.push(curve_from_ray(p, idx)?);
                    }
                }
                artifacts.push(Artifact::json(Some(path), &curves_json(&recs, json!({"seed": res.seed})))?);
            }
            res.asymptotic.minimalize()?
        }
    };
    artifacts.insert(0, Artifact::json(out.output.clone(), &scattered.to_json())?);
    if let Some(path) = svg {
        artifacts.push(Artifact::new(Some(path), svg::diagram(&scattered)));
    }
    Ok(Outcome::ok(artifacts))
}

fn commutator(a: &CommutatorArgs, out: &OutputArgs, svg: Option<PathBuf>) -> Result<Outcome> {
    let format = check_format(out, &[Format::Json, Format::Csv], Format::Json)?;
    check_order(a.order)?;
    if let (Some(dir), Some(k)) = (a.direction, a.max_k) {
        if dir.0.a <= 0 || dir.0.b <= 0 {
            return Err(schema(format!("ray directions of the commutator lie in the open first quadrant, got {dir}")));
        }
        let need = commutator_required_order(dir.0.primitive()?, k);
        if a.order < need {
            return Err(tropvert::Error::InsufficientOrder { have: a.order, need }.into());
        }
    }
    let scattered = scatter_at_origin(&commutator_diagram(a.l1, a.l2, a.order)?)?;
    let dirs: Vec<LatticeVector> = match a.direction {
        Some(d) => vec![d.0.primitive()?],
        None => scattered.rays().map(|w| w.direction()).collect(),
    };
    let mut rays = Vec::new();
    let mut csv = String::from("a,b,k,c\n");
    for dir in dirs {
        let mut c = commutator_coeffs_from(&scattered, dir)?;
        if let Some(max_k) = a.max_k {
            let mut kept = InvariantTable::new(c.name().to_string(), "k");
            for (k, v) in c.entries().iter().take(max_k as usize) {
                kept.insert(k.clone(), v.clone());
            }
            c = kept;
        }
        let f = scattered.wall_at_origin(WallKind::Ray, dir).map(|w| w.function().to_string()).unwrap_or_else(|| "1".into());
        let entries: Vec<Value> = c
            .entries()
            .iter()
            .map(|(k, v)| {
                csv.push_str(&format!("{},{},{k},{}\n", dir.a, dir.b, rational::to_string(v)));
                json!({"k": k.parse::<u32>().unwrap_or(0), "c": rational::to_string(v)})
            })
            .collect();
        rays.push(json!({"direction": [dir.a, dir.b], "f": f, "coefficients": entries}));
    }
    let main = match format {
        Format::Csv => Artifact::new(out.output.clone(), csv),
        Format::Json => Artifact::json(
            out.output.clone(),
            &json!({
                "l1": a.l1,
                "l2": a.l2,
                "order": a.order,
                "rays": rays,
                "diagram": scattered.to_json(),
            }),
        )?,
    };
    let mut artifacts = vec![main];
    if let Some(path) = svg {
        artifacts.push(Artifact::new(Some(path), svg::diagram(&scattered)));
    }
    Ok(Outcome::ok(artifacts))
}

fn parse_keys(keys: &[String]) -> Result<Vec<Vec<GradedPartition>>> {
    keys.iter()
        .map(|k| k.split('|').map(|p| p.trim().parse::<GradedPartition>()).collect::<tropvert::Result<Vec<_>>>())
        .collect::<tropvert::Result<Vec<_>>>()
        .map_err(|e| schema(format!("partition key: {e}")))
}

fn gw_table(geo: &GwGeometry, out_dir: Dir, keys: &[String]) -> Result<InvariantTable> {
    if !out_dir.0.is_primitive() {
        return Err(schema(format!("outgoing direction {out_dir} is not primitive")));
    }
    let requested = parse_keys(keys)?;
    // Fail on order before doing the expensive scattering.
    let order = geo.context().order();
    for g in &requested {
        let need: u32 = g.iter().map(GradedPartition::degree).sum();
        if need > order {
            return Err(tropvert::Error::InsufficientOrder { have: order, need }.into());
        }
    }
    let scattered = geo.scatter()?;
    if requested.is_empty() {
        return Ok(geo.table(&scattered, out_dir.0)?);
    }
    let mut table = InvariantTable::new(format!("N[G] out {}", out_dir.0), "partitions");
    for g in requested {
        let m = geo.direction_of(&g);
        if m.is_zero() || !m.same_ray(&out_dir.0) {
            return Err(schema(format!("{} does not point along {}", partition_key(&g), out_dir.0)));
        }
        let v = geo.invariant(&scattered, &g)?;
        table.insert(partition_key(&g), v);
    }
    Ok(table)
}

fn gw(a: &GwArgs, out: &OutputArgs) -> Result<Outcome> {
    let format = check_format(out, &[Format::Json, Format::Csv], Format::Csv)?;
    check_order(a.order)?;
    let geo = GwGeometry::commutator(a.m1.0, a.m2.0, a.l1, a.l2, a.order).map_err(|e| schema(e.to_string()))?;
    let table = gw_table(&geo, a.out, &a.partitions)?;
    Ok(Outcome::ok(vec![table_artifact(&table, out.output.clone(), format)?]))
}

fn graded_gw(a: &GradedGwArgs, out: &OutputArgs) -> Result<Outcome> {
    let format = check_format(out, &[Format::Json, Format::Csv], Format::Csv)?;
    check_order(a.order)?;
    let lines: Vec<GwLine> = a
        .lines
        .iter()
        .map(|l| GwLine { direction: l.direction.0, lengths: l.values.iter().map(|&n| n as usize).collect() })
        .collect();
    let geo = GwGeometry::new(lines, a.order).map_err(|e| schema(e.to_string()))?;
    let table = gw_table(&geo, a.out, &a.partitions)?;
    Ok(Outcome::ok(vec![table_artifact(&table, out.output.clone(), format)?]))
}

fn tropical_count(
    a: &TropicalCountArgs,
    out: &OutputArgs,
    curves: Option<PathBuf>,
    svg: Option<PathBuf>,
) -> Result<Outcome> {
    check_format(out, &[Format::Json], Format::Json)?;
    if let Some(order) = a.order {
        check_order(order)?;
    }
    let m: Vec<LatticeVector> = a.lines.iter().map(|l| l.direction.0).collect();
    let w: Vec<Vec<u32>> = a.lines.iter().map(|l| l.values.clone()).collect();
    let data = WeightData::new(m, w).map_err(|e| schema(e.to_string()))?;
    let count = ntrop_with_curves(&data, resolve_seed(a.seed)?)?;
    let lines: Vec<Value> = data
        .m()
        .iter()
        .zip(data.w())
        .map(|(m, w)| json!({"direction": [m.a, m.b], "weights": w}))
        .collect();
    let summary = json!({
        "lines": lines,
        "m_out": [data.m_out().a, data.m_out().b],
        "w_out": data.w_out(),
        "ntrop": rational::to_string(&count.value),
        "curves": count.curves.len(),
        "seed": count.seed,
    });
    let mut artifacts = vec![Artifact::json(out.output.clone(), &summary)?];
    if let Some(path) = curves {
        let v = curves_json(&count.curves, json!({"ntrop": rational::to_string(&count.value), "seed": count.seed}));
        artifacts.push(Artifact::json(Some(path), &v)?);
    }
    if let Some(path) = svg {
        artifacts.push(Artifact::new(Some(path), svg::curves(&count.curves)));
    }
    Ok(Outcome::ok(artifacts))
}

fn bps(a: &BpsArgs, out: &OutputArgs) -> Result<Outcome> {
    let format = check_format(out, &[Format::Json, Format::Csv], Format::Json)?;
    let kind = if a.graded { SeriesKind::Graded } else { SeriesKind::Ordinary };
    let series: Vec<_> = a.series.iter().map(|r| r.0.clone()).collect();
    let report = bps_invert_checked(&series, a.w, kind).map_err(|e| schema(e.to_string()))?;
    let round_trip = bps_aggregate(&report.n, a.w) == series;
    let main = match format {
        Format::Csv => {
            let mut s = String::from("k,N,n,integral\n");
            for (k, ((big, n), int)) in series.iter().zip(&report.n).zip(&report.integral).enumerate() {
                s.push_str(&format!("{},{},{},{int}\n", k + 1, rational::to_string(big), rational::to_string(n)));
            }
            Artifact::new(out.output.clone(), s)
        }
        Format::Json => {
            let mut v = report.to_json();
            v["input"] = json!(series.iter().map(rational::to_string).collect::<Vec<_>>());
            v["round_trip"] = json!(round_trip);
            Artifact::json(out.output.clone(), &v)?
        }
    };
    Ok(Outcome::ok(vec![main]))
}

fn multicover(a: &MulticoverArgs, out: &OutputArgs) -> Result<Outcome> {
    let format = check_format(out, &[Format::Json, Format::Csv], Format::Csv)?;
    if a.max_d == 0 || a.max_r == 0 || a.w.contains(&0) {
        return Err(schema("max_d, max_r and the weights must be positive"));
    }
    let mut t = InvariantTable::new("multiple covers", "quantity");
    for d in 1..=a.max_d {
        t.insert(format!("R_{d}"), r_d(d));
    }
    for r in 1..=a.max_r {
        for d in 1..=a.max_d {
            t.insert(format!("R^{r}_{d}"), r_rd(r, d));
        }
    }
    for &w in &a.w {
        for d in 1..=a.max_d {
            t.insert(format!("M_P[{d}] w={w}"), m_p_d(w, d));
        }
    }
    Ok(Outcome::ok(vec![table_artifact(&t, out.output.clone(), format)?]))
}

/// The report without timings, so that identical runs give identical bytes.
fn report_json(report: &VerifyReport) -> Value {
    let mut v = report.to_json();
    if let Some(checks) = v.get_mut("checks").and_then(Value::as_array_mut) {
        for c in checks {
            if let Some(obj) = c.as_object_mut() {
                obj.remove("millis");
            }
        }
    }
    v
}

fn verify(a: &VerifyArgs, out: &OutputArgs) -> Result<Outcome> {
    check_format(out, &[Format::Json], Format::Json)?;
    let report = if let Some(src) = &a.diagram {
        let d = load_diagram(src)?;
        VerifyReport { checks: vec![check_consistency(&d)] }
    } else {
        let (Some(l1), Some(l2), Some(order)) = (a.l1, a.l2, a.order) else {
            return Err(schema("verify needs l1, l2 and order, or a diagram"));
        };
        check_order(order)?;
        let mut cfg = VerifyConfig::new(l1, l2, order);
        cfg.seeds = if a.seeds.is_empty() || std::env::var(SEED_ENV).is_ok() {
            let s = resolve_seed(a.seed)?;
            vec![s, s + 1]
        } else {
            a.seeds.clone()
        };
        verify_commutator(&cfg)?
    };
    for c in &report.checks {
        eprintln!(
            "{:<28} {}{} ({} ms)",
            c.name,
            if c.passed { "pass" } else { "FAIL" },
            if c.soft { " [soft]" } else { "" },
            c.millis
        );
    }
    let failure = (!report.passed()).then(|| ChecksFailed(report.failing().iter().map(|s| s.to_string()).collect()));
    Ok(Outcome { artifacts: vec![Artifact::json(out.output.clone(), &report_json(&report))?], failure })
}
