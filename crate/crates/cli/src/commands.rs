//! Command implementations. Each command writes its reports into the output
//! directory and returns whether everything it checked was consistent.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context as _};
use hyperglue_core::checkers::{
    check_externally_hyperconvex, check_gated, check_hyperconvex, check_proximinal, check_strongly_convex, recheck,
    FiniteSubset, GluingSet, OpenBox, PlaneSet, Subset, TrialConfig,
};
use hyperglue_core::gluing::{gate, gated_dist_shortcut, GateOutcome, GluedPoint, GluedSpace2, SheetSpec, Side};
use hyperglue_core::linf2::{linf_dist, ConvexPolygon, PlanarSpace, Vec2, Window};
use hyperglue_core::metric::{check_metric_axioms, FiniteMetricSpace, MetricModel};
use hyperglue_core::report::{Certificate, PropertyReport};
use hyperglue_core::s5::{s5_counterexample, s5_phase_sweep, s5_scene, S5Config, S5Report, SweepRow};
use hyperglue_core::{Error, Tolerance};
use serde_json::{json, Value};

use crate::config::{
    default_view, ModelConfig, PointConfig, Property, RunConfig, SetConfig, SheetConfig, SideConfig, SweepConfig,
};
use crate::formats::{parse_distance_matrix, parse_polygon, sweep_csv, KeyValues};
use crate::report_io::{
    certificate_from_json, certificate_to_json, gate_json, gate_kv, json_text, property_json, property_kv,
    s5_certificate, s5_json, s5_kv,
};
use crate::svg::emit_svg;

/// Cells whose counterexample is always reported by `repro-s5`.
pub const REPRO_CELLS: [(f64, f64, bool); 6] =
    [(0.25, 0.75, false), (0.5, 0.5, false), (0.0, 1.0, false), (0.5, 0.5, true), (0.0, 0.0, true), (1.0, 1.0, true)];

/// Cells drawn by `repro-s5`.
pub const REPRO_FIGURES: [(f64, f64, bool); 3] = [(0.25, 0.75, false), (0.0, 1.0, false), (1.0, 1.0, true)];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Consistent,
    Mismatch,
}

impl Outcome {
    fn from_ok(ok: bool) -> Self {
        if ok {
            Outcome::Consistent
        } else {
            Outcome::Mismatch
        }
    }
}

#[derive(Debug)]
pub enum Failure {
    /// Malformed config, files or flags.
    Input(anyhow::Error),
    /// A guarantee failed while running (no certificate).
    Runtime(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Input(_) => 2,
            Failure::Runtime(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Input(e) => write!(f, "input error: {e:#}"),
            Failure::Runtime(e) => write!(f, "runtime failure: {e:#}"),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Violation(_) | Error::Infeasible { .. } | Error::IterationBudget { .. } => {
                Failure::Runtime(anyhow!(e))
            }
            _ => Failure::Input(anyhow!(e)),
        }
    }
}

pub type CmdResult<T> = Result<T, Failure>;

/// Flags merged with the config file.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub cfg: RunConfig,
    pub seed: Option<u64>,
    pub out: PathBuf,
    pub trials: Option<usize>,
    pub tol: Tolerance,
}

impl RunContext {
    pub fn new(
        cfg: RunConfig,
        seed: Option<u64>,
        out: PathBuf,
        trials: Option<usize>,
        eps: Option<f64>,
    ) -> CmdResult<Self> {
        let mut tol = match cfg.tolerance {
            Some(t) => Tolerance::new(t.eps_feas, t.eps_eq)?,
            None => Tolerance::default(),
        };
        if let Some(eps) = eps {
            tol = Tolerance::new(eps, tol.eps_eq.min(eps))?;
        }
        if trials == Some(0) {
            return Err(Failure::Input(anyhow!("--trials must be at least 1")));
        }
        let seed = seed.or(cfg.seed);
        Ok(RunContext { cfg, seed, out, trials, tol })
    }

    pub fn require_seed(&self, command: &str) -> CmdResult<u64> {
        self.seed.ok_or_else(|| {
            Failure::Input(anyhow!("`{command}` is randomized: pass --seed N or set `seed` in the config"))
        })
    }

    fn window(&self) -> CmdResult<Window> {
        Ok(match self.cfg.window {
            Some(w) => Window::new(w)?,
            None => Window::default(),
        })
    }

    fn write(&self, name: &str, contents: &str) -> CmdResult<PathBuf> {
        fs::create_dir_all(&self.out).with_context(|| format!("cannot create {}", self.out.display()))?;
        let path = self.out.join(name);
        fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display()))?;
        Ok(path)
    }

    fn write_report(&self, stem: &str, kv: &KeyValues, value: &Value) -> CmdResult<()> {
        self.write(&format!("{stem}.txt"), &kv.to_text())?;
        self.write(&format!("{stem}.json"), &json_text(value))?;
        print!("{}", kv.to_text());
        Ok(())
    }
}

pub enum Model {
    Planar(PlanarSpace),
    Glued(GluedSpace2),
    Finite(FiniteMetricSpace),
}

fn sheet_spec(s: &SheetConfig) -> CmdResult<SheetSpec> {
    let side = match s.side {
        SideConfig::Above => Side::Above,
        SideConfig::Below => Side::Below,
    };
    Ok(SheetSpec::new(s.slope, side, s.reflected)?)
}

fn unit_interval(name: &str, v: f64) -> CmdResult<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Failure::Input(anyhow!("{name} = {v} outside [0, 1]")));
    }
    Ok(())
}

pub fn build_model(ctx: &RunContext) -> CmdResult<Model> {
    let window = ctx.window()?;
    let model = ctx.cfg.model.as_ref().ok_or_else(|| Failure::Input(anyhow!("config has no `model`")))?;
    Ok(match model {
        ModelConfig::Plane {} => Model::Planar(PlanarSpace::plane().with_window(window)),
        ModelConfig::HalfPlane { sheet } => {
            Model::Planar(PlanarSpace::half_plane(sheet_spec(sheet)?.half_plane()).with_window(window))
        }
        ModelConfig::Glued { sheets } => {
            let specs = sheets.iter().map(sheet_spec).collect::<CmdResult<Vec<_>>>()?;
            Model::Glued(GluedSpace2::new(&specs, window)?)
        }
        ModelConfig::HalfPlanePair { a, b, reflected } => {
            unit_interval("a", *a)?;
            unit_interval("b", *b)?;
            let mut space = GluedSpace2::half_plane_pair(*a, *b, *reflected)?;
            space.window = window;
            Model::Glued(space)
        }
        ModelConfig::Finite { rows, path } => match (rows, path) {
            (Some(rows), None) => Model::Finite(FiniteMetricSpace::from_rows(rows.clone())?),
            (None, Some(path)) => {
                let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
                Model::Finite(parse_distance_matrix(&text).with_context(|| format!("in {}", path.display()))?)
            }
            _ => return Err(Failure::Input(anyhow!("finite model needs exactly one of `rows` and `path`"))),
        },
    })
}

fn vec2(p: [f64; 2]) -> CmdResult<Vec2> {
    let v = Vec2::new(p[0], p[1]);
    if !v.is_finite() {
        return Err(Failure::Input(anyhow!("non-finite coordinate in {p:?}")));
    }
    Ok(v)
}

fn box_corners(min: [f64; 2], max: [f64; 2]) -> CmdResult<(Vec2, Vec2)> {
    let (lo, hi) = (vec2(min)?, vec2(max)?);
    if lo.x > hi.x || lo.y > hi.y {
        return Err(Failure::Input(anyhow!("box min {min:?} exceeds max {max:?}")));
    }
    Ok((lo, hi))
}

enum PlanarSet {
    Closed(PlaneSet),
    Open(OpenBox),
}

fn planar_set(ctx: &RunContext, space: &PlanarSpace, set: &SetConfig) -> CmdResult<PlanarSet> {
    let closed = |poly: ConvexPolygon, label: &str| -> CmdResult<PlanarSet> {
        Ok(PlanarSet::Closed(PlaneSet::new(poly, label)?))
    };
    match set {
        SetConfig::GluingSet {} => match (&ctx.cfg.model, space.region) {
            (Some(ModelConfig::HalfPlane { sheet }), Some(_)) => {
                Ok(PlanarSet::Closed(PlaneSet::line(sheet_spec(sheet)?.signed_slope(), &space.window)))
            }
            _ => Err(Failure::Input(anyhow!("`gluing_set` needs a half_plane or glued model"))),
        },
        SetConfig::Polygon { vertices } => {
            let pts = vertices.iter().map(|v| vec2(*v)).collect::<CmdResult<Vec<_>>>()?;
            closed(ConvexPolygon::hull(&pts), "polygon")
        }
        SetConfig::PolygonFile { path } => {
            let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            closed(parse_polygon(&text).with_context(|| format!("in {}", path.display()))?, "polygon")
        }
        SetConfig::Rect { min, max } => {
            let (lo, hi) = box_corners(*min, *max)?;
            closed(ConvexPolygon::rect(lo, hi), "box")
        }
        SetConfig::OpenBox { min, max } => {
            let (lo, hi) = box_corners(*min, *max)?;
            if lo.x == hi.x || lo.y == hi.y {
                return Err(Failure::Input(anyhow!("open box must have interior")));
            }
            Ok(PlanarSet::Open(OpenBox { lo, hi }))
        }
        SetConfig::Members { .. } => Err(Failure::Input(anyhow!("`members` needs a finite model"))),
    }
}

fn run_property<M: MetricModel, S: Subset<M>>(
    space: &M,
    set: Option<&S>,
    property: Property,
    tc: &TrialConfig,
    tol: &Tolerance,
) -> CmdResult<PropertyReport> {
    let need = || set.ok_or_else(|| Failure::Input(anyhow!("property needs a `set`")));
    Ok(match property {
        Property::Hyperconvex => check_hyperconvex(space, tc, tol)?,
        Property::StronglyConvex => check_strongly_convex(space, need()?, tc, tol)?,
        Property::ExternallyHyperconvex => check_externally_hyperconvex(space, need()?, tc, tol)?,
        Property::Gated => check_gated(space, need()?, tc, tol)?,
        Property::Proximinal => check_proximinal(space, need()?, tc, tol)?,
        Property::MetricAxioms => {
            return Err(Failure::Input(anyhow!("`metric_axioms` needs a finite model")));
        }
    })
}

/// Re-verifies a certificate after a round trip through its JSON file.
fn recheck_serialized<M: MetricModel, S: Subset<M>>(
    space: &M,
    set: Option<&S>,
    cert: &Certificate,
    tol: &Tolerance,
) -> CmdResult<bool> {
    let restored = certificate_from_json(&json_text(&certificate_to_json(cert)))?;
    Ok(recheck(space, set, &restored, tol)?)
}

struct Checked {
    report: PropertyReport,
    rechecked: Option<bool>,
}

fn checked<M: MetricModel, S: Subset<M>>(
    space: &M,
    set: Option<&S>,
    property: Property,
    tc: &TrialConfig,
    tol: &Tolerance,
) -> CmdResult<Checked> {
    let report = run_property(space, set, property, tc, tol)?;
    let rechecked = match &report.counterexample {
        Some(cert) => Some(recheck_serialized(space, set, cert, tol)?),
        None => None,
    };
    Ok(Checked { report, rechecked })
}

pub fn cmd_check(ctx: &RunContext) -> CmdResult<Outcome> {
    let check = ctx.cfg.check.as_ref().ok_or_else(|| Failure::Input(anyhow!("config has no `check` section")))?;
    if check.property.needs_set() && check.set.is_none() {
        return Err(Failure::Input(anyhow!("property {:?} needs a `set`", check.property)));
    }
    let model = build_model(ctx)?;
    let seed = if check.property.randomized() { ctx.require_seed("check")? } else { ctx.seed.unwrap_or(0) };
    let tc = TrialConfig::new(ctx.trials.unwrap_or(check.trials), check.max_family_size, seed, check.half_width)?;
    let tol = &ctx.tol;
    let result = match (&model, &check.set) {
        (Model::Finite(space), _) if check.property == Property::MetricAxioms => {
            Checked { report: check_metric_axioms(space, tol), rechecked: None }
        }
        (Model::Planar(space), None) => checked::<_, PlaneSet>(space, None, check.property, &tc, tol)?,
        (Model::Planar(space), Some(set)) => match planar_set(ctx, space, set)? {
            PlanarSet::Closed(s) => checked(space, Some(&s), check.property, &tc, tol)?,
            PlanarSet::Open(s) => checked(space, Some(&s), check.property, &tc, tol)?,
        },
        (Model::Glued(space), None) => checked::<_, GluingSet>(space, None, check.property, &tc, tol)?,
        (Model::Glued(space), Some(SetConfig::GluingSet {})) => {
            checked(space, Some(&GluingSet), check.property, &tc, tol)?
        }
        (Model::Glued(_), Some(_)) => {
            return Err(Failure::Input(anyhow!("glued models only support the `gluing_set` descriptor")));
        }
        (Model::Finite(space), None) => checked::<_, FiniteSubset>(space, None, check.property, &tc, tol)?,
        (Model::Finite(space), Some(SetConfig::Members { members })) => {
            if members.is_empty() || members.iter().any(|&m| m >= space.len()) {
                return Err(Failure::Input(anyhow!("members must be non-empty indices below {}", space.len())));
            }
            let set = FiniteSubset { members: members.clone() };
            checked(space, Some(&set), check.property, &tc, tol)?
        }
        (Model::Finite(_), Some(_)) => {
            return Err(Failure::Input(anyhow!("finite models only support the `members` descriptor")));
        }
    };
    let mut kv = property_kv(&result.report);
    let mut value = property_json(&result.report);
    if let Some(ok) = result.rechecked {
        kv.push("certificate_rechecked", ok);
        value["certificate_rechecked"] = json!(ok);
    }
    if let Some(cert) = &result.report.counterexample {
        ctx.write("certificate.json", &json_text(&certificate_to_json(cert)))?;
    }
    ctx.write_report("check", &kv, &value)?;
    Ok(Outcome::from_ok(result.report.passed()))
}

fn glued_point(p: &PointConfig) -> CmdResult<GluedPoint> {
    let q = GluedPoint::new(p.sheet, p.x, p.y);
    if !q.coords.is_finite() {
        return Err(Failure::Input(anyhow!("non-finite point {p:?}")));
    }
    Ok(q)
}

pub fn cmd_glue_dist(ctx: &RunContext) -> CmdResult<Outcome> {
    let pts = ctx.cfg.glue_dist.ok_or_else(|| Failure::Input(anyhow!("config has no `glue_dist` section")))?;
    let (x, y) = (glued_point(&pts.x)?, glued_point(&pts.y)?);
    let tol = &ctx.tol;
    let mut kv = KeyValues::default();
    let mut value = json!({});
    let mut consistent = true;
    match build_model(ctx)? {
        Model::Planar(space) => {
            if pts.x.sheet != 0 || pts.y.sheet != 0 {
                return Err(Failure::Input(anyhow!("planar models have a single sheet 0")));
            }
            space.validate(&x.coords, tol)?;
            space.validate(&y.coords, tol)?;
            let d = linf_dist(x.coords, y.coords);
            kv.push("distance", d);
            kv.push("param", "none");
            value = json!({"distance": d, "param": null});
        }
        Model::Glued(space) => {
            space.validate(&x, tol)?;
            space.validate(&y, tol)?;
            let (d, param) = space.glued_dist_param(&x, &y);
            kv.push("distance", d);
            kv.push("param", param.map_or_else(|| "none".into(), |t| t.to_string()));
            value["distance"] = json!(d);
            value["param"] = json!(param);
            if let Some(seed) = ctx.seed {
                for (name, p, s) in [("x", &x, seed), ("y", &y, seed.wrapping_add(1))] {
                    match gate(&space, p, s, tol) {
                        GateOutcome::Gate(g) => {
                            gate_kv(&mut kv, &format!("gate_{name}"), &g);
                            value[format!("gate_{name}")] = gate_json(&g);
                        }
                        GateOutcome::NoGate { defect, .. } => {
                            kv.push(format!("gate_{name}"), "none");
                            kv.push(format!("gate_{name}.defect"), defect);
                            value[format!("gate_{name}")] = json!({"defect": defect});
                        }
                    }
                }
                if x.sheet != y.sheet {
                    match gated_dist_shortcut(&space, &x, &y, seed, tol) {
                        Ok(s) => {
                            let agrees = (s - d).abs() <= tol.eps_eq;
                            consistent &= agrees;
                            kv.push("shortcut", s);
                            kv.push("shortcut_agrees", agrees);
                            value["shortcut"] = json!(s);
                            value["shortcut_agrees"] = json!(agrees);
                        }
                        Err(Error::NoGate) => kv.push("shortcut", "none"),
                        Err(e) => return Err(e.into()),
                    }
                }
            }
        }
        Model::Finite(_) => return Err(Failure::Input(anyhow!("glue-dist needs a planar or glued model"))),
    }
    ctx.write_report("glue_dist", &kv, &value)?;
    Ok(Outcome::from_ok(consistent))
}

fn s5_config(a: f64, b: f64, reflected: bool) -> CmdResult<S5Config> {
    Ok(S5Config::new(a, b, reflected)?)
}

pub fn figure_name(cfg: &S5Config) -> String {
    format!("s5_a{}_b{}_{}.svg", cfg.a, cfg.b, cfg.orientation())
}

fn write_figure(ctx: &RunContext, cfg: &S5Config, view: f64) -> CmdResult<String> {
    if !(view > 0.0 && view.is_finite()) {
        return Err(Failure::Input(anyhow!("view must be positive, got {view}")));
    }
    let name = figure_name(cfg);
    ctx.write(&name, &emit_svg(&s5_scene(cfg, view, &ctx.tol)?))?;
    Ok(name)
}

fn cell_ok(r: &S5Report, tol: &Tolerance) -> bool {
    r.certificate_consistent() && r.trace_discrepancy.is_none_or(|d| d <= tol.eps_feas)
}

fn sweep_check(ctx: &RunContext, seed: u64) -> CmdResult<(SweepConfig, TrialConfig)> {
    let sc = ctx.cfg.sweep.unwrap_or_default();
    let tc = TrialConfig::new(ctx.trials.unwrap_or(sc.trials), sc.max_family_size, seed, sc.half_width)?;
    Ok((sc, tc))
}

struct SweepSummary {
    rows: Vec<SweepRow>,
    mismatches: Vec<usize>,
}

fn run_sweep(ctx: &RunContext, seed: u64) -> CmdResult<SweepSummary> {
    let (sc, tc) = sweep_check(ctx, seed)?;
    let rows = s5_phase_sweep(sc.steps, &tc, &ctx.tol)?;
    let mismatches = rows.iter().enumerate().filter(|(_, r)| !r.consistent()).map(|(i, _)| i).collect();
    Ok(SweepSummary { rows, mismatches })
}

fn sweep_kv(kv: &mut KeyValues, s: &SweepSummary, seed: u64, trials: usize) {
    kv.push("sweep.seed", seed);
    kv.push("sweep.trials_per_cell", trials);
    kv.push("sweep.cells", s.rows.len());
    kv.push("sweep.predicted_hyperconvex", s.rows.iter().filter(|r| r.report.predicted_hyperconvex).count());
    kv.push("sweep.mismatches", s.mismatches.len());
}

fn sweep_json(s: &SweepSummary, seed: u64, trials: usize) -> Value {
    let mismatches: Vec<Value> = s
        .mismatches
        .iter()
        .map(|&i| {
            let row = &s.rows[i];
            json!({"cell": s5_json(&row.report), "sampled": property_json(&row.sampled)})
        })
        .collect();
    json!({
        "seed": seed,
        "trials_per_cell": trials,
        "cells": s.rows.len(),
        "predicted_hyperconvex": s.rows.iter().filter(|r| r.report.predicted_hyperconvex).count(),
        "mismatches": mismatches,
    })
}

pub fn cmd_repro_s5(ctx: &RunContext) -> CmdResult<Outcome> {
    let tol = &ctx.tol;
    if let Some(cell) = ctx.cfg.s5 {
        let cfg = s5_config(cell.a, cell.b, cell.reflected)?;
        let report = s5_counterexample(&cfg, tol)?;
        let mut kv = KeyValues::default();
        s5_kv(&mut kv, "", &report);
        let mut value = s5_json(&report);
        let mut ok = cell_ok(&report, tol);
        if let Some(cert) = s5_certificate(&report) {
            let rechecked = recheck_serialized::<_, GluingSet>(&cfg.space()?, None, &cert, tol)?;
            ok &= rechecked;
            kv.push("certificate", "family");
            kv.push("certificate_rechecked", rechecked);
            value["certificate_rechecked"] = json!(rechecked);
            ctx.write("certificate.json", &json_text(&certificate_to_json(&cert)))?;
        }
        let figure = write_figure(ctx, &cfg, default_view())?;
        kv.push("figure", &figure);
        value["figure"] = json!(figure);
        ctx.write_report("repro_s5", &kv, &value)?;
        return Ok(Outcome::from_ok(ok));
    }
    let seed = ctx.require_seed("repro-s5")?;
    let mut kv = KeyValues::default();
    let mut cells = Vec::new();
    let mut ok = true;
    for (k, &(a, b, reflected)) in REPRO_CELLS.iter().enumerate() {
        let report = s5_counterexample(&s5_config(a, b, reflected)?, tol)?;
        ok &= cell_ok(&report, tol);
        s5_kv(&mut kv, &format!("cell{k}."), &report);
        cells.push(s5_json(&report));
    }
    let summary = run_sweep(ctx, seed)?;
    let (_, tc) = sweep_check(ctx, seed)?;
    ok &= summary.mismatches.is_empty();
    sweep_kv(&mut kv, &summary, seed, tc.trials);
    ctx.write("sweep.csv", &sweep_csv(&summary.rows))?;
    let mut figures = Vec::new();
    for &(a, b, reflected) in &REPRO_FIGURES {
        figures.push(write_figure(ctx, &s5_config(a, b, reflected)?, default_view())?);
    }
    for (i, f) in figures.iter().enumerate() {
        kv.push(format!("figure.{i}"), f);
    }
    kv.push("consistent", ok);
    let value = json!({
        "cells": cells,
        "sweep": sweep_json(&summary, seed, tc.trials),
        "figures": figures,
        "consistent": ok,
    });
    ctx.write_report("repro_s5", &kv, &value)?;
    Ok(Outcome::from_ok(ok))
}

pub fn cmd_sweep(ctx: &RunContext) -> CmdResult<Outcome> {
    let seed = ctx.require_seed("sweep")?;
    let summary = run_sweep(ctx, seed)?;
    let (_, tc) = sweep_check(ctx, seed)?;
    let mut kv = KeyValues::default();
    sweep_kv(&mut kv, &summary, seed, tc.trials);
    ctx.write("sweep.csv", &sweep_csv(&summary.rows))?;
    ctx.write_report("sweep", &kv, &sweep_json(&summary, seed, tc.trials))?;
    Ok(Outcome::from_ok(summary.mismatches.is_empty()))
}

pub fn cmd_plot(ctx: &RunContext) -> CmdResult<Outcome> {
    let (cfg, view) = match (ctx.cfg.plot, ctx.cfg.s5) {
        (Some(p), _) => (s5_config(p.a, p.b, p.reflected)?, p.view),
        (None, Some(c)) => (s5_config(c.a, c.b, c.reflected)?, default_view()),
        (None, None) => (s5_config(0.0, 1.0, false)?, default_view()),
    };
    let name = write_figure(ctx, &cfg, view)?;
    println!("figure={}", Path::new(&name).display());
    Ok(Outcome::Consistent)
}
