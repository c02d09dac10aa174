use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{s5_centers, s5_counterexample, S5Config, PAIRS};
use crate::error::Result;
use crate::gluing::{ball_trace, GluedPoint, SheetId};
use crate::linf2::{ConvexPolygon, Vec2};
use crate::tolerance::Tolerance;

/// One sheet as drawn: its visible region, the gluing line, the traces of
/// every ball on it and the centers it hosts.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenePanel {
    pub title: String,
    pub region: ConvexPolygon,
    pub gluing: (Vec2, Vec2),
    /// `(ball label, trace)`; empty traces are kept so labels stay aligned.
    pub traces: Vec<(String, ConvexPolygon)>,
    pub centers: Vec<(String, Vec2)>,
    pub marks: Vec<(String, Vec2)>,
}

/// A plot-ready description of a configuration, in sheet coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub title: String,
    /// Panels show `[-view, view]^2`.
    pub view: f64,
    pub panels: Vec<ScenePanel>,
    pub notes: Vec<String>,
}

impl Scene {
    pub fn empty(view: f64) -> Self {
        Scene { title: String::new(), view, panels: Vec::new(), notes: Vec::new() }
    }
}

/// Both sheets side by side with the three unit balls, the pairwise
/// witnesses and the common point or its absence.
pub fn s5_scene(cfg: &S5Config, view: f64, tol: &Tolerance) -> Result<Scene> {
    let space = cfg.space()?;
    let report = s5_counterexample(cfg, tol)?;
    let centers = s5_centers(cfg);
    let bx = ConvexPolygon::rect(Vec2::new(-view, -view), Vec2::new(view, view));
    let mut panels = Vec::new();
    for (k, sheet) in space.sheets().iter().enumerate() {
        let id = SheetId(k);
        let region = space.sheet_polygon(id, tol).intersect(&bx, tol);
        let gluing = (sheet.chart.at(-view), sheet.chart.at(view));
        let mut traces = Vec::new();
        for (i, c) in centers.iter().enumerate() {
            traces.push((format!("B(x{}, 1)", i + 1), ball_trace(&space, c, 1.0, id, tol)?.intersect(&bx, tol)));
        }
        let here = |p: &GluedPoint| p.sheet == id;
        let centers_here = centers
            .iter()
            .enumerate()
            .filter(|(_, c)| here(c))
            .map(|(i, c)| (format!("x{}", i + 1), c.coords))
            .collect();
        let mut marks = Vec::new();
        for ((i, j), w) in PAIRS.iter().zip(report.pairwise.iter()) {
            if let Some(w) = w.filter(here) {
                marks.push((format!("w{}{}", i + 1, j + 1), w.coords));
            }
        }
        if let Some(w) = report.triple.filter(here) {
            marks.push(("common".into(), w.coords));
        }
        let title = format!(
            "H{} ({} slope {})",
            k + 1,
            if sheet.spec.reflected { "mirrored" } else { "boundary" },
            sheet.spec.slope
        );
        panels.push(ScenePanel { title, region, gluing, traces, centers: centers_here, marks });
    }
    let verdict = if report.triple_empty() { "no common point" } else { "common point found" };
    Ok(Scene {
        title: format!("a = {}, b = {}, {} orientation", cfg.a, cfg.b, cfg.orientation()),
        view,
        panels,
        notes: alloc::vec![format!(
            "pairwise: {}; triple: {verdict}",
            if report.pairwise_ok() { "all intersect" } else { "some disjoint" }
        )],
    })
}
