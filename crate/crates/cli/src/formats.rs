//! Plain-text file formats: distance matrices, polygons, key=value reports
//! and the sweep table.

use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use hyperglue_core::linf2::{ConvexPolygon, Vec2};
use hyperglue_core::metric::FiniteMetricSpace;
use hyperglue_core::s5::SweepRow;

/// First line `n`, then `n` lines of `n` whitespace-separated decimals.
pub fn parse_distance_matrix(text: &str) -> Result<FiniteMetricSpace> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let n: usize = lines.next().context("empty distance matrix")?.parse().context("first line must be the size n")?;
    let mut rows = Vec::with_capacity(n);
    for (i, line) in lines.by_ref().take(n).enumerate() {
        let row = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().with_context(|| format!("row {}: bad number {t:?}", i + 1)))
            .collect::<Result<Vec<_>>>()?;
        if row.len() != n {
            bail!("row {} has {} entries, expected {n}", i + 1, row.len());
        }
        rows.push(row);
    }
    if rows.len() != n {
        bail!("expected {n} rows, found {}", rows.len());
    }
    if lines.next().is_some() {
        bail!("trailing data after {n} rows");
    }
    Ok(FiniteMetricSpace::from_rows(rows)?)
}

pub fn write_distance_matrix(space: &FiniteMetricSpace) -> String {
    let mut out = format!("{}\n", space.len());
    for row in space.rows() {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

/// One `x y` pair per line; the set is the convex hull of the points.
pub fn parse_polygon(text: &str) -> Result<ConvexPolygon> {
    let mut points = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let coords = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().with_context(|| format!("line {}: bad number {t:?}", i + 1)))
            .collect::<Result<Vec<_>>>()?;
        let [x, y] = coords[..] else { bail!("line {}: expected `x y`", i + 1) };
        let p = Vec2::new(x, y);
        if !p.is_finite() {
            bail!("line {}: non-finite coordinate", i + 1);
        }
        points.push(p);
    }
    if points.is_empty() {
        bail!("polygon has no vertices");
    }
    Ok(ConvexPolygon::hull(&points))
}

pub fn write_polygon(poly: &ConvexPolygon) -> String {
    poly.vertices().iter().fold(String::new(), |mut out, v| {
        let _ = writeln!(out, "{} {}", v.x, v.y);
        out
    })
}

/// Ordered `key=value` lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues(pub Vec<(String, String)>);

impl KeyValues {
    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.0.push((key.into(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn to_text(&self) -> String {
        self.0.iter().fold(String::new(), |mut out, (k, v)| {
            let _ = writeln!(out, "{k}={v}");
            out
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut kv = KeyValues::default();
        for (i, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').with_context(|| format!("line {}: expected key=value", i + 1))?;
            kv.push(k, v);
        }
        Ok(kv)
    }
}

pub const SWEEP_HEADER: &str = "a,b,orientation,pairwise_ok,triple_empty,predicted,consistent";

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = format!("{SWEEP_HEADER}\n");
    for row in rows {
        let r = &row.report;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.config.a,
            r.config.b,
            r.config.orientation(),
            r.pairwise_ok(),
            r.triple_empty(),
            r.predicted_hyperconvex,
            row.consistent()
        );
    }
    out
}
