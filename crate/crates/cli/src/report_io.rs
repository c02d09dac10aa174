//! Reports as key=value text and JSON. Certificates round-trip through JSON
//! so a falsification can be re-verified from the file alone.

use anyhow::{Context, Result};
use hyperglue_core::gluing::{GateInfo, GluedPoint};
use hyperglue_core::report::{BallRecord, Certificate, PointRecord, PropertyReport};
use hyperglue_core::s5::{S5Report, PAIRS};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::formats::KeyValues;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PointJson {
    Plane { x: f64, y: f64 },
    Sheet { sheet: usize, x: f64, y: f64 },
    Index { index: usize },
}

impl From<&PointRecord> for PointJson {
    fn from(p: &PointRecord) -> Self {
        match *p {
            PointRecord::Plane { x, y } => PointJson::Plane { x, y },
            PointRecord::Sheet { sheet, x, y } => PointJson::Sheet { sheet, x, y },
            PointRecord::Index(index) => PointJson::Index { index },
        }
    }
}

impl From<PointJson> for PointRecord {
    fn from(p: PointJson) -> Self {
        match p {
            PointJson::Plane { x, y } => PointRecord::Plane { x, y },
            PointJson::Sheet { sheet, x, y } => PointRecord::Sheet { sheet, x, y },
            PointJson::Index { index } => PointRecord::Index(index),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallJson {
    pub center: PointJson,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CertificateJson {
    Family { balls: Vec<BallJson>, in_set: bool },
    IntervalEscape { x: PointJson, y: PointJson, z: PointJson },
    GateFailure { x: PointJson, gate: PointJson, probe: PointJson },
    Unattained { x: PointJson, distance: f64 },
    MetricViolation { violation: String, indices: Vec<usize>, excess: f64 },
    Inconsistency { detail: String },
}

impl From<&Certificate> for CertificateJson {
    fn from(c: &Certificate) -> Self {
        match c {
            Certificate::Family { balls, in_set } => CertificateJson::Family {
                balls: balls.iter().map(|b| BallJson { center: (&b.center).into(), radius: b.radius }).collect(),
                in_set: *in_set,
            },
            Certificate::IntervalEscape { x, y, z } => {
                CertificateJson::IntervalEscape { x: x.into(), y: y.into(), z: z.into() }
            }
            Certificate::GateFailure { x, gate, probe } => {
                CertificateJson::GateFailure { x: x.into(), gate: gate.into(), probe: probe.into() }
            }
            Certificate::Unattained { x, distance } => CertificateJson::Unattained { x: x.into(), distance: *distance },
            Certificate::MetricViolation { kind, indices, excess } => {
                CertificateJson::MetricViolation { violation: kind.clone(), indices: indices.clone(), excess: *excess }
            }
            Certificate::Inconsistency { detail } => CertificateJson::Inconsistency { detail: detail.clone() },
        }
    }
}

impl From<CertificateJson> for Certificate {
    fn from(c: CertificateJson) -> Self {
        match c {
            CertificateJson::Family { balls, in_set } => Certificate::Family {
                balls: balls.into_iter().map(|b| BallRecord { center: b.center.into(), radius: b.radius }).collect(),
                in_set,
            },
            CertificateJson::IntervalEscape { x, y, z } => {
                Certificate::IntervalEscape { x: x.into(), y: y.into(), z: z.into() }
            }
            CertificateJson::GateFailure { x, gate, probe } => {
                Certificate::GateFailure { x: x.into(), gate: gate.into(), probe: probe.into() }
            }
            CertificateJson::Unattained { x, distance } => Certificate::Unattained { x: x.into(), distance },
            CertificateJson::MetricViolation { violation, indices, excess } => {
                Certificate::MetricViolation { kind: violation, indices, excess }
            }
            CertificateJson::Inconsistency { detail } => Certificate::Inconsistency { detail },
        }
    }
}

pub fn certificate_to_json(cert: &Certificate) -> Value {
    serde_json::to_value(CertificateJson::from(cert)).unwrap_or(Value::Null)
}

pub fn certificate_from_json(text: &str) -> Result<Certificate> {
    let c: CertificateJson = serde_json::from_str(text).context("invalid certificate")?;
    Ok(c.into())
}

/// Pretty JSON with a trailing newline.
pub fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).unwrap_or_default();
    s.push('\n');
    s
}

fn glued_json(p: &GluedPoint) -> Value {
    json!({"sheet": p.sheet.0, "x": p.coords.x, "y": p.coords.y})
}

fn glued_text(p: &GluedPoint) -> String {
    format!("{}:({}, {})", p.sheet.0, p.coords.x, p.coords.y)
}

pub fn property_kv(report: &PropertyReport) -> KeyValues {
    let mut kv = KeyValues::default();
    kv.push("property", &report.property);
    kv.push("verdict", report.verdict.as_str());
    kv.push("trials", report.trials);
    kv.push("skipped", report.skipped);
    kv.push("seed", report.seed.map_or_else(|| "none".into(), |s| s.to_string()));
    for (k, v) in &report.stats {
        kv.push(format!("stat.{k}"), v);
    }
    for (i, n) in report.notes.iter().enumerate() {
        kv.push(format!("note.{i}"), n);
    }
    if let Some(c) = &report.counterexample {
        kv.push("certificate", c.kind());
    }
    kv
}

pub fn property_json(report: &PropertyReport) -> Value {
    json!({
        "property": report.property,
        "verdict": report.verdict.as_str(),
        "trials": report.trials,
        "skipped": report.skipped,
        "seed": report.seed,
        "stats": report.stats.iter().map(|(k, v)| json!({"name": k, "value": v})).collect::<Vec<_>>(),
        "notes": report.notes,
        "certificate": report.counterexample.as_ref().map(certificate_to_json),
    })
}

pub fn gate_kv(kv: &mut KeyValues, prefix: &str, g: &GateInfo) {
    kv.push(format!("{prefix}.gate"), glued_text(&g.gate));
    kv.push(format!("{prefix}.param"), g.param);
    kv.push(format!("{prefix}.dist_to_gate"), g.dist_to_gate);
    kv.push(format!("{prefix}.probes"), g.probes);
}

pub fn gate_json(g: &GateInfo) -> Value {
    json!({
        "gate": glued_json(&g.gate),
        "param": g.param,
        "dist_to_gate": g.dist_to_gate,
        "probes": g.probes,
    })
}

fn pair_name(i: usize, j: usize) -> String {
    format!("{}{}", i + 1, j + 1)
}

pub fn s5_kv(kv: &mut KeyValues, prefix: &str, r: &S5Report) {
    kv.push(format!("{prefix}a"), r.config.a);
    kv.push(format!("{prefix}b"), r.config.b);
    kv.push(format!("{prefix}orientation"), r.config.orientation());
    for (i, c) in r.centers.iter().enumerate() {
        kv.push(format!("{prefix}center.x{}", i + 1), glued_text(c));
    }
    for ((i, j), w) in PAIRS.iter().zip(r.pairwise.iter()) {
        let v = w.as_ref().map_or_else(|| "none".into(), glued_text);
        kv.push(format!("{prefix}witness.{}", pair_name(*i, *j)), v);
    }
    kv.push(format!("{prefix}triple"), r.triple.as_ref().map_or_else(|| "empty".into(), glued_text));
    kv.push(format!("{prefix}pairwise_ok"), r.pairwise_ok());
    kv.push(format!("{prefix}triple_empty"), r.triple_empty());
    kv.push(format!("{prefix}predicted_hyperconvex"), r.predicted_hyperconvex);
    kv.push(format!("{prefix}consistent"), r.certificate_consistent());
    if let Some(d) = r.trace_discrepancy {
        kv.push(format!("{prefix}trace_discrepancy"), d);
    }
}

pub fn s5_json(r: &S5Report) -> Value {
    let witnesses: serde_json::Map<String, Value> = PAIRS
        .iter()
        .zip(r.pairwise.iter())
        .map(|((i, j), w)| (pair_name(*i, *j), w.as_ref().map_or(Value::Null, glued_json)))
        .collect();
    json!({
        "a": r.config.a,
        "b": r.config.b,
        "orientation": r.config.orientation(),
        "centers": r.centers.iter().map(glued_json).collect::<Vec<_>>(),
        "radius": 1.0,
        "witnesses": witnesses,
        "triple": r.triple.as_ref().map(glued_json),
        "pairwise_ok": r.pairwise_ok(),
        "triple_empty": r.triple_empty(),
        "predicted_hyperconvex": r.predicted_hyperconvex,
        "consistent": r.certificate_consistent(),
        "trace_discrepancy": r.trace_discrepancy,
    })
}

/// The three unit balls of a cell as a family certificate when they are
/// pairwise admissible with no common point.
pub fn s5_certificate(r: &S5Report) -> Option<Certificate> {
    (r.pairwise_ok() && r.triple_empty()).then(|| Certificate::Family {
        balls: r
            .centers
            .iter()
            .map(|c| BallRecord {
                center: PointRecord::Sheet { sheet: c.sheet.0, x: c.coords.x, y: c.coords.y },
                radius: 1.0,
            })
            .collect(),
        in_set: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use hyperglue_core::s5::{s5_counterexample, S5Config};
    use hyperglue_core::Tolerance;

    #[test]
    fn certificates_roundtrip_through_json() {
        let certs = [
            Certificate::Family {
                balls: vec![
                    BallRecord { center: PointRecord::Plane { x: 0.5, y: -1.0 }, radius: 0.25 },
                    BallRecord { center: PointRecord::Sheet { sheet: 1, x: 2.0, y: 0.0 }, radius: 1.0 },
                    BallRecord { center: PointRecord::Index(3), radius: 2.0 },
                ],
                in_set: true,
            },
            Certificate::IntervalEscape {
                x: PointRecord::Index(0),
                y: PointRecord::Index(1),
                z: PointRecord::Index(2),
            },
            Certificate::GateFailure {
                x: PointRecord::Plane { x: 1.0, y: 2.0 },
                gate: PointRecord::Plane { x: 0.1, y: 0.2 },
                probe: PointRecord::Plane { x: -3.0, y: 0.0 },
            },
            Certificate::Unattained { x: PointRecord::Plane { x: 3.0, y: 0.0 }, distance: 1.0 / 3.0 },
            Certificate::MetricViolation { kind: "triangle".into(), indices: vec![0, 2, 1], excess: 0.5 },
            Certificate::Inconsistency { detail: "x".into() },
        ];
        for c in certs {
            let text = json_text(&certificate_to_json(&c));
            assert_eq!(certificate_from_json(&text).unwrap(), c);
        }
    }

    #[test]
    fn malformed_certificates_are_rejected() {
        assert!(certificate_from_json("{}").is_err());
        assert!(certificate_from_json(r#"{"kind": "family", "balls": [], "in_set": false, "x": 1}"#).is_err());
    }

    #[test]
    fn s5_certificate_only_for_empty_triples() {
        let tol = Tolerance::default();
        let off = s5_counterexample(&S5Config::new(0.25, 0.75, false).unwrap(), &tol).unwrap();
        assert!(matches!(s5_certificate(&off), Some(Certificate::Family { ref balls, .. }) if balls.len() == 3));
        let diag = s5_counterexample(&S5Config::new(0.5, 0.5, false).unwrap(), &tol).unwrap();
        assert!(s5_certificate(&diag).is_none());
        let mut kv = KeyValues::default();
        s5_kv(&mut kv, "", &off);
        assert_eq!(kv.get("triple"), Some("empty"));
        assert_eq!(kv.get("consistent"), Some("true"));
    }
}
