//! Checker verdicts and re-checkable counterexample certificates.

use alloc::string::String;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// No counterexample in the trials that were run. Evidence, not proof.
    Pass,
    Falsified,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Falsified => "falsified",
        }
    }
}

/// Backend-independent serialized point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PointRecord {
    Plane { x: f64, y: f64 },
    Sheet { sheet: usize, x: f64, y: f64 },
    Index(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallRecord {
    pub center: PointRecord,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    /// Pairwise admissible balls without a common point (inside the tested
    /// set when `in_set` is true).
    Family { balls: Vec<BallRecord>, in_set: bool },
    /// `z` lies in the metric interval of `x` and `y` but not in the set.
    IntervalEscape { x: PointRecord, y: PointRecord, z: PointRecord },
    /// `probe` is in the set but `d(x, probe) != d(x, gate) + d(gate, probe)`.
    GateFailure { x: PointRecord, gate: PointRecord, probe: PointRecord },
    /// The distance from `x` to the set is not attained.
    Unattained { x: PointRecord, distance: f64 },
    /// A metric axiom fails on the listed indices.
    MetricViolation { kind: String, indices: Vec<usize>, excess: f64 },
    /// Two checkers that must agree did not.
    Inconsistency { detail: String },
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::Family { .. } => "family",
            Certificate::IntervalEscape { .. } => "interval_escape",
            Certificate::GateFailure { .. } => "gate_failure",
            Certificate::Unattained { .. } => "unattained",
            Certificate::MetricViolation { .. } => "metric_violation",
            Certificate::Inconsistency { .. } => "inconsistency",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyReport {
    pub property: String,
    pub verdict: Verdict,
    pub trials: usize,
    pub skipped: usize,
    pub seed: Option<u64>,
    pub counterexample: Option<Certificate>,
    pub stats: Vec<(String, f64)>,
    pub notes: Vec<String>,
}

impl PropertyReport {
    pub fn new(property: &str, seed: Option<u64>) -> Self {
        PropertyReport {
            property: property.into(),
            verdict: Verdict::Pass,
            trials: 0,
            skipped: 0,
            seed,
            counterexample: None,
            stats: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn falsify(&mut self, cert: Certificate) {
        self.verdict = Verdict::Falsified;
        self.counterexample = Some(cert);
    }

    pub fn stat(&mut self, key: &str, value: f64) {
        match self.stats.iter_mut().find(|(k, _)| k == key) {
            Some(entry) => entry.1 = value,
            None => self.stats.push((key.into(), value)),
        }
    }

    pub fn get_stat(&self, key: &str) -> Option<f64> {
        self.stats.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}
