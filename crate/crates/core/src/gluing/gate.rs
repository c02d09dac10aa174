use alloc::vec::Vec;

use rand::Rng;

use super::{GluedPoint, GluedSpace2};
use crate::error::{Error, Result};
use crate::seed::trial_rng;
use crate::tolerance::Tolerance;

pub const DEFAULT_GATE_PROBES: usize = 64;

/// Rungs of the geometric probe ladder on each side of the candidate.
const LADDER: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateInfo {
    pub gate: GluedPoint,
    /// Chart parameter of the gate.
    pub param: f64,
    pub dist_to_gate: f64,
    /// `r - d(x, gate)` once a radius is attached and it is not negative.
    pub residual_radius: Option<f64>,
    pub probes: usize,
}

impl GateInfo {
    pub fn with_radius(mut self, r: f64) -> Self {
        let rest = r - self.dist_to_gate;
        self.residual_radius = (rest >= 0.0).then_some(rest);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateOutcome {
    Gate(GateInfo),
    /// `d(x, probe) != d(x, candidate) + d(candidate, probe)`.
    NoGate {
        candidate: GluedPoint,
        probe: GluedPoint,
        defect: f64,
    },
}

impl GateOutcome {
    pub fn info(&self) -> Option<&GateInfo> {
        match self {
            GateOutcome::Gate(g) => Some(g),
            GateOutcome::NoGate { .. } => None,
        }
    }
}

/// Gate of `x` in the gluing set, verified on [`DEFAULT_GATE_PROBES`] probes.
pub fn gate(space: &GluedSpace2, x: &GluedPoint, seed: u64, tol: &Tolerance) -> GateOutcome {
    gate_with_probes(space, x, DEFAULT_GATE_PROBES, seed, tol)
}

/// The candidate is the nearest point of the gluing set with the smallest
/// chart parameter. It is checked against a geometric ladder of probes around
/// it and uniform probes across the window.
pub fn gate_with_probes(space: &GluedSpace2, x: &GluedPoint, probes: usize, seed: u64, tol: &Tolerance) -> GateOutcome {
    let (s, t_bar) = space.dist_to_gluing_set(x);
    let candidate = space.boundary_point(x.sheet, t_bar);
    let reach = space.window.half_width;
    let mut params = Vec::with_capacity(probes);
    for j in 0..LADDER {
        let step = reach / (1u64 << j) as f64;
        params.push(t_bar + step);
        params.push(t_bar - step);
    }
    params.truncate(probes);
    let mut rng = trial_rng(seed, 0);
    while params.len() < probes {
        params.push(rng.gen_range(-reach..=reach));
    }
    let chart = space.sheets[x.sheet.0].chart;
    for t in params {
        let probe = space.boundary_point(x.sheet, t);
        let direct = crate::linf2::linf_dist(x.coords, chart.at(t));
        let defect = direct - (s + (t - t_bar).abs());
        if defect.abs() > tol.eps_eq {
            return GateOutcome::NoGate { candidate, probe, defect };
        }
    }
    GateOutcome::Gate(GateInfo { gate: candidate, param: t_bar, dist_to_gate: s, residual_radius: None, probes })
}

/// `d(x, x̄) + d(x̄, ȳ) + d(ȳ, y)` for points on different sheets.
pub fn gated_dist_shortcut(
    space: &GluedSpace2,
    x: &GluedPoint,
    y: &GluedPoint,
    seed: u64,
    tol: &Tolerance,
) -> Result<f64> {
    if x.sheet == y.sheet {
        return Err(Error::InvalidModel("the gated shortcut needs points on different sheets".into()));
    }
    let gx = gate(space, x, seed, tol).info().copied().ok_or(Error::NoGate)?;
    let gy = gate(space, y, seed, tol).info().copied().ok_or(Error::NoGate)?;
    Ok(gx.dist_to_gate + (gx.param - gy.param).abs() + gy.dist_to_gate)
}
