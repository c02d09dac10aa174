//! Randomized falsifiers for hyperconvexity, strong convexity, gatedness,
//! external hyperconvexity and proximinality.
//!
//! Every checker runs independent trials seeded from `(seed, trial index)`,
//! stops at the first counterexample and stores it as a [`Certificate`] that
//! [`recheck`] can verify from the serialized data alone. A pass means only
//! that no counterexample turned up in the trials that were run.

mod sets;

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::metric::{interval_contains, pairwise_admissible, Ball, BallFamily, MetricModel};
use crate::report::{BallRecord, Certificate, PropertyReport, Verdict};
use crate::seed::{trial_rng, TrialRng};
use crate::tolerance::Tolerance;

pub use sets::{FiniteSubset, GluingSet, OpenBox, PlaneSet, Subset};

/// Proposal budget for one interval sample in the strong-convexity check.
pub const INTERVAL_BUDGET: usize = 10_000;
/// Upper bound on gate probes when a trial is re-run after a disagreement.
pub const MAX_GATE_PROBES: usize = 1024;
/// Bisection steps for the radius repair of the external check.
const REPAIR_STEPS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialConfig {
    pub trials: usize,
    pub max_family_size: usize,
    pub seed: u64,
    /// Sampling box `[-half_width, half_width]^2`.
    pub half_width: f64,
}

impl TrialConfig {
    pub fn new(trials: usize, max_family_size: usize, seed: u64, half_width: f64) -> Result<Self> {
        let cfg = TrialConfig { trials, max_family_size, seed, half_width };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_seed(seed: u64) -> Self {
        TrialConfig { trials: 1000, max_family_size: 8, seed, half_width: 5.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 || self.max_family_size < 2 || !(self.half_width > 0.0 && self.half_width.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "trial config needs trials >= 1, family size >= 2 and a positive box, got {self:?}"
            )));
        }
        Ok(())
    }
}

/// Random pairwise admissible family rescaled so that at least one pair is
/// tight: centers from the sampling box, provisional radii uniform in
/// `(0, box diameter / 2)`, all radii multiplied by
/// `max d(x_i, x_j) / (r_i + r_j)`.
pub fn sample_admissible_family<M: MetricModel>(
    space: &M,
    cfg: &TrialConfig,
    rng: &mut TrialRng,
    tol: &Tolerance,
) -> Result<BallFamily<M::Point>> {
    let size = rng.gen_range(2..=cfg.max_family_size);
    let mut centers = Vec::with_capacity(size);
    while centers.len() < size {
        if let Some(p) = space.sample_point(rng, cfg.half_width, tol) {
            centers.push(p);
        }
    }
    let radii: Vec<f64> = (0..size).map(|_| rng.gen::<f64>() * cfg.half_width).collect();
    let scale = tightening_scale(space, &centers, &radii);
    let balls = centers
        .into_iter()
        .zip(radii)
        .map(|(c, r)| Ball::new(c, if scale > 0.0 { r * scale } else { r }))
        .collect::<Result<Vec<_>>>()?;
    BallFamily::new(balls)
}

/// `max_{i<j} d(x_i, x_j) / (r_i + r_j)`; zero when all centers coincide.
fn tightening_scale<M: MetricModel>(space: &M, centers: &[M::Point], radii: &[f64]) -> f64 {
    let mut s: f64 = 0.0;
    for i in 0..centers.len() {
        for j in i + 1..centers.len() {
            let sum = radii[i] + radii[j];
            let d = space.dist(&centers[i], &centers[j]);
            if sum > 0.0 {
                s = s.max(d / sum);
            } else if d > 0.0 {
                s = f64::INFINITY;
            }
        }
    }
    s
}

fn family_certificate<M: MetricModel>(space: &M, family: &BallFamily<M::Point>, in_set: bool) -> Certificate {
    Certificate::Family {
        balls: family
            .balls()
            .iter()
            .map(|b| BallRecord { center: space.to_record(&b.center), radius: b.radius })
            .collect(),
        in_set,
    }
}

/// Tests random tight admissible families for a common point.
pub fn check_hyperconvex<M: MetricModel>(space: &M, cfg: &TrialConfig, tol: &Tolerance) -> Result<PropertyReport> {
    cfg.validate()?;
    let mut report = PropertyReport::new("hyperconvex", Some(cfg.seed));
    let mut sizes = 0usize;
    for i in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, i as u64);
        let family = sample_admissible_family(space, cfg, &mut rng, tol)?;
        report.trials += 1;
        sizes += family.len();
        if space.family_feasible(&family, tol)?.is_none() {
            report.falsify(family_certificate(space, &family, false));
            break;
        }
    }
    report.stat("mean_family_size", sizes as f64 / report.trials as f64);
    Ok(report)
}

/// Samples `x, y` in `A` and a point `z` of their metric interval, and
/// checks `z` in `A`.
pub fn check_strongly_convex<M: MetricModel, S: Subset<M>>(
    space: &M,
    set: &S,
    cfg: &TrialConfig,
    tol: &Tolerance,
) -> Result<PropertyReport> {
    cfg.validate()?;
    let mut report = PropertyReport::new("strongly_convex", Some(cfg.seed));
    let mut proposals = 0usize;
    for i in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, i as u64);
        report.trials += 1;
        let (Some(x), Some(y)) =
            (set.sample(space, &mut rng, cfg.half_width, tol), set.sample(space, &mut rng, cfg.half_width, tol))
        else {
            report.skipped += 1;
            continue;
        };
        let mut accepted = None;
        for _ in 0..INTERVAL_BUDGET {
            proposals += 1;
            if let Some(z) = space.interval_proposal(&x, &y, &mut rng, tol) {
                if interval_contains(space, &x, &y, &z, tol)? {
                    accepted = Some(z);
                    break;
                }
            }
        }
        let Some(z) = accepted else {
            report.skipped += 1;
            continue;
        };
        if !set.contains(space, &z, tol) {
            report.falsify(Certificate::IntervalEscape {
                x: space.to_record(&x),
                y: space.to_record(&y),
                z: space.to_record(&z),
            });
            break;
        }
    }
    report.stat("proposals", proposals as f64);
    Ok(report)
}

/// Radius repair for the external check. Inflating radii to `d(x_i, A)`
/// and re-tightening the pairwise scale alternate until neither changes; the
/// fixpoint is `r_i = max(λ ρ_i, d(x_i, A))` for the smallest `λ` keeping the
/// family admissible, which is located directly by bisection on `λ`.
/// Returns the repaired radii and whether some pair ends up tight.
fn repair_radii<M: MetricModel>(
    space: &M,
    centers: &[M::Point],
    radii: &[f64],
    set_dist: &[f64],
    tol: &Tolerance,
) -> (Vec<f64>, bool) {
    let at = |lambda: f64| -> Vec<f64> { radii.iter().zip(set_dist).map(|(r, d)| (lambda * r).max(*d)).collect() };
    let admissible = |r: &[f64]| {
        (0..centers.len()).all(|i| (i + 1..centers.len()).all(|j| space.dist(&centers[i], &centers[j]) <= r[i] + r[j]))
    };
    if admissible(&at(0.0)) {
        return (at(0.0), false);
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..REPAIR_STEPS {
        let mid = 0.5 * (lo + hi);
        if admissible(&at(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let r = at(hi);
    let tight = (0..centers.len()).any(|i| {
        (i + 1..centers.len()).any(|j| (space.dist(&centers[i], &centers[j]) - r[i] - r[j]).abs() <= tol.eps_feas)
    });
    (r, tight)
}

/// Tests admissible families with `d(x_i, A) <= r_i` for a common point in `A`.
pub fn check_externally_hyperconvex<M: MetricModel, S: Subset<M>>(
    space: &M,
    set: &S,
    cfg: &TrialConfig,
    tol: &Tolerance,
) -> Result<PropertyReport> {
    cfg.validate()?;
    let mut report = PropertyReport::new("externally_hyperconvex", Some(cfg.seed));
    let mut tight_families = 0usize;
    for i in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, i as u64);
        let family = sample_admissible_family(space, cfg, &mut rng, tol)?;
        let centers: Vec<M::Point> = family.centers().cloned().collect();
        let radii: Vec<f64> = family.balls().iter().map(|b| b.radius).collect();
        let set_dist = centers.iter().map(|c| set.nearest(space, c, tol).map(|n| n.0)).collect::<Result<Vec<f64>>>()?;
        let (radii, tight) = repair_radii(space, &centers, &radii, &set_dist, tol);
        tight_families += usize::from(tight);
        let family =
            BallFamily::new(centers.into_iter().zip(radii).map(|(c, r)| Ball::new(c, r)).collect::<Result<Vec<_>>>()?)?;
        report.trials += 1;
        if set.feasible_with(space, &family, tol)?.is_none() {
            report.falsify(family_certificate(space, &family, true));
            break;
        }
    }
    report.stat("tight_families", tight_families as f64);
    Ok(report)
}

/// Outcome of a sampled gate test for one point.
#[derive(Debug, Clone, PartialEq)]
pub enum SampledGate<P> {
    Gate { gate: P, dist: f64 },
    NoGate { candidate: Option<P>, probe: Option<P>, dist: f64 },
}

/// Nearest point of `A` to `x`, verified as a gate on `probes` points.
pub fn sampled_gate<M: MetricModel, S: Subset<M>>(
    space: &M,
    set: &S,
    x: &M::Point,
    probes: usize,
    rng: &mut TrialRng,
    tol: &Tolerance,
) -> Result<SampledGate<M::Point>> {
    let (d, near) = set.nearest(space, x, tol)?;
    let Some(c) = near else {
        return Ok(SampledGate::NoGate { candidate: None, probe: None, dist: d });
    };
    for a in set.probes(space, &c, probes, rng) {
        if (space.dist(x, &a) - d - space.dist(&c, &a)).abs() > tol.eps_eq {
            return Ok(SampledGate::NoGate { candidate: Some(c), probe: Some(a), dist: d });
        }
    }
    Ok(SampledGate::Gate { gate: c, dist: d })
}

fn gated_trials<M: MetricModel, S: Subset<M>>(
    space: &M,
    set: &S,
    cfg: &TrialConfig,
    probes: usize,
    tol: &Tolerance,
) -> Result<PropertyReport> {
    let mut report = PropertyReport::new("gated", Some(cfg.seed));
    for i in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, i as u64);
        report.trials += 1;
        let Some(x) = space.sample_point(&mut rng, cfg.half_width, tol) else {
            report.skipped += 1;
            continue;
        };
        match sampled_gate(space, set, &x, probes, &mut rng, tol)? {
            SampledGate::Gate { .. } => {}
            SampledGate::NoGate { candidate, probe, dist } => {
                let cert = match (candidate, probe) {
                    (Some(c), Some(p)) => Certificate::GateFailure {
                        x: space.to_record(&x),
                        gate: space.to_record(&c),
                        probe: space.to_record(&p),
                    },
                    _ => Certificate::Unattained { x: space.to_record(&x), distance: dist },
                };
                report.falsify(cert);
                break;
            }
        }
    }
    report.stat("probes", probes as f64);
    Ok(report)
}

/// Tests random points for a gate in `A`, cross-checked against
/// [`check_strongly_convex`]: closed sets are gated exactly when they are
/// strongly convex. On disagreement the gate probes are doubled up to
/// [`MAX_GATE_PROBES`]; a disagreement that survives is reported as an
/// inconsistency.
pub fn check_gated<M: MetricModel, S: Subset<M>>(
    space: &M,
    set: &S,
    cfg: &TrialConfig,
    tol: &Tolerance,
) -> Result<PropertyReport> {
    cfg.validate()?;
    let convex = check_strongly_convex(space, set, cfg, tol)?;
    let mut probes = crate::gluing::DEFAULT_GATE_PROBES;
    let mut report = gated_trials(space, set, cfg, probes, tol)?;
    while report.verdict != convex.verdict && report.passed() && probes < MAX_GATE_PROBES {
        probes = (2 * probes).min(MAX_GATE_PROBES);
        report = gated_trials(space, set, cfg, probes, tol)?;
    }
    let agrees = report.verdict == convex.verdict;
    report.stat("strongly_convex_agrees", if agrees { 1.0 } else { 0.0 });
    if !agrees {
        report.notes.push(format!(
            "gate verdict {} disagrees with strong convexity verdict {}",
            report.verdict.as_str(),
            convex.verdict.as_str()
        ));
        if report.passed() {
            report.falsify(Certificate::Inconsistency {
                detail: format!("strongly convex check falsified, gates verified with {probes} probes"),
            });
        }
    }
    Ok(report)
}

/// Tests that the distance from random points to `A` is attained.
pub fn check_proximinal<M: MetricModel, S: Subset<M>>(
    space: &M,
    set: &S,
    cfg: &TrialConfig,
    tol: &Tolerance,
) -> Result<PropertyReport> {
    cfg.validate()?;
    let mut report = PropertyReport::new("proximinal", Some(cfg.seed));
    for i in 0..cfg.trials {
        let mut rng = trial_rng(cfg.seed, i as u64);
        report.trials += 1;
        let Some(x) = space.sample_point(&mut rng, cfg.half_width, tol) else {
            report.skipped += 1;
            continue;
        };
        let (d, near) = set.nearest(space, &x, tol)?;
        let attained = near.is_some_and(|q| set.contains(space, &q, tol) && space.dist(&x, &q) <= d + tol.eps_eq);
        if !attained {
            report.falsify(Certificate::Unattained { x: space.to_record(&x), distance: d });
            break;
        }
    }
    Ok(report)
}

/// Re-verifies a certificate from its serialized form. `set` is the tested
/// subset for certificates that refer to one. Returns `Ok(true)` when the
/// certificate is a genuine counterexample.
pub fn recheck<M: MetricModel, S: Subset<M>>(
    space: &M,
    set: Option<&S>,
    cert: &Certificate,
    tol: &Tolerance,
) -> Result<bool> {
    let need_set = || set.ok_or(Error::InvalidModel(format!("{} certificate needs its set", cert.kind())));
    match cert {
        Certificate::Family { balls, in_set } => {
            let family = BallFamily::new(
                balls
                    .iter()
                    .map(|b| Ball::new(space.decode_record(&b.center)?, b.radius))
                    .collect::<Result<Vec<_>>>()?,
            )?;
            if !pairwise_admissible(space, &family, tol)? {
                return Ok(false);
            }
            if *in_set {
                let a = need_set()?;
                for b in family.balls() {
                    if a.nearest(space, &b.center, tol)?.0 > b.radius + tol.eps_eq {
                        return Ok(false);
                    }
                }
                Ok(a.feasible_with(space, &family, tol)?.is_none())
            } else {
                Ok(space.family_feasible(&family, tol)?.is_none())
            }
        }
        Certificate::IntervalEscape { x, y, z } => {
            let a = need_set()?;
            let (x, y, z) = (space.decode_record(x)?, space.decode_record(y)?, space.decode_record(z)?);
            Ok(a.contains(space, &x, tol)
                && a.contains(space, &y, tol)
                && interval_contains(space, &x, &y, &z, tol)?
                && !a.contains(space, &z, tol))
        }
        Certificate::GateFailure { x, gate, probe } => {
            let a = need_set()?;
            let (x, c, p) = (space.decode_record(x)?, space.decode_record(gate)?, space.decode_record(probe)?);
            let d = a.nearest(space, &x, tol)?.0;
            // any gate is the unique nearest point, so a nearest point that
            // fails the gate identity rules out every gate
            Ok(a.contains(space, &c, tol)
                && a.contains(space, &p, tol)
                && (space.dist(&x, &c) - d).abs() <= tol.eps_eq
                && (space.dist(&x, &p) - space.dist(&x, &c) - space.dist(&c, &p)).abs() > tol.eps_eq)
        }
        Certificate::Unattained { x, distance } => {
            let a = need_set()?;
            let x = space.decode_record(x)?;
            let (d, near) = a.nearest(space, &x, tol)?;
            Ok((d - distance).abs() <= tol.eps_eq
                && !near.is_some_and(|q| a.contains(space, &q, tol) && space.dist(&x, &q) <= d + tol.eps_eq))
        }
        Certificate::MetricViolation { .. } | Certificate::Inconsistency { .. } => Ok(false),
    }
}

/// `true` when a falsified report carries a certificate that re-verifies.
pub fn report_rechecks<M: MetricModel, S: Subset<M>>(
    space: &M,
    set: Option<&S>,
    report: &PropertyReport,
    tol: &Tolerance,
) -> Result<bool> {
    match (&report.verdict, &report.counterexample) {
        (Verdict::Pass, None) => Ok(true),
        (Verdict::Falsified, Some(cert)) => recheck(space, set, cert, tol),
        _ => Ok(false),
    }
}
