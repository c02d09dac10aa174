//! Two half-planes of the maximum-norm plane glued along their boundary
//! lines: closed-form ball traces, the three-ball counterexample and the
//! hyperconvexity phase diagram over the slopes `(a, b)`.

mod scene;

use alloc::vec::Vec;

use crate::checkers::{check_hyperconvex, TrialConfig};
use crate::error::{Error, Result};
use crate::gluing::{ball_trace, glued_family_feasible, GluedPoint, GluedSpace2, SheetId};
use crate::linf2::{ConvexPolygon, HalfPlane, Vec2};
use crate::metric::{Ball, BallFamily};
use crate::report::{PropertyReport, Verdict};
use crate::seed::derive;
use crate::tolerance::Tolerance;

pub use scene::{s5_scene, Scene, ScenePanel};

/// Boundary directions used for Hausdorff estimates between traces.
pub const HAUSDORFF_DIRECTIONS: usize = 720;

/// Slopes `0 <= a <= b <= 1` and the gluing orientation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct S5Config {
    pub a: f64,
    pub b: f64,
    pub reflected: bool,
}

impl S5Config {
    pub fn new(a: f64, b: f64, reflected: bool) -> Result<Self> {
        if !(0.0 <= a && a <= b && b <= 1.0) {
            return Err(Error::InvalidRange { lo: a, hi: b });
        }
        Ok(S5Config { a, b, reflected })
    }

    pub fn space(&self) -> Result<GluedSpace2> {
        GluedSpace2::half_plane_pair(self.a, self.b, self.reflected)
    }

    pub fn orientation(&self) -> &'static str {
        if self.reflected {
            "reflected"
        } else {
            "same"
        }
    }

    /// Same orientation: hyperconvex iff `a = b`. Reflected: iff
    /// `a = b = 0` or `a = b = 1`.
    pub fn predicted_hyperconvex(&self) -> bool {
        if self.reflected {
            self.a == self.b && (self.a == 0.0 || self.a == 1.0)
        } else {
            self.a == self.b
        }
    }
}

/// Coefficients of the closed-form trace `B(x_1, 1) ∩ H_2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum S5TraceFormula {
    /// `ξ₂ >= slope ξ₁ + intercept`.
    Same { slope: f64, intercept: f64 },
    /// `ξ₂ >= max(l, m ξ₁ - q)`; `m` and `q` are undefined at `a = 1`.
    Reflected { l: f64, m: Option<f64>, q: Option<f64> },
}

impl S5TraceFormula {
    pub fn new(cfg: &S5Config) -> Self {
        let (a, b) = (cfg.a, cfg.b);
        if cfg.reflected {
            let l = -1.0 + (1.0 - b) * (1.0 - a) / (1.0 + a);
            let (m, q) =
                if a < 1.0 { (Some((a + b) / (1.0 - a)), Some(a * (1.0 + b) / (1.0 - a))) } else { (None, None) };
            S5TraceFormula::Reflected { l, m, q }
        } else {
            S5TraceFormula::Same { slope: (b - a) / (1.0 + a), intercept: -a * (1.0 + b) / (1.0 + a) }
        }
    }

    /// The constant `l` of the reflected case.
    pub fn l(&self) -> Option<f64> {
        match self {
            S5TraceFormula::Reflected { l, .. } => Some(*l),
            S5TraceFormula::Same { .. } => None,
        }
    }
}

/// `x_1` on the first sheet, `x_2` and `x_3` on the second.
pub fn s5_centers(cfg: &S5Config) -> [GluedPoint; 3] {
    let (a, b) = (cfg.a, cfg.b);
    let x2 = match S5TraceFormula::new(cfg) {
        S5TraceFormula::Reflected { l, .. } => l - 1.0,
        S5TraceFormula::Same { .. } => -b - 1.0,
    };
    [GluedPoint::new(0, 0.0, 1.0 - a), GluedPoint::new(1, 0.0, x2), GluedPoint::new(1, 2.0, b - 1.0)]
}

/// `B(x_1, 1) ∩ H_2` from the closed-form inequalities, or `None` when the
/// formula is singular (reflected, `a = 1`).
pub fn s5_trace_formula(cfg: &S5Config, tol: &Tolerance) -> Result<Option<ConvexPolygon>> {
    let space = cfg.space()?;
    let mut poly = space.sheet_polygon(SheetId(1), tol);
    // ξ₂ >= k ξ₁ + c  <=>  k ξ₁ - ξ₂ <= -c
    let above = |k: f64, c: f64| HalfPlane::new(Vec2::new(k, -1.0), -c);
    let mut cuts = alloc::vec![HalfPlane::new(Vec2::new(-1.0, 0.0), 1.0)?, HalfPlane::new(Vec2::new(1.0, 0.0), 1.0)?];
    match S5TraceFormula::new(cfg) {
        S5TraceFormula::Same { slope, intercept } => cuts.push(above(slope, intercept)?),
        S5TraceFormula::Reflected { l, m: Some(m), q: Some(q) } => {
            cuts.push(above(0.0, l)?);
            cuts.push(above(m, -q)?);
        }
        S5TraceFormula::Reflected { .. } => return Ok(None),
    }
    for h in &cuts {
        poly = poly.clip(h, tol);
    }
    Ok(Some(poly))
}

/// The engine trace `B(x_1, 1) ∩ H_2`.
pub fn s5_engine_trace(cfg: &S5Config, tol: &Tolerance) -> Result<ConvexPolygon> {
    let space = cfg.space()?;
    ball_trace(&space, &s5_centers(cfg)[0], 1.0, SheetId(1), tol)
}

/// Outcome of the three-unit-ball test for one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct S5Report {
    pub config: S5Config,
    pub centers: [GluedPoint; 3],
    /// Common points of the pairs `(1,2)`, `(1,3)`, `(2,3)`.
    pub pairwise: [Option<GluedPoint>; 3],
    pub triple: Option<GluedPoint>,
    pub predicted_hyperconvex: bool,
    /// Hausdorff estimate between the closed-form and the engine trace;
    /// `None` when the formula is singular.
    pub trace_discrepancy: Option<f64>,
}

impl S5Report {
    pub fn pairwise_ok(&self) -> bool {
        self.pairwise.iter().all(Option::is_some)
    }

    pub fn triple_empty(&self) -> bool {
        self.triple.is_none()
    }

    /// Hyperconvex cells must have a common point; the others must show a
    /// pairwise intersecting triple without one.
    pub fn certificate_consistent(&self) -> bool {
        self.pairwise_ok() && self.triple_empty() != self.predicted_hyperconvex
    }
}

pub const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

pub fn s5_counterexample(cfg: &S5Config, tol: &Tolerance) -> Result<S5Report> {
    let space = cfg.space()?;
    let centers = s5_centers(cfg);
    let unit = |idx: &[usize]| -> Result<BallFamily<GluedPoint>> {
        BallFamily::new(idx.iter().map(|&i| Ball::new(centers[i], 1.0)).collect::<Result<Vec<_>>>()?)
    };
    let mut pairwise = [None; 3];
    for (k, (i, j)) in PAIRS.iter().enumerate() {
        pairwise[k] = glued_family_feasible(&space, &unit(&[*i, *j])?, tol)?;
    }
    let triple = glued_family_feasible(&space, &unit(&[0, 1, 2])?, tol)?;
    let trace_discrepancy = match s5_trace_formula(cfg, tol)? {
        Some(formula) => Some(formula.hausdorff_estimate(&s5_engine_trace(cfg, tol)?, HAUSDORFF_DIRECTIONS)),
        None => None,
    };
    Ok(S5Report {
        config: *cfg,
        centers,
        pairwise,
        triple,
        predicted_hyperconvex: cfg.predicted_hyperconvex(),
        trace_discrepancy,
    })
}

/// One cell of the phase diagram.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub report: S5Report,
    pub sampled: PropertyReport,
}

impl SweepRow {
    /// Certificate agrees with the prediction, and hyperconvex cells also
    /// survive the sampled check.
    pub fn consistent(&self) -> bool {
        self.report.certificate_consistent()
            && (!self.report.predicted_hyperconvex || self.sampled.verdict == Verdict::Pass)
    }
}

/// Grid value `k / (steps - 1)`.
pub fn grid_value(k: usize, steps: usize) -> f64 {
    k as f64 / (steps - 1) as f64
}

pub fn s5_sweep_cell(cfg: &S5Config, check: &TrialConfig, tol: &Tolerance) -> Result<SweepRow> {
    let report = s5_counterexample(cfg, tol)?;
    let sampled = check_hyperconvex(&cfg.space()?, check, tol)?;
    Ok(SweepRow { report, sampled })
}

/// All cells `a <= b` of a `steps x steps` grid on `[0, 1]^2`, both
/// orientations. Each cell's sampled check is seeded from `check.seed` and
/// the cell index.
pub fn s5_phase_sweep(steps: usize, check: &TrialConfig, tol: &Tolerance) -> Result<Vec<SweepRow>> {
    if steps < 2 {
        return Err(Error::InvalidRange { lo: steps as f64, hi: 2.0 });
    }
    let mut rows = Vec::new();
    let mut cell = 0u64;
    for reflected in [false, true] {
        for i in 0..steps {
            for j in i..steps {
                let cfg = S5Config::new(grid_value(i, steps), grid_value(j, steps), reflected)?;
                let cell_check = TrialConfig { seed: derive(check.seed, cell), ..*check };
                rows.push(s5_sweep_cell(&cfg, &cell_check, tol)?);
                cell += 1;
            }
        }
    }
    Ok(rows)
}
