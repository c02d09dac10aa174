use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gluing::{gate, GluedPoint, GluedSpace2, SheetId};
use crate::linf2::{ConvexPolygon, Vec2};
use crate::metric::{in_all_balls, square_intersection, BallFamily, MetricModel};
use crate::tolerance::Tolerance;

/// Branch of the case analysis that produced the point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GluedCase {
    /// Every residual ball reaches the gluing set and they meet pairwise.
    InGluingSet,
    /// Some residual balls miss each other; all such pairs share one sheet.
    ViolatingPairs,
    /// Some ball does not reach the gluing set.
    ShortBall,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GluedIntersection {
    pub point: GluedPoint,
    pub case: GluedCase,
    /// Sheet the mixed family was solved on, if any.
    pub sheet: Option<SheetId>,
}

struct Gated {
    param: f64,
    dist: f64,
    radius: f64,
}

/// A common point of a pairwise admissible family in a model whose gluing
/// set is gated in every sheet. Gates are verified by sampled probes
/// derived from `seed`.
pub fn strongly_convex_glued_intersection(
    space: &GluedSpace2,
    family: &BallFamily<GluedPoint>,
    seed: u64,
    tol: &Tolerance,
) -> Result<GluedIntersection> {
    for b in family.balls() {
        space.validate(&b.center, tol)?;
    }
    let balls = family.balls();
    let mut gated = Vec::with_capacity(balls.len());
    for (i, b) in balls.iter().enumerate() {
        let info = *gate(space, &b.center, seed.wrapping_add(i as u64), tol).info().ok_or(Error::NoGate)?;
        gated.push(Gated { param: info.param, dist: info.dist_to_gate, radius: b.radius });
    }
    let slack = tol.clip();
    let residual = |g: &Gated| (g.radius - g.dist).max(0.0);

    let short: Vec<usize> = (0..balls.len()).filter(|&i| gated[i].dist > gated[i].radius + slack).collect();
    let (case, host) = if let Some(&first) = short.first() {
        let host = balls[first].center.sheet;
        if let Some(&other) = short.iter().find(|&&i| balls[i].center.sheet != host) {
            return Err(contradiction("balls missing the gluing set", first, other, host, balls[other].center.sheet));
        }
        (GluedCase::ShortBall, Some(host))
    } else {
        let mut host: Option<(SheetId, usize)> = None;
        for i in 0..balls.len() {
            for j in i + 1..balls.len() {
                let (gi, gj) = (&gated[i], &gated[j]);
                if (gi.param - gj.param).abs() <= residual(gi) + residual(gj) + slack {
                    continue;
                }
                let (si, sj) = (balls[i].center.sheet, balls[j].center.sheet);
                if si != sj {
                    return Err(contradiction("violating pair across sheets", i, j, si, sj));
                }
                match host {
                    None => host = Some((si, i)),
                    Some((h, k)) if h != si => return Err(contradiction("violating pairs", k, i, h, si)),
                    Some(_) => {}
                }
            }
        }
        match host {
            Some((h, _)) => (GluedCase::ViolatingPairs, Some(h)),
            None => (GluedCase::InGluingSet, None),
        }
    };

    let point = match host {
        None => {
            let mut lo = f64::NEG_INFINITY;
            let mut hi = f64::INFINITY;
            for g in &gated {
                lo = lo.max(g.param - residual(g));
                hi = hi.min(g.param + residual(g));
            }
            let t = 0.5 * (lo + hi);
            space.boundary_point(balls[0].center.sheet, t)
        }
        Some(sheet) => {
            let squares: Vec<(Vec2, f64)> = balls
                .iter()
                .zip(&gated)
                .map(|(b, g)| {
                    if b.center.sheet == sheet {
                        (b.center.coords, b.radius)
                    } else {
                        (space.boundary_point(sheet, g.param).coords, residual(g))
                    }
                })
                .collect();
            let region = match square_intersection(&squares, slack) {
                None => ConvexPolygon::empty(),
                Some((lo, hi)) => ConvexPolygon::rect(lo, hi).intersect(&space.sheet_polygon(sheet, tol), tol),
            };
            let hp = space.sheets()[sheet.0].region;
            let coords = region
                .witness(|p| {
                    hp.contains(p, tol.eps_feas) && in_all_balls(space, family, &GluedPoint { sheet, coords: p }, tol)
                })
                .ok_or_else(|| Error::Violation(format!("mixed family on sheet {} has no common point", sheet.0)))?;
            GluedPoint { sheet, coords }
        }
    };
    if !in_all_balls(space, family, &point, tol) {
        return Err(Error::Violation("case algorithm output misses a ball".into()));
    }
    Ok(GluedIntersection { point, case, sheet: host })
}

fn contradiction(what: &str, i: usize, j: usize, si: SheetId, sj: SheetId) -> Error {
    Error::Violation(format!(
        "contradiction with gated gluing: {what} (balls {i}, {j}) on sheets {} and {}",
        si.0, sj.0
    ))
}
