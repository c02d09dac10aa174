use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::gluing::{sheet_region, GluedPoint, GluedSpace2, SheetId};
use crate::linf2::{ConvexPolygon, PlanarSpace, Vec2, Window};
use crate::metric::{in_all_balls, BallFamily, FiniteMetricSpace, MetricModel};
use crate::seed::TrialRng;
use crate::tolerance::Tolerance;

/// Rungs of the probe ladder used by gate checks.
const LADDER: usize = 16;

/// A subset `A` of a metric model, as seen by the checkers.
pub trait Subset<M: MetricModel> {
    fn describe(&self) -> String;

    fn contains(&self, space: &M, p: &M::Point, tol: &Tolerance) -> bool;

    /// `d(x, A)` and a point of `A` attaining it, if the distance is attained.
    fn nearest(&self, space: &M, x: &M::Point, tol: &Tolerance) -> Result<(f64, Option<M::Point>)>;

    /// Random point of `A`, preferring the part inside `[-h, h]^2`.
    fn sample(&self, space: &M, rng: &mut TrialRng, half_width: f64, tol: &Tolerance) -> Option<M::Point>;

    /// A point of `A` in every ball of the family, or `None`.
    fn feasible_with(&self, space: &M, family: &BallFamily<M::Point>, tol: &Tolerance) -> Result<Option<M::Point>>;

    /// Points of `A` against which a gate candidate is tested: a geometric
    /// ladder from `anchor` plus random points.
    fn probes(&self, space: &M, anchor: &M::Point, count: usize, rng: &mut TrialRng) -> Vec<M::Point>;
}

/// A convex polygon (possibly a segment or a point) in a planar space.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneSet {
    pub poly: ConvexPolygon,
    pub label: String,
}

impl PlaneSet {
    pub fn new(poly: ConvexPolygon, label: &str) -> Result<Self> {
        if poly.is_empty() {
            return Err(Error::EmptySet("plane set"));
        }
        Ok(PlaneSet { poly, label: label.into() })
    }

    /// The line `ξ₂ = σ ξ₁` inside the window.
    pub fn line(sigma: f64, window: &Window) -> Self {
        let r = window.half_width;
        let mut poly = ConvexPolygon::hull(&[Vec2::new(-r, -sigma * r), Vec2::new(r, sigma * r)]);
        poly.window_clipped = true;
        PlaneSet { poly, label: format!("line slope {sigma}") }
    }

    pub fn whole(space: &PlanarSpace, tol: &Tolerance) -> Self {
        PlaneSet { poly: space.polygon(tol), label: "whole space".into() }
    }

    pub fn point(p: Vec2) -> Self {
        PlaneSet { poly: ConvexPolygon::point(p), label: format!("point ({}, {})", p.x, p.y) }
    }
}

fn polygon_probes(poly: &ConvexPolygon, anchor: Vec2, count: usize, rng: &mut TrialRng) -> Vec<Vec2> {
    let mut out = Vec::with_capacity(count);
    'ladder: for j in 0..LADDER {
        let w = 1.0 / (1u64 << j) as f64;
        for v in poly.vertices() {
            if out.len() >= count {
                break 'ladder;
            }
            out.push(anchor.lerp(*v, w));
        }
    }
    while out.len() < count {
        match poly.sample_uniform(rng) {
            Some(p) => out.push(p),
            None => break,
        }
    }
    out
}

fn boxed(poly: &ConvexPolygon, half_width: f64, tol: &Tolerance) -> ConvexPolygon {
    let h = half_width;
    let inside = poly.intersect(&ConvexPolygon::rect(Vec2::new(-h, -h), Vec2::new(h, h)), tol);
    if inside.is_empty() {
        poly.clone()
    } else {
        inside
    }
}

impl Subset<PlanarSpace> for PlaneSet {
    fn describe(&self) -> String {
        self.label.clone()
    }

    fn contains(&self, space: &PlanarSpace, p: &Vec2, tol: &Tolerance) -> bool {
        space.contains(*p, tol) && self.poly.contains(*p, tol.eps_feas)
    }

    fn nearest(&self, _space: &PlanarSpace, x: &Vec2, _tol: &Tolerance) -> Result<(f64, Option<Vec2>)> {
        let (d, q) = self.poly.linf_distance(*x).ok_or(Error::EmptySet("plane set"))?;
        Ok((d, Some(q)))
    }

    fn sample(&self, space: &PlanarSpace, rng: &mut TrialRng, half_width: f64, tol: &Tolerance) -> Option<Vec2> {
        boxed(&self.poly, half_width, tol).sample_uniform(rng).filter(|p| space.contains(*p, tol))
    }

    fn feasible_with(&self, space: &PlanarSpace, family: &BallFamily<Vec2>, tol: &Tolerance) -> Result<Option<Vec2>> {
        for c in family.centers() {
            space.validate(c, tol)?;
        }
        let region = space.family_region(family, tol).intersect(&self.poly, tol);
        Ok(region.witness(|p| self.contains(space, &p, tol) && in_all_balls(space, family, &p, tol)))
    }

    fn probes(&self, _space: &PlanarSpace, anchor: &Vec2, count: usize, rng: &mut TrialRng) -> Vec<Vec2> {
        polygon_probes(&self.poly, *anchor, count, rng)
    }
}

/// An open axis box: not closed, so distances from outside are not attained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpenBox {
    pub lo: Vec2,
    pub hi: Vec2,
}

impl OpenBox {
    fn interior(&self, p: Vec2) -> bool {
        p.x > self.lo.x && p.x < self.hi.x && p.y > self.lo.y && p.y < self.hi.y
    }

    fn closure(&self) -> ConvexPolygon {
        ConvexPolygon::rect(self.lo, self.hi)
    }
}

impl Subset<PlanarSpace> for OpenBox {
    fn describe(&self) -> String {
        format!("open box ({}, {}) x ({}, {})", self.lo.x, self.hi.x, self.lo.y, self.hi.y)
    }

    fn contains(&self, _space: &PlanarSpace, p: &Vec2, _tol: &Tolerance) -> bool {
        self.interior(*p)
    }

    fn nearest(&self, _space: &PlanarSpace, x: &Vec2, _tol: &Tolerance) -> Result<(f64, Option<Vec2>)> {
        if self.interior(*x) {
            return Ok((0.0, Some(*x)));
        }
        let (d, _) = self.closure().linf_distance(*x).ok_or(Error::EmptySet("open box"))?;
        Ok((d, None))
    }

    fn sample(&self, _space: &PlanarSpace, rng: &mut TrialRng, _half_width: f64, _tol: &Tolerance) -> Option<Vec2> {
        let p = Vec2::new(rng.gen_range(self.lo.x..self.hi.x), rng.gen_range(self.lo.y..self.hi.y));
        self.interior(p).then_some(p)
    }

    fn feasible_with(&self, space: &PlanarSpace, family: &BallFamily<Vec2>, tol: &Tolerance) -> Result<Option<Vec2>> {
        let region = space.family_region(family, tol).intersect(&self.closure(), tol);
        Ok(region.witness(|p| self.interior(p) && in_all_balls(space, family, &p, tol)))
    }

    fn probes(&self, _space: &PlanarSpace, anchor: &Vec2, count: usize, rng: &mut TrialRng) -> Vec<Vec2> {
        polygon_probes(&self.closure(), *anchor, count, rng).into_iter().filter(|p| self.interior(*p)).collect()
    }
}

/// A subset of a finite metric space given by member indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSubset {
    pub members: Vec<usize>,
}

impl Subset<FiniteMetricSpace> for FiniteSubset {
    fn describe(&self) -> String {
        format!("{} of the points", self.members.len())
    }

    fn contains(&self, _space: &FiniteMetricSpace, p: &usize, _tol: &Tolerance) -> bool {
        self.members.contains(p)
    }

    fn nearest(&self, space: &FiniteMetricSpace, x: &usize, tol: &Tolerance) -> Result<(f64, Option<usize>)> {
        space.validate(x, tol)?;
        let best = self
            .members
            .iter()
            .map(|m| (space.dist(x, m), *m))
            .fold(None, |acc: Option<(f64, usize)>, c| match acc {
                Some(a) if a.0 <= c.0 => Some(a),
                _ => Some(c),
            })
            .ok_or(Error::EmptySet("finite subset"))?;
        Ok((best.0, Some(best.1)))
    }

    fn sample(
        &self,
        _space: &FiniteMetricSpace,
        rng: &mut TrialRng,
        _half_width: f64,
        _tol: &Tolerance,
    ) -> Option<usize> {
        if self.members.is_empty() {
            return None;
        }
        Some(self.members[rng.gen_range(0..self.members.len())])
    }

    fn feasible_with(
        &self,
        space: &FiniteMetricSpace,
        family: &BallFamily<usize>,
        tol: &Tolerance,
    ) -> Result<Option<usize>> {
        for c in family.centers() {
            space.validate(c, tol)?;
        }
        Ok(self.members.iter().copied().find(|m| in_all_balls(space, family, m, tol)))
    }

    fn probes(&self, _space: &FiniteMetricSpace, _anchor: &usize, _count: usize, _rng: &mut TrialRng) -> Vec<usize> {
        self.members.clone()
    }
}

/// The gluing set of a glued space.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GluingSet;

impl Subset<GluedSpace2> for GluingSet {
    fn describe(&self) -> String {
        "gluing set".into()
    }

    fn contains(&self, space: &GluedSpace2, p: &GluedPoint, tol: &Tolerance) -> bool {
        space.sheet(p.sheet).is_ok() && space.on_gluing_set(p, tol.eps_feas)
    }

    fn nearest(&self, space: &GluedSpace2, x: &GluedPoint, tol: &Tolerance) -> Result<(f64, Option<GluedPoint>)> {
        space.validate(x, tol)?;
        let (d, t) = space.dist_to_gluing_set(x);
        Ok((d, Some(space.boundary_point(x.sheet, t))))
    }

    fn sample(&self, space: &GluedSpace2, rng: &mut TrialRng, half_width: f64, _tol: &Tolerance) -> Option<GluedPoint> {
        let sheet = SheetId(rng.gen_range(0..space.sheets().len()));
        Some(space.boundary_point(sheet, rng.gen_range(-half_width..=half_width)))
    }

    fn feasible_with(
        &self,
        space: &GluedSpace2,
        family: &BallFamily<GluedPoint>,
        tol: &Tolerance,
    ) -> Result<Option<GluedPoint>> {
        for c in family.centers() {
            space.validate(c, tol)?;
        }
        let r = space.window.half_width;
        // every point of the gluing set lives on each sheet; one sheet suffices
        let sheet = SheetId(0);
        let line = space.sheets()[0].chart.segment(-r, r);
        let region = sheet_region(space, family, sheet, tol)?.intersect(&line, tol);
        Ok(region
            .witness(|p| {
                let q = GluedPoint { sheet, coords: p };
                space.on_gluing_set(&q, tol.eps_feas)
                    && family.balls().iter().all(|b| space.glued_dist(&b.center, &q) <= b.radius + tol.eps_feas)
            })
            .map(|coords| GluedPoint { sheet, coords }))
    }

    fn probes(&self, space: &GluedSpace2, anchor: &GluedPoint, count: usize, rng: &mut TrialRng) -> Vec<GluedPoint> {
        let r = space.window.half_width;
        let t0 = space.sheets()[anchor.sheet.0].chart.param(anchor.coords);
        let mut out = Vec::with_capacity(count);
        for j in 0..LADDER {
            let step = r / (1u64 << j) as f64;
            out.push(space.boundary_point(anchor.sheet, t0 + step));
            out.push(space.boundary_point(anchor.sheet, t0 - step));
        }
        out.truncate(count);
        while out.len() < count {
            out.push(space.boundary_point(anchor.sheet, rng.gen_range(-r..=r)));
        }
        out
    }
}
