//! Metric-space backends and the predicates shared by every checker.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Debug;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linf2::{linf_dist, ConvexPolygon, PlanarSpace, Vec2};
use crate::report::{Certificate, PointRecord, PropertyReport};
use crate::seed::TrialRng;
use crate::tolerance::Tolerance;

/// A metric space the checkers can query.
pub trait MetricModel {
    type Point: Clone + Debug + PartialEq;

    fn dist(&self, x: &Self::Point, y: &Self::Point) -> f64;

    /// Rejects points outside the space.
    fn validate(&self, x: &Self::Point, tol: &Tolerance) -> Result<()>;

    /// Random point of the space inside `[-half_width, half_width]^2` (or any
    /// point for finite spaces).
    fn sample_point(&self, rng: &mut TrialRng, half_width: f64, tol: &Tolerance) -> Option<Self::Point>;

    /// A common point of the family, or `None` when the balls do not meet.
    fn family_feasible(&self, family: &BallFamily<Self::Point>, tol: &Tolerance) -> Result<Option<Self::Point>>;

    /// Random candidate for the metric interval `I(x, y)`; the caller verifies
    /// it with [`interval_contains`].
    fn interval_proposal(
        &self,
        x: &Self::Point,
        y: &Self::Point,
        rng: &mut TrialRng,
        tol: &Tolerance,
    ) -> Option<Self::Point>;

    fn to_record(&self, p: &Self::Point) -> PointRecord;

    fn decode_record(&self, r: &PointRecord) -> Result<Self::Point>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ball<P> {
    pub center: P,
    pub radius: f64,
}

impl<P> Ball<P> {
    pub fn new(center: P, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::NegativeRadius(radius));
        }
        Ok(Ball { center, radius })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BallFamily<P> {
    balls: Vec<Ball<P>>,
}

impl<P> BallFamily<P> {
    pub fn new(balls: Vec<Ball<P>>) -> Result<Self> {
        if balls.is_empty() {
            return Err(Error::EmptySet("ball family"));
        }
        Ok(BallFamily { balls })
    }

    pub fn balls(&self) -> &[Ball<P>] {
        &self.balls
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    pub fn centers(&self) -> impl Iterator<Item = &P> {
        self.balls.iter().map(|b| &b.center)
    }
}

/// `|d(x,z) + d(z,y) - d(x,y)| <= eps_eq`.
pub fn interval_contains<M: MetricModel>(
    space: &M,
    x: &M::Point,
    y: &M::Point,
    z: &M::Point,
    tol: &Tolerance,
) -> Result<bool> {
    for p in [x, y, z] {
        space.validate(p, tol)?;
    }
    let excess = space.dist(x, z) + space.dist(z, y) - space.dist(x, y);
    Ok(excess.abs() <= tol.eps_eq)
}

/// `d(x_i, x_j) <= r_i + r_j + eps_eq` for every pair.
pub fn pairwise_admissible<M: MetricModel>(space: &M, family: &BallFamily<M::Point>, tol: &Tolerance) -> Result<bool> {
    for b in family.balls() {
        space.validate(&b.center, tol)?;
    }
    let balls = family.balls();
    for (i, bi) in balls.iter().enumerate() {
        for bj in &balls[i + 1..] {
            if space.dist(&bi.center, &bj.center) > bi.radius + bj.radius + tol.eps_eq {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `true` when `p` lies in every ball of the family within `eps_feas`.
pub fn in_all_balls<M: MetricModel>(space: &M, family: &BallFamily<M::Point>, p: &M::Point, tol: &Tolerance) -> bool {
    family.balls().iter().all(|b| space.dist(&b.center, p) <= b.radius + tol.eps_feas)
}

/// Exact minimum distance to a finite nonempty set.
pub fn finite_dist_to_set<M: MetricModel>(space: &M, x: &M::Point, set: &[M::Point]) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::EmptySet("point set"));
    }
    Ok(set.iter().map(|s| space.dist(x, s)).fold(f64::INFINITY, f64::min))
}

/// Metric given by a distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Vec<Vec<f64>>,
}

impl FiniteMetricSpace {
    /// Accepts any square matrix of finite entries; axioms are checked
    /// separately by [`check_metric_axioms`].
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Format("empty distance matrix".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Format(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            if let Some(v) = row.iter().find(|v| !v.is_finite()) {
                return Err(Error::Format(format!("row {i} has non-finite entry {v}")));
            }
        }
        let labels = (0..n).map(|i| format!("p{i}")).collect();
        Ok(FiniteMetricSpace { labels, dist: rows })
    }

    /// Distance matrix of sample points of the plane with the maximum norm.
    pub fn from_plane_points(points: &[Vec2]) -> Result<Self> {
        Self::from_rows(points.iter().map(|p| points.iter().map(|q| linf_dist(*p, *q)).collect()).collect())
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.dist.len() {
            return Err(Error::Format(format!("{} labels for {} points", labels.len(), self.dist.len())));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.dist
    }
}

impl MetricModel for FiniteMetricSpace {
    type Point = usize;

    fn dist(&self, x: &usize, y: &usize) -> f64 {
        self.dist[*x][*y]
    }

    fn validate(&self, x: &usize, _tol: &Tolerance) -> Result<()> {
        if *x < self.dist.len() {
            Ok(())
        } else {
            Err(Error::PointOutsideSpace(format!("index {x} of {}", self.dist.len())))
        }
    }

    fn sample_point(&self, rng: &mut TrialRng, _half_width: f64, _tol: &Tolerance) -> Option<usize> {
        Some(rng.gen_range(0..self.dist.len()))
    }

    fn family_feasible(&self, family: &BallFamily<usize>, tol: &Tolerance) -> Result<Option<usize>> {
        for c in family.centers() {
            self.validate(c, tol)?;
        }
        Ok((0..self.len()).find(|p| in_all_balls(self, family, p, tol)))
    }

    fn interval_proposal(&self, x: &usize, y: &usize, rng: &mut TrialRng, tol: &Tolerance) -> Option<usize> {
        let members: Vec<usize> = (0..self.len())
            .filter(|z| (self.dist(x, z) + self.dist(z, y) - self.dist(x, y)).abs() <= tol.eps_eq)
            .collect();
        if members.is_empty() {
            return None;
        }
        Some(members[rng.gen_range(0..members.len())])
    }

    fn to_record(&self, p: &usize) -> PointRecord {
        PointRecord::Index(*p)
    }

    fn decode_record(&self, r: &PointRecord) -> Result<usize> {
        match r {
            PointRecord::Index(i) if *i < self.len() => Ok(*i),
            other => Err(Error::PointOutsideSpace(format!("{other:?}"))),
        }
    }
}

/// Checks zero diagonal, nonnegativity, symmetry and the triangle inequality,
/// reporting the first violation.
#[allow(clippy::needless_range_loop)]
pub fn check_metric_axioms(space: &FiniteMetricSpace, tol: &Tolerance) -> PropertyReport {
    let mut report = PropertyReport::new("metric_axioms", None);
    let d = space.rows();
    let n = d.len();
    let violation = |kind: &str, indices: Vec<usize>, excess: f64| Certificate::MetricViolation {
        kind: kind.into(),
        indices,
        excess,
    };
    report.trials = n * n * n;
    'outer: for i in 0..n {
        if d[i][i].abs() > tol.eps_eq {
            report.falsify(violation("diagonal", alloc::vec![i], d[i][i].abs()));
            break;
        }
        for j in 0..n {
            if d[i][j] < -tol.eps_eq {
                report.falsify(violation("negative", alloc::vec![i, j], -d[i][j]));
                break 'outer;
            }
            if (d[i][j] - d[j][i]).abs() > tol.eps_eq {
                report.falsify(violation("asymmetric", alloc::vec![i, j], (d[i][j] - d[j][i]).abs()));
                break 'outer;
            }
        }
    }
    if report.passed() {
        'tri: for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let excess = d[i][k] - d[i][j] - d[j][k];
                    if excess > tol.eps_eq {
                        report.falsify(violation("triangle", alloc::vec![i, j, k], excess));
                        break 'tri;
                    }
                }
            }
        }
    }
    report
}

/// Intersection of axis squares as an exact rectangle, `None` when empty
/// beyond `slack`.
pub(crate) fn square_intersection(balls: &[(Vec2, f64)], slack: f64) -> Option<(Vec2, Vec2)> {
    let mut lo = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut hi = Vec2::new(f64::INFINITY, f64::INFINITY);
    for (c, r) in balls {
        lo = Vec2::new(lo.x.max(c.x - r), lo.y.max(c.y - r));
        hi = Vec2::new(hi.x.min(c.x + r), hi.y.min(c.y + r));
    }
    if lo.x > hi.x + slack || lo.y > hi.y + slack {
        return None;
    }
    // collapse rounding-level inversions to the midpoint
    let fix = |l: f64, h: f64| {
        if l > h {
            let m = 0.5 * (l + h);
            (m, m)
        } else {
            (l, h)
        }
    };
    let (lx, hx) = fix(lo.x, hi.x);
    let (ly, hy) = fix(lo.y, hi.y);
    Some((Vec2::new(lx, ly), Vec2::new(hx, hy)))
}

impl PlanarSpace {
    /// Common region of the family inside the space.
    pub fn family_region(&self, family: &BallFamily<Vec2>, tol: &Tolerance) -> ConvexPolygon {
        let squares: Vec<(Vec2, f64)> = family.balls().iter().map(|b| (b.center, b.radius)).collect();
        match square_intersection(&squares, tol.clip()) {
            None => ConvexPolygon::empty(),
            Some((lo, hi)) => self.restrict(&ConvexPolygon::rect(lo, hi), tol),
        }
    }
}

impl MetricModel for PlanarSpace {
    type Point = Vec2;

    fn dist(&self, x: &Vec2, y: &Vec2) -> f64 {
        linf_dist(*x, *y)
    }

    fn validate(&self, x: &Vec2, tol: &Tolerance) -> Result<()> {
        if self.contains(*x, tol) {
            Ok(())
        } else {
            Err(Error::PointOutsideSpace(format!("({}, {})", x.x, x.y)))
        }
    }

    fn sample_point(&self, rng: &mut TrialRng, half_width: f64, tol: &Tolerance) -> Option<Vec2> {
        let h = half_width;
        let bx = ConvexPolygon::rect(Vec2::new(-h, -h), Vec2::new(h, h));
        self.restrict(&bx, tol).sample_uniform(rng).filter(|p| self.contains(*p, tol))
    }

    fn family_feasible(&self, family: &BallFamily<Vec2>, tol: &Tolerance) -> Result<Option<Vec2>> {
        for c in family.centers() {
            self.validate(c, tol)?;
        }
        let region = self.family_region(family, tol);
        Ok(region.witness(|p| self.contains(p, tol) && in_all_balls(self, family, &p, tol)))
    }

    fn interval_proposal(&self, x: &Vec2, y: &Vec2, rng: &mut TrialRng, tol: &Tolerance) -> Option<Vec2> {
        let d = linf_dist(*x, *y);
        let alpha = rng.gen::<f64>() * d;
        let (lo, hi) = square_intersection(&[(*x, alpha), (*y, d - alpha)], 0.0)?;
        let z = ConvexPolygon::rect(lo, hi).sample_uniform(rng)?;
        self.contains(z, tol).then_some(z)
    }

    fn to_record(&self, p: &Vec2) -> PointRecord {
        PointRecord::Plane { x: p.x, y: p.y }
    }

    fn decode_record(&self, r: &PointRecord) -> Result<Vec2> {
        match r {
            PointRecord::Plane { x, y } => Ok(Vec2::new(*x, *y)),
            other => Err(Error::PointOutsideSpace(format!("{other:?}"))),
        }
    }
}
