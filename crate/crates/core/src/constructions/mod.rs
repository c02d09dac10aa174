//! Constructive proofs run as algorithms, with convergence traces.

mod glued;
mod iterate;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::error::{Error, Result};
use crate::linf2::Vec2;
use crate::metric::{interval_contains, Ball, BallFamily, MetricModel};
use crate::tolerance::Tolerance;

pub use glued::{strongly_convex_glued_intersection, GluedCase, GluedIntersection};
pub use iterate::{
    finite_intersection, key_lemma_iterate, key_lemma_iterate_with, sample_axis_set, triple_intersection_iterate,
    triple_intersection_iterate_with, IterationOptions, PickRule,
};

/// Radii of the three balls whose common point is a multimedian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultimedianCoeffs {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl MultimedianCoeffs {
    /// `alpha + beta = d(x,y)`, `alpha + gamma = d(x,z)`, `beta + gamma = d(y,z)`.
    pub fn from_distances(dxy: f64, dxz: f64, dyz: f64, tol: &Tolerance) -> Result<Self> {
        let alpha = (dxy + dxz - dyz) / 2.0;
        let beta = (dxy + dyz - dxz) / 2.0;
        let gamma = (dxz + dyz - dxy) / 2.0;
        let worst = alpha.min(beta).min(gamma);
        if worst < -tol.eps_eq || !worst.is_finite() {
            return Err(Error::TriangleViolation { excess: -2.0 * worst });
        }
        Ok(MultimedianCoeffs { alpha: alpha.max(0.0), beta: beta.max(0.0), gamma: gamma.max(0.0) })
    }

    pub fn sum(&self) -> f64 {
        self.alpha + self.beta + self.gamma
    }
}

/// A point of `I(x,y) ∩ I(y,z) ∩ I(z,x)`, found as a common point of
/// `B(x,α)`, `B(y,β)`, `B(z,γ)` and checked against all three intervals.
pub fn multimedian<M: MetricModel>(
    space: &M,
    x: &M::Point,
    y: &M::Point,
    z: &M::Point,
    tol: &Tolerance,
) -> Result<(M::Point, MultimedianCoeffs)>
where
    M::Point: Clone,
{
    for p in [x, y, z] {
        space.validate(p, tol)?;
    }
    let c = MultimedianCoeffs::from_distances(space.dist(x, y), space.dist(x, z), space.dist(y, z), tol)?;
    let family = BallFamily::new(alloc::vec![
        Ball::new(x.clone(), c.alpha)?,
        Ball::new(y.clone(), c.beta)?,
        Ball::new(z.clone(), c.gamma)?,
    ])?;
    let m = space
        .family_feasible(&family, tol)?
        .ok_or_else(|| Error::Violation("multimedian balls have empty intersection".into()))?;
    for (p, q) in [(x, y), (y, z), (z, x)] {
        if !interval_contains(space, p, q, &m, tol)? {
            return Err(Error::Violation("multimedian point outside a metric interval".into()));
        }
    }
    Ok((m, c))
}

/// Which argument produced a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceKind {
    /// Rows are `(x_n, a_n, a_n')` with gap `d(a_n, a_n')`.
    KeyLemma,
    /// Rows are `(x_n, x_n, p_n)` with `p_n` nearest in `A_0` and gap `d(x_n, A_0)`.
    Triple,
}

impl TraceKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TraceKind::KeyLemma => "key_lemma",
            TraceKind::Triple => "triple",
        }
    }
}

/// Iterates of a constructive argument.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    pub kind: TraceKind,
    /// Length unit of the bound schedule.
    pub scale: f64,
    /// Chain step `l` and chain length `n0` of the first claim.
    pub chain_step: f64,
    pub chain_len: usize,
    /// Solver picks spent, summed over all chains.
    pub picks: usize,
    pub centers: Vec<Vec2>,
    pub points: Vec<Vec2>,
    pub partners: Vec<Vec2>,
    pub gaps: Vec<f64>,
}

impl IterationTrace {
    pub(crate) fn new(kind: TraceKind, scale: f64) -> Self {
        IterationTrace {
            kind,
            scale,
            chain_step: 0.0,
            chain_len: 0,
            picks: 0,
            centers: Vec::new(),
            points: Vec::new(),
            partners: Vec::new(),
            gaps: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, center: Vec2, point: Vec2, partner: Vec2, gap: f64) {
        self.centers.push(center);
        self.points.push(point);
        self.partners.push(partner);
        self.gaps.push(gap);
    }

    pub fn len(&self) -> usize {
        self.gaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gaps.is_empty()
    }

    /// Target bound for row `n`: `scale / 2^(n+1)` for the key lemma,
    /// `scale / 2^n` for the triple loop.
    pub fn bound(&self, n: usize) -> f64 {
        let shift = match self.kind {
            TraceKind::KeyLemma => n + 1,
            TraceKind::Triple => n,
        };
        self.scale * libm::exp2(-(shift as f64))
    }

    /// First row whose gap exceeds its bound by more than `slack`.
    pub fn first_gap_violation(&self, slack: f64) -> Option<usize> {
        (0..self.len()).find(|&n| self.gaps[n] > self.bound(n) + slack)
    }

    /// First row whose step from the previous row exceeds `2 * bound(n)`.
    pub fn first_step_violation(&self, slack: f64) -> Option<usize> {
        (1..self.len())
            .find(|&n| crate::linf2::linf_dist(self.points[n - 1], self.points[n]) > 2.0 * self.bound(n) + slack)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "kind {}", self.kind.as_str());
        let _ = writeln!(s, "scale {}", self.scale);
        let _ = writeln!(s, "chain_step {}", self.chain_step);
        let _ = writeln!(s, "chain_len {}", self.chain_len);
        let _ = writeln!(s, "picks {}", self.picks);
        let _ = writeln!(s, "n center_x center_y point_x point_y partner_x partner_y gap bound");
        for n in 0..self.len() {
            let (c, p, q) = (self.centers[n], self.points[n], self.partners[n]);
            let _ =
                writeln!(s, "{n} {} {} {} {} {} {} {} {}", c.x, c.y, p.x, p.y, q.x, q.y, self.gaps[n], self.bound(n));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let mut field = |name: &str| -> Result<String> {
            let line = lines.next().ok_or_else(|| Error::Format(format!("missing `{name}` line")))?;
            let rest = line
                .strip_prefix(name)
                .and_then(|r| r.strip_prefix(' '))
                .ok_or_else(|| Error::Format(format!("expected `{name}`, got `{line}`")))?;
            Ok(rest.trim().into())
        };
        let kind = match field("kind")?.as_str() {
            "key_lemma" => TraceKind::KeyLemma,
            "triple" => TraceKind::Triple,
            other => return Err(Error::Format(format!("unknown trace kind `{other}`"))),
        };
        let scale = parse_f64(&field("scale")?)?;
        let chain_step = parse_f64(&field("chain_step")?)?;
        let chain_len = parse_usize(&field("chain_len")?)?;
        let picks = parse_usize(&field("picks")?)?;
        field("n")?;
        let mut t = IterationTrace::new(kind, scale);
        t.chain_step = chain_step;
        t.chain_len = chain_len;
        t.picks = picks;
        for (row, line) in lines.enumerate() {
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.len() != 9 || parse_usize(cols[0])? != row {
                return Err(Error::Format(format!("bad trace row `{line}`")));
            }
            let v: Vec<f64> = cols[1..8].iter().map(|c| parse_f64(c)).collect::<Result<_>>()?;
            t.push(Vec2::new(v[0], v[1]), Vec2::new(v[2], v[3]), Vec2::new(v[4], v[5]), v[6]);
        }
        Ok(t)
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    s.parse().map_err(|_| Error::Format(format!("not a number: `{s}`")))
}

fn parse_usize(s: &str) -> Result<usize> {
    s.parse().map_err(|_| Error::Format(format!("not a count: `{s}`")))
}

#[cfg(test)]
mod tests;
