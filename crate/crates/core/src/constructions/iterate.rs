use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use super::{IterationTrace, TraceKind};
use crate::checkers::PlaneSet;
use crate::error::{Error, Result};
use crate::linf2::{linf_dist, ConvexPolygon, PlanarSpace, Vec2};
use crate::metric::square_intersection;
use crate::seed::TrialRng;
use crate::tolerance::Tolerance;

/// Knobs of the iterative constructions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationOptions {
    /// Chain step `l` of the first claim as a fraction of `s`.
    pub step_fraction: f64,
    pub max_iterations: usize,
    /// Solver picks allowed per call, over all chains.
    pub max_picks: usize,
    pub pick: PickRule,
}

/// How a point is chosen from a nonempty feasible region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PickRule {
    /// Euclidean projection of the previous iterate.
    Projection,
    /// Vertex average of the region in the first chain, projection after.
    CentroidFirst,
}

impl Default for IterationOptions {
    fn default() -> Self {
        IterationOptions { step_fraction: 0.125, max_iterations: 60, max_picks: 1 << 20, pick: PickRule::Projection }
    }
}

impl IterationOptions {
    fn validate(&self) -> Result<()> {
        if !(self.step_fraction > 0.0 && self.step_fraction <= 1.0) {
            return Err(Error::InvalidRange { lo: self.step_fraction, hi: 1.0 });
        }
        Ok(())
    }
}

/// Realizes each existence step by the polygon solver: the pick is the
/// Euclidean projection of a reference point onto the feasible region.
struct Picker<'a> {
    space: &'a PlanarSpace,
    tol: &'a Tolerance,
    picks: usize,
    budget: usize,
    centroid: bool,
}

impl Picker<'_> {
    fn pick(
        &mut self,
        set: &ConvexPolygon,
        balls: &[(Vec2, f64)],
        near: Vec2,
        step: &'static str,
        iteration: usize,
    ) -> Result<Vec2> {
        self.picks += 1;
        if self.picks > self.budget {
            return Err(Error::IterationBudget { iterations: self.picks });
        }
        let tol = self.tol;
        let infeasible = Error::Infeasible { step, iteration };
        let (lo, hi) = square_intersection(balls, tol.clip()).ok_or(infeasible.clone())?;
        let region = self.space.restrict(&ConvexPolygon::rect(lo, hi), tol).intersect(set, tol);
        let p = if self.centroid { region.centroid() } else { region.project(near) }.ok_or(infeasible.clone())?;
        let ok = self.space.contains(p, tol)
            && set.contains(p, tol.eps_feas)
            && balls.iter().all(|(c, r)| linf_dist(*c, p) <= r + tol.eps_feas);
        if ok {
            Ok(p)
        } else {
            Err(infeasible)
        }
    }
}

/// Iterations stop at half of `eps_feas`: polygon fuzz sits near
/// `tol.clip()`, and composed outputs must still verify at `eps_feas`.
fn stop_below(tol: &Tolerance) -> f64 {
    0.5 * tol.eps_feas
}

fn dist_to(set: &ConvexPolygon, p: Vec2) -> Result<(f64, Vec2)> {
    set.linf_distance(p).ok_or(Error::EmptySet("descriptor"))
}

/// A point of `A ∩ A' ∩ B(x,r) ∩ B(y,s)` with `s = d(x,y) - r`, built by the
/// alternating chain and the halving loop.
pub fn key_lemma_iterate(
    space: &PlanarSpace,
    a: &PlaneSet,
    a2: &PlaneSet,
    x: Vec2,
    y: Vec2,
    r: f64,
    tol: &Tolerance,
) -> Result<(Vec2, IterationTrace)> {
    key_lemma_iterate_with(space, a, a2, x, y, r, &IterationOptions::default(), tol)
}

#[allow(clippy::too_many_arguments)]
pub fn key_lemma_iterate_with(
    space: &PlanarSpace,
    a: &PlaneSet,
    a2: &PlaneSet,
    x: Vec2,
    y: Vec2,
    r: f64,
    opts: &IterationOptions,
    tol: &Tolerance,
) -> Result<(Vec2, IterationTrace)> {
    opts.validate()?;
    let mut picker = Picker { space, tol, picks: 0, budget: opts.max_picks, centroid: false };
    key_lemma(&mut picker, &a.poly, &a2.poly, x, y, r, opts)
}

fn key_lemma(
    pk: &mut Picker<'_>,
    a: &ConvexPolygon,
    a2: &ConvexPolygon,
    x: Vec2,
    y: Vec2,
    r: f64,
    opts: &IterationOptions,
) -> Result<(Vec2, IterationTrace)> {
    let tol = pk.tol;
    if !(r >= 0.0) {
        return Err(Error::NegativeRadius(r));
    }
    for p in [x, y] {
        if !pk.space.contains(p, tol) {
            return Err(Error::PointOutsideSpace(format!("({}, {})", p.x, p.y)));
        }
    }
    if !(a.contains(y, tol.eps_feas) && a2.contains(y, tol.eps_feas)) {
        return Err(Error::Violation("y is not in both sets".into()));
    }
    for (name, set) in [("A", a), ("A'", a2)] {
        let (d, _) = dist_to(set, x)?;
        if d > r + tol.eps_feas {
            return Err(Error::Violation(format!("d(x, {name}) = {d} exceeds r = {r}")));
        }
    }
    let s = linf_dist(x, y) - r;
    // halving schedule in units small enough that every ball radius stays
    // nonnegative and every gap stays below 2^-(n+1)
    let scale = 1f64.min(4.0 * r);
    let mut trace = IterationTrace::new(TraceKind::KeyLemma, scale);
    if s <= 0.0 {
        trace.push(x, y, y, 0.0);
        return Ok((y, trace));
    }
    if scale <= tol.eps_feas {
        // x is already within eps_feas of both sets and of y's ball
        trace.push(x, x, x, 0.0);
        return Ok((x, trace));
    }
    let l0 = (opts.step_fraction * s).min(scale / 2.0);
    trace.chain_step = l0;
    trace.chain_len = chain_len(s, l0);
    pk.centroid = opts.pick == PickRule::CentroidFirst;
    let first = claim(pk, a, a2, x, y, r, s, l0, 0);
    pk.centroid = false;
    let (mut an, mut an2) = first?;
    trace.push(x, an, an2, linf_dist(an, an2));
    let mut n = 1;
    while linf_dist(an, an2) > stop_below(tol) {
        if n > opts.max_iterations {
            return Err(Error::IterationBudget { iterations: n - 1 });
        }
        let h = scale * libm::exp2(-((n + 1) as f64));
        let whole = pk.space.polygon(tol);
        let xn = pk.pick(&whole, &[(an, h), (an2, h), (x, r - h)], an.midpoint(an2), "x_n", n)?;
        let sn = linf_dist(xn, y) - h;
        if sn <= 0.0 {
            an = y;
            an2 = y;
        } else {
            (an, an2) = claim(pk, a, a2, xn, y, h, sn, h.min(sn), n)?;
        }
        trace.push(xn, an, an2, linf_dist(an, an2));
        n += 1;
    }
    trace.picks = pk.picks;
    for (name, set) in [("A", a), ("A'", a2)] {
        if !set.contains(an, tol.eps_feas) {
            return Err(Error::Violation(format!("limit point left {name}")));
        }
    }
    if linf_dist(an, x) > r + tol.eps_feas || linf_dist(an, y) > s + tol.eps_feas {
        return Err(Error::Violation("limit point left B(x,r) or B(y,s)".into()));
    }
    Ok((an, trace))
}

fn chain_len(s: f64, l: f64) -> usize {
    libm::floor(s / l + 1e-9) as usize
}

/// The chain `a_k, a_k'` walking from `y` towards `x` in steps of `l`,
/// ending with a pair in `B(y,s) ∩ B(x,r)` at distance at most `l`.
#[allow(clippy::too_many_arguments)]
fn claim(
    pk: &mut Picker<'_>,
    a: &ConvexPolygon,
    a2: &ConvexPolygon,
    x: Vec2,
    y: Vec2,
    r: f64,
    s: f64,
    l: f64,
    iteration: usize,
) -> Result<(Vec2, Vec2)> {
    let d = r + s;
    let mut prev = y;
    for k in 1..=chain_len(s, l) {
        let ky = (k as f64 * l).min(s);
        let kx = (d - k as f64 * l).max(r);
        let ak = pk.pick(a, &[(y, ky), (x, kx), (prev, l)], prev, "a_n", iteration)?;
        prev = pk.pick(a2, &[(y, ky), (x, kx), (ak, l)], ak, "a_n'", iteration)?;
    }
    let last = pk.pick(a, &[(y, s), (x, r), (prev, l)], prev, "a", iteration)?;
    let last2 = pk.pick(a2, &[(y, s), (x, r), (last, l)], last, "a'", iteration)?;
    Ok((last, last2))
}

fn require_meet(p: &ConvexPolygon, q: &ConvexPolygon, tol: &Tolerance) -> Result<ConvexPolygon> {
    let m = p.intersect(q, tol);
    if m.is_empty() {
        return Err(Error::Violation("descriptors do not intersect pairwise".into()));
    }
    Ok(m)
}

/// A point of `A_0 ∩ A_1 ∩ A_2` for pairwise intersecting sets, built by
/// the three-set loop with `d(x_n, A_0)` at least halving per step.
pub fn triple_intersection_iterate(
    space: &PlanarSpace,
    a0: &PlaneSet,
    a1: &PlaneSet,
    a2: &PlaneSet,
    tol: &Tolerance,
) -> Result<(Vec2, IterationTrace)> {
    triple_intersection_iterate_with(space, a0, a1, a2, &IterationOptions::default(), tol)
}

pub fn triple_intersection_iterate_with(
    space: &PlanarSpace,
    a0: &PlaneSet,
    a1: &PlaneSet,
    a2: &PlaneSet,
    opts: &IterationOptions,
    tol: &Tolerance,
) -> Result<(Vec2, IterationTrace)> {
    opts.validate()?;
    let mut pk = Picker { space, tol, picks: 0, budget: opts.max_picks, centroid: false };
    triple(&mut pk, &a0.poly, &a1.poly, &a2.poly, opts)
}

fn triple(
    pk: &mut Picker<'_>,
    a0: &ConvexPolygon,
    a1: &ConvexPolygon,
    a2: &ConvexPolygon,
    opts: &IterationOptions,
) -> Result<(Vec2, IterationTrace)> {
    let tol = pk.tol;
    let m01 = require_meet(a0, a1, tol)?;
    let m02 = require_meet(a0, a2, tol)?;
    let m12 = pk.space.restrict(&require_meet(a1, a2, tol)?, tol);
    let mut xn = m12
        .witness(|p| a1.contains(p, tol.eps_feas) && a2.contains(p, tol.eps_feas))
        .ok_or(Error::Infeasible { step: "x_0", iteration: 0 })?;
    let (r0, near) = dist_to(a0, xn)?;
    let mut trace = IterationTrace::new(TraceKind::Triple, r0);
    trace.push(xn, xn, near, r0);
    let mut r = r0;
    let mut n = 1;
    while r > stop_below(tol) {
        if n > opts.max_iterations {
            return Err(Error::IterationBudget { iterations: n - 1 });
        }
        let anchor01 = m01.project(xn).ok_or(Error::EmptySet("A_0 ∩ A_1"))?;
        let (yn, _) = key_lemma(pk, a0, a1, xn, anchor01, r, opts)?;
        let anchor02 = m02.project(yn).ok_or(Error::EmptySet("A_0 ∩ A_2"))?;
        let (w, _) = key_lemma(pk, a0, a2, yn, anchor02, r, opts)?;
        let a0_near = ball_cut(a0, yn, r, tol)?;
        let (zn, _) = key_lemma(pk, &a0_near, a2, xn, w, r, opts)?;
        let half = r / 2.0;
        let xbar = pk.pick(a0, &[(xn, r), (yn, half), (zn, half)], xn, "x_bar", n)?;
        let (next, _) = key_lemma(pk, a1, a2, xbar, xn, half, opts)?;
        xn = next;
        let (d0, near) = dist_to(a0, xn)?;
        trace.push(xn, xn, near, d0);
        r = d0;
        n += 1;
    }
    trace.picks = pk.picks;
    for set in [a0, a1, a2] {
        if dist_to(set, xn)?.0 > tol.eps_feas {
            return Err(Error::Violation("triple limit point is not in all three sets".into()));
        }
    }
    Ok((xn, trace))
}

fn ball_cut(set: &ConvexPolygon, c: Vec2, r: f64, tol: &Tolerance) -> Result<ConvexPolygon> {
    let cut = set.intersect(&ConvexPolygon::rect(Vec2::new(c.x - r, c.y - r), Vec2::new(c.x + r, c.y + r)), tol);
    if cut.is_empty() {
        return Err(Error::Infeasible { step: "A_0 ∩ B(y_n, r)", iteration: 0 });
    }
    Ok(cut)
}

/// A common point of finitely many pairwise intersecting sets: each round
/// certifies `(A_0 ∩ A_1) ∩ A_k` by the triple loop and merges `A_0 ∩ A_1`.
pub fn finite_intersection(
    space: &PlanarSpace,
    sets: &[PlaneSet],
    tol: &Tolerance,
) -> Result<(Vec2, Vec<IterationTrace>)> {
    let opts = IterationOptions::default();
    let mut pk = Picker { space, tol, picks: 0, budget: opts.max_picks, centroid: false };
    let mut list: Vec<ConvexPolygon> = sets.iter().map(|s| s.poly.clone()).collect();
    let mut traces = Vec::new();
    for (i, p) in list.iter().enumerate() {
        if p.is_empty() {
            return Err(Error::EmptySet("descriptor"));
        }
        for q in &list[i + 1..] {
            require_meet(p, q, tol)?;
        }
    }
    let point = match list.len() {
        0 => return Err(Error::EmptySet("set list")),
        1 => {
            let only = space.restrict(&list[0], tol);
            only.witness(|p| list[0].contains(p, tol.eps_feas)).ok_or(Error::EmptySet("descriptor"))?
        }
        _ => {
            while list.len() > 3 {
                for k in 2..list.len() {
                    let (_, t) = triple(&mut pk, &list[0], &list[1], &list[k], &opts)?;
                    traces.push(t);
                }
                let merged = require_meet(&list[0], &list[1], tol)?;
                list.splice(0..2, [merged]);
            }
            let last = if list.len() == 3 { 2 } else { 1 };
            let (p, t) = triple(&mut pk, &list[0], &list[1], &list[last], &opts)?;
            traces.push(t);
            p
        }
    };
    for s in sets {
        if dist_to(&s.poly, point)?.0 > tol.eps_feas {
            return Err(Error::Violation(format!("output misses {}", s.label)));
        }
    }
    Ok((point, traces))
}

/// Random axis-parallel box, line, strip or square inside `[-h, h]^2`.
/// All of these are externally hyperconvex in the plane.
pub fn sample_axis_set(rng: &mut TrialRng, half_width: f64) -> PlaneSet {
    let h = half_width;
    let iv = |rng: &mut TrialRng| {
        let (u, v) = (rng.gen_range(-h..h), rng.gen_range(-h..h));
        (u.min(v), u.max(v))
    };
    let big = 2.0 * h;
    match rng.gen_range(0..5) {
        0 => {
            let ((x0, x1), (y0, y1)) = (iv(rng), iv(rng));
            PlaneSet { poly: ConvexPolygon::rect(Vec2::new(x0, y0), Vec2::new(x1, y1)), label: "box".into() }
        }
        1 => {
            let c = rng.gen_range(-h..h);
            if rng.gen_bool(0.5) {
                PlaneSet {
                    poly: ConvexPolygon::rect(Vec2::new(-big, c), Vec2::new(big, c)),
                    label: "horizontal line".into(),
                }
            } else {
                PlaneSet {
                    poly: ConvexPolygon::rect(Vec2::new(c, -big), Vec2::new(c, big)),
                    label: "vertical line".into(),
                }
            }
        }
        2 => {
            let (c0, c1) = iv(rng);
            if rng.gen_bool(0.5) {
                PlaneSet {
                    poly: ConvexPolygon::rect(Vec2::new(-big, c0), Vec2::new(big, c1)),
                    label: "horizontal strip".into(),
                }
            } else {
                PlaneSet {
                    poly: ConvexPolygon::rect(Vec2::new(c0, -big), Vec2::new(c1, big)),
                    label: "vertical strip".into(),
                }
            }
        }
        3 => {
            let (x0, x1) = iv(rng);
            let c = rng.gen_range(-h..h);
            PlaneSet { poly: ConvexPolygon::rect(Vec2::new(x0, c), Vec2::new(x1, c)), label: "segment".into() }
        }
        _ => {
            let c = Vec2::new(rng.gen_range(-h..h), rng.gen_range(-h..h));
            let r = rng.gen_range(0.0..h);
            PlaneSet {
                poly: ConvexPolygon::rect(Vec2::new(c.x - r, c.y - r), Vec2::new(c.x + r, c.y + r)),
                label: "square".into(),
            }
        }
    }
}
