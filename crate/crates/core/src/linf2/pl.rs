//! Convex piecewise-linear functions of one variable.
//!
//! A [`ConvexPl`] is a sum of [`MaxTerm`]s; each term is the maximum of
//! weighted absolute values of affine functions and an optional constant
//! floor. This covers every distance profile that occurs in the glued
//! models (distance from a point to a moving point on a line, sums of two of
//! those). Minimization is exact: the minimum of a convex piecewise-linear
//! function sits on a slope-change point or on an end of the range, so it is
//! enough to enumerate those.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// `weight * |slope * t - offset|`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbsAffine {
    pub weight: f64,
    pub slope: f64,
    pub offset: f64,
}

impl AbsAffine {
    pub fn new(weight: f64, slope: f64, offset: f64) -> Self {
        AbsAffine { weight, slope, offset }
    }

    /// `|t - center|`
    pub fn centered(center: f64) -> Self {
        AbsAffine::new(1.0, 1.0, center)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.weight * (self.slope * t - self.offset).abs()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MaxTerm {
    pub parts: Vec<AbsAffine>,
    pub floor: Option<f64>,
}

impl MaxTerm {
    pub fn new(parts: Vec<AbsAffine>) -> Self {
        MaxTerm { parts, floor: None }
    }

    pub fn with_floor(mut self, c: f64) -> Self {
        self.floor = Some(c);
        self
    }

    pub fn eval(&self, t: f64) -> f64 {
        let init = self.floor.unwrap_or(f64::NEG_INFINITY);
        let v = self.parts.iter().fold(init, |m, p| m.max(p.eval(t)));
        if v == f64::NEG_INFINITY {
            0.0
        } else {
            v
        }
    }

    fn push_breakpoints(&self, out: &mut Vec<f64>) {
        for (i, p) in self.parts.iter().enumerate() {
            if p.slope != 0.0 && p.weight != 0.0 {
                out.push(p.offset / p.slope);
            }
            for q in &self.parts[i + 1..] {
                // w_p (b_p t - g_p) = +-w_q (b_q t - g_q)
                for sign in [1.0, -1.0] {
                    let denom = p.weight * p.slope - sign * q.weight * q.slope;
                    if denom != 0.0 {
                        out.push((p.weight * p.offset - sign * q.weight * q.offset) / denom);
                    }
                }
            }
            if let Some(c) = self.floor {
                if p.slope != 0.0 && p.weight > 0.0 {
                    let reach = c / p.weight;
                    out.push((p.offset + reach) / p.slope);
                    out.push((p.offset - reach) / p.slope);
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvexPl {
    pub terms: Vec<MaxTerm>,
}

/// Result of [`pl_minimize`]: smallest minimizer and the value there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlMin {
    pub t: f64,
    pub value: f64,
}

impl ConvexPl {
    pub fn new(terms: Vec<MaxTerm>) -> Self {
        ConvexPl { terms }
    }

    pub fn single(term: MaxTerm) -> Self {
        ConvexPl { terms: alloc::vec![term] }
    }

    pub fn add_term(mut self, term: MaxTerm) -> Self {
        self.terms.push(term);
        self
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.terms.iter().map(|m| m.eval(t)).sum()
    }

    /// All slope-change candidates (unsorted, may contain duplicates).
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for term in &self.terms {
            term.push_breakpoints(&mut out);
        }
        out.retain(|t| t.is_finite());
        out
    }

    /// Sorted evaluation nodes covering `[lo, hi]`: breakpoints inside the
    /// range, finite ends, and one extra node beyond the outermost
    /// breakpoint on each unbounded side so tail slopes are visible.
    fn nodes(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut nodes: Vec<f64> = self.breakpoints().into_iter().filter(|t| *t >= lo && *t <= hi).collect();
        if lo.is_finite() {
            nodes.push(lo);
        }
        if hi.is_finite() {
            nodes.push(hi);
        }
        nodes.sort_by(f64::total_cmp);
        nodes.dedup();
        if nodes.is_empty() {
            nodes.push(0.0f64.clamp(lo, hi));
        }
        if !lo.is_finite() {
            let first = nodes[0];
            nodes.insert(0, first - 1.0 - first.abs());
        }
        if !hi.is_finite() {
            let last = nodes[nodes.len() - 1];
            nodes.push(last + 1.0 + last.abs());
        }
        nodes
    }

    /// The set of minimizers `[t_lo, t_hi]` on `[lo, hi]`, treating values
    /// within `slack` of the minimum as ties.
    pub fn argmin_interval(&self, lo: f64, hi: f64, slack: f64) -> Result<(f64, f64, f64)> {
        check_range(lo, hi)?;
        let nodes = self.nodes(lo, hi);
        let values: Vec<f64> = nodes.iter().map(|&t| self.eval(t)).collect();
        let fmin = values.iter().copied().fold(f64::INFINITY, f64::min);
        let bar = fmin + slack.max(tie_slack(fmin));
        let mut first = None;
        let mut last = None;
        for (t, v) in nodes.iter().zip(&values) {
            if *v <= bar {
                first.get_or_insert(*t);
                last = Some(*t);
            }
        }
        let (mut t_lo, mut t_hi) = (first.unwrap_or(nodes[0]), last.unwrap_or(nodes[0]));
        // a minimizer on an extrapolation node means the minimum is flat out to infinity
        if !lo.is_finite() && t_lo == nodes[0] {
            t_lo = f64::NEG_INFINITY;
        }
        if !hi.is_finite() && t_hi == nodes[nodes.len() - 1] {
            t_hi = f64::INFINITY;
        }
        Ok((t_lo, t_hi, fmin))
    }

    /// `{t in [lo, hi] : f(t) <= level}` as a closed interval, or `None`.
    pub fn sublevel_interval(&self, level: f64, lo: f64, hi: f64) -> Result<Option<(f64, f64)>> {
        check_range(lo, hi)?;
        // values rounding-close to the level count as on it, so flat pieces
        // at the level are not lost
        let level = level + tie_slack(level);
        let nodes = self.nodes(lo, hi);
        let values: Vec<f64> = nodes.iter().map(|&t| self.eval(t)).collect();
        let (imin, fmin) =
            values
                .iter()
                .copied()
                .enumerate()
                .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
        if fmin > level {
            return Ok(None);
        }
        let n = nodes.len();
        // walk left
        let mut left = None;
        for i in (0..imin).rev() {
            if values[i] > level {
                left = Some(cross(nodes[i], values[i], nodes[i + 1], values[i + 1], level));
                break;
            }
        }
        let left = match left {
            Some(t) => t,
            None if lo.is_finite() => nodes[0],
            None => tail_cross(nodes[0], values[0], nodes[1], values[1], level, true),
        };
        let mut right = None;
        for i in imin + 1..n {
            if values[i] > level {
                right = Some(cross(nodes[i - 1], values[i - 1], nodes[i], values[i], level));
                break;
            }
        }
        let right = match right {
            Some(t) => t,
            None if hi.is_finite() => nodes[n - 1],
            None => tail_cross(nodes[n - 2], values[n - 2], nodes[n - 1], values[n - 1], level, false),
        };
        Ok(Some((left.max(lo), right.min(hi))))
    }
}

fn check_range(lo: f64, hi: f64) -> Result<()> {
    if lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(Error::InvalidRange { lo, hi });
    }
    Ok(())
}

fn tie_slack(fmin: f64) -> f64 {
    16.0 * f64::EPSILON * fmin.abs().max(1.0)
}

/// Crossing of `level` on the segment between two nodes where the function
/// is affine, one value above and one at or below the level.
fn cross(t0: f64, v0: f64, t1: f64, v1: f64, level: f64) -> f64 {
    if v1 == v0 {
        return t0;
    }
    let s = (level - v0) / (v1 - v0);
    t0 + (t1 - t0) * s.clamp(0.0, 1.0)
}

/// Extends the affine tail through `(t0, v0)`, `(t1, v1)` past the outermost
/// node to where it reaches `level`.
fn tail_cross(t0: f64, v0: f64, t1: f64, v1: f64, level: f64, leftwards: bool) -> f64 {
    if t1 == t0 {
        return if leftwards { f64::NEG_INFINITY } else { f64::INFINITY };
    }
    let slope = (v1 - v0) / (t1 - t0);
    if leftwards {
        if slope >= 0.0 {
            return f64::NEG_INFINITY;
        }
        t0 + (level - v0) / slope
    } else {
        if slope <= 0.0 {
            return f64::INFINITY;
        }
        t1 + (level - v1) / slope
    }
}

/// Exact minimizer of a convex piecewise-linear function on `[lo, hi]`.
/// Ties resolve to the smallest minimizer.
pub fn pl_minimize(f: &ConvexPl, lo: f64, hi: f64) -> Result<PlMin> {
    check_range(lo, hi)?;
    let nodes = f.nodes(lo, hi);
    let mut best_value = f64::INFINITY;
    let values: Vec<f64> = nodes.iter().map(|&t| f.eval(t)).collect();
    for &v in &values {
        best_value = best_value.min(v);
    }
    let bar = best_value + tie_slack(best_value);
    let interior = |t: f64| t.is_finite() && t >= lo && t <= hi;
    for (&t, &v) in nodes.iter().zip(&values) {
        if v <= bar && interior(t) {
            // an extrapolation node only wins when the function is flat there;
            // move it back to the outermost breakpoint
            let t = if !lo.is_finite() && t == nodes[0] && nodes.len() > 1 { nodes[1] } else { t };
            return Ok(PlMin { t, value: f.eval(t) });
        }
    }
    Ok(PlMin { t: nodes[0], value: values[0] })
}
