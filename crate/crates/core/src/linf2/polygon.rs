use alloc::vec::Vec;

use rand::Rng;

use super::pl::{pl_minimize, AbsAffine, ConvexPl, MaxTerm};
use super::vec2::{linf_dist, Vec2};
use crate::error::{Error, Result};
use crate::tolerance::Tolerance;

/// Closed half-plane `{p : normal . p <= offset}` with a unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlane {
    pub normal: Vec2,
    pub offset: f64,
}

impl HalfPlane {
    /// Normalizes `u . p <= c` so the normal has unit length.
    pub fn new(u: Vec2, c: f64) -> Result<Self> {
        let n = u.norm();
        if !(n > 0.0) || !c.is_finite() || !n.is_finite() {
            return Err(Error::InvalidModel(alloc::format!("degenerate half-plane normal {u:?}")));
        }
        Ok(HalfPlane { normal: u * (1.0 / n), offset: c / n })
    }

    pub fn excess(&self, p: Vec2) -> f64 {
        self.normal.dot(p) - self.offset
    }

    pub fn contains(&self, p: Vec2, slack: f64) -> bool {
        self.excess(p) <= slack
    }
}

/// Square `[-R, R]^2` used to make unbounded regions finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub half_width: f64,
}

impl Default for Window {
    fn default() -> Self {
        Window { half_width: 100.0 }
    }
}

impl Window {
    pub fn new(half_width: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidModel(alloc::format!("window half-width {half_width}")));
        }
        Ok(Window { half_width })
    }

    pub fn polygon(&self) -> ConvexPolygon {
        let r = self.half_width;
        let mut p = ConvexPolygon::rect(Vec2::new(-r, -r), Vec2::new(r, r));
        p.window_clipped = true;
        p
    }

    /// True when the window is at least ten times the diameter of the data
    /// and contains it.
    pub fn covers(&self, points: &[Vec2]) -> bool {
        let mut diam: f64 = 0.0;
        for (i, p) in points.iter().enumerate() {
            if p.linf_norm() > self.half_width {
                return false;
            }
            for q in &points[i + 1..] {
                diam = diam.max(linf_dist(*p, *q));
            }
        }
        self.half_width >= 10.0 * diam
    }
}

/// Convex polygon with counterclockwise vertices.
///
/// One vertex is a point, two vertices a segment; an empty vertex list is
/// the empty set. Degenerate polygons are first-class: the tight cases of
/// ball intersections are points and segments.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvexPolygon {
    vertices: Vec<Vec2>,
    pub window_clipped: bool,
}

const MERGE: f64 = 1e-12;

impl ConvexPolygon {
    pub fn empty() -> Self {
        ConvexPolygon::default()
    }

    pub fn point(p: Vec2) -> Self {
        ConvexPolygon { vertices: alloc::vec![p], window_clipped: false }
    }

    pub fn rect(min: Vec2, max: Vec2) -> Self {
        ConvexPolygon::hull(&[
            Vec2::new(min.x, min.y),
            Vec2::new(max.x, min.y),
            Vec2::new(max.x, max.y),
            Vec2::new(min.x, max.y),
        ])
    }

    /// Convex hull of arbitrary points.
    pub fn hull(points: &[Vec2]) -> Self {
        ConvexPolygon { vertices: convex_hull(points, MERGE), window_clipped: false }
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn area(&self) -> f64 {
        let v = &self.vertices;
        if v.len() < 3 {
            return 0.0;
        }
        let mut s = 0.0;
        for i in 0..v.len() {
            s += v[i].cross(v[(i + 1) % v.len()]);
        }
        0.5 * s
    }

    /// Vertex average; lies in the polygon for every non-empty polygon.
    pub fn centroid(&self) -> Option<Vec2> {
        if self.vertices.is_empty() {
            return None;
        }
        let n = self.vertices.len() as f64;
        let s = self.vertices.iter().fold(Vec2::ZERO, |acc, v| acc + *v);
        Some(s * (1.0 / n))
    }

    /// A point accepted by `ok`: the vertex average if it passes, otherwise
    /// the first passing vertex.
    pub fn witness(&self, ok: impl Fn(Vec2) -> bool) -> Option<Vec2> {
        let c = self.centroid()?;
        if ok(c) {
            return Some(c);
        }
        self.vertices.iter().copied().find(|v| ok(*v))
    }

    pub fn bounding_box(&self) -> Option<(Vec2, Vec2)> {
        let first = *self.vertices.first()?;
        Some(self.vertices.iter().fold((first, first), |(lo, hi), v| {
            (Vec2::new(lo.x.min(v.x), lo.y.min(v.y)), Vec2::new(hi.x.max(v.x), hi.y.max(v.y)))
        }))
    }

    /// H-representation. Segments and points get two and four supporting
    /// half-planes, so clipping by them pins the result to the degenerate set.
    pub fn half_planes(&self) -> Vec<HalfPlane> {
        let v = &self.vertices;
        let mut out = Vec::with_capacity(v.len().max(4));
        match v.len() {
            0 => {}
            1 => {
                let p = v[0];
                for (u, c) in [
                    (Vec2::new(1.0, 0.0), p.x),
                    (Vec2::new(-1.0, 0.0), -p.x),
                    (Vec2::new(0.0, 1.0), p.y),
                    (Vec2::new(0.0, -1.0), -p.y),
                ] {
                    out.push(HalfPlane { normal: u, offset: c });
                }
            }
            2 => {
                let (a, b) = (v[0], v[1]);
                let d = (b - a) * (1.0 / (b - a).norm());
                let n = Vec2::new(-d.y, d.x);
                out.push(HalfPlane { normal: n, offset: n.dot(a) });
                out.push(HalfPlane { normal: -n, offset: -n.dot(a) });
                out.push(HalfPlane { normal: d, offset: d.dot(b) });
                out.push(HalfPlane { normal: -d, offset: -d.dot(a) });
            }
            n => {
                for i in 0..n {
                    let (a, b) = (v[i], v[(i + 1) % n]);
                    let e = b - a;
                    let len = e.norm();
                    if len == 0.0 {
                        continue;
                    }
                    let normal = Vec2::new(e.y / len, -e.x / len);
                    out.push(HalfPlane { normal, offset: normal.dot(a) });
                }
            }
        }
        out
    }

    /// Intersection with `h`, enlarged by the clipping slack of `tol`.
    pub fn clip(&self, h: &HalfPlane, tol: &Tolerance) -> ConvexPolygon {
        let shift = tol.clip();
        let v = &self.vertices;
        if v.is_empty() {
            return ConvexPolygon::empty();
        }
        let s: Vec<f64> = v.iter().map(|p| h.excess(*p) - shift).collect();
        if s.iter().all(|x| *x <= 0.0) {
            return self.clone();
        }
        if s.iter().all(|x| *x > 0.0) {
            return ConvexPolygon::empty();
        }
        let n = v.len();
        let mut out = Vec::with_capacity(n + 2);
        for i in 0..n {
            let j = (i + 1) % n;
            let (sc, sn) = (s[i], s[j]);
            if sc <= 0.0 {
                out.push(v[i]);
            }
            if (sc <= 0.0) != (sn <= 0.0) {
                let t = sc / (sc - sn);
                out.push(v[i].lerp(v[j], t));
            }
        }
        ConvexPolygon { vertices: convex_hull(&out, tol.eps_eq.min(MERGE)), window_clipped: self.window_clipped }
    }

    pub fn intersect(&self, other: &ConvexPolygon, tol: &Tolerance) -> ConvexPolygon {
        let mut acc = self.clone();
        for h in other.half_planes() {
            if acc.is_empty() {
                break;
            }
            acc = acc.clip(&h, tol);
        }
        acc.window_clipped |= other.window_clipped;
        acc
    }

    fn strictly_inside(&self, p: Vec2) -> bool {
        let v = &self.vertices;
        if v.len() < 3 {
            return false;
        }
        (0..v.len()).all(|i| {
            let (a, b) = (v[i], v[(i + 1) % v.len()]);
            (b - a).cross(p - a) >= 0.0
        })
    }

    /// Euclidean nearest point of the polygon to `p`.
    pub fn project(&self, p: Vec2) -> Option<Vec2> {
        let v = &self.vertices;
        match v.len() {
            0 => None,
            1 => Some(v[0]),
            _ if self.strictly_inside(p) => Some(p),
            n => {
                let edges = if n == 2 { 1 } else { n };
                let mut best = (f64::INFINITY, v[0]);
                for i in 0..edges {
                    let q = project_to_segment(p, v[i], v[(i + 1) % n]);
                    let d = (q - p).norm();
                    if d < best.0 {
                        best = (d, q);
                    }
                }
                Some(best.1)
            }
        }
    }

    pub fn euclid_distance(&self, p: Vec2) -> f64 {
        self.project(p).map_or(f64::INFINITY, |q| (q - p).norm())
    }

    pub fn contains(&self, p: Vec2, slack: f64) -> bool {
        self.euclid_distance(p) <= slack
    }

    /// Exact distance in the maximum norm from `p` to the polygon, with a
    /// nearest point.
    pub fn linf_distance(&self, p: Vec2) -> Option<(f64, Vec2)> {
        let v = &self.vertices;
        match v.len() {
            0 => None,
            1 => Some((linf_dist(p, v[0]), v[0])),
            _ if self.strictly_inside(p) => Some((0.0, p)),
            n => {
                let edges = if n == 2 { 1 } else { n };
                let mut best = (f64::INFINITY, v[0]);
                for i in 0..edges {
                    let (a, b) = (v[i], v[(i + 1) % n]);
                    let d = b - a;
                    // max(|p.x - a.x - s d.x|, |p.y - a.y - s d.y|), s in [0, 1]
                    let f = ConvexPl::single(MaxTerm::new(alloc::vec![
                        AbsAffine::new(1.0, d.x, p.x - a.x),
                        AbsAffine::new(1.0, d.y, p.y - a.y),
                    ]));
                    let m = pl_minimize(&f, 0.0, 1.0).expect("unit range");
                    if m.value < best.0 {
                        best = (m.value, a.lerp(b, m.t));
                    }
                }
                Some(best)
            }
        }
    }

    pub fn support(&self, dir: Vec2) -> f64 {
        self.vertices.iter().map(|v| dir.dot(*v)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Hausdorff distance estimated from support functions along
    /// `directions` equally spaced unit directions.
    pub fn hausdorff_estimate(&self, other: &ConvexPolygon, directions: usize) -> f64 {
        match (self.is_empty(), other.is_empty()) {
            (true, true) => return 0.0,
            (true, false) | (false, true) => return f64::INFINITY,
            _ => {}
        }
        let mut worst: f64 = 0.0;
        for k in 0..directions {
            let theta = 2.0 * core::f64::consts::PI * k as f64 / directions as f64;
            let dir = Vec2::new(libm::cos(theta), libm::sin(theta));
            worst = worst.max((self.support(dir) - other.support(dir)).abs());
        }
        worst
    }

    /// Uniform sample from the polygon (from the segment for zero-area input).
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<Vec2> {
        let v = &self.vertices;
        match v.len() {
            0 => None,
            1 => Some(v[0]),
            2 => Some(v[0].lerp(v[1], rng.gen::<f64>())),
            n => {
                let areas: Vec<f64> = (1..n - 1).map(|i| 0.5 * (v[i] - v[0]).cross(v[i + 1] - v[0])).collect();
                let total: f64 = areas.iter().sum();
                if !(total > 1e-14) {
                    let (a, b) = farthest_pair(v);
                    return Some(a.lerp(b, rng.gen::<f64>()));
                }
                let mut pick = rng.gen::<f64>() * total;
                let mut tri = areas.len() - 1;
                for (i, a) in areas.iter().enumerate() {
                    if pick <= *a {
                        tri = i;
                        break;
                    }
                    pick -= a;
                }
                let (mut u, mut w) = (rng.gen::<f64>(), rng.gen::<f64>());
                if u + w > 1.0 {
                    u = 1.0 - u;
                    w = 1.0 - w;
                }
                let (a, b, c) = (v[0], v[tri + 1], v[tri + 2]);
                Some(a + (b - a) * u + (c - a) * w)
            }
        }
    }
}

fn farthest_pair(v: &[Vec2]) -> (Vec2, Vec2) {
    let mut best = (0.0, v[0], v[0]);
    for (i, a) in v.iter().enumerate() {
        for b in &v[i + 1..] {
            let d = (*b - *a).norm();
            if d > best.0 {
                best = (d, *a, *b);
            }
        }
    }
    (best.1, best.2)
}

fn project_to_segment(p: Vec2, a: Vec2, b: Vec2) -> Vec2 {
    let d = b - a;
    let len2 = d.dot(d);
    if len2 == 0.0 {
        return a;
    }
    a.lerp(b, ((p - a).dot(d) / len2).clamp(0.0, 1.0))
}

/// Andrew's monotone chain. Points closer than `merge` collapse, and
/// vertices within `merge` of the line through their neighbours are dropped.
fn convex_hull(points: &[Vec2], merge: f64) -> Vec<Vec2> {
    let mut pts: Vec<Vec2> = points.iter().copied().filter(|p| p.is_finite()).collect();
    if pts.is_empty() {
        return pts;
    }
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup_by(|a, b| linf_dist(*a, *b) <= merge);
    if pts.len() <= 2 {
        if pts.len() == 2 && linf_dist(pts[0], pts[1]) <= merge {
            pts.truncate(1);
        }
        return pts;
    }
    let turn = |o: Vec2, a: Vec2, b: Vec2| (a - o).cross(b - o) > 0.0;
    let mut lower: Vec<Vec2> = Vec::with_capacity(pts.len());
    for &p in &pts {
        while lower.len() >= 2 && !turn(lower[lower.len() - 2], lower[lower.len() - 1], p) {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Vec2> = Vec::with_capacity(pts.len());
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && !turn(upper[upper.len() - 2], upper[upper.len() - 1], p) {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    simplify_cycle(lower, merge)
}

/// Merges cyclically adjacent vertices closer than `merge` and drops
/// vertices within `merge` of the chord through their neighbours.
fn simplify_cycle(mut v: Vec<Vec2>, merge: f64) -> Vec<Vec2> {
    loop {
        let n = v.len();
        if n <= 2 {
            if n == 2 && linf_dist(v[0], v[1]) <= merge {
                v.truncate(1);
            }
            return v;
        }
        let mut drop = None;
        for i in 0..n {
            let (prev, cur, next) = (v[(i + n - 1) % n], v[i], v[(i + 1) % n]);
            if linf_dist(cur, next) <= merge {
                drop = Some(i);
                break;
            }
            let chord = next - prev;
            let len = chord.norm();
            // only vertices lying between their neighbours may go; in a
            // sliver the extreme points are also close to a chord
            let between = (cur - prev).dot(chord) > 0.0 && (next - cur).dot(chord) > 0.0;
            if len > 0.0 && between && (cur - prev).cross(chord).abs() <= merge * len {
                drop = Some(i);
                break;
            }
        }
        match drop {
            Some(i) => {
                v.remove(i);
            }
            None => return v,
        }
    }
}

/// Closed ball of the maximum norm: an axis-aligned square.
pub fn ball_polygon(center: Vec2, r: f64) -> Result<ConvexPolygon> {
    if r < 0.0 || r.is_nan() {
        return Err(Error::NegativeRadius(r));
    }
    Ok(ConvexPolygon::rect(Vec2::new(center.x - r, center.y - r), Vec2::new(center.x + r, center.y + r)))
}

/// Closed `r`-neighbourhood of the segment `[p, q]`: the Minkowski sum of the
/// segment and the square of radius `r`.
pub fn segment_neighborhood(p: Vec2, q: Vec2, r: f64) -> Result<ConvexPolygon> {
    if r < 0.0 || r.is_nan() {
        return Err(Error::NegativeRadius(r));
    }
    let mut corners = Vec::with_capacity(8);
    for c in [p, q] {
        for (dx, dy) in [(-r, -r), (r, -r), (r, r), (-r, r)] {
            corners.push(Vec2::new(c.x + dx, c.y + dy));
        }
    }
    Ok(ConvexPolygon::hull(&corners))
}

/// Common intersection by successive clipping.
pub fn polygon_intersection(polys: &[ConvexPolygon], tol: &Tolerance) -> Result<ConvexPolygon> {
    let (first, rest) = polys.split_first().ok_or(Error::EmptySet("polygon list"))?;
    let mut acc = first.clone();
    for p in rest {
        if acc.is_empty() {
            break;
        }
        acc = acc.intersect(p, tol);
    }
    Ok(acc)
}
