//! Gluings of closed half-planes of the plane with the maximum norm along
//! their boundary lines.
//!
//! Every sheet is a half-plane `ξ₂ >= σ ξ₁` or `ξ₂ <= σ ξ₁` with `|σ| <= 1`,
//! charted by `t ↦ (t, σ t)`. For `|σ| <= 1` the chart is an isometry from the
//! real line onto the boundary, so all sheets share one parameter line and a
//! point of the gluing set is identified across sheets by its parameter.

mod gate;
mod trace;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linf2::{linf_dist, pl_minimize, AbsAffine, ConvexPl, ConvexPolygon, HalfPlane, MaxTerm, Vec2, Window};
use crate::metric::{BallFamily, MetricModel};
use crate::report::PointRecord;
use crate::seed::TrialRng;
use crate::tolerance::Tolerance;

pub use gate::{gate, gate_with_probes, gated_dist_shortcut, GateInfo, GateOutcome, DEFAULT_GATE_PROBES};
pub use trace::{
    ball_trace, ball_trace_uniform, exact_distance_witness, glued_family_feasible, sheet_region, ExactDistanceWitness,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `ξ₂ >= σ ξ₁`
    Above,
    /// `ξ₂ <= σ ξ₁`
    Below,
}

/// A half-plane sheet: boundary slope in `[0, 1]`, the side kept, and
/// whether the boundary is mirrored (`σ = -slope`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SheetSpec {
    pub slope: f64,
    pub side: Side,
    pub reflected: bool,
}

impl SheetSpec {
    pub fn new(slope: f64, side: Side, reflected: bool) -> Result<Self> {
        if !(0.0..=1.0).contains(&slope) {
            return Err(Error::InvalidModel(format!("slope {slope} outside [0, 1]")));
        }
        Ok(SheetSpec { slope, side, reflected })
    }

    pub fn signed_slope(&self) -> f64 {
        if self.reflected {
            -self.slope
        } else {
            self.slope
        }
    }

    pub fn half_plane(&self) -> HalfPlane {
        let s = self.signed_slope();
        let u = match self.side {
            Side::Above => Vec2::new(s, -1.0),
            Side::Below => Vec2::new(-s, 1.0),
        };
        HalfPlane::new(u, 0.0).expect("normal has unit second coordinate")
    }
}

/// `φ(t) = (t, σ t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GluingChart {
    pub sigma: f64,
}

impl GluingChart {
    pub fn at(&self, t: f64) -> Vec2 {
        Vec2::new(t, self.sigma * t)
    }

    /// Chart parameter of a boundary point.
    pub fn param(&self, p: Vec2) -> f64 {
        p.x
    }

    /// `d(p, φ(t)) = max(|t - p₁|, |σ t - p₂|)` as a term of a PL function.
    pub fn distance_term(&self, p: Vec2) -> MaxTerm {
        MaxTerm::new(vec![AbsAffine::new(1.0, 1.0, p.x), AbsAffine::new(1.0, self.sigma, p.y)])
    }

    /// Points of the boundary with parameter in `[lo, hi]`.
    pub fn segment(&self, lo: f64, hi: f64) -> ConvexPolygon {
        ConvexPolygon::hull(&[self.at(lo), self.at(hi)])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sheet {
    pub spec: SheetSpec,
    pub region: HalfPlane,
    pub chart: GluingChart,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SheetId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GluedPoint {
    pub sheet: SheetId,
    pub coords: Vec2,
}

impl GluedPoint {
    pub fn new(sheet: usize, x: f64, y: f64) -> Self {
        GluedPoint { sheet: SheetId(sheet), coords: Vec2::new(x, y) }
    }
}

/// Two or more half-plane sheets glued along their boundary lines.
#[derive(Debug, Clone, PartialEq)]
pub struct GluedSpace2 {
    sheets: Vec<Sheet>,
    pub window: Window,
}

impl GluedSpace2 {
    pub fn new(specs: &[SheetSpec], window: Window) -> Result<Self> {
        if specs.len() < 2 {
            return Err(Error::InvalidModel(format!("a gluing needs at least 2 sheets, got {}", specs.len())));
        }
        let sheets = specs
            .iter()
            .map(|s| Sheet { spec: *s, region: s.half_plane(), chart: GluingChart { sigma: s.signed_slope() } })
            .collect();
        Ok(GluedSpace2 { sheets, window })
    }

    /// `ξ₂ >= ±a ξ₁` glued to `ξ₂ <= b ξ₁`, the first sheet mirrored when
    /// `reflected`.
    pub fn half_plane_pair(a: f64, b: f64, reflected: bool) -> Result<Self> {
        Self::new(
            &[SheetSpec::new(a, Side::Above, reflected)?, SheetSpec::new(b, Side::Below, false)?],
            Window::default(),
        )
    }

    pub fn sheets(&self) -> &[Sheet] {
        &self.sheets
    }

    pub fn sheet(&self, id: SheetId) -> Result<&Sheet> {
        self.sheets
            .get(id.0)
            .ok_or_else(|| Error::InvalidModel(format!("no sheet {} in a {}-sheet gluing", id.0, self.sheets.len())))
    }

    pub fn sheet_ids(&self) -> impl Iterator<Item = SheetId> {
        (0..self.sheets.len()).map(SheetId)
    }

    /// The gluing-set point with chart parameter `t`, represented on `sheet`.
    pub fn boundary_point(&self, sheet: SheetId, t: f64) -> GluedPoint {
        GluedPoint { sheet, coords: self.sheets[sheet.0].chart.at(t) }
    }

    /// Sheet region clipped to the window.
    pub fn sheet_polygon(&self, id: SheetId, tol: &Tolerance) -> ConvexPolygon {
        self.window.polygon().clip(&self.sheets[id.0].region, tol)
    }

    /// `t ↦ d(x, φ(t))`.
    pub fn boundary_profile(&self, x: &GluedPoint) -> ConvexPl {
        ConvexPl::single(self.sheets[x.sheet.0].chart.distance_term(x.coords))
    }

    /// Distance and the smallest minimizing chart parameter. For points on
    /// one sheet the parameter is `None`.
    pub fn glued_dist_param(&self, x: &GluedPoint, y: &GluedPoint) -> (f64, Option<f64>) {
        if x.sheet == y.sheet {
            return (linf_dist(x.coords, y.coords), None);
        }
        let f = ConvexPl::new(vec![
            self.sheets[x.sheet.0].chart.distance_term(x.coords),
            self.sheets[y.sheet.0].chart.distance_term(y.coords),
        ]);
        let m = pl_minimize(&f, f64::NEG_INFINITY, f64::INFINITY).expect("unbounded range is valid");
        (m.value, Some(m.t))
    }

    pub fn glued_dist(&self, x: &GluedPoint, y: &GluedPoint) -> f64 {
        self.glued_dist_param(x, y).0
    }

    /// `d(x, A)` and the smallest chart parameter attaining it.
    pub fn dist_to_gluing_set(&self, x: &GluedPoint) -> (f64, f64) {
        let m =
            pl_minimize(&self.boundary_profile(x), f64::NEG_INFINITY, f64::INFINITY).expect("unbounded range is valid");
        (m.value, m.t)
    }

    /// Uniform point of `sheet` inside `[-h, h]^2`.
    pub fn sample_point_on(&self, rng: &mut TrialRng, sheet: SheetId, half_width: f64) -> GluedPoint {
        let h = half_width;
        let tol = Tolerance::default();
        let bx = ConvexPolygon::rect(Vec2::new(-h, -h), Vec2::new(h, h)).clip(&self.sheets[sheet.0].region, &tol);
        let coords = bx.sample_uniform(rng).expect("the box meets every sheet");
        // pull rounding-level excursions back onto the sheet
        let region = self.sheets[sheet.0].region;
        let excess = region.excess(coords).max(0.0);
        GluedPoint { sheet, coords: coords - region.normal * excess }
    }

    /// Uniform sheet, then a uniform point of it inside `[-h, h]^2`.
    pub fn sample_point_in_box(&self, rng: &mut TrialRng, half_width: f64) -> GluedPoint {
        let sheet = SheetId(rng.gen_range(0..self.sheets.len()));
        self.sample_point_on(rng, sheet, half_width)
    }

    /// True when `x` lies on the gluing line of its sheet within `slack`.
    pub fn on_gluing_set(&self, x: &GluedPoint, slack: f64) -> bool {
        let sigma = self.sheets[x.sheet.0].chart.sigma;
        (x.coords.y - sigma * x.coords.x).abs() <= slack
    }
}

impl MetricModel for GluedSpace2 {
    type Point = GluedPoint;

    fn dist(&self, x: &GluedPoint, y: &GluedPoint) -> f64 {
        self.glued_dist(x, y)
    }

    fn validate(&self, x: &GluedPoint, tol: &Tolerance) -> Result<()> {
        let sheet = self.sheet(x.sheet)?;
        if !x.coords.is_finite() || !sheet.region.contains(x.coords, tol.eps_feas) {
            return Err(Error::PointOutsideSpace(format!(
                "({}, {}) is not in sheet {}",
                x.coords.x, x.coords.y, x.sheet.0
            )));
        }
        Ok(())
    }

    fn sample_point(&self, rng: &mut TrialRng, half_width: f64, _tol: &Tolerance) -> Option<GluedPoint> {
        Some(self.sample_point_in_box(rng, half_width))
    }

    fn family_feasible(&self, family: &BallFamily<GluedPoint>, tol: &Tolerance) -> Result<Option<GluedPoint>> {
        glued_family_feasible(self, family, tol)
    }

    fn interval_proposal(
        &self,
        x: &GluedPoint,
        y: &GluedPoint,
        rng: &mut TrialRng,
        _tol: &Tolerance,
    ) -> Option<GluedPoint> {
        let d = self.glued_dist(x, y);
        let alpha = rng.gen::<f64>() * d;
        let tight = Tolerance { eps_feas: 1e-12, eps_eq: 1e-12 };
        let family = BallFamily::new(vec![
            crate::metric::Ball { center: *x, radius: alpha },
            crate::metric::Ball { center: *y, radius: d - alpha },
        ])
        .ok()?;
        let regions: Vec<(SheetId, ConvexPolygon)> = self
            .sheet_ids()
            .filter_map(|id| sheet_region(self, &family, id, &tight).ok().map(|p| (id, p)))
            .filter(|(_, p)| !p.is_empty())
            .collect();
        if regions.is_empty() {
            return None;
        }
        let (sheet, poly) = &regions[rng.gen_range(0..regions.len())];
        poly.sample_uniform(rng).map(|coords| GluedPoint { sheet: *sheet, coords })
    }

    fn to_record(&self, p: &GluedPoint) -> PointRecord {
        PointRecord::Sheet { sheet: p.sheet.0, x: p.coords.x, y: p.coords.y }
    }

    fn decode_record(&self, r: &PointRecord) -> Result<GluedPoint> {
        match r {
            PointRecord::Sheet { sheet, x, y } if *sheet < self.sheets.len() => Ok(GluedPoint::new(*sheet, *x, *y)),
            other => Err(Error::PointOutsideSpace(format!("{other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64, step: f64) -> (f64, f64) {
        let n = ((hi - lo) / step).round() as usize;
        (0..=n).map(|i| lo + i as f64 * step).map(|t| (t, f(t))).fold((lo, f64::INFINITY), |a, b| {
            if b.1 < a.1 {
                b
            } else {
                a
            }
        })
    }

    #[test]
    fn half_planes_and_charts() {
        let s = SheetSpec::new(0.5, Side::Above, false).unwrap();
        assert!(s.half_plane().contains(Vec2::new(0.0, 1.0), 0.0));
        assert!(!s.half_plane().contains(Vec2::new(2.0, 0.5), 0.0));
        let r = SheetSpec::new(0.5, Side::Above, true).unwrap();
        assert!(r.half_plane().contains(Vec2::new(2.0, -0.5), 0.0));
        assert!(SheetSpec::new(1.5, Side::Below, false).is_err());
        let c = GluingChart { sigma: -0.75 };
        // the chart is an isometry onto the boundary
        for (s, t) in [(0.0, 1.0), (-2.0, 3.5), (4.0, 4.25)] {
            assert!((linf_dist(c.at(s), c.at(t)) - (s - t).abs()).abs() < 1e-15);
        }
        assert!(GluedSpace2::new(&[s], Window::default()).is_err());
    }

    #[test]
    fn identified_points_have_distance_zero() {
        let g = GluedSpace2::half_plane_pair(0.3, 0.8, false).unwrap();
        for t in [-3.0, 0.0, 1.7] {
            let p = g.boundary_point(SheetId(0), t);
            let q = g.boundary_point(SheetId(1), t);
            assert!(g.glued_dist(&p, &q) < 1e-15);
        }
    }

    #[test]
    fn cross_sheet_distance_example() {
        let g = GluedSpace2::half_plane_pair(0.0, 1.0, false).unwrap();
        let x = GluedPoint::new(0, 0.0, 1.0);
        let y = GluedPoint::new(1, 2.0, 0.0);
        let (d, t) = g.glued_dist_param(&x, &y);
        let (_, oracle) = grid_min(|t| f64::max(t.abs(), 1.0) + f64::max((t - 2.0).abs(), t.abs()), -10.0, 10.0, 1e-4);
        assert!((d - 2.0).abs() < 1e-12 && (oracle - 2.0).abs() < 1e-6);
        assert!((t.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn equal_slopes_unfold_to_the_plane() {
        let a = 0.5;
        let g = GluedSpace2::half_plane_pair(a, a, false).unwrap();
        let pts = [(0.0, 1.0), (-1.0, 2.0), (3.0, 1.6)];
        let qts = [(0.0, -1.0), (2.0, 0.5), (-3.0, -4.0)];
        for p in pts {
            for q in qts {
                let x = GluedPoint::new(0, p.0, p.1);
                let y = GluedPoint::new(1, q.0, q.1);
                let plane = linf_dist(Vec2::new(p.0, p.1), Vec2::new(q.0, q.1));
                assert!((g.glued_dist(&x, &y) - plane).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn distance_to_gluing_set() {
        for a in [0.0, 0.25, 0.5, 1.0] {
            let g = GluedSpace2::half_plane_pair(a, 1.0, false).unwrap();
            let x = GluedPoint::new(0, 0.0, 1.0 - a);
            let (s, _) = g.dist_to_gluing_set(&x);
            let (_, oracle) = grid_min(|t| f64::max(t.abs(), (a * t - 1.0 + a).abs()), -5.0, 5.0, 1e-4);
            assert!((s - oracle).abs() < 1e-3, "a={a}: {s} vs {oracle}");
            assert!((s - (1.0 - a) / (1.0 + a)).abs() < 1e-12);
        }
        let g = GluedSpace2::half_plane_pair(0.4, 0.6, false).unwrap();
        assert_eq!(g.dist_to_gluing_set(&g.boundary_point(SheetId(1), 2.0)).0, 0.0);
    }
}
