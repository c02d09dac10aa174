use alloc::format;
use alloc::vec::Vec;

use super::{GluedPoint, GluedSpace2, SheetId};
use crate::error::{Error, Result};
use crate::linf2::{ball_polygon, linf_dist, segment_neighborhood, ConvexPolygon, Vec2};
use crate::metric::BallFamily;
use crate::tolerance::Tolerance;

/// A point `a` of the gluing set with `d(x, a) = d(x, A)` on a shortest
/// path from `x` to `y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactDistanceWitness {
    /// `a` represented on the sheet of `x`.
    pub a: GluedPoint,
    pub param: f64,
    /// `d(x, A)`
    pub s: f64,
    /// `d(x, a) + d(a, y)`
    pub total: f64,
}

/// Among the minimizers of the through-boundary objective, finds one at
/// distance exactly `d(x, A)` from `x`. Such a minimizer is guaranteed when
/// the boundary is externally hyperconvex in the sheet of `x`; failure is
/// reported as [`Error::Violation`].
pub fn exact_distance_witness(
    space: &GluedSpace2,
    x: &GluedPoint,
    y: &GluedPoint,
    tol: &Tolerance,
) -> Result<ExactDistanceWitness> {
    if x.sheet == y.sheet {
        return Err(Error::InvalidModel("distance witnesses need points on different sheets".into()));
    }
    let fx = space.boundary_profile(x);
    let total_f = fx.clone().add_term(space.sheets[y.sheet.0].chart.distance_term(y.coords));
    let inf = f64::INFINITY;
    let (lo, hi, dmin) = total_f.argmin_interval(-inf, inf, 0.0)?;
    let (u_lo, u_hi, s) = fx.argmin_interval(-inf, inf, 0.0)?;
    let (t_lo, t_hi) = (lo.max(u_lo), hi.min(u_hi));
    if t_lo > t_hi + tol.eps_eq {
        return Err(Error::Violation(format!(
            "no shortest path through a nearest boundary point: minimizers [{lo}, {hi}], nearest [{u_lo}, {u_hi}]"
        )));
    }
    let t = t_lo.min(t_hi);
    let a = space.boundary_point(x.sheet, t);
    let ay = space.sheets[y.sheet.0].chart.at(t);
    let total = linf_dist(x.coords, a.coords) + linf_dist(ay, y.coords);
    if linf_dist(x.coords, a.coords) > s + tol.eps_eq || (total - dmin).abs() > tol.eps_eq {
        return Err(Error::Violation(format!("witness at t = {t} misses: total {total} vs {dmin}")));
    }
    Ok(ExactDistanceWitness { a, param: t, s, total })
}

fn check_radius(r: f64) -> Result<()> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::NegativeRadius(r));
    }
    Ok(())
}

/// `B(x, r) ∩ X_target` inside the window.
///
/// Across sheets the trace is the union of the squares centered at `φ(t)`
/// with radius `r - d(x, φ(t))` over the parameters where that is
/// nonnegative. The radius is concave piecewise linear in `t`, so the union
/// is the convex hull of the squares at the ends and the kinks.
pub fn ball_trace(
    space: &GluedSpace2,
    center: &GluedPoint,
    r: f64,
    target: SheetId,
    tol: &Tolerance,
) -> Result<ConvexPolygon> {
    check_radius(r)?;
    let sheet = space.sheet(target)?;
    space.sheet(center.sheet)?;
    let clip = |p: ConvexPolygon| p.intersect(&space.window.polygon(), tol).clip(&sheet.region, tol);
    if target == center.sheet {
        return Ok(clip(ball_polygon(center.coords, r)?));
    }
    let f = space.boundary_profile(center);
    let Some((lo, hi)) = f.sublevel_interval(r, f64::NEG_INFINITY, f64::INFINITY)? else {
        return Ok(ConvexPolygon::empty());
    };
    let mut nodes: Vec<f64> = f.breakpoints().into_iter().filter(|t| *t > lo && *t < hi).collect();
    nodes.push(lo);
    nodes.push(hi);
    let mut corners = Vec::with_capacity(4 * nodes.len());
    for t in nodes {
        let c = sheet.chart.at(t);
        let rho = (r - f.eval(t)).max(0.0);
        for (dx, dy) in [(-rho, -rho), (rho, -rho), (rho, rho), (-rho, rho)] {
            corners.push(Vec2::new(c.x + dx, c.y + dy));
        }
    }
    Ok(clip(ConvexPolygon::hull(&corners)))
}

/// The uniform-radius trace: the `(r - s)`-neighbourhood of the nearest
/// boundary segment `B(x, s) ∩ A` with `s = d(x, A)`. It agrees with
/// [`ball_trace`] when the boundary of the source sheet is horizontal and
/// is in general smaller otherwise.
pub fn ball_trace_uniform(
    space: &GluedSpace2,
    center: &GluedPoint,
    r: f64,
    target: SheetId,
    tol: &Tolerance,
) -> Result<ConvexPolygon> {
    check_radius(r)?;
    let sheet = space.sheet(target)?;
    if target == center.sheet {
        return ball_trace(space, center, r, target, tol);
    }
    let f = space.boundary_profile(center);
    let (lo, hi, s) = f.argmin_interval(f64::NEG_INFINITY, f64::INFINITY, 0.0)?;
    if r < s - tol.eps_eq {
        return Ok(ConvexPolygon::empty());
    }
    let hood = segment_neighborhood(sheet.chart.at(lo), sheet.chart.at(hi), (r - s).max(0.0))?;
    Ok(hood.intersect(&space.window.polygon(), tol).clip(&sheet.region, tol))
}

/// The part of the common intersection of the family lying on `sheet`.
pub fn sheet_region(
    space: &GluedSpace2,
    family: &BallFamily<GluedPoint>,
    sheet: SheetId,
    tol: &Tolerance,
) -> Result<ConvexPolygon> {
    let mut acc = space.sheet_polygon(sheet, tol);
    for b in family.balls() {
        if acc.is_empty() {
            break;
        }
        acc = acc.intersect(&ball_trace(space, &b.center, b.radius, sheet, tol)?, tol);
    }
    Ok(acc)
}

/// A common point of the family, searched sheet by sheet, or `None`.
pub fn glued_family_feasible(
    space: &GluedSpace2,
    family: &BallFamily<GluedPoint>,
    tol: &Tolerance,
) -> Result<Option<GluedPoint>> {
    use crate::metric::MetricModel;
    for c in family.centers() {
        space.validate(c, tol)?;
    }
    for sheet in space.sheet_ids() {
        let region = sheet_region(space, family, sheet, tol)?;
        let hp = space.sheets[sheet.0].region;
        let found = region.witness(|p| {
            let q = GluedPoint { sheet, coords: p };
            hp.contains(p, tol.eps_feas)
                && family.balls().iter().all(|b| space.glued_dist(&b.center, &q) <= b.radius + tol.eps_feas)
        });
        if let Some(coords) = found {
            return Ok(Some(GluedPoint { sheet, coords }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gluing::{SheetSpec, Side};
    use crate::linf2::Window;
    use crate::metric::Ball;
    use crate::seed::trial_rng;
    use alloc::vec;
    use rand::Rng;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn small_radius_trace_is_empty() {
        let g = GluedSpace2::half_plane_pair(0.5, 0.5, false).unwrap();
        let x = GluedPoint::new(0, 0.0, 1.0);
        assert!(ball_trace(&g, &x, 0.2, SheetId(1), &tol()).unwrap().is_empty());
        assert!(ball_trace_uniform(&g, &x, 0.2, SheetId(1), &tol()).unwrap().is_empty());
        assert!(ball_trace(&g, &x, -1.0, SheetId(1), &tol()).is_err());
    }

    #[test]
    fn unit_ball_leaves_a_diagonal_segment() {
        let g = GluedSpace2::half_plane_pair(0.0, 1.0, false).unwrap();
        let x = GluedPoint::new(0, 0.0, 1.0);
        let seg = ConvexPolygon::hull(&[Vec2::new(-1.0, -1.0), Vec2::new(1.0, 1.0)]);
        for trace in [
            ball_trace(&g, &x, 1.0, SheetId(1), &tol()).unwrap(),
            ball_trace_uniform(&g, &x, 1.0, SheetId(1), &tol()).unwrap(),
        ] {
            assert_eq!(trace.vertices().len(), 2);
            assert!(trace.hausdorff_estimate(&seg, 720) < 1e-9);
        }
    }

    fn random_space(rng: &mut crate::seed::TrialRng, sheets: usize) -> GluedSpace2 {
        let specs: Vec<SheetSpec> = (0..sheets)
            .map(|_| {
                let side = if rng.gen::<bool>() { Side::Above } else { Side::Below };
                SheetSpec::new(rng.gen::<f64>(), side, rng.gen::<bool>()).unwrap()
            })
            .collect();
        GluedSpace2::new(&specs, Window::default()).unwrap()
    }

    #[test]
    fn exact_trace_matches_brute_force() {
        let mut rng = trial_rng(11, 0);
        for _ in 0..60 {
            let g = random_space(&mut rng, 2);
            let x = g.sample_point_on(&mut rng, SheetId(0), 3.0);
            let r = rng.gen::<f64>() * 3.0;
            let trace = ball_trace(&g, &x, r, SheetId(1), &tol()).unwrap();
            for i in 0..40 {
                for j in 0..40 {
                    let p = Vec2::new(-4.0 + 0.2 * i as f64, -4.0 + 0.2 * j as f64);
                    if !g.sheets()[1].region.contains(p, 0.0) {
                        continue;
                    }
                    let d = g.glued_dist(&x, &GluedPoint { sheet: SheetId(1), coords: p });
                    if (d - r).abs() > 1e-7 {
                        assert_eq!(trace.contains(p, 1e-9), d <= r, "{p:?} d={d} r={r}");
                    }
                }
            }
        }
    }

    #[test]
    fn uniform_trace_agrees_for_horizontal_source() {
        let mut rng = trial_rng(12, 0);
        for _ in 0..50 {
            let target = SheetSpec::new(rng.gen::<f64>(), Side::Below, rng.gen::<bool>()).unwrap();
            let src = SheetSpec::new(0.0, Side::Above, false).unwrap();
            let g = GluedSpace2::new(&[src, target], Window::default()).unwrap();
            let x = g.sample_point_on(&mut rng, SheetId(0), 3.0);
            let r = rng.gen::<f64>() * 4.0;
            let exact = ball_trace(&g, &x, r, SheetId(1), &tol()).unwrap();
            let uniform = ball_trace_uniform(&g, &x, r, SheetId(1), &tol()).unwrap();
            assert!(exact.hausdorff_estimate(&uniform, 720) < 1e-9);
        }
    }

    #[test]
    fn uniform_trace_is_too_small_for_sloped_source() {
        let g = GluedSpace2::half_plane_pair(0.25, 0.75, false).unwrap();
        let x = GluedPoint::new(0, 0.0, 0.75);
        let exact = ball_trace(&g, &x, 1.0, SheetId(1), &tol()).unwrap();
        let uniform = ball_trace_uniform(&g, &x, 1.0, SheetId(1), &tol()).unwrap();
        // (-1, -0.75) sits at distance exactly 1 through the boundary point (-1, -0.25)
        let p = Vec2::new(-1.0, -0.75);
        assert!((g.glued_dist(&x, &GluedPoint { sheet: SheetId(1), coords: p }) - 1.0).abs() < 1e-12);
        assert!(exact.contains(p, 1e-9));
        assert!(!uniform.contains(p, 1e-6));
    }

    #[test]
    fn witness_examples() {
        let g = GluedSpace2::half_plane_pair(0.0, 1.0, false).unwrap();
        let w =
            exact_distance_witness(&g, &GluedPoint::new(0, 0.0, 1.0), &GluedPoint::new(1, 2.0, 0.0), &tol()).unwrap();
        assert!((w.param - 1.0).abs() < 1e-12 && (w.s - 1.0).abs() < 1e-12 && (w.total - 2.0).abs() < 1e-12);
        let p = g.boundary_point(SheetId(0), 0.5);
        let w = exact_distance_witness(&g, &p, &GluedPoint::new(1, 2.0, 0.0), &tol()).unwrap();
        assert_eq!(w.s, 0.0);
        assert_eq!(w.a, p);
    }

    #[test]
    fn witness_exists_for_horizontal_source() {
        let mut rng = trial_rng(13, 0);
        for _ in 0..300 {
            let b = rng.gen::<f64>();
            let g = GluedSpace2::half_plane_pair(0.0, b, rng.gen::<bool>()).unwrap();
            let x = g.sample_point_on(&mut rng, SheetId(0), 5.0);
            let y = g.sample_point_on(&mut rng, SheetId(1), 5.0);
            let w = exact_distance_witness(&g, &x, &y, &tol()).unwrap();
            assert!((w.total - g.glued_dist(&x, &y)).abs() <= 1e-12);
        }
    }

    #[test]
    fn family_feasibility_examples() {
        let g = GluedSpace2::half_plane_pair(0.0, 1.0, false).unwrap();
        let c = GluedPoint::new(1, 1.0, -2.0);
        let fam = BallFamily::new(vec![Ball::new(c, 0.5).unwrap(), Ball::new(c, 1.0).unwrap()]).unwrap();
        let w = glued_family_feasible(&g, &fam, &tol()).unwrap().unwrap();
        assert!(g.glued_dist(&w, &c) <= 0.5 + 1e-9);
        let unit = |p: GluedPoint| Ball::new(p, 1.0).unwrap();
        let s5 = BallFamily::new(vec![
            unit(GluedPoint::new(0, 0.0, 1.0)),
            unit(GluedPoint::new(1, 0.0, -2.0)),
            unit(GluedPoint::new(1, 2.0, 0.0)),
        ])
        .unwrap();
        assert_eq!(glued_family_feasible(&g, &s5, &tol()).unwrap(), None);
    }
}
