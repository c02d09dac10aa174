use super::*;
use crate::checkers::PlaneSet;
use crate::gluing::{glued_family_feasible, GluedPoint, GluedSpace2, SheetId};
use crate::linf2::{linf_dist, ConvexPolygon, HalfPlane, PlanarSpace, Vec2};
use crate::metric::{in_all_balls, FiniteMetricSpace};
use crate::seed::{trial_rng, TrialRng};
use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;

fn tol() -> Tolerance {
    Tolerance::default()
}

fn rect(x0: f64, y0: f64, x1: f64, y1: f64, label: &str) -> PlaneSet {
    PlaneSet::new(ConvexPolygon::rect(Vec2::new(x0, y0), Vec2::new(x1, y1)), label).unwrap()
}

fn dist(set: &PlaneSet, p: Vec2) -> f64 {
    set.poly.linf_distance(p).unwrap().0
}

#[test]
fn multimedian_of_a_right_corner() {
    let plane = PlanarSpace::plane();
    let (x, y, z) = (Vec2::new(0.0, 0.0), Vec2::new(4.0, 0.0), Vec2::new(2.0, 2.0));
    let (m, c) = multimedian(&plane, &x, &y, &z, &tol()).unwrap();
    assert_eq!((c.alpha, c.beta, c.gamma), (2.0, 2.0, 0.0));
    assert_eq!(m, z);
}

#[test]
fn multimedian_of_a_point_in_the_interval_is_that_point() {
    let plane = PlanarSpace::plane();
    let (x, y, z) = (Vec2::new(0.0, 0.0), Vec2::new(4.0, 1.0), Vec2::new(1.5, 0.5));
    let (m, c) = multimedian(&plane, &x, &y, &z, &tol()).unwrap();
    assert_eq!(c.gamma, 0.0);
    assert!(linf_dist(m, z) <= 1e-12);
}

#[test]
fn multimedian_rejects_a_non_metric() {
    let bad =
        FiniteMetricSpace::from_rows(vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]]).unwrap();
    let err = multimedian(&bad, &0, &1, &2, &tol()).unwrap_err();
    assert!(matches!(err, Error::TriangleViolation { excess } if (excess - 3.0).abs() < 1e-12));
}

#[test]
fn multimedian_random_plane_triples() {
    let plane = PlanarSpace::plane();
    let mut rng = trial_rng(9, 0);
    let pt = |rng: &mut TrialRng| Vec2::new(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
    for _ in 0..1000 {
        let (x, y, z) = (pt(&mut rng), pt(&mut rng), pt(&mut rng));
        let (m, c) = multimedian(&plane, &x, &y, &z, &tol()).unwrap();
        for (p, q) in [(x, y), (y, z), (z, x)] {
            assert!((linf_dist(p, m) + linf_dist(m, q) - linf_dist(p, q)).abs() <= 1e-12);
        }
        let half = (linf_dist(x, y) + linf_dist(x, z) + linf_dist(y, z)) / 2.0;
        assert!((c.sum() - half).abs() <= 4.0 * f64::EPSILON * half.max(1.0));
    }
}

#[test]
fn multimedian_in_a_glued_model() {
    let g = GluedSpace2::half_plane_pair(0.5, 0.5, false).unwrap();
    let mut rng = trial_rng(10, 0);
    for _ in 0..200 {
        let pts: Vec<GluedPoint> = (0..3).map(|_| g.sample_point_in_box(&mut rng, 3.0)).collect();
        let (m, _) = multimedian(&g, &pts[0], &pts[1], &pts[2], &tol()).unwrap();
        assert!(in_all_balls(
            &g,
            &crate::metric::BallFamily::new(vec![
                crate::metric::Ball::new(pts[0], g.glued_dist(&pts[0], &pts[1])).unwrap()
            ])
            .unwrap(),
            &m,
            &tol()
        ));
    }
}

#[test]
fn key_lemma_with_y_close_returns_y() {
    let plane = PlanarSpace::plane();
    let a = rect(-1.0, 0.0, 1.0, 0.0, "segment");
    let a2 = rect(0.0, -5.0, 0.5, 5.0, "strip");
    let y = Vec2::new(0.25, 0.0);
    let (p, trace) = key_lemma_iterate(&plane, &a, &a2, Vec2::new(0.5, 1.0), y, 1.0, &tol()).unwrap();
    assert_eq!(p, y);
    assert_eq!(trace.len(), 1);
}

#[test]
fn key_lemma_checks_its_hypotheses() {
    let plane = PlanarSpace::plane();
    let a = rect(-1.0, 0.0, 1.0, 0.0, "segment");
    let a2 = rect(0.0, -5.0, 0.5, 5.0, "strip");
    let x = Vec2::new(3.0, 3.0);
    assert!(matches!(
        key_lemma_iterate(&plane, &a, &a2, x, Vec2::new(0.25, 0.0), 1.0, &tol()),
        Err(Error::Violation(_))
    ));
    assert!(matches!(
        key_lemma_iterate(&plane, &a, &a2, x, Vec2::new(0.9, 0.0), 4.0, &tol()),
        Err(Error::Violation(_))
    ));
    assert!(key_lemma_iterate(&plane, &a, &a2, x, Vec2::new(0.25, 0.0), -1.0, &tol()).is_err());
}

fn check_key_lemma_output(a: &PlaneSet, a2: &PlaneSet, x: Vec2, y: Vec2, r: f64, p: Vec2, trace: &IterationTrace) {
    let eps = 1e-9;
    let s = linf_dist(x, y) - r;
    assert!(dist(a, p) <= eps && dist(a2, p) <= eps);
    assert!(linf_dist(p, x) <= r + eps && linf_dist(p, y) <= s.max(0.0) + eps);
    assert!(trace.scale <= 1.0);
    assert_eq!(trace.first_gap_violation(eps), None, "{}", trace.to_text());
    assert_eq!(trace.first_step_violation(eps), None, "{}", trace.to_text());
    for n in 0..trace.len() {
        for m in n..trace.len() {
            assert!(linf_dist(trace.points[n], trace.points[m]) <= trace.scale * libm::exp2(-(n as f64)) + eps);
        }
    }
}

#[test]
fn key_lemma_on_a_half_plane_sheet() {
    // upper half-plane, its boundary line and a vertical strip
    let space = PlanarSpace::half_plane(HalfPlane::new(Vec2::new(0.0, -1.0), 0.0).unwrap());
    let a = rect(-200.0, 0.0, 200.0, 0.0, "boundary line");
    let a2 = rect(-0.5, -200.0, 0.5, 200.0, "strip");
    let mut rng = trial_rng(11, 0);
    for _ in 0..50 {
        let x = Vec2::new(rng.gen_range(-4.0..4.0), rng.gen_range(0.0..4.0));
        let y = Vec2::new(rng.gen_range(-0.5..0.5), 0.0);
        let r = dist(&a, x).max(dist(&a2, x)) + rng.gen_range(0.0..1.0);
        let (p, trace) = key_lemma_iterate(&space, &a, &a2, x, y, r, &tol()).unwrap();
        check_key_lemma_output(&a, &a2, x, y, r, p, &trace);
    }
}

#[test]
fn key_lemma_random_axis_sets() {
    let plane = PlanarSpace::plane();
    let mut worst = 0;
    let mut done = 0;
    let mut i = 0;
    while done < 100 {
        let mut rng = trial_rng(12, i);
        i += 1;
        let a = sample_axis_set(&mut rng, 4.0);
        let a2 = sample_axis_set(&mut rng, 4.0);
        let meet = a.poly.intersect(&a2.poly, &tol());
        let Some(y) = meet.sample_uniform(&mut rng) else { continue };
        let x = Vec2::new(rng.gen_range(-6.0..6.0), rng.gen_range(-6.0..6.0));
        let r = dist(&a, x).max(dist(&a2, x)) + rng.gen_range(0.0..0.5);
        let (p, trace) = key_lemma_iterate(&plane, &a, &a2, x, y, r, &tol()).unwrap();
        check_key_lemma_output(&a, &a2, x, y, r, p, &trace);
        worst = worst.max(trace.picks);
        done += 1;
    }
    assert!(worst < 1 << 20);
}

#[test]
fn triple_with_a_common_start_stops_at_once() {
    let plane = PlanarSpace::plane();
    let a0 = rect(-1.0, -1.0, 1.0, 1.0, "a0");
    let a1 = rect(-1.0, -1.0, 1.0, 1.0, "a1");
    let a2 = rect(-1.0, -1.0, 1.0, 1.0, "a2");
    let (p, trace) = triple_intersection_iterate(&plane, &a0, &a1, &a2, &tol()).unwrap();
    assert_eq!(trace.len(), 1);
    assert_eq!(trace.gaps[0], 0.0);
    assert_eq!(p, trace.points[0]);
}

#[test]
fn triple_of_overlapping_squares() {
    let plane = PlanarSpace::plane();
    let a0 = rect(-1.0, -1.0, 1.0, 1.0, "a0");
    let a1 = rect(0.5, 0.5, 2.5, 2.5, "a1");
    let a2 = rect(0.8, -1.2, 2.8, 0.8, "a2");
    let (p, trace) = triple_intersection_iterate(&plane, &a0, &a1, &a2, &tol()).unwrap();
    let region = polygon_of(&[&a0, &a1, &a2]);
    assert!(!region.is_empty());
    assert!(region.contains(p, 1e-9));
    assert_eq!(trace.first_gap_violation(1e-9), None);
}

#[test]
fn triple_rejects_disjoint_pairs() {
    let plane = PlanarSpace::plane();
    let a0 = rect(-1.0, -1.0, 0.0, 0.0, "a0");
    let a1 = rect(1.0, 1.0, 2.0, 2.0, "a1");
    assert!(matches!(triple_intersection_iterate(&plane, &a0, &a1, &a1, &tol()), Err(Error::Violation(_))));
}

fn polygon_of(sets: &[&PlaneSet]) -> ConvexPolygon {
    let polys: Vec<ConvexPolygon> = sets.iter().map(|s| s.poly.clone()).collect();
    crate::linf2::polygon_intersection(&polys, &tol()).unwrap()
}

#[test]
fn triple_random_axis_families() {
    let plane = PlanarSpace::plane();
    let mut done = 0;
    let mut i = 0;
    while done < 60 {
        let mut rng = trial_rng(13, i);
        i += 1;
        let sets: Vec<PlaneSet> = (0..3).map(|_| sample_axis_set(&mut rng, 4.0)).collect();
        if !pairwise_meet(&sets) {
            continue;
        }
        let (p, trace) = triple_intersection_iterate(&plane, &sets[0], &sets[1], &sets[2], &tol()).unwrap();
        for s in &sets {
            assert!(dist(s, p) <= 1e-9);
        }
        assert_eq!(trace.first_gap_violation(1e-9), None, "{}", trace.to_text());
        assert!(!polygon_of(&[&sets[0], &sets[1], &sets[2]]).is_empty());
        done += 1;
    }
}

fn pairwise_meet(sets: &[PlaneSet]) -> bool {
    (0..sets.len()).all(|i| (i + 1..sets.len()).all(|j| !sets[i].poly.intersect(&sets[j].poly, &tol()).is_empty()))
}

#[test]
fn finite_intersection_of_one_set() {
    let plane = PlanarSpace::plane();
    let a = rect(1.0, 2.0, 3.0, 2.0, "segment");
    let (p, traces) = finite_intersection(&plane, core::slice::from_ref(&a), &tol()).unwrap();
    assert!(dist(&a, p) <= 1e-12);
    assert!(traces.is_empty());
    assert!(finite_intersection(&plane, &[], &tol()).is_err());
}

#[test]
fn finite_intersection_of_three_squares() {
    let plane = PlanarSpace::plane();
    let sets = [rect(-1.0, -1.0, 1.0, 1.0, "s0"), rect(0.0, 0.0, 2.0, 2.0, "s1"), rect(0.5, -2.0, 2.5, 0.5, "s2")];
    let (p, _) = finite_intersection(&plane, &sets, &tol()).unwrap();
    assert!(polygon_of(&[&sets[0], &sets[1], &sets[2]]).contains(p, 1e-9));
}

#[test]
fn finite_intersection_of_five_mixed_sets() {
    let plane = PlanarSpace::plane();
    let sets = [
        rect(-1.0, -1.0, 1.0, 1.0, "square"),
        rect(-200.0, 0.25, 200.0, 0.25, "horizontal line"),
        rect(-0.5, -200.0, 0.7, 200.0, "vertical strip"),
        rect(0.0, -3.0, 3.0, 3.0, "box"),
        rect(-2.0, -0.5, 2.0, 1.5, "line neighborhood"),
    ];
    let (p, traces) = finite_intersection(&plane, &sets, &tol()).unwrap();
    for s in &sets {
        assert!(dist(s, p) <= 1e-9, "{}", s.label);
    }
    assert_eq!(traces.len(), 3 + 2 + 1);
}

#[test]
fn finite_intersection_random_families() {
    let plane = PlanarSpace::plane();
    let mut done = 0;
    let mut i = 0;
    while done < 40 {
        let mut rng = trial_rng(14, i);
        i += 1;
        let k = rng.gen_range(3..=5);
        let sets: Vec<PlaneSet> = (0..k).map(|_| sample_axis_set(&mut rng, 4.0)).collect();
        if !pairwise_meet(&sets) {
            continue;
        }
        let (p, _) = finite_intersection(&plane, &sets, &tol()).unwrap();
        for s in &sets {
            assert!(dist(s, p) <= 1e-9);
        }
        done += 1;
    }
}

#[test]
fn trace_text_round_trip() {
    let plane = PlanarSpace::plane();
    let a = rect(-3.0, 0.0, 3.0, 0.0, "segment");
    let a2 = rect(-1.0, -3.0, 2.0, 3.0, "strip");
    let (_, trace) =
        key_lemma_iterate(&plane, &a, &a2, Vec2::new(2.5, 2.0), Vec2::new(-1.0, 0.0), 2.0, &tol()).unwrap();
    let text = trace.to_text();
    assert!(text.starts_with("kind key_lemma\n"));
    assert_eq!(IterationTrace::from_text(&text).unwrap(), trace);
    assert!(IterationTrace::from_text("kind spiral\n").is_err());
}

fn reflected_one() -> GluedSpace2 {
    GluedSpace2::half_plane_pair(1.0, 1.0, true).unwrap()
}

fn random_family(g: &GluedSpace2, rng: &mut TrialRng, size: usize) -> BallFamily<GluedPoint> {
    let centers: Vec<GluedPoint> = (0..size).map(|_| g.sample_point_in_box(rng, 4.0)).collect();
    let radii: Vec<f64> = (0..size).map(|_| rng.gen_range(0.0..4.0)).collect();
    let mut scale: f64 = 0.0;
    for i in 0..size {
        for j in i + 1..size {
            scale = scale.max(g.glued_dist(&centers[i], &centers[j]) / (radii[i] + radii[j]));
        }
    }
    BallFamily::new(centers.into_iter().zip(radii).map(|(c, r)| Ball::new(c, r * scale).unwrap()).collect()).unwrap()
}

#[test]
fn glued_case_algorithm_on_one_sheet() {
    let g = reflected_one();
    let fam = BallFamily::new(vec![
        Ball::new(GluedPoint::new(1, 3.0, 0.0), 1.0).unwrap(),
        Ball::new(GluedPoint::new(1, 5.0, 1.0), 1.0).unwrap(),
    ])
    .unwrap();
    let out = strongly_convex_glued_intersection(&g, &fam, 1, &tol()).unwrap();
    assert_eq!(out.case, GluedCase::ShortBall);
    assert_eq!(out.sheet, Some(SheetId(1)));
    assert!(in_all_balls(&g, &fam, &out.point, &tol()));
}

#[test]
fn glued_case_algorithm_short_ball_fixture() {
    let g = reflected_one();
    // a small ball deep in sheet 0, a big ball on sheet 1 reaching across
    let fam = BallFamily::new(vec![
        Ball::new(GluedPoint::new(0, 0.0, 3.0), 0.5).unwrap(),
        Ball::new(GluedPoint::new(1, 0.0, -1.0), 3.5).unwrap(),
    ])
    .unwrap();
    let out = strongly_convex_glued_intersection(&g, &fam, 2, &tol()).unwrap();
    assert_eq!(out.case, GluedCase::ShortBall);
    assert_eq!(out.point.sheet, SheetId(0));
    assert!(in_all_balls(&g, &fam, &out.point, &tol()));
}

#[test]
fn glued_case_algorithm_random_families() {
    let g = reflected_one();
    let mut cases = [0usize; 3];
    for i in 0..300 {
        let mut rng = trial_rng(15, i);
        let fam = random_family(&g, &mut rng, 6);
        let out = strongly_convex_glued_intersection(&g, &fam, i, &tol()).unwrap();
        assert!(in_all_balls(&g, &fam, &out.point, &tol()));
        assert!(glued_family_feasible(&g, &fam, &tol()).unwrap().is_some());
        cases[out.case as usize] += 1;
    }
    assert!(cases.iter().all(|&c| c > 0), "{cases:?}");
}

#[test]
fn glued_case_algorithm_needs_gates() {
    let g = GluedSpace2::half_plane_pair(0.5, 0.5, false).unwrap();
    let fam = BallFamily::new(vec![
        Ball::new(GluedPoint::new(0, 0.0, 3.0), 1.0).unwrap(),
        Ball::new(GluedPoint::new(1, 0.0, -3.0), 5.0).unwrap(),
    ])
    .unwrap();
    assert_eq!(strongly_convex_glued_intersection(&g, &fam, 3, &tol()), Err(Error::NoGate));
}

#[test]
fn key_lemma_halving_loop_with_centroid_start() {
    let plane = PlanarSpace::plane();
    let opts = IterationOptions { pick: PickRule::CentroidFirst, ..IterationOptions::default() };
    let mut longest = 0;
    let mut done = 0;
    let mut i = 0;
    while done < 100 {
        let mut rng = trial_rng(16, i);
        i += 1;
        let a = sample_axis_set(&mut rng, 4.0);
        let a2 = sample_axis_set(&mut rng, 4.0);
        let Some(y) = a.poly.intersect(&a2.poly, &tol()).sample_uniform(&mut rng) else { continue };
        let x = Vec2::new(rng.gen_range(-6.0..6.0), rng.gen_range(-6.0..6.0));
        let r = dist(&a, x).max(dist(&a2, x)) + rng.gen_range(0.0..0.5);
        let (p, trace) = key_lemma_iterate_with(&plane, &a, &a2, x, y, r, &opts, &tol()).unwrap();
        check_key_lemma_output(&a, &a2, x, y, r, p, &trace);
        longest = longest.max(trace.len());
        done += 1;
    }
    assert!(longest > 1);
}
