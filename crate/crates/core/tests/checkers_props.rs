use hyperglue_core::checkers::{
    check_externally_hyperconvex, check_gated, check_hyperconvex, check_strongly_convex, report_rechecks, GluingSet,
    PlaneSet, TrialConfig,
};
use hyperglue_core::gluing::{SheetSpec, Side};
use hyperglue_core::linf2::{ConvexPolygon, PlanarSpace, Vec2, Window};
use hyperglue_core::report::Verdict;
use hyperglue_core::s5::S5Config;
use hyperglue_core::Tolerance;
use proptest::prelude::*;

fn upper(a: f64) -> PlanarSpace {
    PlanarSpace::half_plane(SheetSpec::new(a, Side::Above, false).unwrap().half_plane())
}

fn cfg(trials: usize, seed: u64) -> TrialConfig {
    TrialConfig::new(trials, 6, seed, 5.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn falsified_reports_recheck_and_reproduce(a in 0.0..0.45f64, gap in 0.1..0.5f64, seed in any::<u64>()) {
        let tol = Tolerance::default();
        let space = S5Config::new(a, a + gap, false).unwrap().space().unwrap();
        let first = check_hyperconvex(&space, &cfg(400, seed), &tol).unwrap();
        let again = check_hyperconvex(&space, &cfg(400, seed), &tol).unwrap();
        prop_assert_eq!(&first, &again);
        if first.verdict == Verdict::Falsified {
            prop_assert!(report_rechecks::<_, GluingSet>(&space, None, &first, &tol).unwrap());
        }
    }

    #[test]
    fn gated_and_strongly_convex_agree_on_boundary_lines(k in 0usize..5, seed in any::<u64>()) {
        let tol = Tolerance::default();
        let a = k as f64 / 4.0;
        let space = upper(a);
        let line = PlaneSet::line(a, &Window::default());
        let gated = check_gated(&space, &line, &cfg(150, seed), &tol).unwrap();
        let convex = check_strongly_convex(&space, &line, &cfg(150, seed), &tol).unwrap();
        prop_assert_eq!(gated.verdict, convex.verdict);
        prop_assert_eq!(gated.verdict == Verdict::Pass, a == 1.0);
    }

    #[test]
    fn admissible_set_meets_external_set(
        cx in -2.0..2.0f64,
        cy in -2.0..2.0f64,
        r in 0.5..3.0f64,
        lo in -3.0..0.0f64,
        width in 0.0..3.0f64,
        seed in any::<u64>(),
    ) {
        // E: a horizontal strip, A: an intersection of two balls
        let tol = Tolerance::default();
        let plane = PlanarSpace::plane();
        let strip = ConvexPolygon::rect(Vec2::new(-200.0, lo), Vec2::new(200.0, lo + width));
        let balls = ConvexPolygon::rect(Vec2::new(cx - r, cy - r), Vec2::new(cx + r, cy + r))
            .intersect(&ConvexPolygon::rect(Vec2::new(cx - 0.5 * r, cy - 2.0 * r), Vec2::new(cx + 1.5 * r, cy)), &tol);
        let meet = strip.intersect(&balls, &tol);
        prop_assume!(!meet.is_empty());
        let set = PlaneSet::new(meet, "strip ∩ balls").unwrap();
        let rep = check_externally_hyperconvex(&plane, &set, &cfg(200, seed), &tol).unwrap();
        prop_assert!(rep.passed(), "{:?}", rep);
    }

    #[test]
    fn external_hyperconvexity_is_transitive(seed in any::<u64>(), lo in -3.0..3.0f64, len in 0.0..4.0f64) {
        // A: a boundary segment, external in the flat half-plane Y, which is
        // external in the plane
        let tol = Tolerance::default();
        let seg = PlaneSet::new(ConvexPolygon::rect(Vec2::new(lo, 0.0), Vec2::new(lo + len, 0.0)), "segment").unwrap();
        let in_sheet = check_externally_hyperconvex(&upper(0.0), &seg, &cfg(200, seed), &tol).unwrap();
        let sheet = PlaneSet::whole(&upper(0.0), &tol);
        let sheet_in_plane = check_externally_hyperconvex(&PlanarSpace::plane(), &sheet, &cfg(200, seed), &tol).unwrap();
        let in_plane = check_externally_hyperconvex(&PlanarSpace::plane(), &seg, &cfg(200, seed), &tol).unwrap();
        prop_assert!(in_sheet.passed() && sheet_in_plane.passed());
        prop_assert!(in_plane.passed(), "{:?}", in_plane);
    }
}
