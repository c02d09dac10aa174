use hyperglue_core::gluing::{
    ball_trace, exact_distance_witness, gate, gated_dist_shortcut, GluedPoint, GluedSpace2, SheetId, SheetSpec, Side,
};
use hyperglue_core::linf2::Window;
use hyperglue_core::seed::trial_rng;
use hyperglue_core::Tolerance;
use proptest::prelude::*;

/// Two or three sheets with random slopes, sides and mirroring.
fn model() -> impl Strategy<Value = GluedSpace2> {
    prop::collection::vec((0.0..=1.0f64, any::<bool>(), any::<bool>()), 2..4).prop_map(|specs| {
        let specs: Vec<SheetSpec> = specs
            .into_iter()
            .map(|(a, above, refl)| SheetSpec::new(a, if above { Side::Above } else { Side::Below }, refl).unwrap())
            .collect();
        GluedSpace2::new(&specs, Window::default()).unwrap()
    })
}

fn point_on(g: &GluedSpace2, seed: u64, k: u64) -> GluedPoint {
    g.sample_point_in_box(&mut trial_rng(seed, k), 3.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn glued_distance_is_a_metric(g in model(), seed in any::<u64>()) {
        let tol = Tolerance::default();
        let (x, y, z) = (point_on(&g, seed, 0), point_on(&g, seed, 1), point_on(&g, seed, 2));
        prop_assert_eq!(g.glued_dist(&x, &y), g.glued_dist(&y, &x));
        prop_assert_eq!(g.glued_dist(&x, &x), 0.0);
        prop_assert!(g.glued_dist(&x, &z) <= g.glued_dist(&x, &y) + g.glued_dist(&y, &z) + tol.eps_eq);
    }

    #[test]
    fn gated_shortcut_matches_direct_distance(seed in any::<u64>()) {
        let tol = Tolerance::default();
        let g = GluedSpace2::half_plane_pair(1.0, 1.0, true).unwrap();
        let mut rng = trial_rng(seed, 0);
        let x = g.sample_point_on(&mut rng, SheetId(0), 4.0);
        let y = g.sample_point_on(&mut rng, SheetId(1), 4.0);
        let short = gated_dist_shortcut(&g, &x, &y, seed, &tol).unwrap();
        prop_assert!((short - g.glued_dist(&x, &y)).abs() <= 1e-12);
    }

    #[test]
    fn distance_witness_total_is_the_distance(b in 0.0..=1.0f64, reflected in any::<bool>(), seed in any::<u64>()) {
        // the witness exists when the source sheet has a horizontal boundary
        let tol = Tolerance::default();
        let g = GluedSpace2::half_plane_pair(0.0, b, reflected).unwrap();
        let mut rng = trial_rng(seed, 0);
        let x = g.sample_point_on(&mut rng, SheetId(0), 4.0);
        let y = g.sample_point_on(&mut rng, SheetId(1), 4.0);
        let w = exact_distance_witness(&g, &x, &y, &tol).unwrap();
        prop_assert!((w.total - g.glued_dist(&x, &y)).abs() <= tol.eps_eq);
        prop_assert!((g.glued_dist(&x, &w.a) - w.s).abs() <= tol.eps_eq);
    }

    #[test]
    fn gate_residuals_overlap_for_meeting_cross_sheet_balls(
        seed in any::<u64>(),
        ri in 0.0..5.0f64,
        rj in 0.0..5.0f64,
    ) {
        let tol = Tolerance::default();
        let g = GluedSpace2::half_plane_pair(1.0, 1.0, true).unwrap();
        let mut rng = trial_rng(seed, 1);
        let xi = g.sample_point_on(&mut rng, SheetId(0), 4.0);
        let xj = g.sample_point_on(&mut rng, SheetId(1), 4.0);
        let gi = *gate(&g, &xi, seed, &tol).info().unwrap();
        let gj = *gate(&g, &xj, seed, &tol).info().unwrap();
        let (di, dj) = (gi.dist_to_gate, gj.dist_to_gate);
        if di <= ri && dj <= rj && g.glued_dist(&xi, &xj) <= ri + rj {
            prop_assert!((gi.param - gj.param).abs() <= (ri - di) + (rj - dj) + tol.eps_eq);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn ball_trace_matches_grid(g in model(), seed in any::<u64>(), r in 0.0..3.0f64, target in 0usize..3) {
        let tol = Tolerance::default();
        let target = SheetId(target % g.sheets().len());
        let x = point_on(&g, seed, 0);
        let trace = ball_trace(&g, &x, r, target, &tol).unwrap();
        let hp = g.sheets()[target.0].region;
        for i in 0..60 {
            for j in 0..60 {
                let p = hyperglue_core::linf2::Vec2::new(-6.0 + 12.0 * i as f64 / 59.0, -6.0 + 12.0 * j as f64 / 59.0);
                if !hp.contains(p, 0.0) {
                    continue;
                }
                let d = g.glued_dist(&x, &GluedPoint { sheet: target, coords: p });
                if d <= r - tol.eps_feas {
                    prop_assert!(trace.contains(p, tol.eps_feas), "{:?} at distance {} missing", p, d);
                } else if d > r + tol.eps_feas {
                    prop_assert!(!trace.contains(p, 0.0), "{:?} at distance {} included", p, d);
                }
            }
        }
    }

}
