use orbit_commons::dynamics::{collision_probability, fragment_formation, step, OrbitState, PhysicalParams, StepOptions};
use orbit_commons::grid::{Field2D, Grid2D, Interpolation};
use orbit_commons::roots::{find_root, Tolerance};
use orbit_commons::scenario::Scenario;
use orbit_commons::simple_model::{kessler_threshold, kessler_threshold_numeric, LinearSurvival, SimpleParams};
use proptest::prelude::*;

const CAL: PhysicalParams = PhysicalParams::CALIBRATED;

fn stocks() -> impl Strategy<Value = (f64, f64)> {
    (0.0..1e5f64, 0.0..1e6f64)
}

fn opts() -> impl Strategy<Value = StepOptions> {
    (any::<bool>(), any::<bool>()).prop_map(|(avoidance, turnover)| StepOptions { avoidance, turnover })
}

proptest! {
    #[test]
    fn collision_probability_is_a_probability((s, d) in stocks(), av in any::<bool>()) {
        let l = collision_probability(OrbitState::new(s, d).unwrap(), &CAL, av).unwrap();
        prop_assert!((0.0..=1.0).contains(&l));
    }

    #[test]
    fn risk_and_fragments_rise_with_stocks((s, d) in stocks(), ds in 0.0..1e4f64, dd in 0.0..1e4f64, av in any::<bool>()) {
        let z = OrbitState::new(s, d).unwrap();
        let bigger = OrbitState::new(s + ds, d + dd).unwrap();
        prop_assert!(collision_probability(bigger, &CAL, av).unwrap() >= collision_probability(z, &CAL, av).unwrap());
        prop_assert!(fragment_formation(bigger, &CAL).unwrap() >= fragment_formation(z, &CAL).unwrap());
    }

    #[test]
    fn step_keeps_stocks_nonnegative((s, d) in stocks(), x in 0.0..1e4f64, o in opts()) {
        let next = step(OrbitState::new(s, d).unwrap(), x, &CAL, o).unwrap();
        prop_assert!(next.s >= 0.0 && next.d >= 0.0);
        prop_assert!(next.s <= s + x);
    }

    #[test]
    fn launches_add_exactly_their_debris((s, d) in stocks(), x in 0.0..1e4f64, o in opts()) {
        let z = OrbitState::new(s, d).unwrap();
        let a = step(z, x, &CAL, o).unwrap();
        let b = step(z, 0.0, &CAL, o).unwrap();
        prop_assert!((a.d - b.d - CAL.m * x).abs() <= 1e-9 * a.d.max(1.0));
    }

    #[test]
    fn interpolation_reproduces_planes(a in -5.0..5.0f64, b in -5.0..5.0f64, c in -5.0..5.0f64,
                                       s in 0.0..2.0f64, d in 0.0..3.0f64, cubic in any::<bool>()) {
        let grid = Grid2D::new(2.0, 3.0, 9, 13).unwrap();
        let scheme = if cubic { Interpolation::Cubic } else { Interpolation::Bilinear };
        let f = Field2D::from_fn(grid, |s, d| a + b * s + c * d).with_scheme(scheme);
        let want = a + b * s + c * d;
        prop_assert!((f.interp(s, d) - want).abs() < 1e-11);
    }

    #[test]
    fn interpolation_hits_nodes(i in 0usize..9, j in 0usize..13, seed in 0u64..1000, cubic in any::<bool>()) {
        let grid = Grid2D::new(2.0, 3.0, 9, 13).unwrap();
        let scheme = if cubic { Interpolation::Cubic } else { Interpolation::Bilinear };
        let f = Field2D::from_fn(grid, |s, d| (s * 7.1 + d * 3.3 + seed as f64).sin()).with_scheme(scheme);
        let (s, d) = (grid.s_at(i), grid.d_at(j));
        prop_assert!((f.interp(s, d) - f.at(i, j)).abs() < 1e-12);
    }

    #[test]
    fn thresholds_agree(sigma in 1e-3..100.0f64, x_bar in 0.1..50.0f64) {
        let p = SimpleParams { sigma, x_bar, ..SimpleParams::PANEL_A };
        let q = LinearSurvival { x_bar };
        let closed = kessler_threshold(&p, &q).unwrap().s_k;
        let numeric = kessler_threshold_numeric(&p, &q).unwrap();
        prop_assert!((closed - numeric).abs() < 1e-9 * x_bar);
        prop_assert!(closed > 0.0 && closed < x_bar);
    }

    #[test]
    fn roots_of_shifted_cubics(r in -10.0..10.0f64, w in 0.1..5.0f64) {
        let root = find_root(|x| (x - r).powi(3) + (x - r), r - w, r + 2.0 * w, Tolerance::default()).unwrap();
        prop_assert!((root.x - r).abs() < 1e-9);
    }

    #[test]
    fn scenario_hash_tracks_content(beta in 100.0..600.0f64) {
        let a = Scenario::calibrated(0.03, 0.0, beta);
        let mut b = a;
        prop_assert_eq!(a.hash(), b.hash());
        b.phys.beta_dd += 1.0;
        prop_assert_ne!(a.hash(), b.hash());
        prop_assert_eq!(Scenario::from_toml(&a.to_toml()).unwrap(), a);
    }
}
