use orbit_commons::dynamics::OrbitState;
use orbit_commons::grid::{Field2D, Grid2D};
use orbit_commons::open_access::{find_steady_states, satellites_on_isoquant};
use orbit_commons::phase::*;
use orbit_commons::scenario::Scenario;

fn z(s: f64, d: f64) -> OrbitState {
    OrbitState::new(s, d).unwrap()
}

#[test]
fn replayed_trajectory_matches_laws_of_motion() {
    let sc = Scenario::qualitative();
    let tr = simulate(&OpenAccess, z(0.3, 0.2), 20_000, &sc).unwrap();
    let dy = sc.dynamics();
    for w in tr.points.windows(2) {
        let next = dy.step(w[0].state(), w[0].x).unwrap();
        assert!((next.s - w[1].s).abs() <= 1e-10 * next.s.max(1.0));
        assert!((next.d - w[1].d).abs() <= 1e-10 * next.d.max(1.0));
    }
    assert_eq!(tr.termination, Termination::Converged);
}

#[test]
fn deep_kessler_start_diverges_without_launches() {
    let mut sc = Scenario::qualitative();
    sc.phys.beta_dd *= 2.0;
    let tr = simulate(&OpenAccess, z(0.5, 20.0), 5000, &sc).unwrap();
    assert_eq!(tr.termination, Termination::Diverged);
    let stop = tr.launches_stop_at().unwrap();
    for w in tr.points[stop..].windows(2) {
        assert_eq!(w[0].x, 0.0);
        assert!(w[1].d > w[0].d);
    }
}

#[test]
fn steady_state_node_is_in_the_basin() {
    let sc = Scenario::qualitative();
    let st = find_steady_states(&sc).unwrap()[0];
    let grid = Grid2D::new(st.s_star, st.d_star, 2, 2).unwrap();
    let map = classify_basin(&OpenAccess, &sc, grid, 2000, DivergenceRule::for_scenario(&sc), Some(st.state())).unwrap();
    assert_eq!(map.at(1, 1), BasinClass::StableBasin);
}

#[test]
fn basin_shrinks_as_excess_return_grows() {
    let grid = Grid2D::new(1.5, 1.5, 16, 16).unwrap();
    let mut prev: Option<BasinMap> = None;
    for pi in [0.1, 0.105, 0.11, 0.115] {
        let mut sc = Scenario::qualitative();
        sc.econ.pi = pi;
        let map = open_access_basin(&sc, grid, 3000).unwrap();
        let total = map.count(BasinClass::StableBasin) + map.count(BasinClass::Kessler) + map.count(BasinClass::Undetermined);
        assert_eq!(total, grid.len());
        if let Some(p) = &prev {
            for k in 0..grid.len() {
                if map.classes[k] == BasinClass::StableBasin {
                    assert_eq!(p.classes[k], BasinClass::StableBasin, "node {k} at pi {pi}");
                }
            }
        }
        prev = Some(map);
    }
    // no stable state left at the largest excess return
    assert_eq!(prev.unwrap().count(BasinClass::StableBasin), 0);
}

#[test]
fn satellite_nullcline_passes_through_steady_states() {
    let sc = Scenario::qualitative();
    let grid = Grid2D::new(1.5, 1.0, 80, 80).unwrap();
    let nc = nullclines(&OpenAccess, &sc, grid, 1.0).unwrap();
    for st in find_steady_states(&sc).unwrap() {
        let near = nc
            .satellite
            .iter()
            .flatten()
            .map(|p| ((p[0] - st.s_star) / 1.5).hypot((p[1] - st.d_star) / 1.0))
            .fold(f64::INFINITY, f64::min);
        assert!(near < 2.0 / 79.0, "steady state ({}, {}) is {near} away", st.s_star, st.d_star);
        let dnear = nc
            .debris
            .iter()
            .flatten()
            .map(|p| ((p[0] - st.s_star) / 1.5).hypot((p[1] - st.d_star) / 1.0))
            .fold(f64::INFINITY, f64::min);
        assert!(dnear < 2.0 / 79.0);
    }
    assert!(!nc.debris.is_empty());
}

#[test]
fn step_size_only_rescales_fields() {
    let sc = Scenario::qualitative();
    let grid = Grid2D::new(1.5, 1.0, 30, 30).unwrap();
    let a = nullclines(&OpenAccess, &sc, grid, 1.0).unwrap();
    let b = nullclines(&OpenAccess, &sc, grid, 2.0).unwrap();
    for (x, y) in a.ds.values.iter().zip(&b.ds.values) {
        assert!((x / 2.0 - y).abs() <= 1e-14 * x.abs().max(1e-300));
    }
    assert_eq!(a.satellite, b.satellite);
    assert_eq!(a.debris, b.debris);
}

#[test]
fn contour_of_a_plane() {
    let grid = Grid2D::new(1.0, 1.0, 11, 11).unwrap();
    let f = Field2D::from_fn(grid, |s, d| s + d - 1.0);
    let lines = zero_contour(&f);
    assert_eq!(lines.len(), 1);
    for p in &lines[0] {
        assert!((p[0] + p[1] - 1.0).abs() < 1e-12);
    }
}

#[test]
fn overshoot_edge_cases() {
    let sc = Scenario::qualitative();
    let st = find_steady_states(&sc).unwrap()[0];
    let tr = simulate(&OpenAccess, st.state(), 200, &sc).unwrap();
    let o = detect_overshoot(&tr, &st).unwrap();
    assert!(!o.overshoot_s && !o.overshoot_d);

    let short = simulate(&OpenAccess, OrbitState::EMPTY, 3, &sc).unwrap();
    assert!(detect_overshoot(&short, &st).is_none());
}

#[test]
fn action_region_samples_are_seeded() {
    let sc = Scenario::qualitative();
    let st = find_steady_states(&sc).unwrap()[0];
    let hi = satellites_on_isoquant(0.0, &sc).unwrap();
    let a = sample_action_region(&sc, hi, st.d_star, 20, 7).unwrap();
    let b = sample_action_region(&sc, hi, st.d_star, 20, 7).unwrap();
    let c = sample_action_region(&sc, hi, st.d_star, 20, 8).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert!(a.iter().all(|p| orbit_commons::open_access::equilibrium_launch_rate(*p, &sc, 0.0).unwrap() > 0.0));
}

#[test]
fn one_step_preimage_lands_on_target() {
    let sc = Scenario::qualitative();
    let st = find_steady_states(&sc).unwrap()[0];
    let z0 = one_step_preimage(st.state(), 2.0 * st.x_star, &sc).unwrap();
    let next = sc.dynamics().step(z0, 2.0 * st.x_star).unwrap();
    assert!((next.s - st.s_star).abs() < 1e-10 && (next.d - st.d_star).abs() < 1e-10);
}

fn calibrated(a: f64, bdd: f64) -> Scenario {
    let mut sc = Scenario::calibrated(a, 0.0, bdd);
    sc.phys.beta_sd = 332.0;
    sc
}

#[test]
fn kessler_time_examples() {
    let init = z(158.0, 626.0);
    assert!(kessler_time(&calibrated(0.03, 500.0), init, 164).unwrap().year.unwrap() <= 2023);
    let slow = kessler_time(&calibrated(0.025, 326.0), init, 164).unwrap();
    assert_eq!(slow.year, None);
    assert_eq!(slow.horizon_year, 2184);
    let fast = kessler_time(&calibrated(0.09, 326.0), init, 164).unwrap().year.unwrap();
    assert!((2035..=2050).contains(&fast));
}

#[test]
fn single_value_sweep_matches_direct_call() {
    let init = z(158.0, 626.0);
    let opts = KesslerOptions::default();
    let sc = calibrated(0.05, 326.0);
    let rows = sweep_kessler_times(&sc, SweepAxis::BetaDd, &[400.0], init, 164, &opts).unwrap();
    let direct = kessler_time(&SweepAxis::BetaDd.apply(&sc, 400.0), init, 164).unwrap();
    assert_eq!(rows[0].year, direct.year);
    assert!(sweep_kessler_times(&sc, SweepAxis::BetaDd, &[2.0, 1.0], init, 164, &opts).is_err());
}

#[test]
fn more_negative_elasticity_delays_entry() {
    let init = z(158.0, 626.0);
    let rows = sweep_kessler_times(&calibrated(0.028, 326.0), SweepAxis::Eta, &[-0.2, -0.1, 0.0], init, 1000, &KesslerOptions::default())
        .unwrap();
    let years: Vec<i32> = rows.iter().map(|r| r.year.unwrap()).collect();
    assert!(years[0] > years[1] && years[1] > years[2], "{years:?}");
}

#[test]
fn frozen_year_mode_runs() {
    let opts = KesslerOptions { mode: KesslerMode::FrozenYear, ..KesslerOptions::default() };
    let kt = kessler_time_with(&calibrated(0.03, 500.0), z(158.0, 626.0), 30, &opts).unwrap();
    assert_eq!(kt.mode, KesslerMode::FrozenYear);
    assert!(kt.year.unwrap() <= 2023);
}

#[test]
fn sweep_csv_sentinel() {
    let rows = [SweepRow { value: 0.02, year: None }, SweepRow { value: 0.09, year: Some(2039) }];
    let mut buf = Vec::new();
    write_sweep_csv(SweepAxis::GrowthA, &rows, 2184, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("growth_a,entry_year\n"));
    assert!(text.contains(",>2184\n") && text.contains(",2039\n"));
}
