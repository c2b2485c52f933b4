//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use orbit_commons::calibration::*;
use orbit_commons::dynamics::{collision_probability, OrbitState, PhysicalParams};
use orbit_commons::grid::Grid2D;
use orbit_commons::open_access::{
    equilibrium_launch_rate, find_steady_states, satellites_on_isoquant, stability_inequality, SteadyStateRecord,
};
use orbit_commons::phase::*;
use orbit_commons::planner::*;
use orbit_commons::scenario::Scenario;
use orbit_commons::simple_model::*;

type Check = Result<String, String>;

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(start: Instant, limit: Duration, detail: String) -> Check {
    let took = start.elapsed();
    ensure(took < limit, format!("{detail}; {:.2?} (limit {limit:?})", took))
}

fn stable_state(sc: &Scenario) -> SteadyStateRecord {
    find_steady_states(sc).unwrap().into_iter().find(|r| r.stable).expect("stable steady state")
}

fn traffic_probabilities() -> Check {
    let t0 = Instant::now();
    let mut worst: f64 = 0.0;
    let panel = TrafficPanel::fixture();
    for row in &panel.rows {
        let z = OrbitState::new(row.active as f64, row.debris as f64).unwrap();
        let l = collision_probability(z, &PhysicalParams::CALIBRATED, true).unwrap();
        worst = worst.max((l - row.collision_prob).abs() / row.collision_prob);
    }
    ensure(worst < 0.01, format!("{} rows, worst relative error {worst:.2e}", panel.rows.len()))?;
    within(t0, Duration::from_secs(1), "table rows".into())
}

fn two_panel_classification() -> Check {
    let t0 = Instant::now();
    let mut parts = Vec::new();
    let mut ok = true;
    for (name, p, want) in [("A", SimpleParams::PANEL_A, (true, false)), ("B", SimpleParams::PANEL_B, (true, true))] {
        let q = LinearSurvival { x_bar: p.x_bar };
        let c = kessler_conditions(&p, &q).unwrap();
        let brute = kessler_by_launch(&p, &q).unwrap();
        ok &= (c.oa_kessler, c.planner_kessler) == want && brute == want;
        parts.push(format!("{name}: bounds ({}, {}) launches {brute:?}", c.oa_kessler, c.planner_kessler));
    }
    ensure(ok, parts.join("; "))?;
    within(t0, Duration::from_secs(1), parts.join("; "))
}

fn threshold_limit() -> Check {
    let t0 = Instant::now();
    let base = SimpleParams::PANEL_A;
    let xb = base.x_bar;
    let q = LinearSurvival { x_bar: xb };
    let tiny = kessler_threshold(&SimpleParams { sigma: 1e-8, ..base }, &q).unwrap().s_k;
    let limit_err = (tiny - xb).abs();
    let mut worst: f64 = 0.0;
    for k in 0..=200 {
        let sigma = 10f64.powf(-3.0 + 5.0 * k as f64 / 200.0);
        let p = SimpleParams { sigma, ..base };
        let closed = kessler_threshold(&p, &q).unwrap().s_k;
        let numeric = kessler_threshold_numeric(&p, &q).unwrap();
        worst = worst.max((closed - numeric).abs());
    }
    let detail = format!("|S_K(1e-8) - X| = {limit_err:.1e}, closed vs root worst {worst:.1e}");
    ensure(limit_err < 1e-6 * xb && worst < 1e-9 * xb, detail.clone())?;
    within(t0, Duration::from_secs(1), detail)
}

fn steady_state_multiplicity() -> Check {
    let sc = Scenario::qualitative();
    let ss = find_steady_states(&sc).unwrap();
    let closed: Vec<bool> = ss.iter().map(|r| stability_inequality(r, &sc).unwrap()).collect();
    let signs: Vec<bool> = ss.iter().map(|r| r.y_prime < 0.0).collect();
    let detail = format!(
        "{} roots, Y' = {:?}, closed-form stable = {closed:?}",
        ss.len(),
        ss.iter().map(|r| format!("{:.3e}", r.y_prime)).collect::<Vec<_>>()
    );
    ensure(ss.len() == 2 && signs == [true, false] && closed == signs, detail)
}

fn no_autocatalysis_basin() -> Check {
    let mut sc = Scenario::qualitative();
    sc.phys.beta_dd = 0.0;
    sc.phys.beta_sd = 0.0;
    let grid = Grid2D::new(3.0, 3.0, 64, 64).unwrap();
    let map = open_access_basin(&sc, grid, 5000).unwrap();
    let k = map.count(BasinClass::Kessler);
    ensure(
        k == 0,
        format!(
            "{k} KESSLER, {} stable, {} undetermined of {}",
            map.count(BasinClass::StableBasin),
            map.count(BasinClass::Undetermined),
            grid.len()
        ),
    )
}

fn overshoot() -> Check {
    let t0 = Instant::now();
    let sc = Scenario::qualitative();
    let st = stable_state(&sc);
    let inits = sample_action_region(&sc, satellites_on_isoquant(0.0, &sc).unwrap(), st.d_star, 100, 2024).unwrap();
    let mut over = 0;
    for z in &inits {
        let tr = simulate(&OpenAccess, *z, 20_000, &sc).unwrap();
        if detect_overshoot(&tr, &st).is_some_and(|o| o.any()) {
            over += 1;
        }
    }
    let z0 = one_step_preimage(st.state(), 2.0 * st.x_star, &sc).unwrap();
    let manifold = detect_overshoot(&simulate(&OpenAccess, z0, 20_000, &sc).unwrap(), &st);
    let detail = format!("{over}/{} overshoot; one-step start {manifold:?}", inits.len());
    ensure(inits.len() == 100 && over >= 99 && manifold.is_some_and(|o| !o.any()), detail.clone())?;
    within(t0, Duration::from_secs(60), detail)
}

struct Planner {
    sc: Scenario,
    res: VfiResult,
}

fn planner_dominance(p: &Planner) -> Check {
    let grid = p.res.policy.grid;
    let mut bad = 0;
    for (k, (s, d)) in grid.nodes().enumerate() {
        let oa = equilibrium_launch_rate(OrbitState { s, d }, &p.sc, 0.0).unwrap();
        if p.res.policy.values[k] > oa + 1e-9 * oa.max(1.0) {
            bad += 1;
        }
    }
    let rest = policy_steady_state(&FieldPolicy(&p.res.policy), OrbitState::EMPTY, &p.sc, 100_000).unwrap();
    let oa = stable_state(&p.sc);
    let detail = format!(
        "{bad} nodes with X* > X^ on {}x{}; planner rest ({:.5}, {:.5}) vs open access ({:.5}, {:.5})",
        grid.n_s, grid.n_d, rest.s, rest.d, oa.s_star, oa.d_star
    );
    ensure(bad == 0 && rest.s < oa.s_star && rest.d < oa.d_star, detail)
}

fn external_cost_consistency() -> Check {
    let sc = Scenario::qualitative();
    let z = planner_steady_state(&sc).unwrap();
    let a = external_cost_steady_state(z, &sc).unwrap();
    let b = external_cost_general(&MecPath::stationary(z, &sc), &sc).unwrap();
    let gap = (a.xi_total - b.xi_total).abs();
    let dy = sc.dynamics();
    let (ls, _) = dy.loss_gradient(z.s, z.d);
    let sign_condition = sc.econ.excess_return() >= dy.loss(z.s, z.d) + ls * z.s;
    let channels = [a.congestion_term, a.pollution_hazard_term, a.pollution_persistence_term];
    let nonneg = channels.iter().all(|&c| c >= 0.0);

    let mut flat = sc;
    flat.phys.delta = 1.0;
    flat.phys.beta_dd = 0.0;
    flat.phys.beta_sd = 0.0;
    let persistence = external_cost_steady_state(OrbitState::new(0.4, 0.05).unwrap(), &flat)
        .unwrap()
        .pollution_persistence_term;
    let detail = format!(
        "general vs steady-state gap {gap:.1e}; channels {:.3e} {:.3e} {:.3e} (sign condition {sign_condition}); persistence with delta=1, G_D=0: {persistence}",
        channels[0], channels[1], channels[2]
    );
    ensure(gap < 1e-8 && sign_condition && nonneg && persistence == 0.0, detail)
}

fn kessler_times() -> Check {
    let t0 = Instant::now();
    let init = OrbitState::new(158.0, 626.0).unwrap();
    let opts = KesslerOptions::default();
    let years = 164;
    let base = |a: f64, bdd: f64| {
        let mut sc = Scenario::calibrated(a, 0.0, bdd);
        sc.phys.beta_sd = 332.0;
        sc
    };
    let label = |y: Option<i32>| y.map_or(format!(">{}", 2020 + years), |y| y.to_string());
    let y = |rows: &[SweepRow], v: f64| rows.iter().find(|r| (r.value - v).abs() < 1e-9).and_then(|r| r.year);
    let nonincreasing = |rows: &[SweepRow]| rows.windows(2).all(|w| w[1].year.unwrap_or(i32::MAX) <= w[0].year.unwrap_or(i32::MAX));

    let bdd: Vec<f64> = (0..=30).map(|k| 200.0 + 10.0 * k as f64).collect();
    let curves: Vec<Vec<SweepRow>> = [100.0, 332.0, 600.0]
        .iter()
        .map(|&bsd| {
            let tmpl = SweepAxis::BetaSd.apply(&base(0.03, 326.0), bsd);
            sweep_kessler_times(&tmpl, SweepAxis::BetaDd, &bdd, init, years, &opts).unwrap()
        })
        .collect();
    let a_vals: Vec<f64> = (0..=16).map(|k| 0.02 + 0.005 * k as f64).collect();
    let a_rows = sweep_kessler_times(&base(0.03, 326.0), SweepAxis::GrowthA, &a_vals, init, years, &opts).unwrap();

    let y500 = y(&curves[1], 500.0);
    let y025 = y(&a_rows, 0.025);
    let y09 = y(&a_rows, 0.09);
    let mono = curves.iter().all(|c| nonincreasing(c)) && nonincreasing(&a_rows);
    let mut gap = 0;
    for k in (0..bdd.len()).filter(|&k| bdd[k] > 400.0) {
        let mid = curves[1][k].year.unwrap_or(i32::MAX) as i64;
        for c in [&curves[0], &curves[2]] {
            gap = gap.max((c[k].year.unwrap_or(i32::MAX) as i64 - mid).abs());
        }
    }
    let checks = [
        y500.is_some_and(|y| y <= 2023),
        y025.is_none(),
        y09.is_some_and(|y| (2035..=2050).contains(&y)),
        mono,
        gap < 5,
    ];
    let detail = format!(
        "(i) beta_dd 500: {} (ii) a 2.5%: {} (iii) a 9%: {} (iv) monotone {mono} (v) beta_sd gap {gap} y; results {checks:?}",
        label(y500),
        label(y025),
        label(y09)
    );
    ensure(checks.iter().all(|&c| c), detail.clone())?;
    within(t0, Duration::from_secs(600), detail)
}

fn zero_launch_iff_divergence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut agree, mut diverged) = (0, 0);
    let mut disagreements = Vec::new();
    for k in 0..50 {
        let mut sc = Scenario::qualitative();
        sc.phys.beta_dd *= rng.gen_range(0.5..2.0);
        sc.econ.pi = rng.gen_range(0.095..0.11);
        let scale = orbit_commons::open_access::debris_scale(&sc);
        let init = OrbitState::new(rng.gen_range(0.0..2.0), rng.gen_range(0.0..3.0 * scale)).unwrap();
        let tr = simulate(&OpenAccess, init, 50_000, &sc).unwrap();
        let stops = tr.launches_stop_at().is_some_and(|t| t + 20 <= tr.points.len());
        let div = tr.termination == Termination::Diverged;
        diverged += div as usize;
        if stops == div && tr.termination != Termination::Horizon {
            agree += 1;
        } else {
            disagreements.push(format!("#{k} {:?} stops={stops}", tr.termination));
        }
    }
    ensure(
        agree == 50,
        format!("{agree}/50 agree ({diverged} diverged) {}", disagreements.join(", ")),
    )
}

fn vfi_soundness(p: &Planner) -> Check {
    let sc = &p.sc;
    let res = &p.res;
    let bound = sc.econ.discount() + 0.05;
    let norms = &res.sup_norms;
    let modulus = norms[10..]
        .windows(2)
        .map(|w| w[1] / w[0])
        .fold(0.0, f64::max);

    let grid = res.policy.grid;
    let n = grid.n_s;
    let cap = launch_cap(sc).unwrap();
    let rest = policy_steady_state(&FieldPolicy(&res.policy), OrbitState::EMPTY, sc, 100_000).unwrap();
    let basin = classify_basin(&FieldPolicy(&res.policy), sc, grid, 5000, DivergenceRule::for_scenario(sc), Some(rest)).unwrap();
    let halo = (n / 32) as isize;
    let deep = |i: usize, j: usize| {
        (-halo..=halo).all(|a| {
            (-halo..=halo).all(|b| {
                let (ii, jj) = (i as isize + a, j as isize + b);
                ii >= 0
                    && jj >= 0
                    && (ii as usize) < grid.n_s
                    && (jj as usize) < grid.n_d
                    && basin.at(ii as usize, jj as usize) == BasinClass::StableBasin
            })
        })
    };
    let cost = sc.econ.cost;
    let (mut worst, mut count) = (0.0f64, 0);
    for k in 0..grid.len() {
        let (i, j) = grid.coords(k);
        let x = res.policy.values[k];
        if x <= 0.0 || x >= cap || i == 0 || j == 0 || i + 1 == grid.n_s || j + 1 == grid.n_d || !deep(i, j) {
            continue;
        }
        let (s, d) = grid.node(k);
        let r = optimality_residual(OrbitState { s, d }, x, sc, &res.value).unwrap();
        worst = worst.max(r.residual.abs() / cost);
        count += 1;
    }
    let detail = format!(
        "{} sweeps, modulus {modulus:.4} (bound {bound:.4}); {count} interior nodes, max |residual|/F = {worst:.2e}",
        res.iterations
    );
    ensure(norms.len() > 11 && modulus <= bound && count > 0 && worst < 1e-3, detail)
}

fn calibration_regressions() -> Check {
    let g = cost_growth_regression(&EconPanel::fixture()).unwrap();
    let a = adjustment_regression(&EconPanel::fixture(), &TrafficPanel::fixture()).unwrap();
    let growth_ok = (g.eta1_f - 0.025).abs() <= 0.002 && (g.std_error - 0.009).abs() <= 0.003;
    let gammas = [(a.gamma0, 3.35e-6), (a.gamma1, 2.22e-5), (a.gamma2, -2.67e-6)];
    let gamma_ok = gammas.iter().all(|&(got, want)| ((got - want) / want).abs() <= 0.1 && got.signum() == want.signum());

    let exp: Vec<(f64, f64)> = (0..14).map(|t| (t as f64, 80.0 * (0.03 * t as f64).exp())).collect();
    let slope_err = (cost_growth_from(&exp).unwrap().eta1_f - 0.03).abs();
    let truth = (3e-6, 2e-5, -2.5e-6);
    let obs: Vec<(f64, f64, f64)> = (0..13)
        .map(|k| {
            let x1 = 0.15 + 0.01 * k as f64 + 0.003 * ((k * k) % 5) as f64;
            let x2 = 0.9 + 0.02 * ((k * 3) % 7) as f64;
            (truth.0 + truth.1 * x1 + truth.2 * x2, x1, x2)
        })
        .collect();
    let fit = adjustment_from(&obs).unwrap();
    let recovery_err = [(fit.gamma0 - truth.0), (fit.gamma1 - truth.1), (fit.gamma2 - truth.2)]
        .iter()
        .fold(0.0f64, |m, e| m.max(e.abs()));

    let (x, y) = ridge_design(
        &TrafficPanel::fixture(),
        &RidgeSpec { regressors: RidgeRegressors::CountWeighted, ..RidgeSpec::default() },
    );
    let x = DMatrix::from_fn(x.nrows(), x.ncols(), |i, j| x[(i, j)]);
    let y = DVector::from_iterator(y.len(), y.iter().copied());
    let ridge0 = ridge(&x, &y, &[true, true, true, false], 0.0).unwrap();
    let o = ols(&x, &y).unwrap();
    let ridge_err = ridge0
        .iter()
        .zip(&o.coef)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs() / b.abs().max(1.0)));

    let detail = format!(
        "eta1_F {:.4} (se {:.4}); gammas {:.3e} {:.3e} {:.3e}; synthetic slope err {slope_err:.1e}, gamma err {recovery_err:.1e}; ridge(0) vs OLS {ridge_err:.1e}",
        g.eta1_f, g.std_error, a.gamma0, a.gamma1, a.gamma2
    );
    ensure(
        growth_ok && gamma_ok && slope_err < 1e-10 && recovery_err < 1e-10 && ridge_err < 1e-10,
        detail,
    )
}

fn main() {
    let t0 = Instant::now();
    let planner = {
        let sc = Scenario::qualitative();
        let grid = default_grid(&sc, 256, 256).unwrap();
        let cfg = PlannerConfig { tol_fraction: 1e-6, ..PlannerConfig::new(grid) };
        let res = solve_planner(&sc, &cfg).unwrap();
        Planner { sc, res }
    };
    println!("planner solved on 256x256 in {:.1?}", t0.elapsed());

    let results: Vec<(usize, &str, Check)> = vec![
        (1, "collision probabilities match the traffic table", traffic_probabilities()),
        (2, "two-panel Kessler classification", two_panel_classification()),
        (3, "threshold limit and closed form", threshold_limit()),
        (4, "steady-state multiplicity and ordering", steady_state_multiplicity()),
        (5, "no autocatalysis, no Kessler region", no_autocatalysis_basin()),
        (6, "overshooting", overshoot()),
        (7, "planner dominance", planner_dominance(&planner)),
        (8, "external-cost consistency", external_cost_consistency()),
        (9, "Kessler times", kessler_times()),
        (10, "zero launches iff divergence", zero_launch_iff_divergence()),
        (11, "value-iteration soundness", vfi_soundness(&planner)),
        (12, "calibration regressions", calibration_regressions()),
    ];
    let mut failed = 0;
    for (n, name, r) in &results {
        match r {
            Ok(d) => println!("PASS criterion {n:>2} {name}: {d}"),
            Err(d) => {
                failed += 1;
                println!("FAIL criterion {n:>2} {name}: {d}");
            }
        }
    }
    println!("{}/{} criteria passed in {:.1?}", results.len() - failed, results.len(), t0.elapsed());
    if failed > 0 {
        std::process::exit(1);
    }
}
