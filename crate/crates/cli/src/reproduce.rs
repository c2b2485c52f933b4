//! `reproduce`: the headline checks in one run, with a pass/fail report.

use clap::Args;
use serde::Serialize;
use serde_json::json;

use orbit_commons::calibration::TrafficPanel;
use orbit_commons::dynamics::{collision_probability, OrbitState, PhysicalParams};
use orbit_commons::open_access::{find_steady_states, satellites_on_isoquant, stability_inequality};
use orbit_commons::phase::{
    detect_overshoot, one_step_preimage, sample_action_region, simulate, sweep_kessler_times, KesslerOptions,
    OpenAccess, SweepAxis, SweepRow,
};
use orbit_commons::scenario::Scenario;
use orbit_commons::simple_model::{kessler_by_launch, kessler_conditions, LinearSurvival, SimpleParams};

use crate::{CliResult, Global, Outcome, RunDir};

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    /// Skip the Kessler-time sweeps.
    #[arg(long)]
    pub quick: bool,
    /// Initial conditions of the overshoot check.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
}

#[derive(Debug, Serialize)]
struct Check {
    name: String,
    pass: bool,
    detail: String,
}

fn check(name: &str, pass: bool, detail: String) -> Check {
    Check { name: name.to_string(), pass, detail }
}

fn simple_panels() -> CliResult<Vec<Check>> {
    let mut out = Vec::new();
    for (name, p, want) in [
        ("simple-model-panel-a", SimpleParams::PANEL_A, (true, false)),
        ("simple-model-panel-b", SimpleParams::PANEL_B, (true, true)),
    ] {
        let q = LinearSurvival { x_bar: p.x_bar };
        let c = kessler_conditions(&p, &q)?;
        let brute = kessler_by_launch(&p, &q)?;
        let got = (c.oa_kessler, c.planner_kessler);
        out.push(check(
            name,
            got == want && brute == want,
            format!("closed form {got:?}, launch solve {brute:?}, expected {want:?}"),
        ));
    }
    Ok(out)
}

fn traffic_probabilities() -> CliResult<Check> {
    let panel = TrafficPanel::fixture();
    let phys = PhysicalParams::CALIBRATED;
    let mut worst: f64 = 0.0;
    for row in &panel.rows {
        let z = OrbitState::new(row.active as f64, row.debris as f64)?;
        let l = collision_probability(z, &phys, true)?;
        worst = worst.max((l - row.collision_prob).abs() / row.collision_prob);
    }
    Ok(check("collision-probability-fixture", worst < 0.01, format!("worst relative error {worst:e} over {} rows", panel.rows.len())))
}

fn steady_states() -> CliResult<Check> {
    let sc = Scenario::qualitative();
    let ss = find_steady_states(&sc)?;
    let closed = ss.iter().map(|r| stability_inequality(r, &sc)).collect::<Result<Vec<_>, _>>()?;
    let pass = ss.len() == 2
        && ss[0].y_prime < 0.0
        && ss[1].y_prime > 0.0
        && closed == [true, false]
        && ss[0].stable
        && !ss[1].stable;
    let detail = ss
        .iter()
        .map(|r| format!("(S={:e}, D={:e}, Y'={:e})", r.s_star, r.d_star, r.y_prime))
        .collect::<Vec<_>>()
        .join(" ");
    Ok(check("steady-state-multiplicity", pass, detail))
}

fn overshoot(seed: u64, n: usize) -> CliResult<Vec<Check>> {
    let sc = Scenario::qualitative();
    let stable = find_steady_states(&sc)?.into_iter().find(|r| r.stable).expect("stable state");
    let s_hi = satellites_on_isoquant(0.0, &sc)?;
    let inits = sample_action_region(&sc, s_hi, stable.d_star, n, seed)?;
    let mut over = 0;
    for z in &inits {
        let tr = simulate(&OpenAccess, *z, 20_000, &sc)?;
        if detect_overshoot(&tr, &stable).is_some_and(|o| o.any()) {
            over += 1;
        }
    }
    let need = (n * 99).div_ceil(100);
    let z0 = one_step_preimage(stable.state(), 2.0 * stable.x_star, &sc)?;
    let tr = simulate(&OpenAccess, z0, 20_000, &sc)?;
    let manifold = detect_overshoot(&tr, &stable);
    Ok(vec![
        check("overshoot-sampled", over >= need, format!("{over}/{n} overshoot (seed {seed})")),
        check(
            "overshoot-one-step-manifold",
            manifold.is_some_and(|o| !o.any()),
            format!("from S={:e} D={:e}: {manifold:?}", z0.s, z0.d),
        ),
    ])
}

fn nonincreasing(rows: &[SweepRow]) -> bool {
    let y = |r: &SweepRow| r.year.unwrap_or(i32::MAX);
    rows.windows(2).all(|w| y(&w[1]) <= y(&w[0]))
}

fn sweeps() -> CliResult<Vec<Check>> {
    let init = OrbitState::new(158.0, 626.0)?;
    let opts = KesslerOptions::default();
    let years = 164;
    let label = |y: Option<i32>| y.map_or(format!(">{}", 2020 + years), |y| y.to_string());
    let base = |a: f64, bdd: f64| {
        let mut sc = Scenario::calibrated(a, 0.0, bdd);
        sc.phys.beta_sd = 332.0;
        sc
    };
    let bdd: Vec<f64> = (0..=30).map(|k| 200.0 + 10.0 * k as f64).collect();
    let mut curves = Vec::new();
    for bsd in [100.0, 332.0, 600.0] {
        let tmpl = SweepAxis::BetaSd.apply(&base(0.03, 326.0), bsd);
        curves.push(sweep_kessler_times(&tmpl, SweepAxis::BetaDd, &bdd, init, years, &opts)?);
    }
    let at = |rows: &[SweepRow], v: f64| rows.iter().find(|r| (r.value - v).abs() < 1e-9).and_then(|r| r.year);
    let mut out = Vec::new();
    let y500 = at(&curves[1], 500.0);
    out.push(check("kessler-beta-dd-500", y500.is_some_and(|y| y <= 2023), format!("entry {}", label(y500))));
    let a_vals: Vec<f64> = (0..=16).map(|k| 0.02 + 0.005 * k as f64).collect();
    let a_rows = sweep_kessler_times(&base(0.03, 326.0), SweepAxis::GrowthA, &a_vals, init, years, &opts)?;
    let y025 = at(&a_rows, 0.025);
    out.push(check("kessler-a-2.5pct", y025.is_none(), format!("entry {}", label(y025))));
    let y09 = at(&a_rows, 0.09);
    out.push(check("kessler-a-9pct", y09.is_some_and(|y| (2035..=2050).contains(&y)), format!("entry {}", label(y09))));
    let mono = curves.iter().all(|c| nonincreasing(c)) && nonincreasing(&a_rows);
    out.push(check("kessler-monotone", mono, "entry year nonincreasing in beta_dd and a".into()));
    let mut worst = 0;
    for k in 0..bdd.len() {
        if bdd[k] <= 400.0 {
            continue;
        }
        let mid = curves[1][k].year.unwrap_or(i32::MAX);
        for c in [&curves[0], &curves[2]] {
            worst = worst.max((c[k].year.unwrap_or(i32::MAX) as i64 - mid as i64).abs());
        }
    }
    out.push(check("kessler-beta-sd-insensitive", worst < 5, format!("largest gap {worst} years for beta_dd > 400")));
    Ok(out)
}

pub fn reproduce(g: &Global, a: &ReproduceArgs, dir: &mut RunDir) -> CliResult<(Outcome, Vec<(String, f64)>)> {
    let mut checks = simple_panels()?;
    checks.push(traffic_probabilities()?);
    checks.push(steady_states()?);
    checks.extend(overshoot(g.seed, a.samples)?);
    if !a.quick {
        checks.extend(sweeps()?);
    }
    for c in &checks {
        eprintln!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let passed = checks.iter().filter(|c| c.pass).count();
    let all_passed = passed == checks.len();
    dir.write_json("report.json", &checks)?;
    let details = json!({ "all_passed": all_passed, "passed": passed, "total": checks.len(), "quick": a.quick });
    let summary = format!("{passed}/{} checks passed", checks.len());
    Ok((Outcome { summary, scenario_hash: None, details }, Vec::new()))
}
