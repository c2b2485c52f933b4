//! One function per subcommand. Each writes its files into the run directory
//! and returns the manifest details.

use std::path::{Path, PathBuf};

use clap::Args;
use serde_json::json;

use orbit_commons::calibration::{
    emit_calibration, load_panels, CalibrationInputs, EconPanel, RidgeRegressors, RidgeSpec,
    TrafficPanel,
};
use orbit_commons::dynamics::OrbitState;
use orbit_commons::grid::{sci, Grid2D, Interpolation};
use orbit_commons::open_access::{find_steady_states, stability_inequality};
use orbit_commons::phase::{
    self, classify_basin, open_access_basin, policy_steady_state, simulate, write_sweep_csv, BasinClass,
    DivergenceRule, FieldPolicy, KesslerMode, KesslerOptions, LaunchPolicy, OpenAccess, SweepAxis,
};
use orbit_commons::planner::{
    default_grid, external_cost_general, external_cost_steady_state, planner_steady_state, solve_planner, MecPath,
    PlannerConfig, VfiResult,
};
use orbit_commons::scenario::Scenario;
use orbit_commons::simple_model::{
    downward_demand_extension, kessler_by_launch, kessler_conditions, kessler_threshold, open_access_launch,
    planner_kessler_branch, planner_launch, value_curve, LinearSurvival, SimpleParams,
};

use crate::{parse_list, parse_sets, parse_state, resolve_scenario, CliError, CliResult, Global, Outcome, Preset, RunDir};

type Run = CliResult<(Outcome, Vec<(String, f64)>)>;

fn outcome(summary: String, sc: Option<&Scenario>, details: serde_json::Value) -> Outcome {
    Outcome { summary, scenario_hash: sc.map(Scenario::hash), details }
}

#[derive(Debug, Args)]
pub struct SimpleModelArgs {
    /// Built-in parameter panel when no --config is given.
    #[arg(long, default_value = "a", value_parser = ["a", "b"])]
    pub panel: String,
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Samples of the value curve.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
}

fn simple_params(g: &Global, a: &SimpleModelArgs) -> CliResult<(SimpleParams, Vec<(String, f64)>)> {
    let mut p = match g.config.as_deref() {
        None => {
            if a.panel == "a" {
                SimpleParams::PANEL_A
            } else {
                SimpleParams::PANEL_B
            }
        }
        Some("panel-a") => SimpleParams::PANEL_A,
        Some("panel-b") => SimpleParams::PANEL_B,
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.into(), e))?;
            toml::from_str(&text).map_err(|e| orbit_commons::Error::Parse { path: path.into(), message: e.to_string() })?
        }
    };
    let mut applied = Vec::new();
    if let Some(s) = a.sigma {
        p.sigma = s;
        applied.push(("sigma".to_string(), s));
    }
    if let Some(e) = g.eta {
        p.eta = e;
        applied.push(("eta".to_string(), e));
    }
    for (k, v) in parse_sets(&g.set)? {
        match k.as_str() {
            "pi" => p.pi = v,
            "r" => p.r = v,
            "F" => p.cost = v,
            "x_bar" => p.x_bar = v,
            "sigma" => p.sigma = v,
            "eta" => p.eta = v,
            other => return Err(CliError::Usage(format!("unknown simple-model parameter `{other}`"))),
        }
        applied.push((k, v));
    }
    p.validate()?;
    Ok((p, applied))
}

pub fn simple_model(g: &Global, a: &SimpleModelArgs, dir: &mut RunDir) -> Run {
    let (p, applied) = simple_params(g, a)?;
    let q = LinearSurvival { x_bar: p.x_bar };
    let s_hat = open_access_launch(&p, &q)?;
    let s_star = planner_launch(&p, &q)?;
    let s_k = kessler_threshold(&p, &q)?;
    let (cond, brute) = if p.sigma > 0.0 {
        (Some(kessler_conditions(&p, &q)?), Some(kessler_by_launch(&p, &q)?))
    } else {
        (None, None)
    };
    let eta_report = if p.eta != 0.0 { Some(downward_demand_extension(&p, &q)?) } else { None };
    let report = json!({
        "params": p,
        "S_hat": s_hat.s_hat,
        "saturated": s_hat.saturated,
        "S_star": s_star,
        "S_star_kessler_branch": planner_kessler_branch(&p, &q)?,
        "S_K": s_k.s_k,
        "S_K_degenerate": s_k.degenerate,
        "oa_kessler": cond.map(|c| c.oa_kessler).unwrap_or(false),
        "planner_kessler": cond.map(|c| c.planner_kessler).unwrap_or(false),
        "oa_bound": cond.map(|c| c.oa_bound),
        "planner_bound": cond.map(|c| c.planner_bound),
        "brute_force": brute.map(|(o, pl)| json!({"oa_kessler": o, "planner_kessler": pl})),
        "eta_report": eta_report,
    });
    dir.write_json("report.json", &report)?;
    let curve = value_curve(&p, &q, a.samples)?;
    dir.write_with("curve.csv", |out| {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["S", "V", "SV", "EC", "segment"])?;
        for c in &curve {
            w.write_record([sci(c.s), sci(c.v), sci(c.sv), sci(c.ec), c.segment.to_string()])?;
        }
        w.flush()
    })?;
    let summary = format!(
        "S_hat={:e} S_star={:e} S_K={:e} oa_kessler={} planner_kessler={}",
        s_hat.s_hat, s_star, s_k.s_k, report["oa_kessler"], report["planner_kessler"]
    );
    Ok((outcome(summary, None, report), applied))
}

#[derive(Debug, Args)]
pub struct OaSimulateArgs {
    /// Initial state `S,D`.
    #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
    pub init: String,
    #[arg(long, default_value_t = 200)]
    pub periods: usize,
}

pub fn oa_simulate(g: &Global, a: &OaSimulateArgs, dir: &mut RunDir) -> Run {
    let (sc, applied) = resolve_scenario(g, Preset::Qualitative)?;
    let init = parse_state(&a.init)?;
    let traj = simulate(&OpenAccess, init, a.periods, &sc)?;
    let dy = sc.dynamics();
    dir.write_with("trajectory.csv", |out| {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "X", "S", "D", "L", "target"])?;
        for p in &traj.points {
            let s_next = dy.advance(p.s, p.d, p.x).0;
            let target = sc.target(p.t as f64, s_next);
            w.write_record([p.t.to_string(), sci(p.x), sci(p.s), sci(p.d), sci(p.l), sci(target)])?;
        }
        w.flush()
    })?;
    let last = traj.last();
    let details = json!({
        "init": init,
        "periods": traj.points.len() - 1,
        "termination": traj.termination,
        "final": {"S": last.s, "D": last.d},
        "rule": DivergenceRule::for_scenario(&sc),
    });
    let summary = format!(
        "{} periods, termination {:?}, final S={:e} D={:e}",
        traj.points.len() - 1,
        traj.termination,
        last.s,
        last.d
    );
    Ok((outcome(summary, Some(&sc), details), applied))
}

pub fn oa_steady_states(g: &Global, dir: &mut RunDir) -> Run {
    let (sc, applied) = resolve_scenario(g, Preset::Qualitative)?;
    let states = find_steady_states(&sc)?;
    let closed_form = states
        .iter()
        .map(|r| stability_inequality(r, &sc))
        .collect::<Result<Vec<_>, _>>()?;
    dir.write_json("steady_states.json", &states)?;
    let details = json!({ "count": states.len(), "closed_form_stable": closed_form });
    let summary = states
        .iter()
        .map(|r| format!("(S={:e}, D={:e}, {})", r.s_star, r.d_star, if r.stable { "stable" } else { "unstable" }))
        .collect::<Vec<_>>()
        .join(" ");
    Ok((outcome(format!("{} steady states: {summary}", states.len()), Some(&sc), details), applied))
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Node counts `NSxND` (or one number for both).
    #[arg(long, default_value = "64x64")]
    pub grid: String,
    /// Grid extents `S_MAX,D_MAX`; default spans three times the open-access
    /// levels.
    #[arg(long)]
    pub extent: Option<String>,
}

impl GridArgs {
    fn grid(&self, sc: &Scenario) -> CliResult<Grid2D> {
        let (n_s, n_d) = Grid2D::parse_shape(&self.grid)?;
        match &self.extent {
            Some(e) => {
                let v = parse_list(e)?;
                if v.len() != 2 {
                    return Err(CliError::Usage(format!("--extent expects S_MAX,D_MAX, got `{e}`")));
                }
                Ok(Grid2D::new(v[0], v[1], n_s, n_d)?)
            }
            None => Ok(default_grid(sc, n_s, n_d)?),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Stopping threshold as a fraction of the mean seed value.
    #[arg(long, default_value_t = 0.01)]
    pub tol: f64,
    #[arg(long, default_value = "cubic")]
    pub interpolation: Interpolation,
    /// Backward-induction horizon of the seed.
    #[arg(long, default_value_t = 150)]
    pub seed_horizon: usize,
}

fn solve(sc: &Scenario, grid: Grid2D, s: &SolverArgs) -> CliResult<VfiResult> {
    let mut cfg = PlannerConfig::new(grid);
    cfg.tol_fraction = s.tol;
    cfg.interpolation = s.interpolation;
    cfg.horizon = s.seed_horizon;
    Ok(solve_planner(sc, &cfg)?)
}

#[derive(Debug, Args)]
pub struct PlannerArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
}

pub fn planner_solve(g: &Global, a: &PlannerArgs, dir: &mut RunDir) -> Run {
    let (sc, applied) = resolve_scenario(g, Preset::Qualitative)?;
    let grid = a.grid.grid(&sc)?;
    let res = solve(&sc, grid, &a.solver)?;
    dir.write_with("value.csv", |w| res.value.write_csv("W", w))?;
    dir.write_with("policy.csv", |w| res.policy.write_csv("X", w))?;
    let report = json!({
        "iterations": res.iterations,
        "final_sup_norm": res.final_sup_norm(),
        "threshold": res.threshold,
        "sup_norms": res.sup_norms,
        "clamp_warnings": res.clamp_warnings,
        "grid": grid,
        "interpolation": a.solver.interpolation,
    });
    dir.write_json("convergence.json", &report)?;
    let summary = format!(
        "converged in {} sweeps, final sup-norm {:e}, {} clamp warnings",
        res.iterations,
        res.final_sup_norm(),
        res.clamp_warnings
    );
    Ok((outcome(summary, Some(&sc), report), applied))
}

#[derive(Debug, Args)]
pub struct MecArgs {
    /// State `S,D`; defaults to the planner steady state.
    #[arg(long)]
    pub at: Option<String>,
    /// Launch rates `X0,X1` of a two-period path from `--at` for the
    /// general form.
    #[arg(long)]
    pub launches: Option<String>,
}

pub fn mec(g: &Global, a: &MecArgs, dir: &mut RunDir) -> Run {
    let (sc, applied) = resolve_scenario(g, Preset::Qualitative)?;
    let z = match &a.at {
        Some(t) => parse_state(t)?,
        None => planner_steady_state(&sc)?,
    };
    let path = match &a.launches {
        Some(t) => {
            let x = parse_list(t)?;
            if x.len() != 2 {
                return Err(CliError::Usage(format!("--launches expects X0,X1, got `{t}`")));
            }
            MecPath::from_launches(z, [x[0], x[1]], &sc)?
        }
        None => MecPath::stationary(z, &sc),
    };
    let general = match external_cost_general(&path, &sc) {
        Ok(b) => Some(b),
        // off a steady state the stationary path is not a valid transition
        Err(orbit_commons::Error::Validation(_)) if a.launches.is_none() => None,
        Err(e) => return Err(e.into()),
    };
    let steady = if a.launches.is_none() { Some(external_cost_steady_state(z, &sc)?) } else { None };
    let xi = general.or(steady).map(|b| b.xi_total).unwrap_or(f64::NAN);
    let report = json!({ "at": z, "path": path, "general": general, "steady_state": steady });
    dir.write_json("mec.json", &report)?;
    let summary = format!("xi={xi:e} at S={:e} D={:e}", z.s, z.d);
    Ok((outcome(summary, Some(&sc), report), applied))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PolicyChoice {
    OpenAccess,
    Planner,
}

#[derive(Debug, Args)]
pub struct BasinArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_enum, default_value = "open-access")]
    pub policy: PolicyChoice,
    /// Periods simulated from each node.
    #[arg(long, default_value_t = 5000)]
    pub horizon: usize,
    /// Divergence threshold on debris; defaults to a multiple of the
    /// steady-state debris levels.
    #[arg(long)]
    pub debris_threshold: Option<f64>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

pub fn basin(g: &Global, a: &BasinArgs, dir: &mut RunDir) -> Run {
    let (sc, applied) = resolve_scenario(g, Preset::Qualitative)?;
    let grid = a.grid.grid(&sc)?;
    let mut rule = DivergenceRule::for_scenario(&sc);
    if let Some(t) = a.debris_threshold {
        rule.debris_threshold = t;
    }
    let map = match a.policy {
        PolicyChoice::OpenAccess if a.debris_threshold.is_none() => open_access_basin(&sc, grid, a.horizon)?,
        PolicyChoice::OpenAccess => {
            let stable = find_steady_states(&sc)?.into_iter().find(|r| r.stable).map(|r| r.state());
            classify_basin(&OpenAccess, &sc, grid, a.horizon, rule, stable)?
        }
        PolicyChoice::Planner => {
            let res = solve(&sc, grid, &a.solver)?;
            let fp = FieldPolicy(&res.policy);
            let stable = policy_steady_state(&fp, OrbitState::EMPTY, &sc, 100_000)?;
            classify_basin(&fp, &sc, grid, a.horizon, rule, Some(stable))?
        }
    };
    dir.write_with("basin.csv", |w| map.write_csv(w))?;
    let counts = json!({
        "STABLE_BASIN": map.count(BasinClass::StableBasin),
        "KESSLER": map.count(BasinClass::Kessler),
        "UNDETERMINED": map.count(BasinClass::Undetermined),
    });
    let details = json!({
        "grid": grid,
        "policy": format!("{:?}", a.policy),
        "horizon": map.horizon,
        "rule": map.rule,
        "stable": map.stable,
        "counts": counts,
    });
    let summary = format!(
        "{} stable, {} Kessler, {} undetermined",
        counts["STABLE_BASIN"], counts["KESSLER"], counts["UNDETERMINED"]
    );
    Ok((outcome(summary, Some(&sc), details), applied))
}

#[derive(Debug, Args)]
pub struct NullclineArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_enum, default_value = "open-access")]
    pub policy: PolicyChoice,
    /// Period length dividing the one-step changes.
    #[arg(long, default_value_t = 1.0)]
    pub h: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
}

pub fn nullclines(g: &Global, a: &NullclineArgs, dir: &mut RunDir) -> Run {
    let (sc, applied) = resolve_scenario(g, Preset::Qualitative)?;
    let grid = a.grid.grid(&sc)?;
    let solved;
    let policy: &dyn LaunchPolicy = match a.policy {
        PolicyChoice::OpenAccess => &OpenAccess,
        PolicyChoice::Planner => {
            solved = solve(&sc, grid, &a.solver)?;
            &FieldPolicy(&solved.policy)
        }
    };
    let nc = phase::nullclines(policy, &sc, grid, a.h)?;
    dir.write_with("nullclines.csv", |w| nc.write_csv(w))?;
    let details = json!({
        "grid": grid,
        "policy": format!("{:?}", a.policy),
        "h": a.h,
        "satellite_polylines": nc.satellite.len(),
        "debris_polylines": nc.debris.len(),
    });
    let summary = format!("{} satellite and {} debris polylines", nc.satellite.len(), nc.debris.len());
    Ok((outcome(summary, Some(&sc), details), applied))
}

#[derive(Debug, Clone, Args)]
pub struct KesslerArgs {
    /// Initial state `S,D` of the first period.
    #[arg(long, default_value = "158,626", allow_hyphen_values = true)]
    pub init: String,
    /// Search window in years after the start year.
    #[arg(long, default_value_t = 164)]
    pub max_years: usize,
    /// `terminal-launch` or `frozen-year`.
    #[arg(long, default_value = "terminal-launch")]
    pub mode: KesslerMode,
    /// Debris level treated as divergence.
    #[arg(long, default_value_t = phase::CALIBRATED_DEBRIS_THRESHOLD)]
    pub debris_threshold: f64,
}

impl KesslerArgs {
    fn options(&self) -> KesslerOptions {
        KesslerOptions { mode: self.mode, rule: DivergenceRule::new(self.debris_threshold), ..KesslerOptions::default() }
    }
}

fn year_label(year: Option<i32>, horizon: i32) -> String {
    match year {
        Some(y) => y.to_string(),
        None => format!(">{horizon}"),
    }
}

pub fn kessler_time(g: &Global, a: &KesslerArgs, dir: &mut RunDir) -> Run {
    let (sc, applied) = resolve_scenario(g, Preset::Calibrated)?;
    let init = parse_state(&a.init)?;
    let opts = a.options();
    let kt = phase::kessler_time_with(&sc, init, a.max_years, &opts)?;
    let label = year_label(kt.year, kt.horizon_year);
    let report = json!({
        "year": kt.year,
        "horizon_year": kt.horizon_year,
        "beyond_horizon": kt.year.is_none(),
        "label": label,
        "mode": kt.mode,
        "init": init,
        "rule": opts.rule,
    });
    dir.write_json("kessler_time.json", &report)?;
    Ok((outcome(format!("Kessler time: {label}"), Some(&sc), report), applied))
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// `beta_dd`, `beta_sd`, `growth_a` or `eta`.
    #[arg(long)]
    pub axis: SweepAxis,
    /// Comma-separated values.
    #[arg(long, conflicts_with = "range", allow_hyphen_values = true)]
    pub values: Option<String>,
    /// `START:STOP:STEP`, inclusive.
    #[arg(long, allow_hyphen_values = true)]
    pub range: Option<String>,
    /// Second axis: one curve per value.
    #[arg(long, requires = "family_values")]
    pub family_axis: Option<SweepAxis>,
    #[arg(long, allow_hyphen_values = true)]
    pub family_values: Option<String>,
    #[command(flatten)]
    pub kessler: KesslerArgs,
}

fn parse_range(text: &str) -> CliResult<Vec<f64>> {
    let v: Vec<f64> = text
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("bad --range `{text}`"))))
        .collect::<CliResult<_>>()?;
    let [start, stop, step] = v[..] else {
        return Err(CliError::Usage(format!("--range expects START:STOP:STEP, got `{text}`")));
    };
    if !(step > 0.0) || stop < start {
        return Err(CliError::Usage(format!("--range needs STEP > 0 and STOP >= START, got `{text}`")));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| start + step * k as f64).collect())
}

pub fn sweep(g: &Global, a: &SweepArgs, dir: &mut RunDir) -> Run {
    let (sc, applied) = resolve_scenario(g, Preset::Calibrated)?;
    let values = match (&a.values, &a.range) {
        (Some(v), _) => parse_list(v)?,
        (None, Some(r)) => parse_range(r)?,
        (None, None) => return Err(CliError::Usage("sweep needs --values or --range".into())),
    };
    let init = parse_state(&a.kessler.init)?;
    let opts = a.kessler.options();
    let horizon_year = sc.start_year + a.kessler.max_years as i32;
    let families: Vec<(Option<(SweepAxis, f64)>, Scenario)> = match (a.family_axis, &a.family_values) {
        (Some(fa), Some(fv)) => parse_list(fv)?.into_iter().map(|v| (Some((fa, v)), fa.apply(&sc, v))).collect(),
        _ => vec![(None, sc)],
    };
    let mut curves = Vec::new();
    for (fam, fsc) in &families {
        let rows = phase::sweep_kessler_times(fsc, a.axis, &values, init, a.kessler.max_years, &opts)?;
        let name = match fam {
            Some((fa, v)) => format!("sweep_{}_{}={v}.csv", a.axis.name(), fa.name()),
            None => format!("sweep_{}.csv", a.axis.name()),
        };
        dir.write_with(&name, |w| write_sweep_csv(a.axis, &rows, horizon_year, w))?;
        curves.push(json!({
            "file": name,
            "family": fam.map(|(fa, v)| json!({fa.name(): v})),
            "years": rows.iter().map(|r| year_label(r.year, horizon_year)).collect::<Vec<_>>(),
        }));
    }
    let details = json!({
        "axis": a.axis.name(),
        "values": values,
        "init": init,
        "mode": opts.mode,
        "rule": opts.rule,
        "horizon_year": horizon_year,
        "curves": curves,
    });
    let summary = format!("{} curves x {} values over {}", families.len(), values.len(), a.axis.name());
    Ok((outcome(summary, Some(&sc), details), applied))
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    /// Economic panel CSV (`year,revenues,costs`); bundled data by default.
    #[arg(long, requires = "traffic")]
    pub econ: Option<PathBuf>,
    /// Traffic panel CSV (`year,launched,active,debris,collision_prob`).
    #[arg(long, requires = "econ")]
    pub traffic: Option<PathBuf>,
    /// Put the estimates into the scenario instead of the reference values.
    #[arg(long)]
    pub use_estimates: bool,
    #[arg(long, default_value = "literal")]
    pub ridge_regressors: RidgeRegressors,
    /// Regress on launches instead of a constant launch-debris term.
    #[arg(long)]
    pub launch_regressor: bool,
    /// Fixed ridge penalty instead of cross-validation.
    #[arg(long)]
    pub penalty: Option<f64>,
}

pub fn calibrate(g: &Global, a: &CalibrateArgs, dir: &mut RunDir) -> Run {
    let (econ, traffic) = match (&a.econ, &a.traffic) {
        (Some(e), Some(t)) => load_panels(e, t)?,
        _ => (EconPanel::fixture(), TrafficPanel::fixture()),
    };
    let mut ridge = RidgeSpec { regressors: a.ridge_regressors, launch_regressor: a.launch_regressor, ..RidgeSpec::default() };
    if let Some(p) = a.penalty {
        if !(p >= 0.0) {
            return Err(CliError::Usage(format!("--penalty must be >= 0, got {p}")));
        }
        ridge.penalties = vec![p];
    }
    let mut overrides = parse_sets(&g.set)?;
    for (k, v) in [("beta_dd", g.beta_dd), ("beta_sd", g.beta_sd)] {
        if let Some(v) = v {
            overrides.push((k.to_string(), v));
        }
    }
    let inputs = CalibrationInputs {
        econ,
        traffic,
        ridge,
        growth_a: g.growth_a.unwrap_or(0.03),
        eta: g.eta.unwrap_or(0.0),
        use_estimates: a.use_estimates,
        overrides: overrides.clone(),
    };
    let cal = emit_calibration(&inputs)?;
    dir.write_text("calibration.toml", &cal.to_toml())?;
    let details = json!({
        "cost_growth": cal.cost_growth,
        "adjustment": cal.adjustment,
        "ridge": cal.ridge,
        "provenance": cal.provenance,
        "inputs": {
            "econ": a.econ.as_deref().map(Path::display).map(|d| d.to_string()),
            "traffic": a.traffic.as_deref().map(Path::display).map(|d| d.to_string()),
        },
    });
    dir.write_json("regressions.json", &details)?;
    let mut applied = overrides;
    if let Some(v) = g.growth_a {
        applied.push(("growth_a".into(), v));
    }
    if let Some(v) = g.eta {
        applied.push(("eta".into(), v));
    }
    let summary = format!(
        "cost growth {:e} (se {:e}); gammas {:e} {:e} {:e}; ridge penalty {:e}",
        cal.cost_growth.eta1_f,
        cal.cost_growth.std_error,
        cal.adjustment.gamma0,
        cal.adjustment.gamma1,
        cal.adjustment.gamma2,
        cal.ridge.penalty
    );
    Ok((outcome(summary, Some(&cal.scenario), details), applied))
}
