//! Trajectories under a launch policy, basins of attraction, nullclines,
//! overshooting and Kessler times.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::OrbitState;
use crate::error::{Error, Result};
use crate::grid::{sci, Field2D, Grid2D, PolicyField};
use crate::open_access::{debris_scale, equilibrium_launch_rate, find_steady_states, SteadyStateRecord};
use crate::scenario::{EconParams, Scenario, CALIBRATION_FLEET, CALIBRATION_REVENUE};

/// Launch rate as a function of the state and period.
pub trait LaunchPolicy: Sync {
    fn launch(&self, state: OrbitState, t: f64, sc: &Scenario) -> Result<f64>;

    /// False where the policy is only an extrapolation.
    fn covers(&self, _state: OrbitState) -> bool {
        true
    }
}

/// Zero-profit launching.
#[derive(Debug, Clone, Copy, Default)]
pub struct OpenAccess;

impl LaunchPolicy for OpenAccess {
    fn launch(&self, state: OrbitState, t: f64, sc: &Scenario) -> Result<f64> {
        equilibrium_launch_rate(state, sc, t)
    }
}

/// Launch rates interpolated from a policy grid, clamped at zero.
#[derive(Debug, Clone, Copy)]
pub struct FieldPolicy<'a>(pub &'a PolicyField);

impl LaunchPolicy for FieldPolicy<'_> {
    fn launch(&self, state: OrbitState, _t: f64, _sc: &Scenario) -> Result<f64> {
        Ok(self.0.interp(state.s, state.d).max(0.0))
    }

    fn covers(&self, state: OrbitState) -> bool {
        self.0.grid.contains(state.s, state.d)
    }
}

/// Any closure `(state, t) -> X`.
pub struct FnPolicy<F>(pub F);

impl<F: Fn(OrbitState, f64) -> f64 + Sync> LaunchPolicy for FnPolicy<F> {
    fn launch(&self, state: OrbitState, t: f64, _sc: &Scenario) -> Result<f64> {
        Ok((self.0)(state, t).max(0.0))
    }
}

/// Debris above `debris_threshold`, still growing with no launches, for
/// `persistence` consecutive periods.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceRule {
    pub debris_threshold: f64,
    pub persistence: usize,
}

/// Debris level used for calibrated, non-stationary scenarios.
pub const CALIBRATED_DEBRIS_THRESHOLD: f64 = 1e6;

impl DivergenceRule {
    pub fn new(debris_threshold: f64) -> Self {
        DivergenceRule { debris_threshold, persistence: 20 }
    }

    /// `max(10 D_unstable, 100 D_stable)` from the open-access steady states,
    /// falling back to a multiple of the debris scale.
    pub fn for_scenario(sc: &Scenario) -> Self {
        if !sc.is_stationary() {
            return Self::new(CALIBRATED_DEBRIS_THRESHOLD);
        }
        let states = find_steady_states(sc).unwrap_or_default();
        let stable = states.iter().filter(|r| r.stable).map(|r| r.d_star).fold(0.0, f64::max);
        let unstable = states.iter().filter(|r| !r.stable).map(|r| r.d_star).fold(0.0, f64::max);
        let thr = (10.0 * unstable).max(100.0 * stable);
        Self::new(if thr > 0.0 { thr } else { 100.0 * debris_scale(sc) })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Horizon,
    Diverged,
    Converged,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t: usize,
    #[serde(rename = "X")]
    pub x: f64,
    #[serde(rename = "S")]
    pub s: f64,
    #[serde(rename = "D")]
    pub d: f64,
    #[serde(rename = "L")]
    pub l: f64,
}

impl TrajectoryPoint {
    pub fn state(&self) -> OrbitState {
        OrbitState { s: self.s, d: self.d }
    }
}

/// States `t = 0, 1, ...` with the launch rate chosen in each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
    pub termination: Termination,
    /// States where the policy had to extrapolate.
    pub fidelity_warnings: usize,
}

impl Trajectory {
    pub fn last(&self) -> &TrajectoryPoint {
        self.points.last().expect("trajectories hold the initial state")
    }

    /// First period from which no more launches happen, if launches stop
    /// before the end.
    pub fn launches_stop_at(&self) -> Option<usize> {
        let last_positive = self.points.iter().rposition(|p| p.x > 0.0);
        match last_positive {
            Some(k) if k + 1 < self.points.len() => Some(k + 1),
            Some(_) => None,
            None => Some(0),
        }
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "X", "S", "D", "L"])?;
        for p in &self.points {
            w.write_record([p.t.to_string(), sci(p.x), sci(p.s), sci(p.d), sci(p.l)])?;
        }
        w.flush()
    }
}

/// Early stop once the state stays within `rel` of `center` for `run`
/// consecutive periods.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetBall {
    pub center: OrbitState,
    pub rel: f64,
    pub run: usize,
}

impl TargetBall {
    pub fn contains(&self, z: OrbitState) -> bool {
        let near = |a: f64, c: f64| (a - c).abs() <= self.rel * c.abs().max(1e-12);
        near(z.s, self.center.s) && near(z.d, self.center.d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    pub periods: usize,
    /// Period of the initial state.
    pub t0: f64,
    pub rule: DivergenceRule,
    /// Converged once the state moves less than this (relative to
    /// `max(1, S + D)`) for `converge_run` periods.
    pub converge_tol: f64,
    pub converge_run: usize,
    pub ball: Option<TargetBall>,
}

impl SimOptions {
    pub fn new(periods: usize, sc: &Scenario) -> Self {
        SimOptions {
            periods,
            t0: 0.0,
            rule: DivergenceRule::for_scenario(sc),
            converge_tol: 1e-10,
            converge_run: 10,
            ball: None,
        }
    }
}

/// Simulates `periods` periods with the default stopping rules.
///
/// ```
/// use orbit_commons::dynamics::OrbitState;
/// use orbit_commons::phase::{simulate, OpenAccess};
/// use orbit_commons::scenario::Scenario;
/// let sc = Scenario::qualitative();
/// let traj = simulate(&OpenAccess, OrbitState::EMPTY, 50, &sc)?;
/// assert!(traj.points[0].x > 0.0);
/// assert!((traj.points[1].l - 0.05).abs() < 1e-12);
/// # Ok::<(), orbit_commons::Error>(())
/// ```
pub fn simulate(policy: &dyn LaunchPolicy, init: OrbitState, periods: usize, sc: &Scenario) -> Result<Trajectory> {
    simulate_with(policy, init, sc, &SimOptions::new(periods, sc))
}

pub fn simulate_with(policy: &dyn LaunchPolicy, init: OrbitState, sc: &Scenario, opts: &SimOptions) -> Result<Trajectory> {
    init.validate()?;
    let dy = sc.dynamics();
    let mut warnings = 0;
    let mut eval = |z: OrbitState, k: usize| -> Result<TrajectoryPoint> {
        if !policy.covers(z) {
            warnings += 1;
        }
        let x = policy.launch(z, opts.t0 + k as f64, sc)?;
        Ok(TrajectoryPoint { t: k, x, s: z.s, d: z.d, l: dy.loss(z.s, z.d) })
    };
    let mut points = vec![eval(init, 0)?];
    let (mut calm, mut growing, mut inside) = (0, 0, 0);
    let mut termination = Termination::Horizon;
    for k in 1..=opts.periods {
        let prev = points[k - 1];
        let z = dy.step(prev.state(), prev.x)?;
        points.push(eval(z, k)?);
        if z.d > opts.rule.debris_threshold && z.d > prev.d && prev.x == 0.0 {
            growing += 1;
        } else {
            growing = 0;
        }
        if growing >= opts.rule.persistence {
            termination = Termination::Diverged;
            break;
        }
        let change = (z.s - prev.s).abs() + (z.d - prev.d).abs();
        if change <= opts.converge_tol * (z.s + z.d).max(1.0) {
            calm += 1;
        } else {
            calm = 0;
        }
        if let Some(ball) = &opts.ball {
            inside = if ball.contains(z) { inside + 1 } else { 0 };
        }
        if calm >= opts.converge_run || opts.ball.is_some_and(|b| inside >= b.run) {
            termination = Termination::Converged;
            break;
        }
    }
    if warnings > 0 {
        log::debug!("launch policy extrapolated at {warnings} states");
    }
    Ok(Trajectory { points, termination, fidelity_warnings: warnings })
}

/// Long-run rest point of a policy started from `init`.
pub fn policy_steady_state(policy: &dyn LaunchPolicy, init: OrbitState, sc: &Scenario, max_periods: usize) -> Result<OrbitState> {
    let traj = simulate(policy, init, max_periods, sc)?;
    match traj.termination {
        Termination::Converged => Ok(traj.last().state()),
        _ => Err(Error::Convergence {
            what: "policy trajectory".into(),
            iterations: max_periods,
            last_change: f64::NAN,
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BasinClass {
    StableBasin,
    Kessler,
    Undetermined,
}

impl BasinClass {
    pub fn label(self) -> &'static str {
        match self {
            BasinClass::StableBasin => "STABLE_BASIN",
            BasinClass::Kessler => "KESSLER",
            BasinClass::Undetermined => "UNDETERMINED",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasinMap {
    pub grid: Grid2D,
    pub classes: Vec<BasinClass>,
    pub horizon: usize,
    pub rule: DivergenceRule,
    pub stable: Option<OrbitState>,
}

impl BasinMap {
    pub fn count(&self, class: BasinClass) -> usize {
        self.classes.iter().filter(|&&c| c == class).count()
    }

    pub fn at(&self, i: usize, j: usize) -> BasinClass {
        self.classes[self.grid.index(i, j)]
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["S", "D", "class"])?;
        for (k, (s, d)) in self.grid.nodes().enumerate() {
            w.write_record([sci(s), sci(d), self.classes[k].label().to_string()])?;
        }
        w.flush()
    }
}

/// Relative radius of the convergence ball around the stable state.
pub const BASIN_BALL: f64 = 0.01;
/// Consecutive periods inside the ball.
pub const BASIN_BALL_RUN: usize = 10;

/// Classifies every node by where its trajectory goes. Without a stable
/// state, nodes that do not diverge stay undetermined.
pub fn classify_basin(
    policy: &dyn LaunchPolicy,
    sc: &Scenario,
    grid: Grid2D,
    horizon: usize,
    rule: DivergenceRule,
    stable: Option<OrbitState>,
) -> Result<BasinMap> {
    grid.validate()?;
    let opts = SimOptions {
        periods: horizon,
        t0: 0.0,
        rule,
        converge_tol: 0.0,
        converge_run: usize::MAX,
        ball: stable.map(|center| TargetBall { center, rel: BASIN_BALL, run: BASIN_BALL_RUN }),
    };
    let classes = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let (s, d) = grid.node(k);
            let traj = simulate_with(policy, OrbitState { s, d }, sc, &opts)?;
            let class = match traj.termination {
                Termination::Converged => BasinClass::StableBasin,
                Termination::Diverged => BasinClass::Kessler,
                Termination::Horizon => BasinClass::Undetermined,
            };
            Ok((class, traj.fidelity_warnings > 0))
        })
        .collect::<Result<Vec<_>>>()?;
    let extrapolated = classes.iter().filter(|c| c.1).count();
    if extrapolated > 0 {
        log::warn!("launch policy extrapolated on {extrapolated} of {} basin trajectories", grid.len());
    }
    let classes = classes.into_iter().map(|c| c.0).collect();
    Ok(BasinMap { grid, classes, horizon, rule, stable })
}

/// Open-access basin map using the scenario's stable steady state.
pub fn open_access_basin(sc: &Scenario, grid: Grid2D, horizon: usize) -> Result<BasinMap> {
    let stable = find_steady_states(sc)?.into_iter().find(|r| r.stable).map(|r| r.state());
    classify_basin(&OpenAccess, sc, grid, horizon, DivergenceRule::for_scenario(sc), stable)
}

pub type Polyline = Vec<[f64; 2]>;

/// Zero contours of the one-period changes `(S' - S)/h` and `(D' - D)/h`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Nullclines {
    pub satellite: Vec<Polyline>,
    pub debris: Vec<Polyline>,
    pub ds: Field2D,
    pub dd: Field2D,
}

impl Nullclines {
    /// Rows `curve,polyline,vertex,S,D`.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["curve", "polyline", "vertex", "S", "D"])?;
        for (name, lines) in [("satellite", &self.satellite), ("debris", &self.debris)] {
            for (p, line) in lines.iter().enumerate() {
                for (v, pt) in line.iter().enumerate() {
                    w.write_record([name.to_string(), p.to_string(), v.to_string(), sci(pt[0]), sci(pt[1])])?;
                }
            }
        }
        w.flush()
    }
}

pub fn nullclines(policy: &dyn LaunchPolicy, sc: &Scenario, grid: Grid2D, h: f64) -> Result<Nullclines> {
    if !(h > 0.0) {
        return Err(Error::validation(format!("h must be positive, got {h:e}")));
    }
    grid.validate()?;
    let dy = sc.dynamics();
    let changes = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let (s, d) = grid.node(k);
            let z = OrbitState { s, d };
            let next = dy.step(z, policy.launch(z, 0.0, sc)?)?;
            Ok(((next.s - s) / h, (next.d - d) / h))
        })
        .collect::<Result<Vec<_>>>()?;
    let (vs, vd): (Vec<f64>, Vec<f64>) = changes.into_iter().unzip();
    let ds = Field2D::new(grid, vs)?;
    let dd = Field2D::new(grid, vd)?;
    Ok(Nullclines { satellite: zero_contour(&ds), debris: zero_contour(&dd), ds, dd })
}

/// Edge of the lattice: `(horizontal?, i, j)` starting at node `(i, j)`.
type EdgeId = (bool, usize, usize);

/// Marching squares with linear interpolation on edges, segments stitched
/// into polylines.
pub fn zero_contour(field: &Field2D) -> Vec<Polyline> {
    let g = field.grid;
    let pos = |i: usize, j: usize| field.at(i, j) > 0.0;
    let cross = |e: EdgeId| -> [f64; 2] {
        let (horiz, i, j) = e;
        let (i2, j2) = if horiz { (i + 1, j) } else { (i, j + 1) };
        let (a, b) = (field.at(i, j), field.at(i2, j2));
        let t = if a == b { 0.5 } else { a / (a - b) };
        [
            g.s_at(i) + t * (g.s_at(i2) - g.s_at(i)),
            g.d_at(j) + t * (g.d_at(j2) - g.d_at(j)),
        ]
    };
    let mut segments: Vec<(EdgeId, EdgeId)> = Vec::new();
    for i in 0..g.n_s - 1 {
        for j in 0..g.n_d - 1 {
            // corners counter-clockwise from (i, j); edges bottom, right, top, left
            let c = [pos(i, j), pos(i + 1, j), pos(i + 1, j + 1), pos(i, j + 1)];
            let edges: [EdgeId; 4] = [(true, i, j), (false, i + 1, j), (true, i, j + 1), (false, i, j)];
            let hit: Vec<usize> = (0..4).filter(|&e| c[e] != c[(e + 1) % 4]).collect();
            match hit.len() {
                2 => segments.push((edges[hit[0]], edges[hit[1]])),
                4 => {
                    let centre = 0.25 * (field.at(i, j) + field.at(i + 1, j) + field.at(i + 1, j + 1) + field.at(i, j + 1));
                    if (centre > 0.0) == c[0] {
                        segments.push((edges[0], edges[1]));
                        segments.push((edges[2], edges[3]));
                    } else {
                        segments.push((edges[3], edges[0]));
                        segments.push((edges[1], edges[2]));
                    }
                }
                _ => {}
            }
        }
    }
    let mut by_edge: HashMap<EdgeId, Vec<usize>> = HashMap::new();
    for (k, &(a, b)) in segments.iter().enumerate() {
        by_edge.entry(a).or_default().push(k);
        by_edge.entry(b).or_default().push(k);
    }
    let mut used = vec![false; segments.len()];
    let mut lines = Vec::new();
    let walk = |start: EdgeId, from: usize, used: &mut Vec<bool>| -> Vec<EdgeId> {
        let mut chain = vec![];
        let mut edge = start;
        let mut seg = from;
        loop {
            used[seg] = true;
            let (a, b) = segments[seg];
            edge = if a == edge { b } else { a };
            chain.push(edge);
            match by_edge[&edge].iter().find(|&&k| !used[k]) {
                Some(&k) => seg = k,
                None => break,
            }
        }
        chain
    };
    // open chains first, starting from edges touched once
    let mut starts: Vec<EdgeId> = by_edge.iter().filter(|(_, v)| v.len() == 1).map(|(e, _)| *e).collect();
    starts.sort();
    for e in starts {
        let k = by_edge[&e][0];
        if used[k] {
            continue;
        }
        let mut chain = vec![e];
        chain.extend(walk(e, k, &mut used));
        lines.push(chain.into_iter().map(cross).collect());
    }
    for k in 0..segments.len() {
        if used[k] {
            continue;
        }
        let start = segments[k].0;
        let mut chain = vec![start];
        chain.extend(walk(start, k, &mut used));
        lines.push(chain.into_iter().map(cross).collect());
    }
    lines
}

/// Which stocks rise above their steady-state level along the way.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Overshoot {
    pub overshoot_s: bool,
    pub overshoot_d: bool,
}

impl Overshoot {
    pub fn any(&self) -> bool {
        self.overshoot_s || self.overshoot_d
    }
}

/// Overshoot flags of a converged trajectory, `None` otherwise. The
/// initial state is not counted.
pub fn detect_overshoot(traj: &Trajectory, steady: &SteadyStateRecord) -> Option<Overshoot> {
    if traj.termination != Termination::Converged {
        return None;
    }
    let above = |v: f64, star: f64| v > star * (1.0 + 1e-6);
    let later = &traj.points[1..];
    Some(Overshoot {
        overshoot_s: later.iter().any(|p| above(p.s, steady.s_star)),
        overshoot_d: later.iter().any(|p| above(p.d, steady.d_star)),
    })
}

/// State that lands exactly on `target` after launching `x`: the physical
/// step is inverted by Newton's method at `target - x (1, m)`.
pub fn one_step_preimage(target: OrbitState, x: f64, sc: &Scenario) -> Result<OrbitState> {
    let dy = sc.dynamics();
    let p = dy.phys;
    let goal = (target.s - x, target.d - p.m * x);
    if goal.0 < 0.0 || goal.1 < 0.0 {
        return Err(Error::domain("launch overshoots the target stocks"));
    }
    let ret = dy.retention();
    let (mut s, mut d) = goal;
    for _ in 0..100 {
        let (fs, fd) = dy.physical_step(s, d);
        let (r1, r2) = (fs - goal.0, fd - goal.1);
        if r1.abs() <= 1e-14 * goal.0.max(1.0) && r2.abs() <= 1e-14 * goal.1.max(1.0) {
            return OrbitState::new(s, d);
        }
        let l = dy.loss(s, d);
        let (ls, ld) = dy.loss_gradient(s, d);
        let (gs, gd) = dy.fragment_gradient(s, d);
        let j = [[(1.0 - l - s * ls) * ret, -s * ld * ret], [gs, 1.0 - p.delta + gd]];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 {
            break;
        }
        s -= (j[1][1] * r1 - j[0][1] * r2) / det;
        d -= (-j[1][0] * r1 + j[0][0] * r2) / det;
    }
    Err(Error::Convergence { what: "one-step preimage".into(), iterations: 100, last_change: f64::NAN })
}

/// Uniform draws from `[0, s_max] x [0, d_max]` kept when open access
/// launches a positive amount there.
pub fn sample_action_region(sc: &Scenario, s_max: f64, d_max: f64, n: usize, seed: u64) -> Result<Vec<OrbitState>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    let mut tries = 0usize;
    while out.len() < n {
        tries += 1;
        if tries > 1000 * n.max(1) {
            return Err(Error::domain("action region is too thin in the sampling box"));
        }
        let z = OrbitState { s: rng.gen::<f64>() * s_max, d: rng.gen::<f64>() * d_max };
        if equilibrium_launch_rate(z, sc, 0.0)? > 0.0 {
            out.push(z);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KesslerMode {
    /// Entry is the year after the last launch of a path whose debris later
    /// diverges.
    #[default]
    TerminalLaunch,
    /// Entry is the first year whose state diverges when that year's
    /// economics are held fixed.
    FrozenYear,
}

impl std::str::FromStr for KesslerMode {
    type Err = Error;
    fn from_str(text: &str) -> Result<Self> {
        match text {
            "terminal-launch" => Ok(KesslerMode::TerminalLaunch),
            "frozen-year" => Ok(KesslerMode::FrozenYear),
            other => Err(Error::validation(format!("unknown Kessler mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KesslerOptions {
    pub mode: KesslerMode,
    pub rule: DivergenceRule,
    /// Years simulated past the search window to see whether a path that
    /// stopped launching diverges.
    pub continuation: usize,
    /// Periods of each frozen-year membership test.
    pub membership_horizon: usize,
}

impl Default for KesslerOptions {
    fn default() -> Self {
        KesslerOptions {
            mode: KesslerMode::default(),
            rule: DivergenceRule::new(CALIBRATED_DEBRIS_THRESHOLD),
            continuation: 1500,
            membership_horizon: 300,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KesslerTime {
    /// Entry year, `None` when beyond the horizon.
    pub year: Option<i32>,
    pub horizon_year: i32,
    pub mode: KesslerMode,
}

/// Year the open-access path from `init` enters the Kessler region.
///
/// ```
/// use orbit_commons::dynamics::OrbitState;
/// use orbit_commons::phase::kessler_time;
/// use orbit_commons::scenario::Scenario;
/// let sc = Scenario::calibrated(0.03, 0.0, 500.0);
/// let kt = kessler_time(&sc, OrbitState::new(158.0, 626.0)?, 400)?;
/// assert!(kt.year.unwrap() <= 2023);
/// # Ok::<(), orbit_commons::Error>(())
/// ```
pub fn kessler_time(sc: &Scenario, init: OrbitState, max_years: usize) -> Result<KesslerTime> {
    kessler_time_with(sc, init, max_years, &KesslerOptions::default())
}

pub fn kessler_time_with(sc: &Scenario, init: OrbitState, max_years: usize, opts: &KesslerOptions) -> Result<KesslerTime> {
    sc.econ.validate()?;
    sc.phys.validate()?;
    init.validate()?;
    let start = sc.start_year;
    let horizon_year = start + max_years as i32;
    let within = |y: i32| if y <= horizon_year { Some(y) } else { None };
    let year = match opts.mode {
        KesslerMode::TerminalLaunch => {
            let sim = SimOptions {
                periods: max_years + opts.continuation,
                t0: 0.0,
                rule: opts.rule,
                converge_tol: 0.0,
                converge_run: usize::MAX,
                ball: None,
            };
            match simulate_with(&OpenAccess, init, sc, &sim) {
                Ok(traj) if traj.termination == Termination::Diverged => {
                    let stop = traj.launches_stop_at().unwrap_or(traj.points.len());
                    within(start + stop as i32)
                }
                Ok(_) => None,
                // the isoquant left the attainable range before any divergence
                Err(Error::UnboundedEquilibrium(_)) => None,
                Err(e) => return Err(e),
            }
        }
        KesslerMode::FrozenYear => {
            let dy = sc.dynamics();
            let mut z = init;
            let mut found = None;
            for k in 0..=max_years {
                let frozen = sc.frozen_at(k as f64);
                let sim = SimOptions {
                    periods: opts.membership_horizon,
                    t0: k as f64,
                    rule: opts.rule,
                    converge_tol: 1e-10,
                    converge_run: 10,
                    ball: None,
                };
                let member = match simulate_with(&OpenAccess, z, &frozen, &sim) {
                    Ok(traj) => traj.termination == Termination::Diverged,
                    Err(Error::UnboundedEquilibrium(_)) => false,
                    Err(e) => return Err(e),
                };
                if member {
                    found = Some(start + k as i32);
                    break;
                }
                z = dy.step(z, equilibrium_launch_rate(z, sc, k as f64)?)?;
            }
            found
        }
    };
    Ok(KesslerTime { year, horizon_year, mode: opts.mode })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    BetaDd,
    BetaSd,
    GrowthA,
    Eta,
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;
    fn from_str(text: &str) -> Result<Self> {
        match text {
            "beta_dd" | "beta-dd" => Ok(SweepAxis::BetaDd),
            "beta_sd" | "beta-sd" => Ok(SweepAxis::BetaSd),
            "growth_a" | "growth-a" | "a" => Ok(SweepAxis::GrowthA),
            "eta" => Ok(SweepAxis::Eta),
            other => Err(Error::validation(format!("unknown sweep axis `{other}`"))),
        }
    }
}

impl SweepAxis {
    /// Copy of `sc` with the axis set to `v`. Changing `eta` re-pins the
    /// productivity term to the calibration revenue.
    pub fn apply(self, sc: &Scenario, v: f64) -> Scenario {
        let mut out = *sc;
        match self {
            SweepAxis::BetaDd => out.phys.beta_dd = v,
            SweepAxis::BetaSd => out.phys.beta_sd = v,
            SweepAxis::GrowthA => out.econ.a = v,
            SweepAxis::Eta => {
                out.econ.eta = v;
                out.econ.pi = EconParams::productivity_for(CALIBRATION_REVENUE, v, CALIBRATION_FLEET);
            }
        }
        out
    }

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::BetaDd => "beta_dd",
            SweepAxis::BetaSd => "beta_sd",
            SweepAxis::GrowthA => "growth_a",
            SweepAxis::Eta => "eta",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub year: Option<i32>,
}

/// Kessler time for each axis value, in the order given.
pub fn sweep_kessler_times(
    template: &Scenario,
    axis: SweepAxis,
    values: &[f64],
    init: OrbitState,
    max_years: usize,
    opts: &KesslerOptions,
) -> Result<Vec<SweepRow>> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::validation("sweep values must be finite"));
    }
    if values.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::validation("sweep values must be sorted"));
    }
    values
        .par_iter()
        .map(|&v| {
            let sc = axis.apply(template, v);
            Ok(SweepRow { value: v, year: kessler_time_with(&sc, init, max_years, opts)?.year })
        })
        .collect()
}

/// Rows `<axis>,entry_year`; years beyond the horizon print as `>H`.
pub fn write_sweep_csv<W: std::io::Write>(axis: SweepAxis, rows: &[SweepRow], horizon_year: i32, out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([axis.name(), "entry_year"])?;
    for r in rows {
        let y = match r.year {
            Some(y) => y.to_string(),
            None => format!(">{horizon_year}"),
        };
        w.write_record([sci(r.value), y])?;
    }
    w.flush()
}
