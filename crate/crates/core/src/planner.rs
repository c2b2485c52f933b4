//! Fleet planner: finite-horizon seed, value-function iteration, optimality
//! diagnostics and the marginal external cost of a satellite.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{Dynamics, OrbitState};
use crate::error::{Error, Result};
use crate::grid::{Field2D, Grid2D, Interpolation, PolicyField, ValueField};
use crate::open_access::{equilibrium_launch_rate, find_steady_states, satellites_on_isoquant, debris_scale};
use crate::roots::{find_root, scan_golden_max, Tolerance};
use crate::scenario::Scenario;

/// Knobs of the planner solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlannerConfig {
    pub grid: Grid2D,
    /// Backward-induction horizon of the seed.
    pub horizon: usize,
    /// The seed is solved on every `seed_stride`-th node per axis.
    pub seed_stride: usize,
    /// Stop when the sup-norm change drops below this fraction of the mean
    /// seed value.
    pub tol_fraction: f64,
    pub max_iter: usize,
    /// Tolerance of the inner search over launch rates.
    pub inner_tol: f64,
    /// Coarse samples before the golden-section refinement.
    pub scan_points: usize,
    pub interpolation: Interpolation,
}

impl PlannerConfig {
    pub fn new(grid: Grid2D) -> Self {
        PlannerConfig {
            grid,
            horizon: 150,
            seed_stride: 4,
            tol_fraction: 0.01,
            max_iter: 2000,
            inner_tol: 1e-8,
            scan_points: 16,
            interpolation: Interpolation::default(),
        }
    }
}

/// `[0, 3 S(0)] x [0, 3 D_max]` where `S(0)` is the open-access satellite
/// stock with no debris and `D_max` the highest steady-state debris level.
pub fn default_grid(sc: &Scenario, n_s: usize, n_d: usize) -> Result<Grid2D> {
    let s0 = satellites_on_isoquant(0.0, sc)?;
    let d_top = find_steady_states(sc)?
        .iter()
        .map(|r| r.d_star)
        .fold(f64::NAN, f64::max);
    let d_top = if d_top.is_finite() { d_top } else { debris_scale(sc) };
    Grid2D::new(3.0 * s0, 3.0 * d_top, n_s, n_d)
}

/// Upper end of the launch search: twice the open-access launch from an
/// empty orbit, or the launch cap when it binds.
pub fn launch_cap(sc: &Scenario) -> Result<f64> {
    let e = sc.econ.excess_return();
    let x = if e <= 0.0 {
        0.0
    } else {
        2.0 * equilibrium_launch_rate(OrbitState::EMPTY, sc, 0.0)?
    };
    Ok(match sc.econ.x_upper {
        Some(cap) => x.min(cap),
        None => x,
    })
}

fn check_planner_scenario(sc: &Scenario) -> Result<()> {
    sc.econ.validate()?;
    sc.phys.validate()?;
    if !sc.is_stationary() {
        return Err(Error::domain("the planner needs constant or frozen economics"));
    }
    Ok(())
}

/// The one-period problem shared by the seed and the iteration.
#[derive(Clone, Copy)]
struct Bellman {
    dy: Dynamics,
    beta: f64,
    cost: f64,
    cap: f64,
    scan: usize,
    tol: f64,
    sc: Scenario,
}

impl Bellman {
    fn new(sc: &Scenario, scan: usize, tol: f64) -> Result<Self> {
        check_planner_scenario(sc)?;
        Ok(Bellman {
            dy: sc.dynamics(),
            beta: sc.econ.discount(),
            cost: sc.launch_cost(0.0),
            cap: launch_cap(sc)?,
            scan,
            tol,
            sc: *sc,
        })
    }

    fn revenue(&self, s: f64) -> f64 {
        s * self.sc.payoff(0.0, s)
    }

    /// Best launch rate at `(s, d)` against continuation `next`; returns
    /// `(x, value, clamped)`.
    fn solve<F>(&self, s: f64, d: f64, next: F) -> (f64, f64, bool)
    where
        F: Fn(f64, f64) -> (f64, bool),
    {
        let (s0, d0) = self.dy.physical_step(s, d);
        let m = self.dy.phys.m;
        let flow = self.revenue(s);
        let obj = |x: f64| -self.cost * x + self.beta * next(s0 + x, d0 + m * x).0;
        let (mut x, mut v) = if self.cap > 0.0 {
            scan_golden_max(obj, 0.0, self.cap, self.scan, self.tol)
        } else {
            (0.0, obj(0.0))
        };
        let v0 = obj(0.0);
        if v0 >= v {
            x = 0.0;
            v = v0;
        }
        let clamped = next(s0 + x, d0 + m * x).1;
        (x, flow + v, clamped)
    }
}

/// Backward induction on `grid` itself from the terminal fleet revenue.
pub fn finite_horizon_values(grid: Grid2D, horizon: usize, sc: &Scenario) -> Result<ValueField> {
    finite_horizon_values_with(grid, horizon, Interpolation::default(), sc)
}

pub fn finite_horizon_values_with(
    grid: Grid2D,
    horizon: usize,
    scheme: Interpolation,
    sc: &Scenario,
) -> Result<ValueField> {
    if horizon == 0 {
        return Err(Error::validation("horizon must be at least 1"));
    }
    let bell = Bellman::new(sc, 16, 1e-8)?;
    let mut w = Field2D::from_fn(grid, |s, _| bell.revenue(s)).with_scheme(scheme);
    for t in 0..horizon {
        let values: Vec<f64> = (0..grid.len())
            .into_par_iter()
            .map(|k| {
                let (s, d) = grid.node(k);
                if t == 0 {
                    // terminal value is exact off the grid
                    bell.solve(s, d, |a, _| (bell.revenue(a), false)).1
                } else {
                    bell.solve(s, d, |a, b| w.interp_flagged(a, b)).1
                }
            })
            .collect();
        w = Field2D { grid, values, scheme };
    }
    Ok(w)
}

/// Horizon-`horizon` values on a coarse subgrid, interpolated onto `grid`.
pub fn finite_horizon_seed(grid: Grid2D, horizon: usize, sc: &Scenario) -> Result<ValueField> {
    finite_horizon_seed_with(grid, horizon, 4, Interpolation::default(), sc)
}

pub fn finite_horizon_seed_with(
    grid: Grid2D,
    horizon: usize,
    stride: usize,
    scheme: Interpolation,
    sc: &Scenario,
) -> Result<ValueField> {
    grid.validate()?;
    let coarse = grid.coarsened(stride);
    Ok(finite_horizon_values_with(coarse, horizon, scheme, sc)?.resample(grid))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VfiResult {
    pub value: ValueField,
    pub policy: PolicyField,
    pub iterations: usize,
    /// Sup-norm change of each sweep.
    pub sup_norms: Vec<f64>,
    pub threshold: f64,
    /// Nodes whose optimal transition left the grid in the final sweep.
    pub clamp_warnings: usize,
}

impl VfiResult {
    pub fn final_sup_norm(&self) -> f64 {
        self.sup_norms.last().copied().unwrap_or(f64::NAN)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VfiOptions {
    pub tol_fraction: f64,
    pub max_iter: usize,
    pub inner_tol: f64,
    pub scan_points: usize,
}

impl Default for VfiOptions {
    fn default() -> Self {
        VfiOptions { tol_fraction: 0.01, max_iter: 2000, inner_tol: 1e-8, scan_points: 16 }
    }
}

/// Value-function iteration from `seed` with default search settings.
pub fn value_iteration(seed: &ValueField, sc: &Scenario, tol_fraction: f64) -> Result<VfiResult> {
    value_iteration_with(seed, sc, VfiOptions { tol_fraction, ..VfiOptions::default() })
}

/// One Bellman sweep: new values, argmax policy and clamp count.
fn sweep(bell: &Bellman, w: &ValueField) -> (Vec<f64>, Vec<f64>, usize) {
    let grid = w.grid;
    let res: Vec<(f64, f64, bool)> = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let (s, d) = grid.node(k);
            bell.solve(s, d, |a, b| w.interp_flagged(a, b))
        })
        .collect();
    let clamps = res.iter().filter(|r| r.2).count();
    let (x, v) = res.iter().map(|r| (r.0, r.1)).unzip();
    (v, x, clamps)
}

pub fn value_iteration_with(seed: &ValueField, sc: &Scenario, opts: VfiOptions) -> Result<VfiResult> {
    let bell = Bellman::new(sc, opts.scan_points, opts.inner_tol)?;
    let threshold = opts.tol_fraction * seed.mean().abs();
    let mut w = seed.clone();
    let mut sup_norms = Vec::new();
    for it in 1..=opts.max_iter {
        let (values, policy, clamps) = sweep(&bell, &w);
        let next = Field2D { values, ..w.clone() };
        let diff = next.sup_distance(&w);
        sup_norms.push(diff);
        log::debug!("VFI sweep {it}: sup-norm change {diff:e}");
        w = next;
        if diff < threshold {
            if clamps > 0 {
                log::warn!("{clamps} optimal transitions left the grid and were clamped");
            }
            return Ok(VfiResult {
                value: w,
                policy: Field2D { grid: seed.grid, values: policy, scheme: seed.scheme },
                iterations: it,
                sup_norms,
                threshold,
                clamp_warnings: clamps,
            });
        }
    }
    Err(Error::Convergence {
        what: "value-function iteration".into(),
        iterations: opts.max_iter,
        last_change: sup_norms.last().copied().unwrap_or(f64::NAN),
    })
}

/// Seed plus iteration with the settings in `cfg`.
pub fn solve_planner(sc: &Scenario, cfg: &PlannerConfig) -> Result<VfiResult> {
    let seed = finite_horizon_seed_with(cfg.grid, cfg.horizon, cfg.seed_stride, cfg.interpolation, sc)?;
    value_iteration_with(
        &seed,
        sc,
        VfiOptions {
            tol_fraction: cfg.tol_fraction,
            max_iter: cfg.max_iter,
            inner_tol: cfg.inner_tol,
            scan_points: cfg.scan_points,
        },
    )
}

/// Launch rate maximising the Bellman right-hand side at `state` against `w`.
pub fn bellman_argmax(state: OrbitState, sc: &Scenario, w: &ValueField) -> Result<f64> {
    state.validate()?;
    let bell = Bellman::new(sc, 16, 1e-10)?;
    Ok(bell.solve(state.s, state.d, |a, b| w.interp_flagged(a, b)).0)
}

/// `F - pi / (1 + r - q + xi)` with `q` the survival probability after the
/// launch.
pub fn residual_with_xi(state: OrbitState, x: f64, sc: &Scenario, xi: f64) -> Result<f64> {
    let dy = sc.dynamics();
    let next = dy.step(state, x)?;
    let q = 1.0 - dy.loss(next.s, next.d);
    let cost = sc.launch_cost(0.0);
    Ok(cost - sc.payoff(0.0, next.s) / (1.0 + sc.econ.r - q + xi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalityResidual {
    pub residual: f64,
    /// External cost implied by the marginal values of `w`.
    pub xi_hat: f64,
}

/// Interior first-order condition checked against the marginal values of a
/// converged value field.
///
/// The implied external cost comes from the launch condition combined with
/// the envelope condition one period ahead, with `W_S` and `W_D` taken by
/// central differences, one grid spacing wide for bilinear fields and
/// a thousandth of a spacing for cubic ones.
pub fn optimality_residual(state: OrbitState, x: f64, sc: &Scenario, w: &ValueField) -> Result<OptimalityResidual> {
    if !(x > 0.0) {
        return Err(Error::domain("the interior condition needs a positive launch rate"));
    }
    let dy = sc.dynamics();
    let p = dy.phys;
    let z1 = dy.step(state, x)?;
    let x1 = bellman_argmax(z1, sc, w)?;
    let z2 = dy.step(z1, x1)?;
    let l1 = dy.loss(z1.s, z1.d);
    let (ls1, _) = dy.loss_gradient(z1.s, z1.d);
    let (gs1, _) = dy.fragment_gradient(z1.s, z1.d);
    let (ws2, wd2) = gradient(w, z2);
    let (_, wd1) = gradient(w, z1);
    let beta = sc.econ.discount();
    let cost = sc.launch_cost(0.0);
    let e = beta * (ws2 * (1.0 - l1 - z1.s * ls1) * dy.retention() + wd2 * gs1) + p.m * wd1;
    let q = 1.0 - l1;
    let xi_hat = (q * cost - e) / cost;
    Ok(OptimalityResidual {
        residual: residual_with_xi(state, x, sc, xi_hat)?,
        xi_hat,
    })
}

fn gradient(w: &ValueField, z: OrbitState) -> (f64, f64) {
    let g = &w.grid;
    let diff = |lo: f64, hi: f64, f: &dyn Fn(f64) -> f64| (f(hi) - f(lo)) / (hi - lo);
    let k = match w.scheme {
        Interpolation::Bilinear => 1.0,
        Interpolation::Cubic => 1e-3,
    };
    let (hs, hd) = (k * g.ds(), k * g.dd());
    let (s_lo, s_hi) = ((z.s - hs).max(0.0), (z.s + hs).min(g.s_max));
    let (d_lo, d_hi) = ((z.d - hd).max(0.0), (z.d + hd).min(g.d_max));
    (
        diff(s_lo, s_hi, &|s| w.interp(s, z.d)),
        diff(d_lo, d_hi, &|d| w.interp(z.s, d)),
    )
}

/// Channel decomposition of the marginal external cost, in rate units
/// (multiply by `F` for currency).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct MecBreakdown {
    pub xi_total: f64,
    pub congestion_term: f64,
    pub pollution_hazard_term: f64,
    /// The launch-debris part `m S L_D` of the hazard channel.
    pub hazard_short_run_term: f64,
    pub pollution_persistence_term: f64,
    pub corner_adjustment_term: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub lambda_s: f64,
    pub lambda_d: f64,
    /// False when the input failed the steady-state residual check and the
    /// numbers are only a diagnostic.
    pub at_steady_state: bool,
}

/// `alpha1, alpha2, Gamma1, Gamma2` at a state.
fn intermediates(dy: &Dynamics, z: OrbitState, pi: f64, cost: f64) -> [f64; 4] {
    let l = dy.loss(z.s, z.d);
    let (ls, ld) = dy.loss_gradient(z.s, z.d);
    let (gs, gd) = dy.fragment_gradient(z.s, z.d);
    let m = dy.phys.m;
    let surv = 1.0 - l - z.s * ls;
    [
        pi + surv * cost,
        z.s * ld * cost,
        gs - m * surv,
        1.0 - dy.phys.delta + gd + m * z.s * ld,
    ]
}

fn check_mec_scenario(sc: &Scenario) -> Result<()> {
    check_planner_scenario(sc)?;
    if sc.turnover || sc.target_depends_on_fleet() {
        return Err(Error::domain("the external-cost formulas assume no turnover and a constant payoff"));
    }
    Ok(())
}

/// Relative residual of the steady-state debris balance with replacement
/// launches `X = L S`.
pub fn steady_state_residual(z: OrbitState, sc: &Scenario) -> f64 {
    let dy = sc.dynamics();
    let l = dy.loss(z.s, z.d);
    let inflow = dy.fragments(z.s, z.d) + dy.phys.m * l * z.s;
    let out = dy.phys.delta * z.d;
    (inflow - out).abs() / inflow.abs().max(out.abs()).max(f64::MIN_POSITIVE)
}

/// Steady-state external cost.
///
/// With `e = pi/F - r` and `P = e - L - S L_S`:
/// congestion `S L_S`; hazard
/// `beta (G_S + m (L + S L_S)) L_D S + (1 - beta) m L_D S + beta m S L_D P`;
/// persistence `beta (1 - delta + G_D) P`.
///
/// ```
/// use orbit_commons::dynamics::OrbitState;
/// use orbit_commons::planner::{external_cost_steady_state, planner_steady_state};
/// use orbit_commons::scenario::Scenario;
/// let sc = Scenario::qualitative();
/// let z = planner_steady_state(&sc)?;
/// let mec = external_cost_steady_state(z, &sc)?;
/// assert!(mec.at_steady_state);
/// let sum = mec.congestion_term + mec.pollution_hazard_term + mec.pollution_persistence_term;
/// assert!((mec.xi_total - sum).abs() < 1e-12);
/// # Ok::<(), orbit_commons::Error>(())
/// ```
pub fn external_cost_steady_state(z: OrbitState, sc: &Scenario) -> Result<MecBreakdown> {
    check_mec_scenario(sc)?;
    z.validate()?;
    let dy = sc.dynamics();
    let p = dy.phys;
    let (beta, cost, pi) = (sc.econ.discount(), sc.launch_cost(0.0), sc.payoff(0.0, z.s));
    let e = pi / cost - sc.econ.r;
    let l = dy.loss(z.s, z.d);
    let (ls, ld) = dy.loss_gradient(z.s, z.d);
    let (gs, gd) = dy.fragment_gradient(z.s, z.d);
    let gap = e - l - ls * z.s;
    let congestion = ls * z.s;
    let short_run = p.m * ld * z.s;
    let hazard = beta * (gs + p.m * (l + z.s * ls)) * ld * z.s
        + (1.0 - beta) * short_run
        + beta * short_run * gap;
    let persistence = beta * (1.0 - p.delta + gd) * gap;
    let [a1, a2, g1, g2] = intermediates(&dy, z, pi, cost);
    let lambda_d = a2 / (1.0 - beta * g2);
    Ok(MecBreakdown {
        xi_total: congestion + hazard + persistence,
        congestion_term: congestion,
        pollution_hazard_term: hazard,
        hazard_short_run_term: short_run,
        pollution_persistence_term: persistence,
        corner_adjustment_term: 0.0,
        alpha1: a1,
        alpha2: a2,
        gamma1: g1,
        gamma2: g2,
        kappa1: 0.0,
        kappa2: 0.0,
        lambda_s: (1.0 + sc.econ.r) * cost + p.m * lambda_d,
        lambda_d,
        at_steady_state: steady_state_residual(z, sc) < 1e-8,
    })
}

/// Multipliers on `S' >= 0`, `D' >= 0`, `X >= 0` and `X <= x_upper` in one
/// period.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CornerMultipliers {
    pub gamma_s: f64,
    pub gamma_d: f64,
    pub gamma_x: f64,
    pub gamma_xbar: f64,
}

/// Three consecutive states `t, t+1, t+2`, the launches between them, and
/// multipliers for periods `t-1, t, t+1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MecPath {
    pub states: [OrbitState; 3],
    pub launches: [f64; 2],
    #[serde(default)]
    pub multipliers: [CornerMultipliers; 3],
}

impl MecPath {
    /// A path that stays at `z` with replacement launches.
    pub fn stationary(z: OrbitState, sc: &Scenario) -> Self {
        let dy = sc.dynamics();
        let x = crate::open_access::replacement_launch(&dy, z.s, dy.loss(z.s, z.d));
        MecPath { states: [z; 3], launches: [x; 2], multipliers: Default::default() }
    }

    /// Path generated by stepping `z0` forward under two launch rates.
    pub fn from_launches(z0: OrbitState, launches: [f64; 2], sc: &Scenario) -> Result<Self> {
        let dy = sc.dynamics();
        let z1 = dy.step(z0, launches[0])?;
        let z2 = dy.step(z1, launches[1])?;
        Ok(MecPath { states: [z0, z1, z2], launches, multipliers: Default::default() })
    }
}

/// External cost of a satellite launched at `t` and flying from `t+1`,
/// including the corner adjustments.
pub fn external_cost_general(path: &MecPath, sc: &Scenario) -> Result<MecBreakdown> {
    check_mec_scenario(sc)?;
    let dy = sc.dynamics();
    for k in 0..2 {
        let want = dy.step(path.states[k], path.launches[k])?;
        let got = path.states[k + 1];
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1e-12);
        if !close(want.s, got.s) || !close(want.d, got.d) {
            return Err(Error::validation(format!(
                "path state {} is not the transition of state {k} under its launch rate",
                k + 1
            )));
        }
    }
    let p = dy.phys;
    let r = sc.econ.r;
    let beta = 1.0 / (1.0 + r);
    let cost = sc.launch_cost(0.0);
    let [z0, z1, _] = path.states;
    let [m_prev, m_now, m_next] = path.multipliers;
    let [a1, a2, g1, g2] = intermediates(&dy, z0, sc.payoff(0.0, z0.s), cost);
    let [a1n, a2n, g1n, g2n] = intermediates(&dy, z1, sc.payoff(0.0, z1.s), cost);
    let kappas = |z: OrbitState, gs_prev: f64, gd_prev: f64, gx: f64, gxb: f64| {
        let l = dy.loss(z.s, z.d);
        let (ls, ld) = dy.loss_gradient(z.s, z.d);
        (
            (1.0 + r) * gs_prev - (gx - gxb) * (1.0 - l - z.s * ls),
            (1.0 + r) * gd_prev + z.s * ld * (gx - gxb),
        )
    };
    let (k1, k2) = kappas(z0, m_prev.gamma_s, m_prev.gamma_d, m_now.gamma_x, m_now.gamma_xbar);
    let (k1n, k2n) = kappas(z1, m_now.gamma_s, m_now.gamma_d, m_next.gamma_x, m_next.gamma_xbar);
    let denom = g1n + p.m * g2n;
    if denom == 0.0 {
        return Err(Error::domain("Gamma1' + m Gamma2' vanishes on this path"));
    }
    let ratio = (g1 + p.m * g2) / denom;
    let l0 = dy.loss(z0.s, z0.d);
    let l1 = dy.loss(z1.s, z1.d);
    let (ls0, _) = dy.loss_gradient(z0.s, z0.d);
    let congestion = ls0 * z0.s * cost + (l0 - l1) * cost;
    let persistence = ratio * g2n * (beta * a1n - cost);
    let short_run = p.m * a2;
    let hazard = beta * ratio * g1n * a2n + short_run;
    let corner = ratio * (g2n * (beta * k1n + m_now.gamma_x - m_now.gamma_xbar) - beta * g1n * k2n)
        - (p.m * k2 + k1)
        + (1.0 + r) * (m_prev.gamma_xbar - m_prev.gamma_x);
    let lambda_d = (beta * (g1n * (a2n - k2n) + g2n * (a1n + k1n)) + g2n * (m_now.gamma_x - m_now.gamma_xbar - cost))
        / (beta * denom);
    let lambda_s = (1.0 + r) * (cost + beta * p.m * lambda_d - m_now.gamma_x + m_now.gamma_xbar);
    Ok(MecBreakdown {
        xi_total: (congestion + persistence + hazard + corner) / cost,
        congestion_term: congestion / cost,
        pollution_hazard_term: hazard / cost,
        hazard_short_run_term: short_run / cost,
        pollution_persistence_term: persistence / cost,
        corner_adjustment_term: corner / cost,
        alpha1: a1,
        alpha2: a2,
        gamma1: g1,
        gamma2: g2,
        kappa1: k1,
        kappa2: k2,
        lambda_s,
        lambda_d,
        at_steady_state: z0 == z1 && steady_state_residual(z0, sc) < 1e-8,
    })
}

/// Lowest debris level balancing decay against fragments and replacement
/// launch debris for a satellite stock `s`.
fn balanced_debris(s: f64, sc: &Scenario, d_hi: f64) -> Option<f64> {
    let dy = sc.dynamics();
    let p = dy.phys;
    let h = |d: f64| p.delta * d - dy.fragments(s, d) - p.m * dy.loss(s, d) * s;
    let n = 2000;
    let mut prev = (0.0, h(0.0));
    for i in 1..=n {
        let d = d_hi * i as f64 / n as f64;
        let v = h(d);
        if prev.1 < 0.0 && v >= 0.0 {
            return find_root(h, prev.0, d, Tolerance { f_abs: 0.0, ..Tolerance::default() })
                .ok()
                .map(|r| r.x);
        }
        prev = (d, v);
    }
    None
}

/// Interior planner steady state from the first-order conditions: the
/// debris balance together with `xi(S, D) = pi/F - r - L(S, D)`.
///
/// Solved along the debris-balance curve between an empty orbit and the
/// stable open-access steady state.
pub fn planner_steady_state(sc: &Scenario) -> Result<OrbitState> {
    check_mec_scenario(sc)?;
    let oa = find_steady_states(sc)?
        .into_iter()
        .find(|r| r.stable)
        .ok_or_else(|| Error::domain("no stable open-access steady state to bracket the planner's"))?;
    let d_hi = oa.d_star * 1.5;
    let e = sc.econ.excess_return();
    let dy = sc.dynamics();
    let phi = |s: f64| -> f64 {
        match balanced_debris(s, sc, d_hi) {
            Some(d) => {
                let z = OrbitState { s, d };
                let xi = external_cost_steady_state(z, sc).map(|m| m.xi_total).unwrap_or(f64::NAN);
                xi - (e - dy.loss(s, d))
            }
            None => f64::NAN,
        }
    };
    let lo = 1e-9 * oa.s_star;
    let root = find_root(phi, lo, oa.s_star, Tolerance { f_abs: 0.0, ..Tolerance::default() })?;
    let d = balanced_debris(root.x, sc, d_hi).ok_or_else(|| Error::domain("debris balance lost at the root"))?;
    OrbitState::new(root.x, d)
}
