//! Open-access launch rates, steady states and the scalar debris reduction.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{Dynamics, OrbitState};
use crate::error::{Error, Result};
use crate::roots::{expand_upper, find_root, log_space, Tolerance};
use crate::scenario::Scenario;

/// Damping weight of the launch fixed point when the payoff depends on the
/// fleet.
pub const FIXED_POINT_DAMPING: f64 = 0.5;
pub const FIXED_POINT_TOL: f64 = 1e-8;
pub const FIXED_POINT_MAX_ITER: usize = 200;

fn tight(target: f64) -> Tolerance {
    Tolerance {
        f_abs: 1e-13 * target.abs(),
        x_abs: 0.0,
        x_rel: 4.0 * f64::EPSILON,
        max_iter: 400,
    }
}

/// Smallest launch rate that brings next period's collision probability up
/// to `target`, starting from the post-collision stocks `(s0, d0)`.
pub fn launch_to_target(dy: &Dynamics, s0: f64, d0: f64, target: f64) -> Result<f64> {
    if dy.loss(s0, d0) >= target {
        return Ok(0.0);
    }
    let p = &dy.phys;
    if !dy.opts.avoidance {
        if target >= 1.0 {
            return Err(Error::UnboundedEquilibrium(format!("isoquant {target:e} >= 1")));
        }
        let rate = p.alpha_ss + p.alpha_sd * p.m;
        if rate <= 0.0 {
            return Err(Error::UnboundedEquilibrium("launches never raise the collision probability".into()));
        }
        let x = (-(-target).ln_1p() - p.alpha_ss * s0 - p.alpha_sd * d0) / rate;
        return Ok(x.max(0.0));
    }
    let (a, b) = dy.avoidance_weights();
    let psd_limit = if p.m > 0.0 && p.alpha_sd > 0.0 {
        1.0
    } else {
        -(-p.alpha_sd * d0).exp_m1()
    };
    let pss_limit = if p.alpha_ss > 0.0 { 1.0 } else { 0.0 };
    let sup = a * pss_limit + b * psd_limit - a * b * pss_limit * psd_limit;
    if target >= sup {
        return Err(Error::UnboundedEquilibrium(format!(
            "isoquant {target:e} is not below the attainable collision probability {sup:e}"
        )));
    }
    let f = |x: f64| dy.loss(s0 + x, d0 + p.m * x) - target;
    let guess = (-(-target).ln_1p() / (a * p.alpha_ss + b * p.alpha_sd * p.m).max(f64::MIN_POSITIVE)).max(1.0);
    let hi = expand_upper(f, 0.0, guess, 2000)?;
    Ok(find_root(f, 0.0, hi, tight(target))?.x)
}

/// Zero-profit launch rate in period `t`.
///
/// ```
/// use orbit_commons::dynamics::OrbitState;
/// use orbit_commons::open_access::equilibrium_launch_rate;
/// use orbit_commons::scenario::Scenario;
/// let sc = Scenario::qualitative();
/// let x = equilibrium_launch_rate(OrbitState::EMPTY, &sc, 0.0)?;
/// let next = sc.dynamics().step(OrbitState::EMPTY, x)?;
/// assert!((sc.dynamics().loss(next.s, next.d) - 0.05).abs() < 1e-12);
/// # Ok::<(), orbit_commons::Error>(())
/// ```
pub fn equilibrium_launch_rate(state: OrbitState, sc: &Scenario, t: f64) -> Result<f64> {
    state.validate()?;
    let dy = sc.dynamics();
    let (s0, d0) = dy.physical_step(state.s, state.d);
    let x = if sc.target_depends_on_fleet() {
        launch_fixed_point(&dy, sc, s0, d0, t)?
    } else {
        launch_to_target(&dy, s0, d0, sc.target(t, 1.0))?
    };
    Ok(match sc.econ.x_upper {
        Some(cap) => x.min(cap),
        None => x,
    })
}

fn launch_fixed_point(dy: &Dynamics, sc: &Scenario, s0: f64, d0: f64, t: f64) -> Result<f64> {
    let mut x = launch_to_target(dy, s0, d0, sc.target(t, s0.max(1e-12)))?;
    for it in 0..FIXED_POINT_MAX_ITER {
        let implied = launch_to_target(dy, s0, d0, sc.target(t, s0 + x))?;
        let next = (1.0 - FIXED_POINT_DAMPING) * x + FIXED_POINT_DAMPING * implied;
        let change = (next - x).abs();
        x = next;
        if change <= FIXED_POINT_TOL * x.abs().max(1.0) {
            log::trace!("launch fixed point converged in {} iterations", it + 1);
            return Ok(x);
        }
    }
    // oscillating iteration: solve the zero-profit condition directly
    log::debug!("launch fixed point did not settle; bracketing instead");
    let p = dy.phys;
    let h = |x: f64| dy.loss(s0 + x, d0 + p.m * x) - sc.target(t, (s0 + x).max(1e-12));
    if h(0.0) >= 0.0 {
        return Ok(0.0);
    }
    let hi = expand_upper(h, 0.0, x.max(1.0), 2000).map_err(|_| Error::Convergence {
        what: "open-access launch fixed point".into(),
        iterations: FIXED_POINT_MAX_ITER,
        last_change: f64::NAN,
    })?;
    Ok(find_root(h, 0.0, hi, tight(sc.target(t, s0 + x)))?.x)
}

/// Satellite stock at which the collision probability reaches the
/// isoquant for debris `d`, clamped at zero. Needs a stationary scenario.
pub fn satellites_on_isoquant(d: f64, sc: &Scenario) -> Result<f64> {
    if !sc.is_stationary() {
        return Err(Error::domain("steady-state analysis needs constant or frozen economics"));
    }
    let dy = sc.dynamics();
    let p = &dy.phys;
    if sc.target_depends_on_fleet() {
        let f = |s: f64| dy.loss(s, d) - sc.target(0.0, s);
        if f(0.0) >= 0.0 {
            return Ok(0.0);
        }
        let hi = expand_upper(f, 0.0, 1.0, 2000)?;
        return Ok(find_root(f, 0.0, hi, Tolerance { f_abs: 0.0, ..Tolerance::default() })?.x);
    }
    let target = sc.target(0.0, 1.0);
    if !dy.opts.avoidance {
        return Ok(((-(-target).ln_1p() - p.alpha_sd * d) / p.alpha_ss).max(0.0));
    }
    let (a, b) = dy.avoidance_weights();
    let q = -(-p.alpha_sd * d).exp_m1();
    let pss = (target - b * q) / (a * (1.0 - b * q));
    if pss <= 0.0 {
        return Ok(0.0);
    }
    if pss >= 1.0 {
        return Err(Error::UnboundedEquilibrium(format!(
            "isoquant {target:e} unattainable by satellites alone at D = {d:e}"
        )));
    }
    Ok(-(-pss).ln_1p() / p.alpha_ss)
}

/// Launch rate that holds the satellite stock `s` constant when the
/// collision probability is `l`.
pub fn replacement_launch(dy: &Dynamics, s: f64, l: f64) -> f64 {
    s * (1.0 - (1.0 - l) * dy.retention())
}

/// `Y(D) = -delta D + G(S(D), D) + m X(D)` along the isoquant. Its roots are
/// the open-access steady states.
pub fn reduction_y(d: f64, sc: &Scenario) -> Result<f64> {
    let dy = sc.dynamics();
    let s = satellites_on_isoquant(d, sc)?;
    let x = if s > 0.0 { replacement_launch(&dy, s, sc.target(0.0, s)) } else { 0.0 };
    Ok(-dy.phys.delta * d + dy.fragments(s, d) + dy.phys.m * x)
}

/// Debris level at which the isoquant satellite stock reaches zero, if any.
pub fn debris_saturation(sc: &Scenario) -> Option<f64> {
    let dy = sc.dynamics();
    let p = &dy.phys;
    if p.alpha_sd <= 0.0 || sc.target_depends_on_fleet() {
        return None;
    }
    let target = sc.target(0.0, 1.0);
    let (_, b) = dy.avoidance_weights();
    let psd = target / b;
    if psd >= 1.0 {
        return None;
    }
    Some(-(-psd).ln_1p() / p.alpha_sd)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyStateRecord {
    #[serde(rename = "S_star")]
    pub s_star: f64,
    #[serde(rename = "D_star")]
    pub d_star: f64,
    #[serde(rename = "X_star")]
    pub x_star: f64,
    pub stable: bool,
    pub y_prime: f64,
}

impl SteadyStateRecord {
    pub fn state(&self) -> OrbitState {
        OrbitState { s: self.s_star, d: self.d_star }
    }
}

/// Root scan of [`reduction_y`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyStateSearch {
    pub n_points: usize,
    /// Scan from `lo_factor` to `hi_factor` times the debris scale.
    pub lo_factor: f64,
    pub hi_factor: f64,
}

impl Default for SteadyStateSearch {
    fn default() -> Self {
        SteadyStateSearch { n_points: 400, lo_factor: 1e-3, hi_factor: 1e3 }
    }
}

/// Debris scale of a scenario: the saturation level when it exists.
pub fn debris_scale(sc: &Scenario) -> f64 {
    debris_saturation(sc).unwrap_or_else(|| {
        let p = &sc.phys;
        1.0 / p.alpha_sd.max(p.alpha_dd).max(f64::MIN_POSITIVE)
    })
}

/// Open-access steady states sorted by debris.
///
/// ```
/// use orbit_commons::open_access::find_steady_states;
/// use orbit_commons::scenario::Scenario;
/// let ss = find_steady_states(&Scenario::qualitative())?;
/// assert_eq!(ss.len(), 2);
/// assert!(ss[0].stable && !ss[1].stable);
/// # Ok::<(), orbit_commons::Error>(())
/// ```
pub fn find_steady_states(sc: &Scenario) -> Result<Vec<SteadyStateRecord>> {
    find_steady_states_with(sc, SteadyStateSearch::default())
}

pub fn find_steady_states_with(sc: &Scenario, search: SteadyStateSearch) -> Result<Vec<SteadyStateRecord>> {
    sc.validate()?;
    if !sc.is_stationary() {
        return Err(Error::domain("steady states need constant or frozen economics"));
    }
    let scale = debris_scale(sc);
    let grid = log_space(search.lo_factor * scale, search.hi_factor * scale, search.n_points);
    let values = grid
        .par_iter()
        .map(|&d| reduction_y(d, sc))
        .collect::<Result<Vec<_>>>()?;
    let dy = sc.dynamics();
    let mut out = Vec::new();
    for i in 1..grid.len() {
        let (f0, f1) = (values[i - 1], values[i]);
        if f0 == 0.0 || f0.signum() == f1.signum() {
            continue;
        }
        let root = find_root(
            |d| reduction_y(d, sc).unwrap_or(f64::NAN),
            grid[i - 1],
            grid[i],
            Tolerance { f_abs: 0.0, ..Tolerance::default() },
        )?;
        let d = root.x;
        let h = 1e-5 * d;
        let y_prime = (reduction_y(d + h, sc)? - reduction_y(d - h, sc)?) / (2.0 * h);
        let s = satellites_on_isoquant(d, sc)?;
        let x = if s > 0.0 { replacement_launch(&dy, s, dy.loss(s, d)) } else { 0.0 };
        out.push(SteadyStateRecord { s_star: s, d_star: d, x_star: x, stable: y_prime < 0.0, y_prime });
    }
    Ok(out)
}

/// The closed-form stability test at an interior steady state:
/// `G_D - delta < (L_D / L_S)(G_S + m c)` with `c` the replacement launch
/// share of the fleet.
pub fn stability_inequality(rec: &SteadyStateRecord, sc: &Scenario) -> Result<bool> {
    if sc.target_depends_on_fleet() {
        return Err(Error::domain("closed-form stability test needs a fleet-independent isoquant"));
    }
    let dy = sc.dynamics();
    let (s, d) = (rec.s_star, rec.d_star);
    let (ls, ld) = dy.loss_gradient(s, d);
    let (gs, gd) = dy.fragment_gradient(s, d);
    let c = 1.0 - (1.0 - sc.target(0.0, s)) * dy.retention();
    Ok(gd - dy.phys.delta < ld / ls * (gs + dy.phys.m * c))
}

/// Newton solve of the two steady-state conditions
/// `L(S,D) = target` and `delta D = G(S,D) + m X(S)` from a guess.
pub fn newton_steady_state(guess: OrbitState, sc: &Scenario) -> Result<OrbitState> {
    if sc.target_depends_on_fleet() {
        return Err(Error::domain("two-dimensional solve needs a fleet-independent isoquant"));
    }
    let dy = sc.dynamics();
    let target = sc.target(0.0, 1.0);
    let ret = dy.retention();
    let p = dy.phys;
    let (mut s, mut d) = (guess.s, guess.d);
    for it in 0..100 {
        let l = dy.loss(s, d);
        let (ls, ld) = dy.loss_gradient(s, d);
        let (gs, gd) = dy.fragment_gradient(s, d);
        let x = replacement_launch(&dy, s, l);
        // dX/dS and dX/dD through both s and l
        let xs = 1.0 - (1.0 - l) * ret + s * ret * ls;
        let xd = s * ret * ld;
        let f1 = l - target;
        let f2 = dy.fragments(s, d) + p.m * x - p.delta * d;
        let j = [[ls, ld], [gs + p.m * xs, gd + p.m * xd - p.delta]];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            return Err(Error::domain("singular steady-state Jacobian"));
        }
        let ds = (f1 * j[1][1] - f2 * j[0][1]) / det;
        let dd = (j[0][0] * f2 - j[1][0] * f1) / det;
        s -= ds;
        d -= dd;
        if ds.abs() <= 1e-14 * s.abs().max(1e-300) && dd.abs() <= 1e-14 * d.abs().max(1e-300) {
            log::trace!("Newton steady state in {} iterations", it + 1);
            return OrbitState::new(s, d);
        }
    }
    OrbitState::new(s, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::StepOptions;

    #[test]
    fn avoidance_ray_solve_hits_target() {
        let sc = Scenario::calibrated(0.05, 0.0, 327.0);
        let dy = sc.dynamics();
        let x = launch_to_target(&dy, 150.0, 600.0, 2e-5).unwrap();
        assert!(x > 0.0);
        let l = dy.loss(150.0 + x, 600.0 + dy.phys.m * x);
        assert!((l / 2e-5 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn plain_and_avoidance_with_zero_kappa_agree() {
        let mut sc = Scenario::qualitative();
        let a = launch_to_target(&sc.dynamics(), 0.3, 0.2, 0.05).unwrap();
        sc.avoidance = true;
        let b = launch_to_target(&Dynamics { phys: sc.phys, opts: StepOptions { avoidance: true, turnover: false } }, 0.3, 0.2, 0.05)
            .unwrap();
        assert!((a - b).abs() < 1e-9 * a);
    }

    #[test]
    fn isoquant_inversion_consistent() {
        let mut sc = Scenario::qualitative();
        for avoidance in [false, true] {
            sc.avoidance = avoidance;
            sc.phys.kappa_ss = if avoidance { 0.3 } else { 0.0 };
            let dy = sc.dynamics();
            for d in [0.01, 0.2, 0.6] {
                let s = satellites_on_isoquant(d, &sc).unwrap();
                if s > 0.0 {
                    assert!((dy.loss(s, d) - sc.constant_target()).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn unbounded_target_is_an_error() {
        let sc = Scenario::calibrated(0.05, 0.0, 327.0);
        let r = launch_to_target(&sc.dynamics(), 1.0, 1.0, 0.5);
        assert!(matches!(r, Err(Error::UnboundedEquilibrium(_))));
    }
}
