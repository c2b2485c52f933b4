//! Collision probability, fragment formation and the one-period transition.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Active satellites `S` and debris fragments `D` in the shell.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct OrbitState {
    #[serde(rename = "S")]
    pub s: f64,
    #[serde(rename = "D")]
    pub d: f64,
}

impl OrbitState {
    pub const EMPTY: OrbitState = OrbitState { s: 0.0, d: 0.0 };

    /// Checked constructor.
    pub fn new(s: f64, d: f64) -> Result<Self> {
        let st = OrbitState { s, d };
        st.validate()?;
        Ok(st)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s >= 0.0) || !(self.d >= 0.0) {
            return Err(Error::domain(format!(
                "negative or NaN state (S={:e}, D={:e})",
                self.s, self.d
            )));
        }
        if !self.s.is_finite() || !self.d.is_finite() {
            return Err(Error::domain(format!(
                "non-finite state (S={:e}, D={:e})",
                self.s, self.d
            )));
        }
        Ok(())
    }

    /// Parses `"S,D"`.
    pub fn parse_pair(text: &str) -> Result<Self> {
        let mut it = text.split(',').map(str::trim);
        let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
            return Err(Error::validation(format!("expected `S,D`, got `{text}`")));
        };
        let s = a
            .parse::<f64>()
            .map_err(|e| Error::validation(format!("bad S `{a}`: {e}")))?;
        let d = b
            .parse::<f64>()
            .map_err(|e| Error::validation(format!("bad D `{b}`: {e}")))?;
        OrbitState::new(s, d)
    }
}

/// Collision, fragmentation, decay and avoidance parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub alpha_ss: f64,
    pub alpha_sd: f64,
    pub alpha_dd: f64,
    pub beta_ss: f64,
    pub beta_sd: f64,
    pub beta_dd: f64,
    pub delta: f64,
    pub m: f64,
    pub mu: f64,
    pub kappa_ss: f64,
    pub kappa_sd: f64,
}

impl PhysicalParams {
    /// Calibrated values for the 600-650 km shell.
    pub const CALIBRATED: PhysicalParams = PhysicalParams {
        alpha_ss: 2.73e-7,
        alpha_sd: 2.73e-7,
        alpha_dd: 2.78e-7,
        beta_ss: 1800.0,
        beta_sd: 333.0,
        beta_dd: 327.0,
        delta: 0.074,
        m: 0.013,
        mu: 0.15,
        kappa_ss: 0.99,
        kappa_sd: 0.95,
    };

    /// Zero alphas or betas are accepted so that limit cases (no
    /// debris-debris fragmentation, debris-blind collisions) can be posed.
    pub fn validate(&self) -> Result<()> {
        let nonneg = [
            ("alpha_ss", self.alpha_ss),
            ("alpha_sd", self.alpha_sd),
            ("alpha_dd", self.alpha_dd),
            ("beta_ss", self.beta_ss),
            ("beta_sd", self.beta_sd),
            ("beta_dd", self.beta_dd),
            ("m", self.m),
        ];
        for (name, v) in nonneg {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::validation(format!("{name} must be finite and >= 0, got {v:e}")));
            }
        }
        let unit = [
            ("delta", self.delta),
            ("kappa_ss", self.kappa_ss),
            ("kappa_sd", self.kappa_sd),
        ];
        for (name, v) in unit {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::validation(format!("{name} must lie in [0,1], got {v:e}")));
            }
        }
        if !(0.0..1.0).contains(&self.mu) {
            return Err(Error::validation(format!("mu must lie in [0,1), got {:e}", self.mu)));
        }
        Ok(())
    }

    /// Rescales a parameter set so that `L(1,0) = target` (plain collision
    /// form) and `G(0,1) = g01`.
    ///
    /// This is the unit convention of the qualitative phase diagrams.
    pub fn normalized(mut self, target: f64, g01: f64) -> Result<Self> {
        if !(0.0 < target && target < 1.0) {
            return Err(Error::domain("normalization target must lie in (0,1)"));
        }
        self.alpha_ss = -(-target).ln_1p();
        if self.alpha_dd <= 0.0 {
            return Err(Error::domain("alpha_dd must be positive to normalize G(0,1)"));
        }
        self.beta_dd = g01 / -(-self.alpha_dd).exp_m1();
        Ok(self)
    }
}

/// Flags that modify the laws of motion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct StepOptions {
    /// Use the avoidance-adjusted collision probability.
    pub avoidance: bool,
    /// Retain only a fraction `1 - mu` of surviving satellites.
    pub turnover: bool,
}

/// `1 - e^{-x}` without cancellation for small `x`.
#[inline]
pub(crate) fn one_minus_exp(x: f64) -> f64 {
    -(-x).exp_m1()
}

/// Parameters plus options, with unchecked fast-path evaluations.
///
/// The free functions in this module validate their inputs and delegate
/// here; hot loops call these methods directly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dynamics {
    pub phys: PhysicalParams,
    pub opts: StepOptions,
}

impl Dynamics {
    pub fn new(phys: PhysicalParams, opts: StepOptions) -> Result<Self> {
        phys.validate()?;
        Ok(Dynamics { phys, opts })
    }

    /// Avoidance weights `(1 - kappa_ss, 1 - kappa_sd)`, or `(1, 1)`.
    #[inline]
    pub fn avoidance_weights(&self) -> (f64, f64) {
        if self.opts.avoidance {
            (1.0 - self.phys.kappa_ss, 1.0 - self.phys.kappa_sd)
        } else {
            (1.0, 1.0)
        }
    }

    #[inline]
    pub fn retention(&self) -> f64 {
        if self.opts.turnover {
            1.0 - self.phys.mu
        } else {
            1.0
        }
    }

    /// Supremum of `L` as both stocks grow without bound.
    pub fn loss_supremum(&self) -> f64 {
        let (a, b) = self.avoidance_weights();
        a + b - a * b
    }

    #[inline]
    pub fn loss(&self, s: f64, d: f64) -> f64 {
        let p = &self.phys;
        if self.opts.avoidance {
            let (a, b) = self.avoidance_weights();
            let pss = one_minus_exp(p.alpha_ss * s);
            let psd = one_minus_exp(p.alpha_sd * d);
            a * pss + b * psd - a * b * pss * psd
        } else {
            one_minus_exp(p.alpha_ss * s + p.alpha_sd * d)
        }
    }

    /// `(L_S, L_D)`.
    #[inline]
    pub fn loss_gradient(&self, s: f64, d: f64) -> (f64, f64) {
        let p = &self.phys;
        let (a, b) = self.avoidance_weights();
        let qss = (-p.alpha_ss * s).exp();
        let qsd = (-p.alpha_sd * d).exp();
        let (pss, psd) = (1.0 - qss, 1.0 - qsd);
        (
            p.alpha_ss * qss * (a - a * b * psd),
            p.alpha_sd * qsd * (b - a * b * pss),
        )
    }

    #[inline]
    pub fn fragments(&self, s: f64, d: f64) -> f64 {
        let p = &self.phys;
        p.beta_ss * one_minus_exp(p.alpha_ss * s) * s
            + p.beta_sd * one_minus_exp(p.alpha_sd * d) * s
            + p.beta_dd * one_minus_exp(p.alpha_dd * d) * d
    }

    /// `(G_S, G_D)`.
    #[inline]
    pub fn fragment_gradient(&self, s: f64, d: f64) -> (f64, f64) {
        let p = &self.phys;
        let ess = (-p.alpha_ss * s).exp();
        let esd = (-p.alpha_sd * d).exp();
        let edd = (-p.alpha_dd * d).exp();
        let g_s = p.beta_ss * (one_minus_exp(p.alpha_ss * s) + p.alpha_ss * s * ess)
            + p.beta_sd * one_minus_exp(p.alpha_sd * d);
        let g_d = p.beta_sd * p.alpha_sd * esd * s
            + p.beta_dd * (one_minus_exp(p.alpha_dd * d) + p.alpha_dd * d * edd);
        (g_s, g_d)
    }

    /// Transition without launches.
    #[inline]
    pub fn physical_step(&self, s: f64, d: f64) -> (f64, f64) {
        let l = self.loss(s, d);
        (
            s * (1.0 - l) * self.retention(),
            d * (1.0 - self.phys.delta) + self.fragments(s, d),
        )
    }

    /// Transition with launch rate `x`; inputs are not checked.
    #[inline]
    pub fn advance(&self, s: f64, d: f64, x: f64) -> (f64, f64) {
        let (s1, d1) = self.physical_step(s, d);
        (s1 + x, d1 + self.phys.m * x)
    }

    /// Checked transition.
    pub fn step(&self, state: OrbitState, x: f64) -> Result<OrbitState> {
        state.validate()?;
        if !(x >= 0.0) || !x.is_finite() {
            return Err(Error::domain(format!("launch rate must be finite and >= 0, got {x:e}")));
        }
        let (s, d) = self.advance(state.s, state.d, x);
        OrbitState::new(s, d)
    }
}

/// Probability that a satellite is destroyed this period.
///
/// ```
/// use orbit_commons::dynamics::{collision_probability, OrbitState, PhysicalParams};
/// let l = collision_probability(OrbitState::new(158.0, 626.0)?, &PhysicalParams::CALIBRATED, true)?;
/// assert!((l / 8.97e-6 - 1.0).abs() < 0.01);
/// # Ok::<(), orbit_commons::Error>(())
/// ```
pub fn collision_probability(state: OrbitState, phys: &PhysicalParams, avoidance: bool) -> Result<f64> {
    state.validate()?;
    let dy = Dynamics::new(*phys, StepOptions { avoidance, turnover: false })?;
    Ok(dy.loss(state.s, state.d))
}

/// New fragments from satellite and debris collisions this period.
pub fn fragment_formation(state: OrbitState, phys: &PhysicalParams) -> Result<f64> {
    state.validate()?;
    phys.validate()?;
    let dy = Dynamics { phys: *phys, opts: StepOptions::default() };
    Ok(dy.fragments(state.s, state.d))
}

/// One period of the laws of motion under launch rate `x`.
pub fn step(state: OrbitState, x: f64, phys: &PhysicalParams, opts: StepOptions) -> Result<OrbitState> {
    Dynamics::new(*phys, opts)?.step(state, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plain() -> Dynamics {
        Dynamics { phys: PhysicalParams::CALIBRATED, opts: StepOptions::default() }
    }

    #[test]
    fn gradients_match_finite_differences() {
        for opts in [
            StepOptions::default(),
            StepOptions { avoidance: true, turnover: false },
        ] {
            let dy = Dynamics { phys: PhysicalParams::CALIBRATED, opts };
            let (s, d) = (140.0, 700.0);
            let (ls, ld) = dy.loss_gradient(s, d);
            let (gs, gd) = dy.fragment_gradient(s, d);
            let h = 1e-3;
            let fd = |f: &dyn Fn(f64, f64) -> f64, ds: f64, dd: f64| {
                (f(s + ds, d + dd) - f(s - ds, d - dd)) / (2.0 * h)
            };
            let l = |a, b| dy.loss(a, b);
            let g = |a, b| dy.fragments(a, b);
            assert!((fd(&l, h, 0.0) / ls - 1.0).abs() < 1e-6);
            assert!((fd(&l, 0.0, h) / ld - 1.0).abs() < 1e-6);
            assert!((fd(&g, h, 0.0) / gs - 1.0).abs() < 1e-6);
            assert!((fd(&g, 0.0, h) / gd - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn loss_supremum_is_one_without_avoidance() {
        assert_eq!(plain().loss_supremum(), 1.0);
    }

    #[test]
    fn normalization_hits_targets() {
        let p = PhysicalParams { alpha_dd: 0.05, ..PhysicalParams::CALIBRATED }
            .normalized(0.05, 0.1)
            .unwrap();
        let dy = Dynamics { phys: PhysicalParams { alpha_sd: 0.0, beta_sd: 0.0, ..p }, opts: StepOptions::default() };
        assert!((dy.loss(1.0, 0.0) - 0.05).abs() < 1e-15);
        assert!((dy.fragments(0.0, 1.0) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn parse_pair_roundtrip() {
        let s = OrbitState::parse_pair(" 158, 626 ").unwrap();
        assert_eq!(s, OrbitState { s: 158.0, d: 626.0 });
        assert!(OrbitState::parse_pair("1,2,3").is_err());
        assert!(OrbitState::parse_pair("-1,2").is_err());
    }
}
