//! Economic parameters, scenarios and their flat key-value config files.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dynamics::{Dynamics, PhysicalParams, StepOptions};
use crate::error::{Error, Result};

/// Revenue-to-cost level of the latest data year, used to pin the
/// productivity term of the calibrated payoff.
pub const CALIBRATION_REVENUE: f64 = 27.32;
/// Latest cost level, the `c` of `F_t = c e^{bt}`.
pub const CALIBRATION_COST: f64 = 119.16;
/// Active satellites in the base year.
pub const CALIBRATION_FLEET: f64 = 158.0;
/// First simulated year.
pub const CALIBRATION_YEAR: i32 = 2020;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EconParams {
    pub pi: f64,
    #[serde(rename = "F")]
    pub cost: f64,
    pub r: f64,
    #[serde(default)]
    pub a: f64,
    #[serde(default)]
    pub b: f64,
    #[serde(default)]
    pub eta: f64,
    #[serde(default)]
    pub gamma0: f64,
    #[serde(default)]
    pub gamma1: f64,
    #[serde(default)]
    pub gamma2: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_upper: Option<f64>,
}

impl EconParams {
    pub fn constant(pi: f64, cost: f64, r: f64) -> Self {
        EconParams {
            pi,
            cost,
            r,
            a: 0.0,
            b: 0.0,
            eta: 0.0,
            gamma0: 0.0,
            gamma1: 0.0,
            gamma2: 0.0,
            x_upper: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("pi", self.pi), ("F", self.cost), ("r", self.r)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::validation(format!("{name} must be positive, got {v:e}")));
            }
        }
        for (name, v) in [
            ("a", self.a),
            ("b", self.b),
            ("eta", self.eta),
            ("gamma0", self.gamma0),
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
        ] {
            if !v.is_finite() {
                return Err(Error::validation(format!("{name} must be finite")));
            }
        }
        if self.eta <= -1.0 {
            return Err(Error::validation("eta must exceed -1"));
        }
        if let Some(x) = self.x_upper {
            if !(x > 0.0) {
                return Err(Error::validation(format!("x_upper must be positive, got {x:e}")));
            }
        }
        Ok(())
    }

    /// `pi / F - r`.
    pub fn excess_return(&self) -> f64 {
        self.pi / self.cost - self.r
    }

    pub fn discount(&self) -> f64 {
        1.0 / (1.0 + self.r)
    }

    /// Productivity term consistent with revenue `k` at fleet `s0`:
    /// `exp(ln k - ln(1 + eta) + eta ln s0)`.
    pub fn productivity_for(k: f64, eta: f64, s0: f64) -> f64 {
        if eta == 0.0 {
            return k;
        }
        (k.ln() - (1.0 + eta).ln() + eta * s0.ln()).exp()
    }

    /// Calibrated time-varying economics with payoff growth `a` and
    /// elasticity `eta`.
    pub fn calibrated(a: f64, eta: f64) -> Self {
        EconParams {
            pi: Self::productivity_for(CALIBRATION_REVENUE, eta, CALIBRATION_FLEET),
            cost: CALIBRATION_COST,
            r: 0.05,
            a,
            b: 0.025,
            eta,
            gamma0: 3.35e-6,
            gamma1: 2.22e-5,
            gamma2: -2.67e-6,
            x_upper: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PayoffMode {
    /// Constant `pi`, `F`: the open-access isoquant is `L = pi/F - r`.
    #[default]
    Constant,
    /// Growing payoff and cost with the estimated adjustment coefficients.
    TimeVarying,
}

/// Economics, physics, payoff mode and dynamics flags.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(flatten)]
    pub econ: EconParams,
    #[serde(flatten)]
    pub phys: PhysicalParams,
    #[serde(default)]
    pub mode: PayoffMode,
    /// Calendar year of period `t = 0` in time-varying mode.
    #[serde(default = "default_start_year")]
    pub start_year: i32,
    #[serde(default)]
    pub avoidance: bool,
    #[serde(default)]
    pub turnover: bool,
    /// Holds the economics at this period regardless of `t`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frozen_period: Option<f64>,
}

fn default_start_year() -> i32 {
    CALIBRATION_YEAR
}

impl Scenario {
    pub fn constant(econ: EconParams, phys: PhysicalParams) -> Self {
        Scenario {
            econ,
            phys,
            mode: PayoffMode::Constant,
            start_year: CALIBRATION_YEAR,
            avoidance: false,
            turnover: false,
            frozen_period: None,
        }
    }

    /// Calibrated shell with the given payoff growth, elasticity and
    /// debris-debris fragment count.
    pub fn calibrated(a: f64, eta: f64, beta_dd: f64) -> Self {
        Scenario {
            econ: EconParams::calibrated(a, eta),
            phys: PhysicalParams { beta_dd, ..PhysicalParams::CALIBRATED },
            mode: PayoffMode::TimeVarying,
            start_year: CALIBRATION_YEAR,
            avoidance: true,
            turnover: true,
            frozen_period: None,
        }
    }

    /// Two-steady-state scenario in normalised units.
    ///
    /// `L(1,0)` equals the excess return 0.05 and `G(0,1) = 0.1`.
    pub fn qualitative() -> Self {
        let alpha = -(0.95f64).ln();
        let phys = PhysicalParams {
            alpha_ss: alpha,
            alpha_sd: alpha,
            alpha_dd: alpha,
            beta_ss: 0.05,
            beta_sd: 0.1,
            beta_dd: 0.1 / -(-alpha).exp_m1(),
            delta: 0.05,
            m: 0.05,
            mu: 0.0,
            kappa_ss: 0.0,
            kappa_sd: 0.0,
        };
        Scenario::constant(EconParams::constant(0.1, 1.0, 0.05), phys)
    }

    pub fn options(&self) -> StepOptions {
        StepOptions { avoidance: self.avoidance, turnover: self.turnover }
    }

    pub fn dynamics(&self) -> Dynamics {
        Dynamics { phys: self.phys, opts: self.options() }
    }

    pub fn validate(&self) -> Result<()> {
        self.econ.validate()?;
        self.phys.validate()?;
        if self.mode == PayoffMode::Constant {
            let t = self.constant_target();
            if !(t > 0.0 && t < 1.0) {
                return Err(Error::validation(format!(
                    "constant-payoff isoquant {t:e} must lie in (0, 1) (pi/F - r = {:e})",
                    self.econ.excess_return()
                )));
            }
        }
        Ok(())
    }

    /// Open-access collision-probability level in constant mode.
    ///
    /// Reduces to `pi/F - r` without turnover.
    pub fn constant_target(&self) -> f64 {
        let ret = self.dynamics().retention();
        1.0 - (1.0 + self.econ.r - self.econ.pi / self.econ.cost) / ret
    }

    /// Whether the isoquant depends on next period's fleet.
    pub fn target_depends_on_fleet(&self) -> bool {
        self.mode == PayoffMode::TimeVarying && self.econ.eta != 0.0
    }

    /// Whether the isoquant changes with the period.
    pub fn is_stationary(&self) -> bool {
        self.mode == PayoffMode::Constant || self.frozen_period.is_some()
    }

    /// Per-satellite payoff in period `t` at fleet `s`.
    pub fn payoff(&self, t: f64, s: f64) -> f64 {
        let e = &self.econ;
        match self.mode {
            PayoffMode::Constant => e.pi,
            PayoffMode::TimeVarying => {
                let t = self.frozen_period.unwrap_or(t);
                e.pi * (e.a * t).exp() * (1.0 + e.eta) * s.powf(e.eta)
            }
        }
    }

    /// Launch cost in period `t`.
    pub fn launch_cost(&self, t: f64) -> f64 {
        match self.mode {
            PayoffMode::Constant => self.econ.cost,
            PayoffMode::TimeVarying => {
                let t = self.frozen_period.unwrap_or(t);
                self.econ.cost * (self.econ.b * t).exp()
            }
        }
    }

    /// Collision probability that zeroes expected launch profit for a
    /// launch in period `t` that joins a fleet of `s_next`.
    pub fn target(&self, t: f64, s_next: f64) -> f64 {
        match self.mode {
            PayoffMode::Constant => self.constant_target(),
            PayoffMode::TimeVarying => {
                let e = &self.econ;
                let t0 = self.frozen_period.unwrap_or(t);
                let f0 = self.launch_cost(t0);
                let f1 = self.launch_cost(t0 + 1.0);
                e.gamma0 + e.gamma1 * self.payoff(t0 + 1.0, s_next) / f1 + e.gamma2 * f0 / f1
            }
        }
    }

    /// Sets one physical or economic field by its config key.
    pub fn set_param(&mut self, name: &str, v: f64) -> Result<()> {
        let (p, e) = (&mut self.phys, &mut self.econ);
        let slot = match name {
            "alpha_ss" => &mut p.alpha_ss,
            "alpha_sd" => &mut p.alpha_sd,
            "alpha_dd" => &mut p.alpha_dd,
            "beta_ss" => &mut p.beta_ss,
            "beta_sd" => &mut p.beta_sd,
            "beta_dd" => &mut p.beta_dd,
            "delta" => &mut p.delta,
            "m" => &mut p.m,
            "mu" => &mut p.mu,
            "kappa_ss" => &mut p.kappa_ss,
            "kappa_sd" => &mut p.kappa_sd,
            "pi" => &mut e.pi,
            "F" => &mut e.cost,
            "r" => &mut e.r,
            "a" => &mut e.a,
            "b" => &mut e.b,
            "eta" => &mut e.eta,
            "gamma0" => &mut e.gamma0,
            "gamma1" => &mut e.gamma1,
            "gamma2" => &mut e.gamma2,
            other => return Err(Error::validation(format!("unknown parameter `{other}`"))),
        };
        *slot = v;
        Ok(())
    }

    /// Copy whose economics stay at period `t`.
    pub fn frozen_at(&self, t: f64) -> Self {
        Scenario { frozen_period: Some(t), ..*self }
    }

    /// Period index of a calendar year.
    pub fn period_of(&self, year: i32) -> f64 {
        (year - self.start_year) as f64
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serialises")
    }

    /// Flat keys, or a `[scenario]` table as written by calibration.
    pub fn from_toml(text: &str) -> Result<Self> {
        let sc = parse_scenario(text).map_err(|e| Error::validation(e.to_string()))?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
        let sc = parse_scenario(&text).map_err(|e| Error::Parse {
            path: path.into(),
            message: e.to_string(),
        })?;
        sc.validate()?;
        Ok(sc)
    }

    /// SHA-256 of the canonical serialisation.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml().as_bytes()))
    }
}

fn parse_scenario(text: &str) -> std::result::Result<Scenario, toml::de::Error> {
    let mut table: toml::Table = toml::from_str(text)?;
    match table.remove("scenario") {
        Some(toml::Value::Table(inner)) => inner.try_into(),
        _ => toml::from_str(text),
    }
}
