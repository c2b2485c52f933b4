//! Three-period model: survival function, satellite value, open-access and
//! planner fleet sizes, and the Kessler threshold.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::{bisect, find_root, scan_golden_max, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimpleParams {
    pub pi: f64,
    pub r: f64,
    #[serde(rename = "F")]
    pub cost: f64,
    pub x_bar: f64,
    pub sigma: f64,
    #[serde(default)]
    pub eta: f64,
}

impl SimpleParams {
    /// Left panel of the classic two-panel comparison (`sigma = 1.25`).
    pub const PANEL_A: SimpleParams = SimpleParams {
        pi: 1.0,
        r: 0.05,
        cost: 0.35,
        x_bar: 5.0,
        sigma: 1.25,
        eta: 0.0,
    };

    /// Right panel (`sigma = 20`).
    pub const PANEL_B: SimpleParams = SimpleParams { sigma: 20.0, ..Self::PANEL_A };

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("pi", self.pi), ("F", self.cost), ("x_bar", self.x_bar), ("r", self.r)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::validation(format!("{name} must be positive, got {v:e}")));
            }
        }
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(Error::validation(format!("sigma must be >= 0, got {:e}", self.sigma)));
        }
        if !(self.eta > -1.0 && self.eta <= 0.0) {
            return Err(Error::domain(format!("eta must lie in (-1, 0], got {:e}", self.eta)));
        }
        Ok(())
    }

    fn discount(&self) -> f64 {
        1.0 / (1.0 + self.r)
    }
}

/// Probability that a satellite survives when `x` objects are in orbit.
pub trait Survival: Sync {
    fn q(&self, x: f64) -> f64;

    /// Object count at which the orbit becomes unusable.
    fn x_bar(&self) -> f64;

    /// Derivative, one-sided from below.
    fn dq(&self, x: f64) -> f64 {
        let h = 1e-7 * self.x_bar().max(1.0);
        let a = (x - h).max(0.0);
        (self.q(x) - self.q(a)) / (x - a).max(f64::MIN_POSITIVE)
    }

    /// Closed-form Kessler threshold for net fragmentation `sigma`, if known.
    fn closed_form_threshold(&self, _sigma: f64) -> Option<f64> {
        None
    }
}

/// `q(x) = max(0, 1 - x / x_bar)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearSurvival {
    pub x_bar: f64,
}

impl Survival for LinearSurvival {
    fn q(&self, x: f64) -> f64 {
        (1.0 - x / self.x_bar).max(0.0)
    }

    fn x_bar(&self) -> f64 {
        self.x_bar
    }

    fn dq(&self, x: f64) -> f64 {
        if x <= self.x_bar {
            -1.0 / self.x_bar
        } else {
            0.0
        }
    }

    fn closed_form_threshold(&self, sigma: f64) -> Option<f64> {
        // (sqrt(1+4s) - 1) / (2s), rationalised so that small s is exact
        Some(2.0 * self.x_bar / (1.0 + (1.0 + 4.0 * sigma).sqrt()))
    }
}

/// A user-supplied survival function.
pub struct CustomSurvival<F: Fn(f64) -> f64 + Sync> {
    f: F,
    x_bar: f64,
}

impl<F: Fn(f64) -> f64 + Sync> CustomSurvival<F> {
    /// Accepts `f` only if it passes [`probe_survival`].
    pub fn new(f: F, x_bar: f64) -> Result<Self> {
        let s = CustomSurvival { f, x_bar };
        probe_survival(&s)?;
        Ok(s)
    }
}

impl<F: Fn(f64) -> f64 + Sync> Survival for CustomSurvival<F> {
    fn q(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    fn x_bar(&self) -> f64 {
        self.x_bar
    }
}

/// Checks `q(0) = 1`, `q(x_bar) = 0` and monotonicity on 1001 samples of
/// `[0, 2 x_bar]`.
pub fn probe_survival(q: &dyn Survival) -> Result<()> {
    let xb = q.x_bar();
    if !(xb > 0.0) {
        return Err(Error::validation("x_bar must be positive"));
    }
    if (q.q(0.0) - 1.0).abs() > 1e-12 {
        return Err(Error::validation(format!("q(0) = {} != 1", q.q(0.0))));
    }
    if q.q(xb).abs() > 1e-12 {
        return Err(Error::validation(format!("q(x_bar) = {} != 0", q.q(xb))));
    }
    let mut prev = 1.0;
    for i in 0..=1000 {
        let v = q.q(2.0 * xb * i as f64 / 1000.0);
        if !(0.0..=1.0).contains(&v) || v > prev + 1e-12 {
            return Err(Error::validation("q must be a nonincreasing probability"));
        }
        prev = v;
    }
    Ok(())
}

/// Objects in orbit next period when `s` are launched now.
pub fn g_next(s: f64, p: &SimpleParams, q: &dyn Survival) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::domain(format!("S must be >= 0, got {s:e}")));
    }
    Ok(g(s, p, q))
}

fn g(s: f64, p: &SimpleParams, q: &dyn Survival) -> f64 {
    s + p.sigma * (1.0 - q.q(s)) * s
}

fn g_prime(s: f64, p: &SimpleParams, q: &dyn Survival) -> f64 {
    1.0 + p.sigma * (1.0 - q.q(s)) - p.sigma * s * q.dq(s)
}

/// Net present value of launching one satellite into a fleet of `s`.
///
/// ```
/// use orbit_commons::simple_model::{satellite_value, LinearSurvival, SimpleParams};
/// let p = SimpleParams::PANEL_A;
/// let v0 = satellite_value(0.0, &p, &LinearSurvival { x_bar: p.x_bar })?;
/// assert!((v0 - (-0.35 + 1.0 / 1.05 + 1.0 / 1.05f64.powi(2))).abs() < 1e-15);
/// # Ok::<(), orbit_commons::Error>(())
/// ```
pub fn satellite_value(s: f64, p: &SimpleParams, q: &dyn Survival) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::domain(format!("S must be >= 0, got {s:e}")));
    }
    Ok(value(s, p, q))
}

fn value(s: f64, p: &SimpleParams, q: &dyn Survival) -> f64 {
    let b = p.discount();
    let qs = q.q(s);
    -p.cost + p.pi * b * qs + p.pi * b * b * qs * q.q(g(s, p, q))
}

fn value_prime(s: f64, p: &SimpleParams, q: &dyn Survival) -> f64 {
    let b = p.discount();
    let gs = g(s, p, q);
    let dqs = q.dq(s);
    p.pi * b * dqs + p.pi * b * b * (dqs * q.q(gs) + q.q(s) * q.dq(gs) * g_prime(s, p, q))
}

/// External cost of the marginal satellite.
pub fn external_cost(s: f64, p: &SimpleParams, q: &dyn Survival) -> f64 {
    let b = p.discount();
    let gs = g(s, p, q);
    -p.pi * b * (q.dq(s) * (1.0 + b * q.q(gs)) + b * q.q(s) * q.dq(gs) * g_prime(s, p, q))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OpenAccessLaunch {
    pub s_hat: f64,
    /// `V(x_bar) > 0`, so the fleet fills the orbit.
    pub saturated: bool,
}

fn entry_tolerance(p: &SimpleParams) -> f64 {
    64.0 * f64::EPSILON * p.cost.max(p.pi)
}

/// Zero-profit fleet size.
pub fn open_access_launch(p: &SimpleParams, q: &dyn Survival) -> Result<OpenAccessLaunch> {
    p.validate()?;
    let v0 = value(0.0, p, q);
    if v0 < -entry_tolerance(p) {
        return Err(Error::NoPositiveLaunch(format!(
            "entry condition fails: V(0) = {v0:e} < 0"
        )));
    }
    if v0 <= entry_tolerance(p) {
        return Ok(OpenAccessLaunch { s_hat: 0.0, saturated: false });
    }
    let xb = q.x_bar();
    if value(xb, p, q) > 0.0 {
        return Ok(OpenAccessLaunch { s_hat: xb, saturated: true });
    }
    let root = find_root(|s| value(s, p, q), 0.0, xb, Tolerance::default())?;
    Ok(OpenAccessLaunch { s_hat: root.x, saturated: false })
}

/// Fleet size maximising `S V(S)`.
///
/// Roots of `V + S V'` are located on a fine scan and compared with the
/// endpoints; the derivative jumps where `g(S)` crosses `x_bar`, so
/// sign changes are refined by bisection.
pub fn planner_launch(p: &SimpleParams, q: &dyn Survival) -> Result<f64> {
    p.validate()?;
    let xb = q.x_bar();
    let obj = |s: f64| s * value(s, p, q);
    let foc = |s: f64| value(s, p, q) + s * value_prime(s, p, q);
    let n = 4000;
    let mut best = (0.0, 0.0);
    let mut consider = |s: f64| {
        let v = obj(s);
        if v > best.1 {
            best = (s, v);
        }
    };
    consider(xb);
    let mut prev = foc(0.0);
    for i in 1..=n {
        let s = xb * i as f64 / n as f64;
        let cur = foc(s);
        if prev > 0.0 && cur <= 0.0 {
            let a = xb * (i - 1) as f64 / n as f64;
            consider(bisect(foc, a, s, 1e-14 * xb)?);
        }
        prev = cur;
    }
    if best.1 <= 0.0 {
        // no interior optimum with positive value; fall back to a search
        let (s, v) = scan_golden_max(obj, 0.0, xb, 64, 1e-12 * xb);
        if v > 0.0 {
            return Ok(s);
        }
        return Ok(0.0);
    }
    Ok(best.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KesslerThreshold {
    pub s_k: f64,
    /// `sigma = 0`: no finite interior threshold, `s_k` is `x_bar`.
    pub degenerate: bool,
}

/// Fleet size whose debris next period exactly fills the orbit.
pub fn kessler_threshold(p: &SimpleParams, q: &dyn Survival) -> Result<KesslerThreshold> {
    p.validate()?;
    if p.sigma == 0.0 {
        return Ok(KesslerThreshold { s_k: q.x_bar(), degenerate: true });
    }
    let s_k = match q.closed_form_threshold(p.sigma) {
        Some(s) => s,
        None => kessler_threshold_numeric(p, q)?,
    };
    Ok(KesslerThreshold { s_k, degenerate: false })
}

/// Root of `g(S) = x_bar` regardless of any closed form.
pub fn kessler_threshold_numeric(p: &SimpleParams, q: &dyn Survival) -> Result<f64> {
    let xb = q.x_bar();
    let tol = Tolerance { f_abs: 1e-13 * xb, ..Tolerance::default() };
    Ok(find_root(|s| g(s, p, q) - xb, 0.0, xb, tol)?.x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KesslerConditions {
    pub oa_kessler: bool,
    pub planner_kessler: bool,
    /// Largest launch cost at which open access crosses the threshold.
    pub oa_bound: f64,
    /// Same for the planner.
    pub planner_bound: f64,
}

/// Whether each regime pushes the orbit past the Kessler threshold.
pub fn kessler_conditions(p: &SimpleParams, q: &dyn Survival) -> Result<KesslerConditions> {
    p.validate()?;
    if p.sigma <= 0.0 {
        return Err(Error::domain("Kessler conditions need sigma > 0"));
    }
    let b = p.discount();
    let (oa_bound, planner_bound) = if q.closed_form_threshold(p.sigma).is_some() {
        let root = (1.0 + 4.0 * p.sigma).sqrt();
        (
            p.pi * b * (1.0 + 2.0 * p.sigma - root) / (2.0 * p.sigma),
            p.pi * b * (1.0 + p.sigma - root) / p.sigma,
        )
    } else {
        let s_k = kessler_threshold(p, q)?.s_k;
        (p.pi * b * q.q(s_k), p.pi * b * (q.q(s_k) + s_k * q.dq(s_k)))
    };
    Ok(KesslerConditions {
        oa_kessler: p.cost <= oa_bound,
        planner_kessler: p.cost <= planner_bound,
        oa_bound,
        planner_bound,
    })
}

/// Planner stationary point on the Kessler branch `[S_K, x_bar]`, where the
/// long-run survival term has vanished; `None` when the first-order condition
/// has no root there.
///
/// This is the planner outcome the threshold comparison refers to. It need
/// not be the global maximiser of `S V(S)`: with a large `sigma` the fleet
/// value can have a higher peak below `S_K`.
pub fn planner_kessler_branch(p: &SimpleParams, q: &dyn Survival) -> Result<Option<f64>> {
    p.validate()?;
    if p.sigma <= 0.0 {
        return Ok(None);
    }
    let s_k = kessler_threshold(p, q)?.s_k;
    let xb = q.x_bar();
    let b = p.discount();
    let foc = |s: f64| -p.cost + p.pi * b * (q.q(s) + s * q.dq(s));
    if foc(s_k) >= 0.0 {
        if foc(xb) >= 0.0 {
            return Ok(Some(xb));
        }
        return Ok(Some(bisect(foc, s_k, xb, 1e-14 * xb)?));
    }
    let n = 2000;
    let mut prev = foc(s_k);
    for i in 1..=n {
        let s = s_k + (xb - s_k) * i as f64 / n as f64;
        let cur = foc(s);
        if prev < 0.0 && cur >= 0.0 {
            let a = s_k + (xb - s_k) * (i - 1) as f64 / n as f64;
            return Ok(Some(bisect(foc, a, s, 1e-14 * xb)?));
        }
        prev = cur;
    }
    Ok(None)
}

/// The same classification obtained by root-finding: the open-access fleet
/// against `S_K`, and whether the planner's first-order condition has a root
/// on the Kessler branch.
pub fn kessler_by_launch(p: &SimpleParams, q: &dyn Survival) -> Result<(bool, bool)> {
    let s_k = kessler_threshold(p, q)?.s_k;
    let s_hat = open_access_launch(p, q)?.s_hat;
    Ok((s_hat >= s_k, planner_kessler_branch(p, q)?.is_some()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DemandReport {
    /// Fleet revenue `S q(S)` rises on `[0, monotone_upper]`.
    pub monotone_upper: f64,
    pub oa_kessler_eta: bool,
    pub comparison_holds: bool,
}

/// Kessler conditions when the per-satellite return falls with fleet size
/// at elasticity `eta`.
pub fn downward_demand_extension(p: &SimpleParams, q: &dyn Survival) -> Result<DemandReport> {
    if !(p.eta > -1.0 && p.eta <= 0.0) {
        return Err(Error::domain(format!("eta must lie in (-1, 0], got {:e}", p.eta)));
    }
    p.validate()?;
    let xb = q.x_bar();
    let dz = |s: f64| q.dq(s) * s + q.q(s);
    let monotone_upper = {
        let n = 2000;
        let mut upper = xb;
        for i in 1..=n {
            let s = xb * i as f64 / n as f64;
            if dz(s) < 0.0 {
                upper = bisect(dz, xb * (i - 1) as f64 / n as f64, s, 1e-14 * xb)?;
                break;
            }
        }
        upper
    };
    let s_k = kessler_threshold(p, q)?.s_k;
    let qk = q.q(s_k);
    let eta = p.eta;
    let oa_rhs = p.pi * (1.0 + eta) / (1.0 + p.r) * s_k.powf(eta) * qk.powf(1.0 + eta);
    Ok(DemandReport {
        monotone_upper,
        oa_kessler_eta: p.cost <= oa_rhs,
        comparison_holds: (s_k * qk).powf(eta) > 1.0 / (1.0 + eta),
    })
}

/// One row of the value-curve table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    #[serde(rename = "S")]
    pub s: f64,
    #[serde(rename = "V")]
    pub v: f64,
    #[serde(rename = "SV")]
    pub sv: f64,
    #[serde(rename = "EC")]
    pub ec: f64,
    /// Increments where the survival kink makes the external cost jump.
    pub segment: u32,
}

/// `n + 1` evenly spaced samples of `V`, `S V` and the external cost on
/// `[0, x_bar]`.
pub fn value_curve(p: &SimpleParams, q: &dyn Survival, n: usize) -> Result<Vec<CurvePoint>> {
    p.validate()?;
    let xb = q.x_bar();
    let s_k = if p.sigma > 0.0 { Some(kessler_threshold(p, q)?.s_k) } else { None };
    let mut segment = 0;
    let mut out = Vec::with_capacity(n + 1);
    let mut prev_s = 0.0;
    for i in 0..=n {
        let s = xb * i as f64 / n as f64;
        if let Some(k) = s_k {
            if i > 0 && prev_s <= k && s > k {
                segment += 1;
            }
        }
        let v = value(s, p, q);
        out.push(CurvePoint { s, v, sv: s * v, ec: external_cost(s, p, q), segment });
        prev_s = s;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lin(p: &SimpleParams) -> LinearSurvival {
        LinearSurvival { x_bar: p.x_bar }
    }

    #[test]
    fn value_derivative_matches_difference() {
        let p = SimpleParams::PANEL_A;
        let q = lin(&p);
        for s in [0.3, 1.0, 2.0, 2.5, 4.0] {
            let h = 1e-6;
            let fd = (value(s + h, &p, &q) - value(s - h, &p, &q)) / (2.0 * h);
            assert!((fd - value_prime(s, &p, &q)).abs() < 1e-6, "s={s}");
        }
    }

    #[test]
    fn external_cost_is_positive() {
        let p = SimpleParams::PANEL_B;
        let q = lin(&p);
        for pt in value_curve(&p, &q, 200).unwrap() {
            if pt.s < p.x_bar {
                assert!(pt.ec > 0.0);
            }
        }
    }

    #[test]
    fn curve_marks_the_kink() {
        let p = SimpleParams::PANEL_A;
        let c = value_curve(&p, &lin(&p), 100).unwrap();
        assert_eq!(c.first().unwrap().segment, 0);
        assert_eq!(c.last().unwrap().segment, 1);
    }

    #[test]
    fn custom_survival_probe() {
        assert!(CustomSurvival::new(|x: f64| (1.0 - x / 2.0).max(0.0).powi(2), 2.0).is_ok());
        assert!(CustomSurvival::new(|x: f64| 1.0 + x, 2.0).is_err());
    }
}
