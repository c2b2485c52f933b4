//! Data panels, kinetic-gas and breakup formulas, and the regressions that
//! turn them into scenario parameters.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dynamics::PhysicalParams;
use crate::error::{Error, Result};
use crate::scenario::{EconParams, Scenario, CALIBRATION_FLEET, CALIBRATION_REVENUE};

/// Revenues and costs (nominal billion USD), 2006-2019.
pub const ECON_FIXTURE: &str = include_str!("../data/econ.csv");
/// Traffic in the 600-650 km shell, 2006-2020.
pub const TRAFFIC_FIXTURE: &str = include_str!("../data/traffic.csv");

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EconRow {
    pub year: i32,
    pub revenues: f64,
    pub costs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrafficRow {
    pub year: i32,
    pub launched: u64,
    pub active: u64,
    pub debris: u64,
    pub collision_prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EconPanel {
    pub rows: Vec<EconRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrafficPanel {
    pub rows: Vec<TrafficRow>,
}

fn parse_rows<T: serde::de::DeserializeOwned>(text: &str, origin: &Path, header: &[&str]) -> Result<Vec<T>> {
    let parse_err = |message: String| Error::Parse { path: origin.into(), message };
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let got: Vec<String> = rdr.headers().map_err(|e| parse_err(e.to_string()))?.iter().map(String::from).collect();
    if got != header {
        return Err(parse_err(format!("expected columns {}, found {}", header.join(","), got.join(","))));
    }
    rdr.deserialize().map(|r| r.map_err(|e| parse_err(e.to_string()))).collect()
}

fn check_years(years: impl Iterator<Item = i32>, first: i32, count: usize, what: &str) -> Result<()> {
    let years: Vec<i32> = years.collect();
    if years.len() != count {
        return Err(Error::validation(format!("{what} needs {count} rows, found {}", years.len())));
    }
    for (k, &y) in years.iter().enumerate() {
        if y != first + k as i32 {
            return Err(Error::validation(format!("{what}: expected year {}, found {y}", first + k as i32)));
        }
    }
    Ok(())
}

impl EconPanel {
    pub const FIRST_YEAR: i32 = 2006;
    pub const ROWS: usize = 14;

    pub fn from_csv(text: &str, origin: &Path) -> Result<Self> {
        let panel = EconPanel { rows: parse_rows(text, origin, &["year", "revenues", "costs"])? };
        panel.validate()?;
        Ok(panel)
    }

    pub fn fixture() -> Self {
        Self::from_csv(ECON_FIXTURE, Path::new("econ.csv")).expect("bundled economic panel is valid")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
        Self::from_csv(&text, path)
    }

    pub fn validate(&self) -> Result<()> {
        check_years(self.rows.iter().map(|r| r.year), Self::FIRST_YEAR, Self::ROWS, "economic panel")?;
        for r in &self.rows {
            if !(r.revenues > 0.0 && r.costs > 0.0) {
                return Err(Error::validation(format!("{}: revenues and costs must be positive", r.year)));
            }
        }
        Ok(())
    }
}

impl TrafficPanel {
    pub const FIRST_YEAR: i32 = 2006;
    pub const ROWS: usize = 15;

    pub fn from_csv(text: &str, origin: &Path) -> Result<Self> {
        let panel = TrafficPanel {
            rows: parse_rows(text, origin, &["year", "launched", "active", "debris", "collision_prob"])?,
        };
        panel.validate()?;
        Ok(panel)
    }

    pub fn fixture() -> Self {
        Self::from_csv(TRAFFIC_FIXTURE, Path::new("traffic.csv")).expect("bundled traffic panel is valid")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
        Self::from_csv(&text, path)
    }

    pub fn validate(&self) -> Result<()> {
        check_years(self.rows.iter().map(|r| r.year), Self::FIRST_YEAR, Self::ROWS, "traffic panel")?;
        for r in &self.rows {
            if !(r.collision_prob > 0.0) {
                return Err(Error::validation(format!("{}: collision probability must be positive", r.year)));
            }
        }
        Ok(())
    }

    pub fn row(&self, year: i32) -> Option<&TrafficRow> {
        self.rows.iter().find(|r| r.year == year)
    }
}

pub fn load_panels(econ: &Path, traffic: &Path) -> Result<(EconPanel, TrafficPanel)> {
    Ok((EconPanel::load(econ)?, TrafficPanel::load(traffic)?))
}

pub const SECONDS_PER_YEAR: f64 = 365.25 * 86_400.0;
/// Standard gravitational parameter of the Earth, m^3/s^2.
pub const EARTH_MU: f64 = 3.986_004_418e14;
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectGeometry {
    /// kg
    pub mass: f64,
    /// m^2
    pub area: f64,
    /// m/s
    pub speed: f64,
    /// m^3
    pub shell_volume: f64,
}

impl ObjectGeometry {
    /// Object of cross-section `area` in the spherical shell between two
    /// altitudes (km), moving at the circular speed of the mid altitude.
    pub fn in_shell(mass: f64, area: f64, lower_km: f64, upper_km: f64) -> Result<Self> {
        if !(upper_km > lower_km && lower_km >= 0.0) {
            return Err(Error::domain("shell altitudes must satisfy 0 <= lower < upper"));
        }
        let (r0, r1) = (EARTH_RADIUS_M + lower_km * 1e3, EARTH_RADIUS_M + upper_km * 1e3);
        Ok(ObjectGeometry {
            mass,
            area,
            speed: (EARTH_MU / (0.5 * (r0 + r1))).sqrt(),
            shell_volume: 4.0 / 3.0 * std::f64::consts::PI * (r1.powi(3) - r0.powi(3)),
        })
    }
}

/// Annual rate `s a / V` at which a randomly moving object is struck.
///
/// ```
/// use orbit_commons::calibration::{kinetic_gas_alpha, ObjectGeometry};
/// let g = ObjectGeometry::in_shell(500.0, 20.0, 600.0, 650.0)?;
/// let alpha = kinetic_gas_alpha(&g)?;
/// assert!(alpha > 2.73e-7 / 3.0 && alpha < 2.73e-7 * 3.0);
/// # Ok::<(), orbit_commons::Error>(())
/// ```
pub fn kinetic_gas_alpha(geom: &ObjectGeometry) -> Result<f64> {
    if !(geom.shell_volume > 0.0) {
        return Err(Error::domain("shell volume must be positive"));
    }
    if !(geom.area > 0.0 && geom.speed > 0.0) {
        return Err(Error::domain("area and speed must be positive"));
    }
    Ok(geom.speed * geom.area / geom.shell_volume * SECONDS_PER_YEAR)
}

/// Fragments from a catastrophic collision of an object of mass `m` kg.
pub fn breakup_fragments(m: f64) -> Result<f64> {
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::domain(format!("mass must be positive, got {m:e}")));
    }
    Ok(0.1 * m.powf(0.75) * 0.1f64.powf(-1.71))
}

/// Least-squares coefficients with classical standard errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OlsFit {
    pub coef: Vec<f64>,
    pub std_err: Vec<f64>,
    pub residual_ss: f64,
    pub n: usize,
}

fn lstsq(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<(DVector<f64>, nalgebra::SVD<f64, nalgebra::Dyn, nalgebra::Dyn>)> {
    let svd = x.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let rank = svd.rank(smax * 1e-12 * x.nrows().max(x.ncols()) as f64);
    if rank < x.ncols() {
        return Err(Error::domain(format!("design matrix has rank {rank} < {} columns", x.ncols())));
    }
    let b = svd.solve(y, 0.0).map_err(|e| Error::domain(e.to_string()))?;
    Ok((b, svd))
}

/// Ordinary least squares of `y` on the columns of `x`.
pub fn ols(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<OlsFit> {
    let (n, k) = x.shape();
    if n <= k {
        return Err(Error::domain(format!("{n} observations for {k} coefficients")));
    }
    let (b, svd) = lstsq(x, y)?;
    let resid = y - x * &b;
    let rss = resid.norm_squared();
    let s2 = rss / (n - k) as f64;
    // (X'X)^{-1} = V S^{-2} V'
    let v = svd.v_t.as_ref().expect("requested").transpose();
    let std_err = (0..k)
        .map(|j| {
            let var: f64 = (0..k).map(|i| (v[(j, i)] / svd.singular_values[i]).powi(2)).sum();
            (s2 * var).sqrt()
        })
        .collect();
    Ok(OlsFit { coef: b.iter().copied().collect(), std_err, residual_ss: rss, n })
}

fn design(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let k = rows.first().map_or(0, Vec::len);
    DMatrix::from_fn(rows.len(), k, |i, j| rows[i][j])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostGrowth {
    /// Slope of log costs on the year.
    pub eta1_f: f64,
    pub std_error: f64,
    /// `exp(eta1_f) - 1`.
    pub growth_rate: f64,
    pub intercept: f64,
}

/// Log-linear trend of total costs.
pub fn cost_growth_regression(panel: &EconPanel) -> Result<CostGrowth> {
    cost_growth_from(&panel.rows.iter().map(|r| (r.year as f64, r.costs)).collect::<Vec<_>>())
}

/// Trend of `ln cost` on time for arbitrary `(time, cost)` pairs.
pub fn cost_growth_from(series: &[(f64, f64)]) -> Result<CostGrowth> {
    if series.iter().any(|&(_, c)| !(c > 0.0)) {
        return Err(Error::domain("costs must be positive"));
    }
    let x = design(&series.iter().map(|&(t, _)| vec![1.0, t]).collect::<Vec<_>>());
    let y = DVector::from_iterator(series.len(), series.iter().map(|&(_, c)| c.ln()));
    let fit = ols(&x, &y)?;
    Ok(CostGrowth {
        eta1_f: fit.coef[1],
        std_error: fit.std_err[1],
        growth_rate: fit.coef[1].exp() - 1.0,
        intercept: fit.coef[0],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Adjustment {
    pub gamma0: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub std_errors: [f64; 3],
    pub n: usize,
}

/// Observation `(L_t, pi_t/F_t, F_{t-1}/F_t)` of the adjustment regression.
pub type AdjustmentObs = (f64, f64, f64);

/// `L_t` on `pi_t/F_t` and `F_{t-1}/F_t` with an intercept, 2007-2019.
pub fn adjustment_regression(econ: &EconPanel, traffic: &TrafficPanel) -> Result<Adjustment> {
    let mut obs = Vec::new();
    for w in econ.rows.windows(2) {
        let (prev, cur) = (w[0], w[1]);
        let l = traffic
            .row(cur.year)
            .ok_or_else(|| Error::validation(format!("traffic panel lacks {}", cur.year)))?
            .collision_prob;
        obs.push((l, cur.revenues / cur.costs, prev.costs / cur.costs));
    }
    adjustment_from(&obs)
}

pub fn adjustment_from(obs: &[AdjustmentObs]) -> Result<Adjustment> {
    let x = design(&obs.iter().map(|&(_, a, b)| vec![1.0, a, b]).collect::<Vec<_>>());
    let y = DVector::from_iterator(obs.len(), obs.iter().map(|o| o.0));
    let fit = ols(&x, &y)?;
    Ok(Adjustment {
        gamma0: fit.coef[0],
        gamma1: fit.coef[1],
        gamma2: fit.coef[2],
        std_errors: [fit.std_err[0], fit.std_err[1], fit.std_err[2]],
        n: obs.len(),
    })
}

/// Penalised least squares `min |y - X b|^2 + lambda sum_{j penalised} b_j^2`,
/// solved as an augmented least-squares problem so that `lambda = 0` is
/// plain OLS.
pub fn ridge(x: &DMatrix<f64>, y: &DVector<f64>, penalized: &[bool], lambda: f64) -> Result<Vec<f64>> {
    let (n, k) = x.shape();
    if penalized.len() != k {
        return Err(Error::validation("one penalty flag per column"));
    }
    if !(lambda >= 0.0) {
        return Err(Error::validation("penalty must be nonnegative"));
    }
    let extra: Vec<usize> = if lambda > 0.0 { (0..k).filter(|&j| penalized[j]).collect() } else { vec![] };
    let mut a = DMatrix::zeros(n + extra.len(), k);
    a.view_mut((0, 0), (n, k)).copy_from(x);
    for (r, &j) in extra.iter().enumerate() {
        a[(n + r, j)] = lambda.sqrt();
    }
    let mut b = DVector::zeros(n + extra.len());
    b.rows_mut(0, n).copy_from(y);
    let (coef, _) = lstsq(&a, &b)?;
    Ok(coef.iter().copied().collect())
}

/// Leave-one-out squared prediction error of [`ridge`].
pub fn loo_cv_error(x: &DMatrix<f64>, y: &DVector<f64>, penalized: &[bool], lambda: f64) -> Result<f64> {
    let n = x.nrows();
    let mut err = 0.0;
    for i in 0..n {
        let keep: Vec<usize> = (0..n).filter(|&r| r != i).collect();
        let xs = x.select_rows(&keep);
        let ys = y.select_rows(&keep);
        let b = DVector::from_vec(ridge(&xs, &ys, penalized, lambda)?);
        err += (y[i] - (x.row(i) * b)[0]).powi(2);
    }
    Ok(err)
}

/// Log-spaced penalties `1e-4 .. 1e4`, ten per decade.
pub fn default_penalties() -> Vec<f64> {
    (0..=80).map(|k| 10f64.powf(-4.0 + 0.1 * k as f64)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RidgeRegressors {
    /// `beta_jk (1 - exp(-alpha_jk k_t))`, with `S_t` in both satellite terms.
    #[default]
    Literal,
    /// The fragment terms of the debris law: collision probabilities times
    /// the stock struck, with debris in the satellite-debris exponent.
    CountWeighted,
}

impl std::str::FromStr for RidgeRegressors {
    type Err = Error;
    fn from_str(text: &str) -> Result<Self> {
        match text {
            "literal" => Ok(RidgeRegressors::Literal),
            "count-weighted" => Ok(RidgeRegressors::CountWeighted),
            other => Err(Error::validation(format!("unknown ridge regressors `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RidgeSpec {
    /// Unregularised `beta_SS, beta_SD, beta_DD`.
    pub betas: [f64; 3],
    pub alphas: [f64; 3],
    pub delta: f64,
    pub regressors: RidgeRegressors,
    /// Use `m X_t` (launches) instead of a constant `m`.
    pub launch_regressor: bool,
    pub penalties: Vec<f64>,
}

impl Default for RidgeSpec {
    fn default() -> Self {
        let p = PhysicalParams::CALIBRATED;
        RidgeSpec {
            betas: [p.beta_ss, p.beta_sd, p.beta_dd],
            alphas: [p.alpha_ss, p.alpha_sd, p.alpha_dd],
            delta: p.delta,
            regressors: RidgeRegressors::default(),
            launch_regressor: false,
            penalties: default_penalties(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RidgeFit {
    pub beta_ss: f64,
    pub beta_sd: f64,
    pub beta_dd: f64,
    pub m: f64,
    pub rho: [f64; 3],
    pub penalty: f64,
    pub cv_error: f64,
}

/// Design matrix and response of the debris-law ridge regression.
pub fn ridge_design(traffic: &TrafficPanel, spec: &RidgeSpec) -> (DMatrix<f64>, DVector<f64>) {
    let rows = &traffic.rows;
    let [a_ss, a_sd, a_dd] = spec.alphas;
    let [b_ss, b_sd, b_dd] = spec.betas;
    let p = |a: f64, k: f64| -(-a * k).exp_m1();
    let mut x = Vec::new();
    let mut y = Vec::new();
    for w in rows.windows(2) {
        let (cur, next) = (w[0], w[1]);
        let (s, d) = (cur.active as f64, cur.debris as f64);
        let mut row = match spec.regressors {
            RidgeRegressors::Literal => vec![b_ss * p(a_ss, s), b_sd * p(a_sd, s), b_dd * p(a_dd, d)],
            RidgeRegressors::CountWeighted => vec![b_ss * p(a_ss, s) * s, b_sd * p(a_sd, d) * s, b_dd * p(a_dd, d) * d],
        };
        row.push(if spec.launch_regressor { cur.launched as f64 } else { 1.0 });
        x.push(row);
        y.push(next.debris as f64 - (1.0 - spec.delta) * d);
    }
    (design(&x), DVector::from_vec(y))
}

/// Fits the regression at `penalty`.
pub fn ridge_fit_at(traffic: &TrafficPanel, spec: &RidgeSpec, penalty: f64) -> Result<RidgeFit> {
    let (x, y) = ridge_design(traffic, spec);
    let pen = [true, true, true, false];
    let c = ridge(&x, &y, &pen, penalty)?;
    let cv_error = loo_cv_error(&x, &y, &pen, penalty)?;
    Ok(RidgeFit {
        beta_ss: c[0] * spec.betas[0],
        beta_sd: c[1] * spec.betas[1],
        beta_dd: c[2] * spec.betas[2],
        m: c[3],
        rho: [c[0], c[1], c[2]],
        penalty,
        cv_error,
    })
}

/// Penalty chosen by leave-one-out cross-validation over `spec.penalties`.
pub fn ridge_fragmentation(traffic: &TrafficPanel, spec: &RidgeSpec) -> Result<RidgeFit> {
    let (x, y) = ridge_design(traffic, spec);
    let pen = [true, true, true, false];
    let mut best: Option<(f64, f64)> = None;
    for &lambda in &spec.penalties {
        let err = match loo_cv_error(&x, &y, &pen, lambda) {
            Ok(e) => e,
            // collinear columns without shrinkage
            Err(Error::Domain(_)) => continue,
            Err(e) => return Err(e),
        };
        if best.map_or(true, |(e, _)| err < e) {
            best = Some((err, lambda));
        }
    }
    let (_, lambda) = best.ok_or_else(|| Error::domain("no penalty in the grid gives a full-rank fit"))?;
    ridge_fit_at(traffic, spec, lambda)
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Provenance {
    pub econ_sha256: String,
    pub traffic_sha256: String,
    /// Parameters set by the user rather than taken from the defaults.
    pub overrides: Vec<String>,
    /// Parameters copied from the estimates rather than the defaults.
    pub estimated: Vec<String>,
    pub created_unix: u64,
}

/// A scenario together with the estimates behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibratedParams {
    pub scenario: Scenario,
    pub cost_growth: CostGrowth,
    pub adjustment: Adjustment,
    pub ridge: RidgeFit,
    pub provenance: Provenance,
}

/// Inputs of [`emit_calibration`].
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationInputs {
    pub econ: EconPanel,
    pub traffic: TrafficPanel,
    pub ridge: RidgeSpec,
    pub growth_a: f64,
    pub eta: f64,
    /// Copy the estimated `b`, gammas and regularised betas into the
    /// scenario instead of the published defaults.
    pub use_estimates: bool,
    /// `(name, value)` overrides of physical or economic fields.
    pub overrides: Vec<(String, f64)>,
}

impl Default for CalibrationInputs {
    fn default() -> Self {
        CalibrationInputs {
            econ: EconPanel::fixture(),
            traffic: TrafficPanel::fixture(),
            ridge: RidgeSpec::default(),
            growth_a: 0.03,
            eta: 0.0,
            use_estimates: false,
            overrides: Vec::new(),
        }
    }
}

fn panel_hash<T: Serialize>(panel: &T) -> String {
    let text = toml_text(panel);
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn toml_text<T: Serialize>(v: &T) -> String {
    #[derive(Serialize)]
    struct Wrap<'a, T: Serialize> {
        panel: &'a T,
    }
    toml::to_string(&Wrap { panel: v }).expect("panels serialise")
}

/// Runs the regressions and assembles the calibrated scenario.
///
/// By default the scenario carries the published parameter values; the
/// estimates are reported alongside. The productivity term is re-pinned for
/// the chosen `eta`.
pub fn emit_calibration(inputs: &CalibrationInputs) -> Result<CalibratedParams> {
    inputs.econ.validate()?;
    inputs.traffic.validate()?;
    let cost_growth = cost_growth_regression(&inputs.econ)?;
    let adjustment = adjustment_regression(&inputs.econ, &inputs.traffic)?;
    let ridge = ridge_fragmentation(&inputs.traffic, &inputs.ridge)?;
    let mut sc = Scenario::calibrated(inputs.growth_a, inputs.eta, PhysicalParams::CALIBRATED.beta_dd);
    sc.econ = EconParams { pi: EconParams::productivity_for(CALIBRATION_REVENUE, inputs.eta, CALIBRATION_FLEET), ..sc.econ };
    let mut estimated = Vec::new();
    if inputs.use_estimates {
        sc.econ.b = cost_growth.eta1_f;
        sc.econ.gamma0 = adjustment.gamma0;
        sc.econ.gamma1 = adjustment.gamma1;
        sc.econ.gamma2 = adjustment.gamma2;
        sc.phys.beta_ss = ridge.beta_ss;
        sc.phys.beta_sd = ridge.beta_sd;
        sc.phys.beta_dd = ridge.beta_dd;
        sc.phys.m = ridge.m;
        estimated = ["b", "gamma0", "gamma1", "gamma2", "beta_ss", "beta_sd", "beta_dd", "m"].map(String::from).to_vec();
    }
    let mut overrides = Vec::new();
    for (name, v) in &inputs.overrides {
        sc.set_param(name, *v)?;
        overrides.push(name.clone());
    }
    sc.econ.validate()?;
    sc.phys.validate()?;
    let created_unix = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    Ok(CalibratedParams {
        scenario: sc,
        cost_growth,
        adjustment,
        ridge,
        provenance: Provenance {
            econ_sha256: panel_hash(&inputs.econ),
            traffic_sha256: panel_hash(&inputs.traffic),
            overrides,
            estimated,
            created_unix,
        },
    })
}

impl CalibratedParams {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("calibration serialises")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let c: CalibratedParams = toml::from_str(text).map_err(|e| Error::validation(e.to_string()))?;
        c.scenario.econ.validate()?;
        c.scenario.phys.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
        Self::from_toml(&text)
    }
}
