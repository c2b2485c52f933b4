use approx::assert_relative_eq;
use nalgebra::{DMatrix, DVector};
use orbit_commons::calibration::*;
use orbit_commons::dynamics::PhysicalParams;
use orbit_commons::Error;
use std::path::Path;

#[test]
fn fixtures_hold_the_tables() {
    let e = EconPanel::fixture();
    assert_eq!(e.rows.len(), 14);
    assert_eq!((e.rows[0].year, e.rows[0].revenues, e.rows[0].costs), (2006, 13.8, 80.84));
    let t = TrafficPanel::fixture();
    let r = t.row(2020).unwrap();
    assert_eq!((r.launched, r.active, r.debris, r.collision_prob), (9, 158, 626, 8.97e-6));
}

#[test]
fn missing_year_is_rejected() {
    let text: String = TRAFFIC_FIXTURE.lines().filter(|l| !l.starts_with("2012")).map(|l| format!("{l}\n")).collect();
    let err = TrafficPanel::from_csv(&text, Path::new("traffic.csv")).unwrap_err();
    assert!(matches!(err, Error::Validation(_)), "{err}");
    let swapped = ECON_FIXTURE.replace("year", "yr");
    assert!(matches!(EconPanel::from_csv(&swapped, Path::new("econ.csv")), Err(Error::Parse { .. })));
}

#[test]
fn load_panels_from_disk() {
    let dir = tempfile::tempdir().unwrap();
    let (e, t) = (dir.path().join("econ.csv"), dir.path().join("traffic.csv"));
    std::fs::write(&e, ECON_FIXTURE).unwrap();
    std::fs::write(&t, TRAFFIC_FIXTURE).unwrap();
    let (ep, tp) = load_panels(&e, &t).unwrap();
    assert_eq!(ep, EconPanel::fixture());
    assert_eq!(tp, TrafficPanel::fixture());
    assert!(matches!(load_panels(&dir.path().join("nope.csv"), &t), Err(Error::Io { .. })));
}

#[test]
fn kinetic_gas_scaling() {
    let g = ObjectGeometry::in_shell(500.0, 20.0, 600.0, 650.0).unwrap();
    let a = kinetic_gas_alpha(&g).unwrap();
    assert!(a > 2.73e-7 / 3.0 && a < 2.73e-7 * 3.0, "{a:e}");
    let twice = kinetic_gas_alpha(&ObjectGeometry { area: 2.0 * g.area, ..g }).unwrap();
    assert_relative_eq!(twice, 2.0 * a, max_relative = 1e-14);
    let fast = kinetic_gas_alpha(&ObjectGeometry { speed: 3.0 * g.speed, ..g }).unwrap();
    assert_relative_eq!(fast, 3.0 * a, max_relative = 1e-14);
    let huge = kinetic_gas_alpha(&ObjectGeometry { shell_volume: 1e300, ..g }).unwrap();
    assert!(huge < 1e-280);
    assert!(kinetic_gas_alpha(&ObjectGeometry { shell_volume: 0.0, ..g }).is_err());
}

#[test]
fn breakup_counts() {
    assert_relative_eq!(breakup_fragments(1.0).unwrap(), 10f64.powf(0.71), max_relative = 1e-14);
    assert_relative_eq!(breakup_fragments(1.0).unwrap(), 5.128, epsilon = 1e-3);
    assert_relative_eq!(breakup_fragments(556.0).unwrap(), 587.0, max_relative = 2e-3);
    assert_relative_eq!(breakup_fragments(160.0).unwrap(), 8.0 * breakup_fragments(10.0).unwrap(), max_relative = 1e-14);
    assert!(breakup_fragments(0.0).is_err());
}

#[test]
fn cost_growth_on_fixture() {
    let g = cost_growth_regression(&EconPanel::fixture()).unwrap();
    assert!((g.eta1_f - 0.025).abs() <= 0.002, "{}", g.eta1_f);
    assert!((g.std_error - 0.009).abs() <= 0.003, "{}", g.std_error);
    assert_relative_eq!(g.growth_rate, g.eta1_f.exp() - 1.0);
}

#[test]
fn cost_growth_synthetic() {
    let flat: Vec<(f64, f64)> = (0..14).map(|t| (t as f64, 50.0)).collect();
    assert!(cost_growth_from(&flat).unwrap().eta1_f.abs() < 1e-12);
    let exp: Vec<(f64, f64)> = (0..14).map(|t| (2006.0 + t as f64, 80.0 * (0.03 * t as f64).exp())).collect();
    assert!((cost_growth_from(&exp).unwrap().eta1_f - 0.03).abs() < 1e-10);
}

#[test]
fn adjustment_on_fixture() {
    let a = adjustment_regression(&EconPanel::fixture(), &TrafficPanel::fixture()).unwrap();
    assert_eq!(a.n, 13);
    for (got, want) in [(a.gamma0, 3.35e-6), (a.gamma1, 2.22e-5), (a.gamma2, -2.67e-6)] {
        assert!(((got - want) / want).abs() <= 0.1, "{got:e} vs {want:e}");
    }
    assert!(a.gamma1 > 0.0 && a.gamma2 < 0.0);
}

#[test]
fn adjustment_recovers_synthetic_gammas() {
    let (g0, g1, g2) = (3e-6, 2e-5, -2.5e-6);
    let obs: Vec<(f64, f64, f64)> = (0..13)
        .map(|k| {
            let a = 0.15 + 0.01 * k as f64 + 0.003 * ((k * k) % 5) as f64;
            let b = 0.9 + 0.02 * ((k * 3) % 7) as f64;
            (g0 + g1 * a + g2 * b, a, b)
        })
        .collect();
    let fit = adjustment_from(&obs).unwrap();
    assert!((fit.gamma0 - g0).abs() < 1e-10);
    assert!((fit.gamma1 - g1).abs() < 1e-10);
    assert!((fit.gamma2 - g2).abs() < 1e-10);
}

fn synthetic() -> (DMatrix<f64>, DVector<f64>) {
    let x = DMatrix::from_fn(20, 3, |i, j| match j {
        0 => 1.0,
        1 => i as f64 * 0.5,
        _ => ((i * 7) % 11) as f64 - 3.0,
    });
    let y = DVector::from_fn(20, |i, _| 2.0 - 0.3 * i as f64 * 0.5 + 0.8 * (((i * 7) % 11) as f64 - 3.0) + 0.1 * ((i % 3) as f64 - 1.0));
    (x, y)
}

#[test]
fn ols_matches_normal_equations() {
    let (x, y) = synthetic();
    let fit = ols(&x, &y).unwrap();
    let xtx = x.transpose() * &x;
    let b = xtx.clone().try_inverse().unwrap() * x.transpose() * &y;
    for j in 0..3 {
        assert!((fit.coef[j] - b[j]).abs() < 1e-10);
    }
    let s2 = fit.residual_ss / (20.0 - 3.0);
    let inv = xtx.try_inverse().unwrap();
    for j in 0..3 {
        assert_relative_eq!(fit.std_err[j], (s2 * inv[(j, j)]).sqrt(), max_relative = 1e-9);
    }
}

#[test]
fn ridge_limits() {
    let (x, y) = synthetic();
    let pen = [false, true, true];
    let zero = ridge(&x, &y, &pen, 0.0).unwrap();
    let o = ols(&x, &y).unwrap();
    for j in 0..3 {
        assert!((zero[j] - o.coef[j]).abs() < 1e-10);
    }
    let big = ridge(&x, &y, &pen, 1e14).unwrap();
    assert!(big[1].abs() < 1e-8 && big[2].abs() < 1e-8);
    assert_relative_eq!(big[0], y.mean(), max_relative = 1e-6);

    let mut last = f64::INFINITY;
    for lambda in default_penalties() {
        let c = ridge(&x, &y, &pen, lambda).unwrap();
        let norm = c[1].hypot(c[2]);
        assert!(norm <= last + 1e-12);
        last = norm;
    }
    assert!(ridge(&x, &y, &pen, -1.0).is_err());
}

#[test]
fn ridge_on_fixture_runs_both_designs() {
    let t = TrafficPanel::fixture();
    let lit = ridge_fragmentation(&t, &RidgeSpec::default()).unwrap();
    assert!(lit.penalty > 0.0 && lit.cv_error.is_finite());
    let spec = RidgeSpec { regressors: RidgeRegressors::CountWeighted, ..RidgeSpec::default() };
    let cw = ridge_fragmentation(&t, &spec).unwrap();
    let (x, _) = ridge_design(&t, &spec);
    assert_eq!(x.shape(), (14, 4));
    assert_relative_eq!(cw.beta_dd, cw.rho[2] * spec.betas[2], max_relative = 1e-14);
    assert_eq!("count-weighted".parse::<RidgeRegressors>().unwrap(), RidgeRegressors::CountWeighted);
}

#[test]
fn default_emit_carries_published_values() {
    let c = emit_calibration(&CalibrationInputs::default()).unwrap();
    assert_eq!(c.scenario.phys, PhysicalParams::CALIBRATED);
    assert!(c.provenance.overrides.is_empty() && c.provenance.estimated.is_empty());
    let text = c.to_toml();
    let raw: toml::Value = toml::from_str(&text).unwrap();
    assert_eq!(raw["scenario"]["alpha_ss"].as_float(), Some(2.73e-7));
    assert_eq!(raw["scenario"]["beta_dd"].as_float(), Some(327.0));
    assert_eq!(raw["scenario"]["gamma1"].as_float(), Some(2.22e-5));
    let back = CalibratedParams::from_toml(&text).unwrap();
    assert_eq!(back, c);
}

#[test]
fn overrides_are_recorded() {
    let inputs = CalibrationInputs { overrides: vec![("alpha_ss".into(), 3e-7)], ..CalibrationInputs::default() };
    let c = emit_calibration(&inputs).unwrap();
    assert_eq!(c.scenario.phys.alpha_ss, 3e-7);
    assert_eq!(c.provenance.overrides, vec!["alpha_ss".to_string()]);
    let bad = CalibrationInputs { overrides: vec![("nonsense".into(), 1.0)], ..CalibrationInputs::default() };
    assert!(emit_calibration(&bad).is_err());

    // the literal design shrinks beta_dd below zero, which no scenario accepts
    assert!(emit_calibration(&CalibrationInputs { use_estimates: true, ..CalibrationInputs::default() }).is_err());
    let ridge = RidgeSpec { regressors: RidgeRegressors::CountWeighted, launch_regressor: true, ..RidgeSpec::default() };
    let est = emit_calibration(&CalibrationInputs { use_estimates: true, ridge, ..CalibrationInputs::default() }).unwrap();
    assert_eq!(est.scenario.econ.gamma1, est.adjustment.gamma1);
    assert_eq!(est.provenance.estimated.len(), 8);
}

#[test]
fn file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cal.toml");
    let c = emit_calibration(&CalibrationInputs::default()).unwrap();
    std::fs::write(&path, c.to_toml()).unwrap();
    assert_eq!(CalibratedParams::load(&path).unwrap(), c);
}
