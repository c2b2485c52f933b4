//! `orbit`: command-line front end of the orbit-commons library.

mod commands;
mod reproduce;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use orbit_commons::dynamics::{OrbitState, PhysicalParams};
use orbit_commons::phase::SweepAxis;
use orbit_commons::scenario::Scenario;
use orbit_commons::Error;

#[derive(Debug, Parser)]
#[command(name = "orbit", version, about = "Orbital-use economics: open access, planner, Kessler analysis, calibration")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Scenario (or simple-model) config file, or a preset name:
    /// `qualitative`, `calibrated`, `panel-a`, `panel-b`.
    #[arg(long, visible_alias = "scenario", global = true, value_name = "PATH")]
    pub config: Option<String>,
    /// Output directory of the run.
    #[arg(long, global = true, value_name = "DIR", default_value = "orbit-out")]
    pub out: PathBuf,
    /// Worker threads for grid and sweep work.
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,
    /// Seed of randomised sampling.
    #[arg(long, global = true, value_name = "K", default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "beta-dd", global = true, value_name = "X")]
    pub beta_dd: Option<f64>,
    #[arg(long = "beta-sd", global = true, value_name = "X")]
    pub beta_sd: Option<f64>,
    /// Payoff growth rate `a`.
    #[arg(long = "growth-a", visible_alias = "a", global = true, value_name = "X")]
    pub growth_a: Option<f64>,
    /// Occupancy elasticity.
    #[arg(long, global = true, value_name = "X", allow_hyphen_values = true)]
    pub eta: Option<f64>,
    /// Any other parameter, by config key (repeatable).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Three-period model: fleet sizes, Kessler threshold and conditions.
    SimpleModel(commands::SimpleModelArgs),
    /// Open-access trajectory from an initial state.
    OaSimulate(commands::OaSimulateArgs),
    /// Open-access steady states and their stability.
    OaSteadyStates,
    /// Planner value function and launch policy.
    PlannerSolve(commands::PlannerArgs),
    /// Marginal external cost at a state.
    Mec(commands::MecArgs),
    /// Stable basin / Kessler region on a grid.
    Basin(commands::BasinArgs),
    /// Satellite and debris nullclines.
    Nullclines(commands::NullclineArgs),
    /// Kessler-region entry year of the calibrated open-access path.
    KesslerTime(commands::KesslerArgs),
    /// Kessler times over a parameter axis.
    Sweep(commands::SweepArgs),
    /// Regressions and the calibrated parameter file.
    Calibrate(commands::CalibrateArgs),
    /// Runs the reproduction checks and writes a pass/fail report.
    Reproduce(reproduce::ReproduceArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::SimpleModel(_) => "simple-model",
            Command::OaSimulate(_) => "oa-simulate",
            Command::OaSteadyStates => "oa-steady-states",
            Command::PlannerSolve(_) => "planner-solve",
            Command::Mec(_) => "mec",
            Command::Basin(_) => "basin",
            Command::Nullclines(_) => "nullclines",
            Command::KesslerTime(_) => "kessler-time",
            Command::Sweep(_) => "sweep",
            Command::Calibrate(_) => "calibrate",
            Command::Reproduce(_) => "reproduce",
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Lib(Error),
    Io(PathBuf, std::io::Error),
    /// Reproduction checks that did not pass.
    Failed(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Lib(e) if e.is_numerical() || matches!(e, Error::UnboundedEquilibrium(_)) => 4,
            CliError::Lib(_) | CliError::Io(..) => 3,
            CliError::Failed(_) => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Lib(e) if e.is_numerical() || matches!(e, Error::UnboundedEquilibrium(_)) => "numerical",
            CliError::Lib(_) | CliError::Io(..) => "validation",
            CliError::Failed(_) => "check-failed",
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) | CliError::Failed(m) => m.clone(),
            CliError::Lib(e) => e.to_string(),
            CliError::Io(p, e) => format!("{}: {e}", p.display()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// What a subcommand hands back for the manifest and the summary line.
pub struct Outcome {
    pub summary: String,
    pub scenario_hash: Option<String>,
    pub details: Value,
}

#[derive(Serialize)]
struct RunManifest<'a> {
    subcommand: &'a str,
    scenario_hash: Option<&'a str>,
    overrides: serde_json::Map<String, Value>,
    seed: u64,
    tool_version: &'a str,
    duration_s: f64,
    outputs: &'a [String],
    details: &'a Value,
}

/// Run directory handle: creates the directory and tracks written files.
pub struct RunDir {
    pub path: PathBuf,
    pub written: Vec<String>,
}

impl RunDir {
    fn create(path: &Path) -> CliResult<Self> {
        std::fs::create_dir_all(path).map_err(|e| CliError::Io(path.into(), e))?;
        Ok(RunDir { path: path.into(), written: Vec::new() })
    }

    /// Creates `name` and passes the open file to `write`.
    pub fn write_with(
        &mut self,
        name: &str,
        write: impl FnOnce(std::io::BufWriter<std::fs::File>) -> std::io::Result<()>,
    ) -> CliResult<()> {
        let p = self.path.join(name);
        let f = std::fs::File::create(&p).map_err(|e| CliError::Io(p.clone(), e))?;
        write(std::io::BufWriter::new(f)).map_err(|e| CliError::Io(p.clone(), e))?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, v: &T) -> CliResult<()> {
        self.write_with(name, |mut w| {
            serde_json::to_writer_pretty(&mut w, v)?;
            std::io::Write::write_all(&mut w, b"\n")
        })
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> CliResult<()> {
        self.write_with(name, |mut w| std::io::Write::write_all(&mut w, text.as_bytes()))
    }
}

/// Which built-in scenario a subcommand falls back to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Qualitative,
    Calibrated,
}

/// Scenario from `--config` (or the preset) with the override flags applied,
/// and the list of overrides for the manifest.
pub fn resolve_scenario(g: &Global, fallback: Preset) -> CliResult<(Scenario, Vec<(String, f64)>)> {
    let mut sc = match g.config.as_deref() {
        None => preset(fallback),
        Some("qualitative") => preset(Preset::Qualitative),
        Some("calibrated") => preset(Preset::Calibrated),
        Some(path) => Scenario::load(Path::new(path))?,
    };
    let mut applied = Vec::new();
    for (axis, v) in [
        (SweepAxis::BetaDd, g.beta_dd),
        (SweepAxis::BetaSd, g.beta_sd),
        (SweepAxis::GrowthA, g.growth_a),
        (SweepAxis::Eta, g.eta),
    ] {
        if let Some(v) = v {
            sc = axis.apply(&sc, v);
            applied.push((axis.name().to_string(), v));
        }
    }
    for (k, v) in parse_sets(&g.set)? {
        sc.set_param(&k, v)?;
        applied.push((k, v));
    }
    sc.validate()?;
    Ok((sc, applied))
}

fn preset(p: Preset) -> Scenario {
    match p {
        Preset::Qualitative => Scenario::qualitative(),
        Preset::Calibrated => Scenario::calibrated(0.03, 0.0, PhysicalParams::CALIBRATED.beta_dd),
    }
}

pub fn parse_sets(items: &[String]) -> CliResult<Vec<(String, f64)>> {
    items
        .iter()
        .map(|item| {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got `{item}`")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("--set {k}: `{v}` is not a number")))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

/// Parses `S,D`.
pub fn parse_state(text: &str) -> CliResult<OrbitState> {
    Ok(OrbitState::parse_pair(text)?)
}

/// Parses a comma-separated list of numbers.
pub fn parse_list(text: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("`{p}` is not a number"))))
        .collect()
}

fn overrides_json(list: &[(String, f64)]) -> serde_json::Map<String, Value> {
    list.iter().map(|(k, v)| (k.clone(), json!(v))).collect()
}

fn run(cli: &Cli) -> CliResult<()> {
    if let Some(n) = cli.global.jobs {
        if n == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let started = Instant::now();
    let mut dir = RunDir::create(&cli.global.out)?;
    let g = &cli.global;
    let (outcome, overrides) = match &cli.command {
        Command::SimpleModel(a) => commands::simple_model(g, a, &mut dir)?,
        Command::OaSimulate(a) => commands::oa_simulate(g, a, &mut dir)?,
        Command::OaSteadyStates => commands::oa_steady_states(g, &mut dir)?,
        Command::PlannerSolve(a) => commands::planner_solve(g, a, &mut dir)?,
        Command::Mec(a) => commands::mec(g, a, &mut dir)?,
        Command::Basin(a) => commands::basin(g, a, &mut dir)?,
        Command::Nullclines(a) => commands::nullclines(g, a, &mut dir)?,
        Command::KesslerTime(a) => commands::kessler_time(g, a, &mut dir)?,
        Command::Sweep(a) => commands::sweep(g, a, &mut dir)?,
        Command::Calibrate(a) => commands::calibrate(g, a, &mut dir)?,
        Command::Reproduce(a) => reproduce::reproduce(g, a, &mut dir)?,
    };
    let outputs = dir.written.clone();
    let manifest = RunManifest {
        subcommand: cli.command.name(),
        scenario_hash: outcome.scenario_hash.as_deref(),
        overrides: overrides_json(&overrides),
        seed: g.seed,
        tool_version: env!("CARGO_PKG_VERSION"),
        duration_s: started.elapsed().as_secs_f64(),
        outputs: &outputs,
        details: &outcome.details,
    };
    dir.write_json("manifest.json", &manifest)?;
    println!("{}", outcome.summary);
    if let Some(Value::Bool(false)) = outcome.details.get("all_passed") {
        return Err(CliError::Failed("some reproduction checks failed".into()));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            let err = CliError::Usage(e.kind().to_string());
            eprintln!("{}", json!({"error": err.kind(), "message": err.message(), "exit_code": err.exit_code()}));
            return ExitCode::from(err.exit_code());
        }
    };
    let level = match cli.global.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", json!({"error": err.kind(), "message": err.message(), "exit_code": err.exit_code()}));
            ExitCode::from(err.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        super::Cli::command().debug_assert();
    }
}
