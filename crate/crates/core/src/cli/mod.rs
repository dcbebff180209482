//! Command-line scenario runner.
//!
//! `run` executes one scenario and writes `trajectory.csv`, `metrics.csv` and
//! `summary.json` (plus `comm.csv` with `--verbose-net`). `sweep` runs the
//! cross product of swarm sizes and seeds and writes `sweep.csv`.
//!
//! Exit codes: 0 success, 2 invalid scenario or arguments, 3 I/O failure.

mod output;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use rayon::prelude::*;
use serde_json::Value;
use thiserror::Error;

use crate::engine::{Engine, EngineOptions, Termination};
use crate::types::ScenarioConfig;

pub use output::{
    comm_csv, config_hash, metrics_csv, speed_or_zero, sweep_csv, trajectory_csv, RunStatus, RunSummary, SweepRow, COMM_HEADER,
    METRICS_HEADER, SWEEP_HEADER, TRAJECTORY_HEADER,
};

/// Environment variable that replaces the scenario file's seed.
pub const SEED_ENV: &str = "SWARMKIT_SEED";

#[derive(Debug, Parser)]
#[command(name = "swarmkit", version, about = "Run swarm scenarios and write trajectory and metric files")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scenario.
    Run(RunArgs),
    /// Run every (swarm size, seed) combination of a scenario.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    pub file: PathBuf,
    /// Replace a scenario value, e.g. `n_agents=7` or `agents.behavior.p0=2.5`.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Log every delivery attempt and write comm.csv.
    #[arg(long)]
    pub verbose_net: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub file: PathBuf,
    /// Swarm sizes, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub agents: Vec<usize>,
    /// Seeds per size: the scenario seed and the ones following it.
    #[arg(long)]
    pub seeds: u64,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Concurrent runs; defaults to the number of CPUs.
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long = "override", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<crate::types::ConfigError> for CliError {
    fn from(e: crate::types::ConfigError) -> Self {
        match e {
            crate::types::ConfigError::Io(m) => CliError::Io(m),
            other => CliError::Config(other.to_string()),
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Short names accepted by `--override`.
const ALIASES: &[(&str, &str)] = &[
    ("n_agents", "agents.n_agents"),
    ("max_ticks", "run.max_ticks"),
    ("tick_duration", "run.tick_duration"),
    ("p0", "agents.behavior.p0"),
    ("comm_range", "network.comm_range"),
    ("loss", "network.loss"),
];

/// Sets `key` (dotted path or alias) in a scenario document. The value is
/// read as JSON when it parses, otherwise as a string.
pub fn apply_override(doc: &mut Value, assignment: &str) -> Result<(), CliError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override `{assignment}` is not KEY=VALUE")))?;
    let key = key.trim();
    let path = ALIASES.iter().find(|(a, _)| *a == key).map_or(key, |(_, p)| p);
    let value: Value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = doc;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        let last = i + 1 == parts.len();
        node = match node {
            Value::Object(map) => {
                if last {
                    map.insert(part.to_string(), value);
                    return Ok(());
                }
                map.entry(part.to_string()).or_insert_with(|| Value::Object(Default::default()))
            }
            Value::Array(items) => {
                let idx: usize = part.parse().map_err(|_| CliError::Config(format!("`{part}` in `{key}` is not an index")))?;
                let len = items.len();
                let slot = items.get_mut(idx).ok_or_else(|| CliError::Config(format!("index {idx} in `{key}` is past the end ({len})")))?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            _ => return Err(CliError::Config(format!("`{key}` does not name a scenario field"))),
        };
    }
    Err(CliError::Config("empty override key".into()))
}

/// Reads a scenario file, applies overrides and the seed variable, validates.
pub fn load_scenario(path: &Path, overrides: &[String], env_seed: Option<&str>) -> Result<ScenarioConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut doc: Value = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    for o in overrides {
        apply_override(&mut doc, o)?;
    }
    if let Some(s) = env_seed {
        let seed: u64 = s.trim().parse().map_err(|_| CliError::Config(format!("{SEED_ENV}={s} is not a 64-bit seed")))?;
        if let Value::Object(map) = &mut doc {
            map.insert("seed".into(), seed.into());
        }
    }
    ScenarioConfig::from_value(doc).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| io_err(&path, e))
}

/// Runs one scenario and writes its output files into `out`.
pub fn run_command(config: ScenarioConfig, out: &Path, verbose_net: bool) -> Result<RunSummary, CliError> {
    fs::create_dir_all(out).map_err(|e| io_err(out, e))?;
    let mut config = config;
    if verbose_net {
        config.network.verbose = true;
    }
    let engine = Engine::with_options(config.clone(), EngineOptions::default())?;
    let result = engine.run_to_end();
    let summary = RunSummary::new(&config, &result);
    write(out, "trajectory.csv", &trajectory_csv(&result))?;
    write(out, "metrics.csv", &metrics_csv(&result))?;
    if config.network.verbose {
        write(out, "comm.csv", &comm_csv(&result))?;
    }
    write(out, "summary.json", &summary.to_json())?;
    info!("{} after {} ticks", summary.termination, summary.ticks);
    Ok(summary)
}

/// Runs the (size, seed) cross product and writes `sweep.csv` into `out`.
pub fn sweep_command(
    base: &Value,
    sizes: &[usize],
    seeds: u64,
    workers: Option<usize>,
    out: &Path,
) -> Result<Vec<SweepRow>, CliError> {
    if sizes.is_empty() || seeds == 0 {
        return Err(CliError::Config("sweep needs at least one size and one seed".into()));
    }
    let base_seed = base.get("seed").and_then(Value::as_u64).ok_or_else(|| CliError::Config("missing field `seed`".into()))?;
    // fail fast on a broken scenario instead of once per run
    ScenarioConfig::from_value(base.clone())?;
    fs::create_dir_all(out).map_err(|e| io_err(out, e))?;

    let jobs: Vec<(usize, u64)> = sizes.iter().flat_map(|&n| (0..seeds).map(move |s| (n, base_seed.wrapping_add(s)))).collect();
    let one = |&(n, seed): &(usize, u64)| -> SweepRow {
        let mut doc = base.clone();
        doc["seed"] = seed.into();
        doc["agents"]["n_agents"] = n.into();
        let tick_duration = doc["run"]["tick_duration"].as_f64().unwrap_or(0.5);
        let failed = |msg: String| {
            warn!("sweep run n={n} seed={seed} failed: {msg}");
            SweepRow { n_agents: n, seed, status: RunStatus::Error, ticks: None, first_find_tick: None, all_reach_tick: None, tick_duration }
        };
        let config = match ScenarioConfig::from_value(doc) {
            Ok(c) => c,
            Err(e) => return failed(e.to_string()),
        };
        let engine = match Engine::with_options(config, EngineOptions { parallel: Some(false), ..Default::default() }) {
            Ok(e) => e,
            Err(e) => return failed(e.to_string()),
        };
        let result = engine.run_to_end();
        SweepRow {
            n_agents: n,
            seed,
            status: if result.termination == Termination::MaxTicks { RunStatus::Timeout } else { RunStatus::Ok },
            ticks: Some(result.summary.ticks),
            first_find_tick: result.summary.first_find_tick,
            all_reach_tick: result.summary.all_reach_tick,
            tick_duration: result.tick_duration,
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Io(format!("cannot start worker pool: {e}")))?;
    let rows: Vec<SweepRow> = pool.install(|| jobs.par_iter().map(one).collect());
    write(out, "sweep.csv", &sweep_csv(&rows))?;
    Ok(rows)
}

fn execute(cli: Cli, env_seed: Option<&str>) -> Result<(), CliError> {
    match cli.command {
        Command::Run(args) => {
            let config = load_scenario(&args.file, &args.overrides, env_seed)?;
            run_command(config, &args.out, args.verbose_net).map(|_| ())
        }
        Command::Sweep(args) => {
            let config = load_scenario(&args.file, &args.overrides, env_seed)?;
            let doc = serde_json::to_value(&config).expect("configs serialize");
            sweep_command(&doc, &args.agents, args.seeds, args.workers, &args.out).map(|_| ())
        }
    }
}

/// Parses `args` (program name first), runs and returns the exit code.
pub fn main_with<I, T>(args: I, env_seed: Option<&str>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli, env_seed) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
