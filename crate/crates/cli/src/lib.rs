//! Command-line driver: argument resolution, output writing and run manifests.
//!
//! Every command is first resolved into a [`RunConfig`] with all defaults
//! filled in. That config is what the manifest stores, so `replay` needs no
//! knowledge of flag defaults.

pub mod args;
pub mod commands;
pub mod format;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Parser;
use ordstat::evaluation::{DEFAULT_OUTER_EXACT, DEFAULT_OUTER_MC};
use ordstat::{EstimatorTag, IntegratorKind};
use serde::{Deserialize, Serialize};

use crate::args::{
    parse_list, parse_sigma_grid, Cli, Command, IntegratorArg, OutputArgs, SimulationArgs,
};
use crate::commands::{
    BoundsConfig, DeltaConfig, RegularityConfig, RunConfig, RunOutput, SweepConfig, VarRatioConfig,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERIC: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// The default estimator set drops MLE above this noise level.
pub const DEFAULT_MLE_SIGMA_CAP: f64 = 2.0;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] ordstat::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("manifest {path}: {message}")]
    Manifest { path: PathBuf, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use ordstat::Error as E;
        match self {
            CliError::Usage(_) | CliError::Manifest { .. } => EXIT_USAGE,
            CliError::Core(E::Config(_) | E::Domain(_)) => EXIT_USAGE,
            CliError::Core(_) | CliError::Io { .. } => EXIT_NUMERIC,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub version: String,
    pub duration_seconds: f64,
}

impl RunManifest {
    fn new(run: &RunConfig, duration_seconds: f64) -> Self {
        Self {
            command: run.name().to_string(),
            config: run.config_json(),
            seed: run.seed(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            duration_seconds,
        }
    }

    /// Rebuilds the resolved configuration the manifest was written from.
    pub fn run_config(&self) -> serde_json::Result<RunConfig> {
        serde_json::from_value(serde_json::json!({
            "command": self.command,
            "config": self.config,
        }))
    }
}

fn resolve_sim(sim: &SimulationArgs) -> Result<(Vec<f64>, usize, IntegratorKind), CliError> {
    let sigma = parse_sigma_grid(&sim.sigma).map_err(CliError::Usage)?;
    let mc = IntegratorKind::MonteCarlo { samples: sim.inner };
    let integrator = match sim.integrator {
        IntegratorArg::Exact => IntegratorKind::ExactN2,
        IntegratorArg::Mc => mc,
        IntegratorArg::Auto if sim.n == 2 => IntegratorKind::ExactN2,
        IntegratorArg::Auto => mc,
    };
    let outer = sim.outer.unwrap_or(match integrator {
        IntegratorKind::ExactN2 => DEFAULT_OUTER_EXACT,
        IntegratorKind::MonteCarlo { .. } => DEFAULT_OUTER_MC,
    });
    Ok((sigma, outer, integrator))
}

/// Fills in every default so the result fully determines the computation.
pub fn resolve(command: &Command) -> Result<RunConfig, CliError> {
    Ok(match command {
        Command::Sweep(a) => {
            let (sigma, outer, integrator) = resolve_sim(&a.sim)?;
            let (estimators, mle_sigma_cap) = match &a.estimators {
                Some(list) => (
                    parse_list::<EstimatorTag>(list, "estimator").map_err(CliError::Usage)?,
                    None,
                ),
                None => (
                    vec![
                        EstimatorTag::Optimal,
                        EstimatorTag::FHat,
                        EstimatorTag::HHat,
                        EstimatorTag::Mle,
                    ],
                    Some(DEFAULT_MLE_SIGMA_CAP),
                ),
            };
            RunConfig::Sweep(SweepConfig {
                n: a.sim.n,
                sigma,
                outer,
                integrator,
                seed: a.sim.seed,
                chunks: a.sim.chunks,
                estimators,
                mle_sigma_cap,
            })
        }
        Command::Delta(a) => {
            let (sigma, outer, integrator) = resolve_sim(&a.sim)?;
            RunConfig::Delta(DeltaConfig {
                n: a.sim.n,
                sigma,
                outer,
                integrator,
                seed: a.sim.seed,
                chunks: a.sim.chunks,
            })
        }
        Command::Varratio(a) => RunConfig::Varratio(VarRatioConfig { n_max: a.n_max }),
        Command::Bounds(a) => RunConfig::Bounds(BoundsConfig {
            n_max: a.n_max,
            eps: match &a.eps {
                Some(list) => parse_list::<f64>(list, "exponent").map_err(CliError::Usage)?,
                None => Vec::new(),
            },
        }),
        Command::Regularity(a) => RunConfig::Regularity(RegularityConfig {
            outer: a.outer,
            seed: a.seed,
            chunks: a.chunks,
            quadrature: a.quadrature,
            quad_points: a.quad_points,
        }),
        Command::Replay(_) => {
            return Err(CliError::Usage(
                "replay cannot be resolved into a run".into(),
            ))
        }
    })
}

/// Renders the output bytes; JSON reports embed the manifest.
fn render(run: &RunConfig, output: RunOutput, manifest: &RunManifest) -> Vec<u8> {
    match output {
        RunOutput::Csv(table) => {
            let mut buf = Vec::new();
            table.write_to(&mut buf).expect("writing to memory");
            buf
        }
        RunOutput::Json(results) => {
            let report = serde_json::json!({
                "command": run.name(),
                "config": run.config_json(),
                "results": results,
                "manifest": manifest,
            });
            let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
            s.push('\n');
            s.into_bytes()
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn default_manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

/// Runs a resolved config and writes its output and manifest; output goes
/// to `stdout` when no path is given.
pub fn run(run: &RunConfig, output: &OutputArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let start = Instant::now();
    let result = commands::execute(run)?;
    let manifest = RunManifest::new(run, start.elapsed().as_secs_f64());
    let bytes = render(run, result, &manifest);
    match &output.out {
        Some(path) => write_file(path, &bytes)?,
        None => stdout
            .write_all(&bytes)
            .and_then(|()| stdout.flush())
            .map_err(|source| CliError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            })?,
    }
    let manifest_path = output
        .manifest
        .clone()
        .or_else(|| output.out.as_deref().map(default_manifest_path));
    if let Some(path) = manifest_path {
        let mut json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        json.push('\n');
        write_file(&path, json.as_bytes())?;
    }
    Ok(())
}

pub fn read_manifest(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let bad = |message: String| CliError::Manifest {
        path: path.to_path_buf(),
        message,
    };
    let manifest: RunManifest = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
    manifest.run_config().map_err(|e| bad(e.to_string()))
}

pub fn dispatch(cli: Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Replay(a) => {
            let config = read_manifest(&a.manifest)?;
            run(
                &config,
                &OutputArgs {
                    out: a.out.clone(),
                    manifest: None,
                },
                stdout,
            )
        }
        Command::Sweep(a) => run(&resolve(&cli.command)?, &a.output, stdout),
        Command::Delta(a) => run(&resolve(&cli.command)?, &a.output, stdout),
        Command::Varratio(a) => run(&resolve(&cli.command)?, &a.output, stdout),
        Command::Bounds(a) => run(&resolve(&cli.command)?, &a.output, stdout),
        Command::Regularity(a) => run(&resolve(&cli.command)?, &a.output, stdout),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn execute<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    execute_to(args, &mut io::stdout().lock())
}

/// [`execute`] with output that has no `--out` path sent to `stdout`.
pub fn execute_to<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Worker count from the thread-cap variable; unset or 0 means one per core.
pub fn worker_threads(value: Option<&str>) -> Result<usize, CliError> {
    match value {
        None => Ok(0),
        Some(v) => v.trim().parse().map_err(|_| {
            CliError::Usage(format!("{THREADS_VAR}={v:?} is not a nonnegative integer"))
        }),
    }
}

pub const THREADS_VAR: &str = "ORDSTAT_THREADS";
