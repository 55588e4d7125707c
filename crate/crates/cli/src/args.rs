use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "ordstat",
    version,
    about = "Estimate sorted Gaussian signals from sorted noisy observations and tabulate order-statistic bounds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// MSE of each estimator along a noise grid (CSV)
    Sweep(SweepArgs),
    /// Var(sorted X)/n for n = 1..n_max (CSV)
    Varratio(VarRatioArgs),
    /// Upper bound on the excess MSE of the f-hat estimator (CSV)
    Delta(DeltaArgs),
    /// Order-statistic variance and entropy bounds per n (CSV)
    Bounds(BoundsArgs),
    /// Expected score at the origin for n = 2, sigma = 1 (JSON)
    Regularity(RegularityArgs),
    /// Re-run the command recorded in a manifest
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IntegratorArg {
    /// closed form for n = 2, Monte Carlo otherwise
    Auto,
    Exact,
    Mc,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output path; stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Where to write the run manifest; defaults to `<out>.manifest.json` when --out is given
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulationArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Comma list (0.5,1,2) or inclusive range start:step:stop
    #[arg(long, default_value = "0.25,0.5,1,2,5")]
    pub sigma: String,
    /// Outer samples; 100000 for n = 2 and 20000 otherwise when omitted
    #[arg(long)]
    pub outer: Option<usize>,
    /// Posterior draws per observation for the Monte Carlo integrator
    #[arg(long, default_value_t = 4096)]
    pub inner: usize,
    #[arg(long, value_enum, default_value_t = IntegratorArg::Auto)]
    pub integrator: IntegratorArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Equal blocks the outer samples are split into; must divide --outer
    #[arg(long, default_value_t = 1)]
    pub chunks: usize,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub sim: SimulationArgs,
    /// Comma list from optimal, fhat, hhat, mle, identity.
    /// Without it: optimal,fhat,hhat,mle with mle skipped above sigma = 2
    #[arg(long)]
    pub estimators: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct DeltaArgs {
    #[command(flatten)]
    pub sim: SimulationArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VarRatioArgs {
    #[arg(long, default_value_t = 30)]
    pub n_max: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long, default_value_t = 30)]
    pub n_max: usize,
    /// Exponents for the quantile power-sum columns, comma separated
    #[arg(long)]
    pub eps: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct RegularityArgs {
    #[arg(long, default_value_t = 1_000_000)]
    pub outer: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub chunks: usize,
    /// Evaluate the defining integral by nested quadrature instead of sampling
    #[arg(long)]
    pub quadrature: bool,
    #[arg(long, default_value_t = 128)]
    pub quad_points: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// Manifest written by an earlier run
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses "a,b,c" or the inclusive range "start:step:stop".
pub fn parse_sigma_grid(s: &str) -> Result<Vec<f64>, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("invalid number {t:?} in sigma grid"))
    };
    let grid = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("range {s:?} must be start:step:stop"));
        }
        let (start, step, stop) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
        if step.is_nan() || step <= 0.0 || stop < start {
            return Err(format!("range {s:?} needs step > 0 and stop >= start"));
        }
        // tolerance keeps the stop point when (stop - start)/step rounds just below an integer
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        (0..count).map(|k| start + k as f64 * step).collect()
    } else {
        s.split(',').map(num).collect::<Result<Vec<_>, _>>()?
    };
    if grid.is_empty() {
        return Err("sigma grid is empty".into());
    }
    if let Some(bad) = grid.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
        return Err(format!("noise level {bad} must be finite and nonnegative"));
    }
    Ok(grid)
}

pub fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, String> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<T>()
                .map_err(|_| format!("invalid {what} {t:?}"))
        })
        .collect()
}
