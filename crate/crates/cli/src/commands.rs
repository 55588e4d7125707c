//! Fully resolved command configurations and their execution.
//!
//! A resolved config is what the manifest records, so replaying a manifest
//! runs exactly the same computation without consulting any defaults.

use ordstat::bounds::{
    chi_variance, max_entropy_var_bound, quantile_power_sum, quantile_power_sum_bound,
    sorted_entropy, var_approx, var_approx_error_bound, var_ratio_curve, var_sorted,
    DEFAULT_QUAD_POINTS, MAX_ORDER_STAT_N,
};
use ordstat::evaluation::{
    delta_up, delta_up_asymptote, mmse_sweep, regularity_check, regularity_check_quadrature,
    REGULARITY_EXPECTED,
};
use ordstat::{
    Error, EstimatorKind, EstimatorTag, EvalConfig, GaussianModel, IntegratorKind, Result,
};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::format::{fmt_num, CsvTable};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n: usize,
    pub sigma: Vec<f64>,
    pub outer: usize,
    pub integrator: IntegratorKind,
    pub seed: u64,
    pub chunks: usize,
    pub estimators: Vec<EstimatorTag>,
    pub mle_sigma_cap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaConfig {
    pub n: usize,
    pub sigma: Vec<f64>,
    pub outer: usize,
    pub integrator: IntegratorKind,
    pub seed: u64,
    pub chunks: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarRatioConfig {
    pub n_max: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsConfig {
    pub n_max: usize,
    pub eps: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityConfig {
    pub outer: usize,
    pub seed: u64,
    pub chunks: usize,
    pub quadrature: bool,
    pub quad_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", content = "config", rename_all = "lowercase")]
pub enum RunConfig {
    Sweep(SweepConfig),
    Varratio(VarRatioConfig),
    Delta(DeltaConfig),
    Bounds(BoundsConfig),
    Regularity(RegularityConfig),
}

impl RunConfig {
    pub fn name(&self) -> &'static str {
        match self {
            RunConfig::Sweep(_) => "sweep",
            RunConfig::Varratio(_) => "varratio",
            RunConfig::Delta(_) => "delta",
            RunConfig::Bounds(_) => "bounds",
            RunConfig::Regularity(_) => "regularity",
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            RunConfig::Sweep(c) => Some(c.seed),
            RunConfig::Delta(c) => Some(c.seed),
            RunConfig::Regularity(c) => Some(c.seed),
            RunConfig::Varratio(_) | RunConfig::Bounds(_) => None,
        }
    }

    pub fn config_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("configs serialize")["config"].clone()
    }
}

/// Result of a run before the manifest is attached.
#[derive(Debug, Clone, PartialEq)]
pub enum RunOutput {
    Csv(CsvTable),
    /// The `results` object of a JSON report.
    Json(serde_json::Value),
}

pub fn execute(config: &RunConfig) -> Result<RunOutput> {
    match config {
        RunConfig::Sweep(c) => run_sweep(c).map(RunOutput::Csv),
        RunConfig::Varratio(c) => run_varratio(c).map(RunOutput::Csv),
        RunConfig::Delta(c) => run_delta(c).map(RunOutput::Csv),
        RunConfig::Bounds(c) => run_bounds(c).map(RunOutput::Csv),
        RunConfig::Regularity(c) => run_regularity(c).map(RunOutput::Json),
    }
}

/// Columns always present in a sweep, in order.
const SWEEP_ESTIMATORS: [EstimatorTag; 4] = [
    EstimatorTag::Optimal,
    EstimatorTag::FHat,
    EstimatorTag::HHat,
    EstimatorTag::Mle,
];

fn run_sweep(c: &SweepConfig) -> Result<CsvTable> {
    let config = EvalConfig {
        n: c.n,
        sigma_grid: c.sigma.clone(),
        outer_samples: c.outer,
        estimators: c
            .estimators
            .iter()
            .map(|t| EstimatorKind::from_tag(*t))
            .collect(),
        integrator: c.integrator,
        seed: c.seed,
        chunks: c.chunks,
        mle_sigma_cap: c.mle_sigma_cap,
    };
    let table = mmse_sweep(&config)?;
    let mut tags: Vec<EstimatorTag> = SWEEP_ESTIMATORS.to_vec();
    if c.estimators.contains(&EstimatorTag::Identity) {
        tags.push(EstimatorTag::Identity);
    }
    let mut header = vec!["sigma".to_string()];
    for t in &tags {
        header.push(format!("mse_{t}"));
        header.push(format!("se_{t}"));
    }
    header.extend(["var_sorted".into(), "mmse_unsorted".into()]);
    let mut csv = CsvTable::new(header);
    for row in &table.rows {
        let mut cells = vec![fmt_num(row.sigma)];
        for t in &tags {
            match row.results.get(t) {
                Some(r) => {
                    cells.push(fmt_num(r.mean));
                    cells.push(fmt_num(r.std_error));
                }
                None => cells.extend([String::new(), String::new()]),
            }
        }
        cells.push(fmt_num(row.var_sorted));
        cells.push(fmt_num(row.mmse_unsorted));
        csv.push(cells);
    }
    Ok(csv)
}

fn run_varratio(c: &VarRatioConfig) -> Result<CsvTable> {
    let mut csv = CsvTable::new(["n", "var_sorted", "var_ratio"]);
    for row in var_ratio_curve(c.n_max)? {
        csv.push([
            row.n.to_string(),
            fmt_num(row.var_sorted),
            fmt_num(row.var_ratio),
        ]);
    }
    Ok(csv)
}

fn run_delta(c: &DeltaConfig) -> Result<CsvTable> {
    let config = EvalConfig {
        n: c.n,
        sigma_grid: c.sigma.clone(),
        outer_samples: c.outer,
        estimators: Vec::new(),
        integrator: c.integrator,
        seed: c.seed,
        chunks: c.chunks,
        mle_sigma_cap: None,
    };
    let asymptote = delta_up_asymptote(c.n);
    let mut csv = CsvTable::new(["sigma", "delta_up", "se", "asymptote"]);
    for &sigma in &c.sigma {
        let r = delta_up(&GaussianModel::new(c.n, sigma)?, &config)?;
        csv.push([
            fmt_num(sigma),
            fmt_num(r.mean),
            fmt_num(r.std_error),
            fmt_num(asymptote),
        ]);
    }
    Ok(csv)
}

fn eps_label(e: f64) -> String {
    format!("{e}")
}

fn run_bounds(c: &BoundsConfig) -> Result<CsvTable> {
    let mut header: Vec<String> = [
        "n",
        "var_sorted",
        "var_approx",
        "var_approx_error_bound",
        "chi_variance",
        "max_entropy_var_bound",
        "sorted_entropy",
    ]
    .map(String::from)
    .to_vec();
    for &e in &c.eps {
        header.push(format!("power_sum_eps{}", eps_label(e)));
        header.push(format!("power_sum_bound_eps{}", eps_label(e)));
    }
    if c.n_max == 0 || c.n_max > MAX_ORDER_STAT_N {
        return Err(Error::Config(format!(
            "n_max must be in 1..={MAX_ORDER_STAT_N}, got {}",
            c.n_max
        )));
    }
    let mut csv = CsvTable::new(header);
    for n in 1..=c.n_max {
        let mut cells = vec![
            n.to_string(),
            fmt_num(var_sorted(n, DEFAULT_QUAD_POINTS)?),
            fmt_num(var_approx(n)?),
            // undefined at n = 1
            if n >= 2 {
                fmt_num(var_approx_error_bound(n)?)
            } else {
                String::new()
            },
            fmt_num(chi_variance(n)?),
            fmt_num(max_entropy_var_bound(n)?),
            fmt_num(sorted_entropy(n)?),
        ];
        for &e in &c.eps {
            cells.push(fmt_num(quantile_power_sum(n, e)?));
            cells.push(fmt_num(quantile_power_sum_bound(n, e)?));
        }
        csv.push(cells);
    }
    Ok(csv)
}

fn run_regularity(c: &RegularityConfig) -> Result<serde_json::Value> {
    if c.quadrature {
        let q = regularity_check_quadrature(c.quad_points)?;
        return Ok(json!({
            "mode": "quadrature",
            "components": q,
            "std_errors": [0.0, 0.0],
            "expected": REGULARITY_EXPECTED,
            "deviation": [q[0] - REGULARITY_EXPECTED[0], q[1] - REGULARITY_EXPECTED[1]],
            "component_sum": q[0] + q[1],
            "regularity_violated": q[0] != 0.0 || q[1] != 0.0,
        }));
    }
    let config = EvalConfig {
        outer_samples: c.outer,
        seed: c.seed,
        chunks: c.chunks,
        ..EvalConfig::new(2, vec![1.0])
    };
    let r = regularity_check(&GaussianModel::new(2, 1.0)?, &config)?;
    let means = [r.components[0].mean, r.components[1].mean];
    Ok(json!({
        "mode": "monte_carlo",
        "components": means,
        "std_errors": [r.components[0].std_error, r.components[1].std_error],
        "samples": r.components[0].samples,
        "expected": r.expected,
        "deviation": r.deviation,
        "component_sum": means[0] + means[1],
        "regularity_violated": r.regularity_violated,
    }))
}
