//! Monte Carlo evaluation of estimator MSEs, the f̂ gap bound, and the
//! score regularity counterexample.
//!
//! Observation j of a run is drawn from the substream `(seed, j)` and its
//! inner integrator uses the stream `j` of a derived seed. The same j
//! therefore sees the same prior and noise draws for every σ and every
//! estimator, which makes comparisons along a sweep paired. Per-sample
//! losses are reduced in index order, so results do not depend on the
//! number of chunks or threads.

mod regularity;
mod result;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{var_sorted, DEFAULT_QUAD_POINTS};
use crate::error::{Error, Result};
use crate::estimators::{EstimatorContext, EstimatorKind, EstimatorTag, FixedPointOptions};
use crate::model::{
    region_table, sample_pair_into, substream_rng, GaussianModel, IntegratorKind, RegionIntegrator,
    DEFAULT_INNER_SAMPLES,
};
use crate::prob_core::{argsort_into, check_permutation_dim, factorial};

pub use regularity::{
    regularity_check, regularity_check_quadrature, RegularityReport, REGULARITY_EXPECTED,
};
pub(crate) use result::Accumulator;
pub use result::{merge_results, MonteCarloResult};

/// Outer samples used when the integrator is the closed form.
pub const DEFAULT_OUTER_EXACT: usize = 100_000;
/// Outer samples used with the Monte Carlo integrator.
pub const DEFAULT_OUTER_MC: usize = 20_000;

const INNER_SEED_MIX: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub n: usize,
    pub sigma_grid: Vec<f64>,
    pub outer_samples: usize,
    pub estimators: Vec<EstimatorKind>,
    pub integrator: IntegratorKind,
    pub seed: u64,
    pub chunks: usize,
    /// MLE is skipped at grid points with σ above this value.
    pub mle_sigma_cap: Option<f64>,
}

impl EvalConfig {
    /// Defaults: closed-form integrator and 10⁵ outer samples for n = 2,
    /// otherwise 4096 inner by 2·10⁴ outer; all estimators except identity.
    pub fn new(n: usize, sigma_grid: Vec<f64>) -> Self {
        let (integrator, outer_samples) = if n == 2 {
            (IntegratorKind::ExactN2, DEFAULT_OUTER_EXACT)
        } else {
            (
                IntegratorKind::MonteCarlo {
                    samples: DEFAULT_INNER_SAMPLES,
                },
                DEFAULT_OUTER_MC,
            )
        };
        Self {
            n,
            sigma_grid,
            outer_samples,
            estimators: vec![
                EstimatorKind::Optimal,
                EstimatorKind::FHat,
                EstimatorKind::HHat,
                EstimatorKind::Mle(FixedPointOptions::default()),
            ],
            integrator,
            seed: 0,
            chunks: 1,
            mle_sigma_cap: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_permutation_dim(self.n)?;
        if self.outer_samples == 0 || self.chunks == 0 {
            return Err(Error::Config(
                "outer samples and chunks must be positive".into(),
            ));
        }
        if !self.outer_samples.is_multiple_of(self.chunks) {
            return Err(Error::Config(format!(
                "{} outer samples do not split into {} equal chunks",
                self.outer_samples, self.chunks
            )));
        }
        if let Some(s) = self
            .sigma_grid
            .iter()
            .find(|s| !(**s >= 0.0 && s.is_finite()))
        {
            return Err(Error::Domain(format!("invalid noise level {s}")));
        }
        for kind in &self.estimators {
            if let EstimatorKind::Mle(opts) = kind {
                opts.validate()?;
            }
        }
        let probe = GaussianModel::new(self.n, 1.0)?;
        self.integrator_for(0).validate(&probe)
    }

    fn integrator_for(&self, sample: u64) -> RegionIntegrator {
        RegionIntegrator {
            kind: self.integrator,
            seed: self.seed ^ INNER_SEED_MIX,
            stream: sample,
        }
    }

    fn estimators_at(&self, sigma: f64) -> Vec<EstimatorKind> {
        self.estimators
            .iter()
            .copied()
            .filter(|k| match (k, self.mle_sigma_cap) {
                (EstimatorKind::Mle(_), Some(cap)) => sigma <= cap,
                _ => true,
            })
            .collect()
    }
}

/// Runs `per_sample` for every outer index, chunk by chunk, and returns the
/// values in index order.
fn run_samples<T, F>(config: &EvalConfig, per_sample: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    let block = config.outer_samples / config.chunks;
    let mut out = Vec::with_capacity(config.outer_samples);
    for c in 0..config.chunks {
        let start = (c * block) as u64;
        let end = start + block as u64;
        let part: Vec<T> = (start..end)
            .into_par_iter()
            .map(&per_sample)
            .collect::<Result<_>>()?;
        out.extend(part);
    }
    Ok(out)
}

fn squared_error(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Sorts `x` and `y` in place.
fn sort_pair(x: &mut [f64], y: &mut [f64], idx: &mut [usize], buf: &mut [f64]) {
    for v in [x, y] {
        argsort_into(v, idx);
        for (b, &i) in buf.iter_mut().zip(idx.iter()) {
            *b = v[i];
        }
        v.copy_from_slice(buf);
    }
}

/// MSE E‖X⃗ - est(Y⃗)‖² for several estimators, from one shared set of
/// observations.
pub fn mse_of_estimators(
    model: &GaussianModel,
    kinds: &[EstimatorKind],
    config: &EvalConfig,
) -> Result<Vec<MonteCarloResult>> {
    config.validate()?;
    if model.n() != config.n {
        return Err(Error::Config(format!(
            "model dimension {} differs from configured n = {}",
            model.n(),
            config.n
        )));
    }
    let ctx = EstimatorContext::new(model.n())?;
    let needs_table = kinds.iter().any(EstimatorKind::needs_region_table);
    let n = model.n();
    let losses = run_samples(config, |j| {
        let mut rng = substream_rng(config.seed, j);
        let (mut x, mut y) = (vec![0.0; n], vec![0.0; n]);
        sample_pair_into(model, &mut rng, &mut x, &mut y);
        let (mut idx, mut buf) = (vec![0; n], vec![0.0; n]);
        sort_pair(&mut x, &mut y, &mut idx, &mut buf);
        let table = if needs_table {
            Some(region_table(model, &y, &config.integrator_for(j))?)
        } else {
            None
        };
        Ok(kinds
            .iter()
            .map(|k| squared_error(&x, &ctx.estimate(k, model, &y, table.as_ref())))
            .collect::<Vec<f64>>())
    })?;
    Ok((0..kinds.len())
        .map(|k| {
            let mut acc = Accumulator::default();
            for row in &losses {
                acc.push(row[k]);
            }
            acc.finish()
        })
        .collect())
}

/// MSE E‖X⃗ - est(Y⃗)‖² of one estimator.
pub fn mse_of_estimator(
    model: &GaussianModel,
    est: &EstimatorKind,
    config: &EvalConfig,
) -> Result<MonteCarloResult> {
    Ok(mse_of_estimators(model, std::slice::from_ref(est), config)?[0])
}

/// E‖X - Y/(1+σ²)‖², the unsorted MMSE, by simulation.
pub fn mse_unsorted(model: &GaussianModel, config: &EvalConfig) -> Result<MonteCarloResult> {
    config.validate()?;
    let n = model.n();
    let c = model.shrinkage();
    let losses = run_samples(config, |j| {
        let mut rng = substream_rng(config.seed, j);
        let (mut x, mut y) = (vec![0.0; n], vec![0.0; n]);
        sample_pair_into(model, &mut rng, &mut x, &mut y);
        Ok(x.iter()
            .zip(&y)
            .map(|(a, b)| (a - c * b).powi(2))
            .sum::<f64>())
    })?;
    Ok(MonteCarloResult::from_samples(&losses))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub sigma: f64,
    pub results: BTreeMap<EstimatorTag, MonteCarloResult>,
    pub var_sorted: f64,
    pub mmse_unsorted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub n: usize,
    pub rows: Vec<SweepRow>,
}

/// One row per grid σ with the MSE of every configured estimator.
pub fn mmse_sweep(config: &EvalConfig) -> Result<SweepTable> {
    config.validate()?;
    let var = var_sorted(config.n, DEFAULT_QUAD_POINTS)?;
    let mut rows = Vec::with_capacity(config.sigma_grid.len());
    for &sigma in &config.sigma_grid {
        let model = GaussianModel::new(config.n, sigma)?;
        let kinds = config.estimators_at(sigma);
        let results = mse_of_estimators(&model, &kinds, config)?;
        rows.push(SweepRow {
            sigma,
            results: kinds.iter().map(|k| k.tag()).zip(results).collect(),
            var_sorted: var,
            mmse_unsorted: model.mmse_unsorted(),
        });
    }
    Ok(SweepTable { n: config.n, rows })
}

/// Δ_up = Σ_π E[‖X‖²·p(P_π Y)(1 - p(P_π Y)) | Y sorted], sampled jointly.
///
/// Conditioning on the sorted region is realized by sorting Y; X is left
/// as drawn since ‖X‖² does not depend on the order of its entries.
pub fn delta_up(model: &GaussianModel, config: &EvalConfig) -> Result<MonteCarloResult> {
    config.validate()?;
    if model.sigma() <= 0.0 {
        return Err(Error::Domain(
            "the gap bound needs a positive noise level".into(),
        ));
    }
    let n = model.n();
    let values = run_samples(config, |j| {
        let mut rng = substream_rng(config.seed, j);
        let (mut x, mut y) = (vec![0.0; n], vec![0.0; n]);
        sample_pair_into(model, &mut rng, &mut x, &mut y);
        y.sort_by(f64::total_cmp);
        let table = region_table(model, &y, &config.integrator_for(j))?;
        let g: f64 = table.probs().iter().map(|p| p * (1.0 - p)).sum();
        Ok(x.iter().map(|v| v * v).sum::<f64>() * g)
    })?;
    Ok(MonteCarloResult::from_samples(&values))
}

/// Large-noise limit of Δ_up, n(1 - 1/n!).
pub fn delta_up_asymptote(n: usize) -> f64 {
    n as f64 * (1.0 - 1.0 / factorial(n) as f64)
}
