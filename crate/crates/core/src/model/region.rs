use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{substream_rng, GaussianModel};
use crate::error::{check_len, Error, Result};
use crate::evaluation::{Accumulator, MonteCarloResult};
use crate::prob_core::{
    argsort_into, check_permutation_dim, factorial, is_in_sorted_region, lexicographic_rank,
    std_normal_cdf, std_normal_pdf,
};

/// Posterior draws per evaluation when the Monte Carlo backend is chosen by default.
pub const DEFAULT_INNER_SAMPLES: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntegratorKind {
    /// Closed form through the sum/difference decomposition; n = 2 only.
    ExactN2,
    MonteCarlo {
        samples: usize,
    },
}

/// How ordered-region probabilities and restricted means of the posterior
/// are computed.
///
/// Monte Carlo evaluations draw from the substream `(seed, stream)`, so a
/// caller that evaluates many observations assigns each its own stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionIntegrator {
    pub kind: IntegratorKind,
    pub seed: u64,
    pub stream: u64,
}

impl RegionIntegrator {
    pub fn exact_n2() -> Self {
        Self {
            kind: IntegratorKind::ExactN2,
            seed: 0,
            stream: 0,
        }
    }

    pub fn monte_carlo(samples: usize, seed: u64) -> Result<Self> {
        if samples == 0 {
            return Err(Error::Config(
                "Monte Carlo integrator needs at least one sample".into(),
            ));
        }
        Ok(Self {
            kind: IntegratorKind::MonteCarlo { samples },
            seed,
            stream: 0,
        })
    }

    /// Closed form for n = 2, otherwise Monte Carlo with [`DEFAULT_INNER_SAMPLES`].
    pub fn default_for(n: usize, seed: u64) -> Self {
        if n == 2 {
            Self::exact_n2()
        } else {
            Self {
                kind: IntegratorKind::MonteCarlo {
                    samples: DEFAULT_INNER_SAMPLES,
                },
                seed,
                stream: 0,
            }
        }
    }

    pub fn with_stream(self, stream: u64) -> Self {
        Self { stream, ..self }
    }

    pub fn validate(&self, model: &GaussianModel) -> Result<()> {
        match self.kind {
            IntegratorKind::ExactN2 if model.n() != 2 => Err(Error::Config(format!(
                "exact integrator requires n = 2, got n = {}",
                model.n()
            ))),
            IntegratorKind::MonteCarlo { samples: 0 } => Err(Error::Config(
                "Monte Carlo integrator needs at least one sample".into(),
            )),
            _ => Ok(()),
        }
    }
}

/// Closed-form pieces for n = 2 with σ > 0: `(p, E[S]·p/2, E[D·1{D≥0}]/2)`
/// where S = X₁+X₂ and D = X₂−X₁ under the posterior at `y`.
fn exact_n2_parts(model: &GaussianModel, y: &[f64]) -> (f64, f64, f64) {
    let c = model.shrinkage();
    let mu_d = c * (y[1] - y[0]);
    let sd_d = (2.0 * model.posterior_var()).sqrt();
    let a = mu_d / sd_d;
    let p = std_normal_cdf(a);
    // E[D·1{D≥0}] = σ_D(aΦ(a) + φ(a)) is positive; clamp rounding in the far tail
    let d_part = (sd_d * (a * p + std_normal_pdf(a))).max(0.0);
    let es = c * (y[0] + y[1]);
    (p, 0.5 * es * p, 0.5 * d_part)
}

/// Sorted-region indicator and restricted mean of a degenerate posterior.
fn degenerate(y: &[f64]) -> (f64, Vec<f64>) {
    if is_in_sorted_region(y) {
        (1.0, y.to_vec())
    } else {
        (0.0, vec![0.0; y.len()])
    }
}

fn mc_region(
    model: &GaussianModel,
    y: &[f64],
    samples: usize,
    integ: &RegionIntegrator,
) -> (MonteCarloResult, Vec<MonteCarloResult>) {
    let n = model.n();
    let c = model.shrinkage();
    let tau = model.posterior_var().sqrt();
    let mut rng = substream_rng(integ.seed, integ.stream);
    let mut w = vec![0.0; n];
    let mut hit = Accumulator::default();
    let mut comps = vec![Accumulator::default(); n];
    for _ in 0..samples {
        for (wk, yk) in w.iter_mut().zip(y) {
            let z: f64 = rng.sample(StandardNormal);
            *wk = c * yk + tau * z;
        }
        let inside = is_in_sorted_region(&w);
        hit.push(if inside { 1.0 } else { 0.0 });
        for (acc, wk) in comps.iter_mut().zip(&w) {
            acc.push(if inside { *wk } else { 0.0 });
        }
    }
    (
        hit.finish(),
        comps.iter().map(Accumulator::finish).collect(),
    )
}

/// P[X₁ ≤ … ≤ Xₙ | Y = y] with its standard error.
pub fn ordered_region_prob_estimate(
    model: &GaussianModel,
    y: &[f64],
    integ: &RegionIntegrator,
) -> Result<MonteCarloResult> {
    check_len(model.n(), y.len())?;
    integ.validate(model)?;
    if model.sigma() == 0.0 || model.n() == 1 {
        return Ok(MonteCarloResult::exact(degenerate(y).0));
    }
    Ok(match integ.kind {
        IntegratorKind::ExactN2 => MonteCarloResult::exact(exact_n2_parts(model, y).0),
        IntegratorKind::MonteCarlo { samples } => mc_region(model, y, samples, integ).0,
    })
}

/// P[X₁ ≤ … ≤ Xₙ | Y = y].
pub fn ordered_region_prob(
    model: &GaussianModel,
    y: &[f64],
    integ: &RegionIntegrator,
) -> Result<f64> {
    Ok(ordered_region_prob_estimate(model, y, integ)?.mean)
}

/// E[X·1{X₁ ≤ … ≤ Xₙ} | Y = y] componentwise, with standard errors.
pub fn restricted_mean_estimate(
    model: &GaussianModel,
    y: &[f64],
    integ: &RegionIntegrator,
) -> Result<Vec<MonteCarloResult>> {
    check_len(model.n(), y.len())?;
    integ.validate(model)?;
    if model.n() == 1 {
        return Ok(vec![MonteCarloResult::exact(model.shrinkage() * y[0])]);
    }
    if model.sigma() == 0.0 {
        return Ok(degenerate(y)
            .1
            .into_iter()
            .map(MonteCarloResult::exact)
            .collect());
    }
    Ok(match integ.kind {
        IntegratorKind::ExactN2 => {
            let (_, s, d) = exact_n2_parts(model, y);
            vec![
                MonteCarloResult::exact(s - d),
                MonteCarloResult::exact(s + d),
            ]
        }
        IntegratorKind::MonteCarlo { samples } => mc_region(model, y, samples, integ).1,
    })
}

/// E[X·1{X₁ ≤ … ≤ Xₙ} | Y = y].
pub fn restricted_mean(
    model: &GaussianModel,
    y: &[f64],
    integ: &RegionIntegrator,
) -> Result<Vec<f64>> {
    Ok(restricted_mean_estimate(model, y, integ)?
        .into_iter()
        .map(|r| r.mean)
        .collect())
}

/// Region probabilities and restricted means at every permutation `P_π y`,
/// indexed by the lexicographic rank of π.
///
/// The Monte Carlo backend couples all n! evaluations through one set of
/// posterior draws: if `W` is a draw at `y` then `P_π W` is a draw at
/// `P_π y`, and exactly one π sorts `W`. Each draw therefore lands in a
/// single row, the probabilities sum to one exactly, and the row means sum
/// to the average of the sorted draws.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionTable {
    n: usize,
    probs: Vec<f64>,
    prob_se: Vec<f64>,
    means: Vec<f64>,
    mean_se: Vec<f64>,
}

impl RegionTable {
    fn zeros(n: usize) -> Self {
        let rows = factorial(n);
        Self {
            n,
            probs: vec![0.0; rows],
            prob_se: vec![0.0; rows],
            means: vec![0.0; rows * n],
            mean_se: vec![0.0; rows * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, rank: usize) -> f64 {
        self.probs[rank]
    }

    pub fn prob_se(&self, rank: usize) -> f64 {
        self.prob_se[rank]
    }

    pub fn mean(&self, rank: usize) -> &[f64] {
        &self.means[rank * self.n..(rank + 1) * self.n]
    }

    pub fn mean_se(&self, rank: usize) -> &[f64] {
        &self.mean_se[rank * self.n..(rank + 1) * self.n]
    }
}

pub fn region_table(
    model: &GaussianModel,
    y: &[f64],
    integ: &RegionIntegrator,
) -> Result<RegionTable> {
    let n = model.n();
    check_len(n, y.len())?;
    check_permutation_dim(n)?;
    integ.validate(model)?;
    let mut table = RegionTable::zeros(n);

    if n == 1 {
        // scalars are always sorted
        table.probs[0] = 1.0;
        table.means[0] = model.shrinkage() * y[0];
        return Ok(table);
    }
    if model.sigma() == 0.0 {
        // Ties go to the stable sorting permutation only, so the rows still sum to one.
        let mut idx = vec![0; n];
        argsort_into(y, &mut idx);
        let r = lexicographic_rank(&idx);
        table.probs[r] = 1.0;
        for (k, &i) in idx.iter().enumerate() {
            table.means[r * n + k] = y[i];
        }
        return Ok(table);
    }

    match integ.kind {
        IntegratorKind::ExactN2 => {
            for (r, yy) in [[y[0], y[1]], [y[1], y[0]]].iter().enumerate() {
                let (p, s, d) = exact_n2_parts(model, yy);
                table.probs[r] = p;
                table.means[2 * r] = s - d;
                table.means[2 * r + 1] = s + d;
            }
        }
        IntegratorKind::MonteCarlo { samples } => {
            let c = model.shrinkage();
            let tau = model.posterior_var().sqrt();
            let mut rng = substream_rng(integ.seed, integ.stream);
            let rows = table.rows();
            let mut counts = vec![0u64; rows];
            let mut sums = vec![0.0; rows * n];
            let mut sq = vec![0.0; rows * n];
            let mut w = vec![0.0; n];
            let mut idx = vec![0; n];
            for _ in 0..samples {
                for (wk, yk) in w.iter_mut().zip(y) {
                    let z: f64 = rng.sample(StandardNormal);
                    *wk = c * yk + tau * z;
                }
                argsort_into(&w, &mut idx);
                let r = lexicographic_rank(&idx);
                counts[r] += 1;
                for (k, &i) in idx.iter().enumerate() {
                    sums[r * n + k] += w[i];
                    sq[r * n + k] += w[i] * w[i];
                }
            }
            let total = samples as f64;
            let dof = (total - 1.0).max(1.0);
            for r in 0..rows {
                let p = counts[r] as f64 / total;
                table.probs[r] = p;
                table.prob_se[r] = (p * (1.0 - p) / dof).sqrt();
                for k in 0..n {
                    let s = sums[r * n + k];
                    let m = s / total;
                    let var = ((sq[r * n + k] - s * m) / dof).max(0.0);
                    table.means[r * n + k] = m;
                    table.mean_se[r * n + k] = (var / total).sqrt();
                }
            }
        }
    }
    Ok(table)
}
