//! Estimators of the sorted signal from the sorted observation.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bounds::{order_statistic_means, DEFAULT_QUAD_POINTS};
use crate::error::{check_len, Error, Result};
use crate::model::{region_table, GaussianModel, RegionIntegrator, RegionTable};
use crate::prob_core::{all_permutations, is_in_sorted_region, Permutation, SortedVector};

/// Settings for the damped fixed-point search behind [`mle_estimate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPointOptions {
    pub max_iters: usize,
    /// Sup-norm threshold on the fixed-point residual.
    pub tolerance: f64,
    /// How many of the starting points (y⃗, order-statistic means, 0) to use.
    pub restarts: usize,
    /// Step fraction λ in t ← (1-λ)t + λ·map(t).
    pub damping: f64,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        Self {
            max_iters: 500,
            tolerance: 1e-8,
            restarts: 3,
            damping: 0.5,
        }
    }
}

impl FixedPointOptions {
    pub fn validate(&self) -> Result<()> {
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::Config(
                "fixed-point tolerance must be positive".into(),
            ));
        }
        if self.max_iters == 0 || !(1..=3).contains(&self.restarts) {
            return Err(Error::Config(
                "fixed-point search needs max_iters >= 1 and 1..=3 restarts".into(),
            ));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::Config("damping must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorTag {
    Optimal,
    FHat,
    HHat,
    Mle,
    Identity,
}

impl EstimatorTag {
    pub const ALL: [EstimatorTag; 5] = [
        EstimatorTag::Optimal,
        EstimatorTag::FHat,
        EstimatorTag::HHat,
        EstimatorTag::Mle,
        EstimatorTag::Identity,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            EstimatorTag::Optimal => "optimal",
            EstimatorTag::FHat => "fhat",
            EstimatorTag::HHat => "hhat",
            EstimatorTag::Mle => "mle",
            EstimatorTag::Identity => "identity",
        }
    }
}

impl fmt::Display for EstimatorTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EstimatorTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EstimatorTag::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Config(format!("unknown estimator {s:?}")))
    }
}

/// An estimator together with its options. The region integrator for
/// `Optimal` and `FHat` is supplied by the caller, since Monte Carlo
/// evaluation assigns it a substream per observation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EstimatorKind {
    Optimal,
    FHat,
    HHat,
    Mle(FixedPointOptions),
    Identity,
}

impl EstimatorKind {
    pub fn tag(&self) -> EstimatorTag {
        match self {
            EstimatorKind::Optimal => EstimatorTag::Optimal,
            EstimatorKind::FHat => EstimatorTag::FHat,
            EstimatorKind::HHat => EstimatorTag::HHat,
            EstimatorKind::Mle(_) => EstimatorTag::Mle,
            EstimatorKind::Identity => EstimatorTag::Identity,
        }
    }

    pub fn from_tag(tag: EstimatorTag) -> Self {
        match tag {
            EstimatorTag::Optimal => EstimatorKind::Optimal,
            EstimatorTag::FHat => EstimatorKind::FHat,
            EstimatorTag::HHat => EstimatorKind::HHat,
            EstimatorTag::Mle => EstimatorKind::Mle(FixedPointOptions::default()),
            EstimatorTag::Identity => EstimatorKind::Identity,
        }
    }

    /// Whether evaluating this estimator needs the posterior region table.
    pub fn needs_region_table(&self) -> bool {
        matches!(self, EstimatorKind::Optimal | EstimatorKind::FHat)
    }
}

fn check_model(model: &GaussianModel, y: &SortedVector) -> Result<()> {
    check_len(model.n(), y.len())
}

pub(crate) fn optimal_from_table(table: &RegionTable) -> Vec<f64> {
    let n = table.n();
    let mut out = vec![0.0; n];
    for r in 0..table.rows() {
        for (o, m) in out.iter_mut().zip(table.mean(r)) {
            *o += m;
        }
    }
    out
}

pub(crate) fn fhat_from_table(
    model: &GaussianModel,
    y: &[f64],
    perms: &[Permutation],
    table: &RegionTable,
) -> Vec<f64> {
    let c = model.shrinkage();
    let mut out = vec![0.0; y.len()];
    for (r, perm) in perms.iter().enumerate() {
        let p = table.prob(r);
        if p == 0.0 {
            continue;
        }
        for (o, &i) in out.iter_mut().zip(perm.mapping()) {
            *o += c * y[i] * p;
        }
    }
    out
}

/// E[X⃗ | Y⃗ = y⃗] = Σ_π E[X·1{X sorted} | Y = P_π y⃗].
///
/// The output is nondecreasing for both integrator backends.
pub fn optimal_estimate(
    model: &GaussianModel,
    y_sorted: &SortedVector,
    integ: &RegionIntegrator,
) -> Result<Vec<f64>> {
    check_model(model, y_sorted)?;
    let table = region_table(model, y_sorted.as_slice(), integ)?;
    Ok(optimal_from_table(&table))
}

/// f̂_k(y⃗) = Σ_π E[X_k | Y = P_π y⃗]·P[X sorted | Y = P_π y⃗].
pub fn fhat_estimate(
    model: &GaussianModel,
    y_sorted: &SortedVector,
    integ: &RegionIntegrator,
) -> Result<Vec<f64>> {
    check_model(model, y_sorted)?;
    let perms = all_permutations(model.n())?;
    let table = region_table(model, y_sorted.as_slice(), integ)?;
    Ok(fhat_from_table(model, y_sorted.as_slice(), &perms, &table))
}

/// ĥ(y⃗) = (E[X_(1)], …, E[X_(n)]) regardless of y⃗.
pub fn hhat_estimate(model: &GaussianModel, order_stat_means: &[f64]) -> Result<Vec<f64>> {
    check_len(model.n(), order_stat_means.len())?;
    Ok(order_stat_means.to_vec())
}

pub fn identity_estimate(y_sorted: &SortedVector) -> Vec<f64> {
    y_sorted.as_slice().to_vec()
}

/// The permutation orbit of y⃗ and the softmax fixed-point map over it.
pub(crate) struct MleProblem {
    orbit: Vec<Vec<f64>>,
    inv_var: f64,
}

impl MleProblem {
    pub(crate) fn new(model: &GaussianModel, y: &[f64], perms: &[Permutation]) -> Self {
        Self {
            orbit: perms
                .iter()
                .map(|p| p.apply(y).expect("length checked"))
                .collect(),
            inv_var: 1.0 / (model.sigma() * model.sigma()),
        }
    }

    fn exponents(&self, t: &[f64]) -> Vec<f64> {
        self.orbit
            .iter()
            .map(|v| v.iter().zip(t).map(|(a, b)| a * b).sum::<f64>() * self.inv_var)
            .collect()
    }

    /// Σ_π P_π y⃗·w_π / Σ_π w_π with w_π ∝ exp((P_π y⃗)ᵀt/σ²).
    pub(crate) fn map(&self, t: &[f64]) -> Vec<f64> {
        let e = self.exponents(t);
        let top = e.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut out = vec![0.0; t.len()];
        let mut total = 0.0;
        for (v, ek) in self.orbit.iter().zip(&e) {
            let w = (ek - top).exp();
            total += w;
            for (o, vi) in out.iter_mut().zip(v) {
                *o += w * vi;
            }
        }
        out.iter_mut().for_each(|o| *o /= total);
        out
    }

    /// ln Σ_π exp(-‖P_π y⃗ - t‖²/(2σ²)) up to a constant independent of t.
    pub(crate) fn log_likelihood(&self, t: &[f64]) -> f64 {
        let e = self.exponents(t);
        let top = e.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = top + e.iter().map(|x| (x - top).exp()).sum::<f64>().ln();
        lse - 0.5 * self.inv_var * t.iter().map(|x| x * x).sum::<f64>()
    }
}

fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn nearly_sorted(t: &[f64], slack: f64) -> bool {
    t.windows(2).all(|w| w[0] <= w[1] + slack)
}

pub(crate) fn mle_with_starts(
    model: &GaussianModel,
    y: &[f64],
    opts: &FixedPointOptions,
    order_stat_means: &[f64],
    perms: &[Permutation],
) -> Vec<f64> {
    if model.sigma() == 0.0 {
        return y.to_vec();
    }
    let problem = MleProblem::new(model, y, perms);
    let zero = vec![0.0; y.len()];
    let starts = [y, order_stat_means, zero.as_slice()];
    let mut best: Option<(f64, Vec<f64>)> = None;
    for start in starts.iter().take(opts.restarts) {
        let mut t = start.to_vec();
        for _ in 0..opts.max_iters {
            let m = problem.map(&t);
            if sup_distance(&m, &t) < opts.tolerance {
                if nearly_sorted(&t, opts.tolerance) {
                    let ll = problem.log_likelihood(&t);
                    if best.as_ref().is_none_or(|(b, _)| ll > *b) {
                        best = Some((ll, t));
                    }
                }
                break;
            }
            for (ti, mi) in t.iter_mut().zip(&m) {
                *ti += opts.damping * (mi - *ti);
            }
        }
    }
    best.map(|(_, t)| t).unwrap_or_else(|| y.to_vec())
}

/// Maximum-likelihood estimate under the permutation-mixture likelihood
/// Σ_π f(P_π y⃗ | t), searched among nondecreasing fixed points of the
/// softmax-weighted average map.
///
/// Falls back to y⃗ when no restart converges to a nondecreasing point, and
/// returns y⃗ when σ = 0.
pub fn mle_estimate(
    model: &GaussianModel,
    y_sorted: &SortedVector,
    opts: &FixedPointOptions,
) -> Result<Vec<f64>> {
    check_model(model, y_sorted)?;
    opts.validate()?;
    let perms = all_permutations(model.n())?;
    let h = order_statistic_means(model.n(), DEFAULT_QUAD_POINTS)?;
    Ok(mle_with_starts(
        model,
        y_sorted.as_slice(),
        opts,
        &h,
        &perms,
    ))
}

/// Precomputed per-model state shared by repeated estimator evaluations.
pub(crate) struct EstimatorContext {
    pub(crate) perms: Vec<Permutation>,
    pub(crate) order_stat_means: Vec<f64>,
}

impl EstimatorContext {
    pub(crate) fn new(n: usize) -> Result<Self> {
        Ok(Self {
            perms: all_permutations(n)?,
            order_stat_means: order_statistic_means(n, DEFAULT_QUAD_POINTS)?,
        })
    }

    pub(crate) fn estimate(
        &self,
        kind: &EstimatorKind,
        model: &GaussianModel,
        y: &[f64],
        table: Option<&RegionTable>,
    ) -> Vec<f64> {
        match kind {
            EstimatorKind::Optimal => optimal_from_table(table.expect("table computed")),
            EstimatorKind::FHat => {
                fhat_from_table(model, y, &self.perms, table.expect("table computed"))
            }
            EstimatorKind::HHat => self.order_stat_means.clone(),
            EstimatorKind::Mle(opts) => {
                mle_with_starts(model, y, opts, &self.order_stat_means, &self.perms)
            }
            EstimatorKind::Identity => y.to_vec(),
        }
    }
}

/// True when `v` is nondecreasing; exposed for invariant checks by callers.
pub fn is_ordered_estimate(v: &[f64]) -> bool {
    is_in_sorted_region(v)
}
