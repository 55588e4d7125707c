//! The expected score of the sorted Gaussian model at Y⃗ = 0 for n = 2,
//! σ = 1. A Bayesian Cramér–Rao bound needs this vector to vanish; it does
//! not.
//!
//! The quantity is -2·n!·(4π)^{n/2}·∫_{x₁≤x₂} x·f(0|x)·f(x) dx. With σ = 1
//! the integrand is x·e^{-|x|²}/(2π)², which is 1/(4π) times x·g(x) for g
//! the N(0, ½I) density, so the integral equals -4·E[V·1{V₁≤V₂}] =
//! -2·E[sort(V)] with V ~ N(0, ½I).

use gauss_quad::GaussLegendre;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{run_samples, Accumulator, EvalConfig, MonteCarloResult};
use crate::error::{Error, Result};
use crate::model::{substream_rng, GaussianModel};

/// (2/√(2π), -2/√(2π)).
pub const REGULARITY_EXPECTED: [f64; 2] = [0.797_884_560_802_865_4, -0.797_884_560_802_865_4];

/// Standard errors by which the vector must clear zero to count as a violation.
const VIOLATION_Z: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub components: [MonteCarloResult; 2],
    pub expected: [f64; 2],
    /// `components[k].mean - expected[k]`.
    pub deviation: [f64; 2],
    pub regularity_violated: bool,
}

fn check_instance(model: &GaussianModel) -> Result<()> {
    if model.n() == 2 && model.sigma() == 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "the regularity counterexample is defined for n = 2, sigma = 1; got n = {}, sigma = {}",
            model.n(),
            model.sigma()
        )))
    }
}

/// Sampling route: -2·E[sort(V)], V ~ N(0, ½I), one draw per outer sample.
pub fn regularity_check(model: &GaussianModel, config: &EvalConfig) -> Result<RegularityReport> {
    check_instance(model)?;
    if config.outer_samples == 0
        || config.chunks == 0
        || !config.outer_samples.is_multiple_of(config.chunks)
    {
        return Err(Error::Config(
            "outer samples must be positive and split evenly into chunks".into(),
        ));
    }
    let draws = run_samples(config, |j| {
        let mut rng = substream_rng(config.seed, j);
        let a: f64 = rng.sample(StandardNormal);
        let b: f64 = rng.sample(StandardNormal);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        Ok([
            -2.0 * lo * std::f64::consts::FRAC_1_SQRT_2,
            -2.0 * hi * std::f64::consts::FRAC_1_SQRT_2,
        ])
    })?;
    let mut acc = [Accumulator::default(); 2];
    for d in &draws {
        acc[0].push(d[0]);
        acc[1].push(d[1]);
    }
    let components = [acc[0].finish(), acc[1].finish()];
    let norm = components[0].mean.hypot(components[1].mean);
    let se = components[0].std_error.hypot(components[1].std_error);
    Ok(RegularityReport {
        components,
        expected: REGULARITY_EXPECTED,
        deviation: [
            components[0].mean - REGULARITY_EXPECTED[0],
            components[1].mean - REGULARITY_EXPECTED[1],
        ],
        regularity_violated: norm > VIOLATION_Z * se,
    })
}

/// Truncation of the sorted region; the Gaussian factor is below e^{-64} outside.
const QUAD_LIMIT: f64 = 8.0;

/// Quadrature route: the defining integral over {x₁ ≤ x₂} as nested
/// Gauss–Legendre rules, x₁ on [-L, L] and x₂ on [x₁, L].
pub fn regularity_check_quadrature(points: usize) -> Result<[f64; 2]> {
    let rule = GaussLegendre::new(points)
        .map_err(|_| Error::Config(format!("quadrature needs at least 2 points, got {points}")))?;
    let scale = -2.0 * 2.0 * 4.0 * std::f64::consts::PI / (2.0 * std::f64::consts::PI).powi(2);
    let mut out = [0.0; 2];
    for (k, slot) in out.iter_mut().enumerate() {
        *slot = scale
            * rule.integrate(-QUAD_LIMIT, QUAD_LIMIT, |x1| {
                rule.integrate(x1, QUAD_LIMIT, |x2| {
                    let coord = if k == 0 { x1 } else { x2 };
                    coord * (-(x1 * x1 + x2 * x2)).exp()
                })
            });
    }
    Ok(out)
}
