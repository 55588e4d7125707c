//! The Gaussian prior/channel pair and its posterior ordered-region
//! functionals.

mod region;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

pub use region::{
    ordered_region_prob, ordered_region_prob_estimate, region_table, restricted_mean,
    restricted_mean_estimate, IntegratorKind, RegionIntegrator, RegionTable, DEFAULT_INNER_SAMPLES,
};

/// Prior `X ~ N(0, I_n)` observed through `Y = X + σZ`, `Z ~ N(0, I_n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianModel {
    n: usize,
    sigma: f64,
}

impl GaussianModel {
    pub fn new(n: usize, sigma: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("dimension n must be at least 1".into()));
        }
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::Domain(format!(
                "noise level must be finite and nonnegative, got {sigma}"
            )));
        }
        Ok(Self { n, sigma })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Posterior mean coefficient 1/(1+σ²).
    pub fn shrinkage(&self) -> f64 {
        1.0 / (1.0 + self.sigma * self.sigma)
    }

    /// Posterior per-component variance σ²/(1+σ²).
    pub fn posterior_var(&self) -> f64 {
        let s2 = self.sigma * self.sigma;
        s2 / (1.0 + s2)
    }

    /// MMSE of the unsorted problem, nσ²/(1+σ²).
    pub fn mmse_unsorted(&self) -> f64 {
        self.n as f64 * self.posterior_var()
    }
}

/// Gaussian posterior of X given Y = y; components are independent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorParams {
    pub mean: Vec<f64>,
    pub component_var: f64,
}

pub fn posterior_params(model: &GaussianModel, y: &[f64]) -> Result<PosteriorParams> {
    check_len(model.n, y.len())?;
    let c = model.shrinkage();
    Ok(PosteriorParams {
        mean: y.iter().map(|v| c * v).collect(),
        component_var: model.posterior_var(),
    })
}

/// Draws `(x, y)` with `x ~ N(0, I)` and `y = x + σz`.
pub fn sample_pair<R: Rng + ?Sized>(model: &GaussianModel, rng: &mut R) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; model.n];
    let mut y = vec![0.0; model.n];
    sample_pair_into(model, rng, &mut x, &mut y);
    (x, y)
}

pub(crate) fn sample_pair_into<R: Rng + ?Sized>(
    model: &GaussianModel,
    rng: &mut R,
    x: &mut [f64],
    y: &mut [f64],
) {
    for xi in x.iter_mut() {
        *xi = rng.sample(StandardNormal);
    }
    for (yi, xi) in y.iter_mut().zip(x.iter()) {
        let z: f64 = rng.sample(StandardNormal);
        *yi = xi + model.sigma * z;
    }
}

/// Independent generator for `(seed, stream)`.
pub fn substream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
