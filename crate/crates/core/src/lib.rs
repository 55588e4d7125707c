//! Estimation of sorted Gaussian signals from sorted noisy observations.
//!
//! The signal `X ~ N(0, I_n)` passes through `Y = X + σZ`, and only the
//! sorted vectors are of interest. [`estimators`] implements the
//! conditional-mean estimator as a sum over the n! relabelings of the
//! observation along with cheaper alternatives, [`evaluation`] measures
//! their MSE by simulation, and [`bounds`] collects closed-form results on
//! order-statistic moments.

pub mod bounds;
pub mod error;
pub mod estimators;
pub mod evaluation;
pub mod model;
pub mod prob_core;

pub use error::{Error, Result};
pub use estimators::{
    fhat_estimate, hhat_estimate, identity_estimate, mle_estimate, optimal_estimate, EstimatorKind,
    EstimatorTag, FixedPointOptions,
};
pub use evaluation::{EvalConfig, MonteCarloResult, SweepRow, SweepTable};
pub use model::{GaussianModel, IntegratorKind, PosteriorParams, RegionIntegrator};
pub use prob_core::{Permutation, SortedVector};
