use serde::{Deserialize, Serialize};

/// Sample mean of a Monte Carlo estimand with its standard error.
///
/// `std_error` is `s/√samples` with `s²` the unbiased sample variance; it is
/// zero when fewer than two samples were seen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloResult {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
}

impl MonteCarloResult {
    pub const EMPTY: Self = Self {
        mean: 0.0,
        std_error: 0.0,
        samples: 0,
    };

    /// A noiseless value, as produced by closed-form backends.
    pub fn exact(value: f64) -> Self {
        Self {
            mean: value,
            std_error: 0.0,
            samples: 1,
        }
    }

    pub fn from_samples(values: &[f64]) -> Self {
        let mut acc = Accumulator::default();
        for &v in values {
            acc.push(v);
        }
        acc.finish()
    }

    fn sum_sq_dev(&self) -> f64 {
        let n = self.samples as f64;
        self.std_error * self.std_error * n * (n - 1.0)
    }

    /// Pools two independent estimates of the same quantity.
    pub fn merge(&self, other: &Self) -> Self {
        if self.samples == 0 {
            return *other;
        }
        if other.samples == 0 {
            return *self;
        }
        let (na, nb) = (self.samples as f64, other.samples as f64);
        let total = self.samples + other.samples;
        let nt = total as f64;
        let delta = other.mean - self.mean;
        let mean = (na * self.mean + nb * other.mean) / nt;
        let m2 = self.sum_sq_dev() + other.sum_sq_dev() + delta * delta * na * nb / nt;
        Self {
            mean,
            std_error: (m2 / (nt - 1.0) / nt).sqrt(),
            samples: total,
        }
    }

    /// Number of standard errors separating `self.mean` from `target`,
    /// with `extra_se` added in quadrature.
    pub fn z_score(&self, target: f64, extra_se: f64) -> f64 {
        let se = self.std_error.hypot(extra_se);
        if se == 0.0 {
            if self.mean == target {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.mean - target).abs() / se
        }
    }
}

/// Free-function form of [`MonteCarloResult::merge`].
pub fn merge_results(a: &MonteCarloResult, b: &MonteCarloResult) -> MonteCarloResult {
    a.merge(b)
}

/// Welford streaming mean and variance.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Accumulator {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Accumulator {
    pub(crate) fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub(crate) fn finish(&self) -> MonteCarloResult {
        let n = self.count as f64;
        let std_error = if self.count > 1 {
            (self.m2 / (n - 1.0) / n).sqrt()
        } else {
            0.0
        };
        MonteCarloResult {
            mean: if self.count == 0 { 0.0 } else { self.mean },
            std_error,
            samples: self.count,
        }
    }
}
