//! Order-statistic moments of the standard Gaussian and the closed-form
//! variance, entropy and quantile bounds built on them.

use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob_core::{ln_std_normal_cdf, ln_std_normal_pdf, std_normal_quantile};

pub const DEFAULT_QUAD_POINTS: usize = 513;
/// Half-width of the integration interval; Gaussian mass beyond it is below 1e-30.
pub const QUAD_HALF_WIDTH: f64 = 12.0;
pub const MAX_ORDER_STAT_N: usize = 1000;

/// Above this n the order-statistic densities get too narrow for one rule
/// and the interval is split into composite panels.
const SINGLE_PANEL_MAX_N: usize = 200;
const PANELS_LARGE_N: usize = 4;

fn ln_factorial(n: usize) -> f64 {
    libm::lgamma(n as f64 + 1.0)
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

fn check_n(n: usize) -> Result<()> {
    if (1..=MAX_ORDER_STAT_N).contains(&n) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "order statistics need 1 <= n <= {MAX_ORDER_STAT_N}, got {n}"
        )))
    }
}

fn check_index(i: usize, n: usize) -> Result<()> {
    if (1..=n).contains(&i) {
        Ok(())
    } else {
        Err(Error::Domain(format!("index i = {i} outside 1..={n}")))
    }
}

/// Nodes and weights of a composite Gauss–Legendre rule on `[-L, L]`.
fn composite_rule(points: usize, panels: usize) -> Result<Vec<(f64, f64)>> {
    let rule = GaussLegendre::new(points)
        .map_err(|_| Error::Config(format!("quadrature needs at least 2 points, got {points}")))?;
    let width = 2.0 * QUAD_HALF_WIDTH / panels as f64;
    let mut out = Vec::with_capacity(points * panels);
    for p in 0..panels {
        let a = -QUAD_HALF_WIDTH + p as f64 * width;
        let mid = a + 0.5 * width;
        for &(x, w) in rule.as_node_weight_pairs() {
            out.push((mid + 0.5 * width * x, 0.5 * width * w));
        }
    }
    Ok(out)
}

/// E[X_(i)] for i = 1..n, the order statistics of n standard normals.
///
/// Integrates x·n·C(n-1, i-1)·Φ(x)^{i-1}·(1-Φ(x))^{n-i}·φ(x) with the
/// density evaluated in log space. Only the lower half is integrated; the
/// upper half is filled by antisymmetry, so the result is exactly
/// antisymmetric.
pub fn order_statistic_means(n: usize, quad_points: usize) -> Result<Vec<f64>> {
    check_n(n)?;
    let panels = if n <= SINGLE_PANEL_MAX_N {
        1
    } else {
        PANELS_LARGE_N
    };
    let rule = composite_rule(quad_points, panels)?;
    let logs: Vec<(f64, f64, f64, f64, f64)> = rule
        .iter()
        .map(|&(x, w)| {
            (
                x,
                w,
                ln_std_normal_cdf(x),
                ln_std_normal_cdf(-x),
                ln_std_normal_pdf(x),
            )
        })
        .collect();
    let ln_n = (n as f64).ln();
    let mut means = vec![0.0; n];
    for i in 1..=n / 2 {
        let ln_c = ln_n + ln_binomial(n - 1, i - 1);
        let (lo, hi) = ((i - 1) as f64, (n - i) as f64);
        let mut acc = 0.0;
        for &(x, w, lp, lq, lphi) in &logs {
            acc += w * x * (ln_c + lo * lp + hi * lq + lphi).exp();
        }
        means[i - 1] = acc;
        means[n - i] = -acc;
    }
    Ok(means)
}

/// Means of the order statistics and the total variance of the sorted vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderStatMoments {
    pub n: usize,
    pub means: Vec<f64>,
    pub var_sorted: f64,
}

impl OrderStatMoments {
    pub fn compute(n: usize, quad_points: usize) -> Result<Self> {
        let means = order_statistic_means(n, quad_points)?;
        let var_sorted = n as f64 - means.iter().map(|m| m * m).sum::<f64>();
        Ok(Self {
            n,
            means,
            var_sorted,
        })
    }
}

/// Var(X⃗) = E‖X⃗ - E[X⃗]‖² = n - Σ E[X_(i)]².
pub fn var_sorted(n: usize, quad_points: usize) -> Result<f64> {
    Ok(OrderStatMoments::compute(n, quad_points)?.var_sorted)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarRatioRow {
    pub n: usize,
    pub var_sorted: f64,
    pub var_ratio: f64,
}

/// `var_sorted(n)/n` for n = 1..=n_max.
pub fn var_ratio_curve(n_max: usize) -> Result<Vec<VarRatioRow>> {
    check_n(n_max)?;
    (1..=n_max)
        .map(|n| {
            let v = var_sorted(n, DEFAULT_QUAD_POINTS)?;
            Ok(VarRatioRow {
                n,
                var_sorted: v,
                var_ratio: v / n as f64,
            })
        })
        .collect()
}

/// Φ⁻¹(i/(n+1)), the quantile approximation of E[X_(i)].
pub fn quantile_mean_approx(i: usize, n: usize) -> Result<f64> {
    check_index(i, n)?;
    std_normal_quantile(i as f64 / (n as f64 + 1.0))
}

/// √(π/2)·√(2/i + 2/(n+1-i) + (1/i - 1/(2(n+1-i)))²), bounding
/// |E[X_(i)] - Φ⁻¹(i/(n+1))|.
pub fn quantile_mean_error_bound(i: usize, n: usize) -> Result<f64> {
    check_index(i, n)?;
    let a = i as f64;
    let b = (n + 1 - i) as f64;
    let skew = 1.0 / a - 1.0 / (2.0 * b);
    Ok((std::f64::consts::FRAC_PI_2 * (2.0 / a + 2.0 / b + skew * skew)).sqrt())
}

/// n - Σ Φ⁻¹(i/(n+1))².
pub fn var_approx(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let mut sum = 0.0;
    for i in 1..=n {
        let q = quantile_mean_approx(i, n)?;
        sum += q * q;
    }
    Ok(n as f64 - sum)
}

/// 2√(18(n+1)L) + L with L = (3π/2)(2 ln n + 1/n + 1), bounding
/// |var_sorted(n) - var_approx(n)|.
pub fn var_approx_error_bound(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!(
            "variance approximation bound needs n >= 2, got {n}"
        )));
    }
    let nf = n as f64;
    let l = 1.5 * std::f64::consts::PI * (2.0 * nf.ln() + 1.0 / nf + 1.0);
    Ok(2.0 * (18.0 * (nf + 1.0) * l).sqrt() + l)
}

/// Var(‖X‖) = n - 2(Γ((n+1)/2)/Γ(n/2))², a lower bound on Var(X⃗).
pub fn chi_variance(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let nf = n as f64;
    let ln_ratio = libm::lgamma(0.5 * (nf + 1.0)) - libm::lgamma(0.5 * nf);
    Ok(nf - 2.0 * (2.0 * ln_ratio).exp())
}

/// (n!)^{-2/n}·nσ²/(1+σ²).
pub fn max_entropy_mmse_bound(n: usize, sigma: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    if sigma.is_nan() || sigma < 0.0 {
        return Err(Error::Domain(format!(
            "noise level must be nonnegative, got {sigma}"
        )));
    }
    let nf = n as f64;
    let s2 = sigma * sigma;
    // σ = ∞ is accepted and gives the prior-only limit
    let mmse = if s2.is_infinite() {
        nf
    } else {
        nf * s2 / (1.0 + s2)
    };
    Ok(mmse * (-2.0 / nf * ln_factorial(n)).exp())
}

/// n/(n!)^{2/n}.
pub fn max_entropy_var_bound(n: usize) -> Result<f64> {
    max_entropy_mmse_bound(n, f64::INFINITY)
}

/// Differential entropy of the sorted standard Gaussian vector, in nats.
pub fn sorted_entropy(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let two_pi_e = 2.0 * std::f64::consts::PI * std::f64::consts::E;
    Ok(0.5 * n as f64 * two_pi_e.ln() - ln_factorial(n))
}

/// Width of the window around ε = 4 where the logarithmic limit is used.
const LOG_BRANCH_WINDOW: f64 = 1e-9;

/// Upper bound on Σᵢ |Φ⁻¹(i/(n+1))|^{2ε}:
/// 2^{11ε/4+1}·(n+1)^{ε/4}·(1 + (K^{1-ε/4} - 1)/(1 - ε/4)), K = ⌈(n+1)/2⌉.
///
/// At ε = 4 the ratio is replaced by its limit ln K.
pub fn quantile_power_sum_bound(n: usize, eps: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::Domain(format!(
            "exponent must be finite and nonnegative, got {eps}"
        )));
    }
    let k = (n + 2) / 2;
    let kf = k as f64;
    let r = 1.0 - eps / 4.0;
    let ratio = if r.abs() < LOG_BRANCH_WINDOW {
        kf.ln()
    } else {
        (kf.powf(r) - 1.0) / r
    };
    Ok(2f64.powf(11.0 * eps / 4.0 + 1.0) * (n as f64 + 1.0).powf(eps / 4.0) * (1.0 + ratio))
}

/// Σᵢ |Φ⁻¹(i/(n+1))|^{2ε}, with 0⁰ = 1.
pub fn quantile_power_sum(n: usize, eps: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let mut sum = 0.0;
    for i in 1..=n {
        sum += quantile_mean_approx(i, n)?.abs().powf(2.0 * eps);
    }
    Ok(sum)
}
