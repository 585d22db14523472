//! Comparison estimators: the classical k-NN resubstitution estimator and a
//! leave-one-out fixed-bandwidth KDE.

use std::fmt;
use std::str::FromStr;

use statrs::function::gamma::ln_gamma;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::estimate::{per_point, EstimateResult, Method};
use crate::kernels::{unit_ball_volume, KernelSpec};
use crate::neighbors::build_index;

/// `C_k = [Gamma(k) / Gamma(k + 1 - alpha)]^(1 / (1 - alpha))`.
pub fn leonenko_constant(k: usize, alpha: f64) -> Result<f64> {
    if alpha == 1.0 {
        return Err(Error::AlphaOne);
    }
    let shifted = k as f64 + 1.0 - alpha;
    if !(shifted > 0.0) {
        return Err(Error::InvalidK {
            k,
            alpha_minus_one: alpha - 1.0,
        });
    }
    Ok(((ln_gamma(k as f64) - ln_gamma(shifted)) / (1.0 - alpha)).exp())
}

/// `(1/n) sum_i [(n - 1) C_k c_d rho_{k,i}^d]^(1 - alpha)`.
pub fn estimate_j_leonenko(dataset: &Dataset, k: usize, alpha: f64) -> Result<EstimateResult> {
    let (n, d) = (dataset.n(), dataset.d());
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if alpha == 1.0 {
        return Ok(baseline_result(1.0, Method::Leonenko, k, alpha, None, n, d));
    }
    let ck = leonenko_constant(k, alpha)?;
    if n < k + 1 {
        return Err(Error::MTooLarge {
            m: k,
            available: n.saturating_sub(1),
        });
    }
    let index = build_index(dataset)?;
    let scale = (n - 1) as f64 * ck * unit_ball_volume(d);
    let terms = per_point(n, |i| {
        let rho = index.rho(i, k)?;
        Ok((scale * rho.powi(d as i32)).powf(1.0 - alpha))
    })?;
    let value = terms.iter().sum::<f64>() / n as f64;
    if !value.is_finite() {
        return Err(Error::NonFinite { index: 0 });
    }
    Ok(baseline_result(value, Method::Leonenko, k, alpha, None, n, d))
}

/// Bandwidth choice for [`estimate_j_kde_fixed`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bandwidth {
    /// `sigma (4 / ((d + 2) n))^(1 / (d + 4))` with `sigma^2` the mean marginal variance.
    Silverman,
    Fixed(f64),
}

impl Bandwidth {
    pub fn resolve(self, dataset: &Dataset) -> Result<f64> {
        match self {
            Bandwidth::Fixed(h) if h > 0.0 && h.is_finite() => Ok(h),
            Bandwidth::Fixed(h) => Err(Error::InvalidParameter(format!("bandwidth must be positive, got {h}"))),
            Bandwidth::Silverman => {
                let sigma = pooled_sd(dataset);
                if !(sigma > 0.0) {
                    return Err(Error::ZeroBandwidth);
                }
                let (n, d) = (dataset.n() as f64, dataset.d() as f64);
                Ok(sigma * (4.0 / ((d + 2.0) * n)).powf(1.0 / (d + 4.0)))
            }
        }
    }
}

impl fmt::Display for Bandwidth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bandwidth::Silverman => f.write_str("silverman"),
            Bandwidth::Fixed(h) => write!(f, "{h}"),
        }
    }
}

impl FromStr for Bandwidth {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("silverman") {
            return Ok(Bandwidth::Silverman);
        }
        let h: f64 = s
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("bandwidth must be 'silverman' or a number, got '{s}'")))?;
        if h > 0.0 && h.is_finite() {
            Ok(Bandwidth::Fixed(h))
        } else {
            Err(Error::InvalidParameter(format!("bandwidth must be positive, got {h}")))
        }
    }
}

// sqrt of the mean marginal variance, which depends only on the trace of the
// sample covariance and is therefore rotation invariant
fn pooled_sd(dataset: &Dataset) -> f64 {
    let (n, d) = (dataset.n(), dataset.d());
    let mut mean = vec![0.0; d];
    for p in dataset.points() {
        for (m, x) in mean.iter_mut().zip(p) {
            *m += x;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    let mut ss = 0.0;
    for p in dataset.points() {
        for (m, x) in mean.iter().zip(p) {
            ss += (x - m) * (x - m);
        }
    }
    (ss / ((n - 1) * d) as f64).sqrt()
}

/// Leave-one-out resubstitution with a global bandwidth:
/// `(1/n) sum_i [(1 / ((n - 1) h^d)) sum_{j != i} K((X_j - X_i) / h)]^(alpha - 1)`.
pub fn estimate_j_kde_fixed(
    dataset: &Dataset,
    kernel: &KernelSpec,
    alpha: f64,
    bandwidth: Bandwidth,
) -> Result<EstimateResult> {
    let (n, d) = (dataset.n(), dataset.d());
    if kernel.dim != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: kernel.dim,
        });
    }
    if !alpha.is_finite() {
        return Err(Error::InvalidParameter("alpha must be finite".into()));
    }
    if alpha == 1.0 {
        return Ok(baseline_result(1.0, Method::KdeFixed, 0, alpha, Some(kernel), n, d));
    }
    let h = bandwidth.resolve(dataset)?;
    let norm = (n - 1) as f64 * h.powi(d as i32);
    let inv_h2 = 1.0 / (h * h);
    let terms = per_point(n, |i| {
        let xi = dataset.point(i);
        let mut sum = 0.0;
        for (j, xj) in dataset.points().enumerate() {
            if j == i {
                continue;
            }
            let r2: f64 = xi.iter().zip(xj).map(|(a, b)| (a - b) * (a - b)).sum();
            sum += kernel.eval_sq_radius(r2 * inv_h2);
        }
        let t = (sum / norm).powf(alpha - 1.0);
        if t.is_finite() {
            Ok(t)
        } else {
            Err(Error::NonFinite { index: i })
        }
    })?;
    let value = terms.iter().sum::<f64>() / n as f64;
    Ok(baseline_result(value, Method::KdeFixed, 0, alpha, Some(kernel), n, d))
}

fn baseline_result(
    value: f64,
    method: Method,
    k: usize,
    alpha: f64,
    kernel: Option<&KernelSpec>,
    n: usize,
    d: usize,
) -> EstimateResult {
    EstimateResult {
        value,
        per_point_terms: None,
        method,
        k,
        alpha,
        kernel: kernel.map(|k| k.family),
        bias: 1.0,
        bias_seed: None,
        n,
        d,
        cap_hits: 0,
        regularized: 0,
    }
}
