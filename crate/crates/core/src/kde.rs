//! Kernel density estimation with k-NN bandwidth and the debiased
//! resubstitution estimator built on it.

use crate::bias::{BiasEntry, EstimatorKind};
use crate::dataset::Dataset;
use crate::error::Result;
use crate::estimate::{per_point, resubstitute, EstimateResult, EstimatorConfig, Method};
use crate::kernels::KernelSpec;
use crate::neighbors::{build_index, truncation_size, NeighborIndex, NeighborList};

/// `(1 / (n rho^d)) sum_j K(|X_j - X_i| / rho)` over a neighbor list, with
/// `rho` the distance to the `k`-th entry.
pub(crate) fn kde_density_from_list(list: &NeighborList, kernel: &KernelSpec, k: usize, n: usize) -> f64 {
    let rho = list.kth_distance(k);
    let sum: f64 = list.entries.iter().map(|e| kernel.eval_radius(e.distance / rho)).sum();
    sum / (n as f64 * rho.powi(kernel.dim as i32))
}

/// Density at sample `i` using bandwidth `rho_{k,i}` and the default
/// truncated neighbor set.
pub fn kde_density_at(index: &NeighborIndex<'_>, kernel: &KernelSpec, k: usize, i: usize) -> Result<f64> {
    let m = truncation_size(index.n(), k)?;
    kde_density_with(index, kernel, k, m, i)
}

/// As [`kde_density_at`] with an explicit neighbor count `m >= k`.
pub fn kde_density_with(index: &NeighborIndex<'_>, kernel: &KernelSpec, k: usize, m: usize, i: usize) -> Result<f64> {
    let list = index.knn(i, m.max(k))?;
    Ok(kde_density_from_list(&list, kernel, k, index.n()))
}

/// Debiased estimate of `J_alpha = integral f^alpha`.
pub fn estimate_j_kde(dataset: &Dataset, config: &EstimatorConfig, bias: &BiasEntry) -> Result<EstimateResult> {
    let (n, d) = (dataset.n(), dataset.d());
    config.validate(n, d)?;
    config.check_bias(bias, d, EstimatorKind::Kde(config.kernel.family))?;
    let index = build_index(dataset)?;
    let m = config.truncation_for(n, bias)?;
    let densities = per_point(n, |i| kde_density_with(&index, &config.kernel, config.k, m, i))?;
    let r = resubstitute(&densities, config.alpha, bias.bias, config.h_cap)?;
    Ok(EstimateResult {
        value: r.value,
        per_point_terms: config.keep_terms.then_some(r.terms),
        method: Method::Kde,
        k: config.k,
        alpha: config.alpha,
        kernel: Some(config.kernel.family),
        bias: bias.bias,
        bias_seed: Some(bias.seed),
        n,
        d,
        cap_hits: r.cap_hits,
        regularized: 0,
    })
}

/// Renyi entropy `log(J_hat) / (1 - alpha)` from [`estimate_j_kde`].
pub fn estimate_h_kde(dataset: &Dataset, config: &EstimatorConfig, bias: &BiasEntry) -> Result<EstimateResult> {
    if config.alpha == 1.0 {
        return Err(crate::Error::AlphaOne);
    }
    estimate_j_kde(dataset, config, bias)?.into_renyi()
}
