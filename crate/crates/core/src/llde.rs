//! Local likelihood density estimation with k-NN bandwidth.
//!
//! Around each sample a Gaussian is fitted to the neighbors with weights
//! `exp(-|X_j - X_i|^2 / (2 rho^2))`. The weighted mean `mu` and covariance
//! `Sigma` (in bandwidth units) give the density estimate
//!
//! ```text
//! f(X_i) = S0 / (n (2 pi)^(d/2) rho^d |Sigma|^(1/2)) * exp(-mu' Sigma^-1 mu / 2)
//! ```
//!
//! Near a boundary or a thin ridge `mu` and `Sigma` pick up the local shape,
//! which a plain kernel estimate (mean fixed at `X_i`, identity covariance)
//! cannot.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::bias::{BiasEntry, EstimatorKind};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::estimate::{per_point, resubstitute, EstimateResult, EstimatorConfig, Method};
use crate::neighbors::{build_index, truncation_size, NeighborIndex, NeighborList};

/// Relative eigenvalue floor below which `Sigma` is regularized.
pub const SIGMA_FLOOR: f64 = 1e-8;

/// A Gaussian fitted from weighted moments.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianFit {
    pub mu: Vec<f64>,
    /// Row-major `d x d`, before any regularization.
    pub sigma: Vec<f64>,
    /// `log |Sigma|` of the (possibly regularized) covariance.
    pub log_det: f64,
    /// `mu' Sigma^-1 mu` with the (possibly regularized) covariance.
    pub mahalanobis: f64,
    pub regularized: bool,
}

impl GaussianFit {
    /// Fits `mu = S1/S0`, `Sigma = S2/S0 - S1 S1'/S0^2`.
    ///
    /// If the smallest eigenvalue of `Sigma` is below
    /// `SIGMA_FLOOR * max(1, tr(Sigma)/d)` that same amount is added to the
    /// diagonal when `regularize` is set; otherwise `SingularSigma` is returned
    /// (with index `usize::MAX`, to be replaced by the caller).
    pub fn from_moments(s0: f64, s1: &[f64], s2: &[f64], d: usize, regularize: bool) -> Result<Self> {
        let mu: Vec<f64> = s1.iter().map(|v| v / s0).collect();
        let mut sigma = vec![0.0; d * d];
        for a in 0..d {
            for b in 0..d {
                sigma[a * d + b] = s2[a * d + b] / s0 - mu[a] * mu[b];
            }
        }
        for a in 0..d {
            for b in 0..a {
                let avg = 0.5 * (sigma[a * d + b] + sigma[b * d + a]);
                sigma[a * d + b] = avg;
                sigma[b * d + a] = avg;
            }
        }
        let trace: f64 = (0..d).map(|a| sigma[a * d + a]).sum();
        let floor = SIGMA_FLOOR * (trace / d as f64).max(1.0);

        if d == 1 {
            let mut var = sigma[0];
            let regularized = var < floor;
            if regularized {
                if !regularize {
                    return Err(Error::SingularSigma(usize::MAX));
                }
                var += floor;
            }
            return Ok(Self {
                mahalanobis: mu[0] * mu[0] / var,
                log_det: var.ln(),
                mu,
                sigma,
                regularized,
            });
        }

        let mut m = DMatrix::from_row_slice(d, d, &sigma);
        let min_eig = SymmetricEigen::new(m.clone())
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        let regularized = !(min_eig >= floor);
        if regularized {
            if !regularize {
                return Err(Error::SingularSigma(usize::MAX));
            }
            for a in 0..d {
                m[(a, a)] += floor;
            }
        }
        let chol = m.cholesky().ok_or(Error::SingularSigma(usize::MAX))?;
        let l = chol.l_dirty();
        let log_det = 2.0 * (0..d).map(|a| l[(a, a)].ln()).sum::<f64>();
        let z = chol.solve(&DVector::from_column_slice(&mu));
        let mahalanobis = mu.iter().zip(z.iter()).map(|(a, b)| a * b).sum();
        Ok(Self {
            mu,
            sigma,
            log_det,
            mahalanobis,
            regularized,
        })
    }
}

/// Weighted local moments around one sample, in bandwidth units.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalMoments {
    pub s0: f64,
    pub s1: Vec<f64>,
    /// Row-major `d x d`.
    pub s2: Vec<f64>,
    pub rho: f64,
    pub fit: GaussianFit,
}

impl LocalMoments {
    pub fn mu(&self) -> &[f64] {
        &self.fit.mu
    }

    pub fn sigma(&self) -> &[f64] {
        &self.fit.sigma
    }

    pub fn regularized(&self) -> bool {
        self.fit.regularized
    }
}

pub(crate) fn moments_from_list(
    data: &Dataset,
    list: &NeighborList,
    k: usize,
    regularize: bool,
) -> Result<LocalMoments> {
    let d = data.d();
    let center = data.point(list.center);
    let rho = list.kth_distance(k);
    let mut s0 = 0.0;
    let mut s1 = vec![0.0; d];
    let mut s2 = vec![0.0; d * d];
    let mut u = vec![0.0; d];
    for e in &list.entries {
        let t = e.distance / rho;
        let w = (-0.5 * t * t).exp();
        for (ua, (xa, ca)) in u.iter_mut().zip(data.point(e.index).iter().zip(center)) {
            *ua = (xa - ca) / rho;
        }
        s0 += w;
        for a in 0..d {
            s1[a] += u[a] * w;
            for b in a..d {
                s2[a * d + b] += u[a] * u[b] * w;
            }
        }
    }
    for a in 0..d {
        for b in 0..a {
            s2[a * d + b] = s2[b * d + a];
        }
    }
    let fit = GaussianFit::from_moments(s0, &s1, &s2, d, regularize).map_err(|e| match e {
        Error::SingularSigma(_) => Error::SingularSigma(list.center),
        other => other,
    })?;
    Ok(LocalMoments { s0, s1, s2, rho, fit })
}

/// `S0, S1, S2, mu, Sigma` at sample `i` with bandwidth `rho_{k,i}`.
pub fn local_moments(index: &NeighborIndex<'_>, i: usize, k: usize) -> Result<LocalMoments> {
    let m = truncation_size(index.n(), k)?;
    local_moments_with(index, i, k, m, true)
}

pub fn local_moments_with(
    index: &NeighborIndex<'_>,
    i: usize,
    k: usize,
    m: usize,
    regularize: bool,
) -> Result<LocalMoments> {
    let list = index.knn(i, m.max(k))?;
    moments_from_list(index.dataset(), &list, k, regularize)
}

pub(crate) fn density_from_moments(lm: &LocalMoments, n: usize, d: usize) -> f64 {
    let norm = n as f64 * (2.0 * std::f64::consts::PI).powf(d as f64 / 2.0) * lm.rho.powi(d as i32);
    lm.s0 / norm * (-0.5 * (lm.fit.log_det + lm.fit.mahalanobis)).exp()
}

/// Local likelihood density estimate at sample `i`.
pub fn llde_density_at(index: &NeighborIndex<'_>, i: usize, k: usize) -> Result<f64> {
    let lm = local_moments(index, i, k)?;
    Ok(density_from_moments(&lm, index.n(), index.d()))
}

/// Debiased k-LNN estimate of `J_alpha`.
///
/// The kernel in `config` is ignored; the local weight is always Gaussian.
pub fn estimate_j_klnn(dataset: &Dataset, config: &EstimatorConfig, bias: &BiasEntry) -> Result<EstimateResult> {
    let (n, d) = (dataset.n(), dataset.d());
    let mut cfg = config.clone();
    cfg.kernel = crate::kernels::KernelSpec::gaussian(d);
    cfg.validate(n, d)?;
    cfg.check_bias(bias, d, EstimatorKind::Llde)?;
    let index = build_index(dataset)?;
    let m = cfg.truncation_for(n, bias)?;
    let fits = per_point(n, |i| {
        let lm = local_moments_with(&index, i, cfg.k, m, cfg.regularize)?;
        Ok((density_from_moments(&lm, n, d), lm.fit.regularized))
    })?;
    let densities: Vec<f64> = fits.iter().map(|f| f.0).collect();
    let regularized = fits.iter().filter(|f| f.1).count();
    let r = resubstitute(&densities, cfg.alpha, bias.bias, cfg.h_cap)?;
    Ok(EstimateResult {
        value: r.value,
        per_point_terms: cfg.keep_terms.then_some(r.terms),
        method: Method::Klnn,
        k: cfg.k,
        alpha: cfg.alpha,
        kernel: None,
        bias: bias.bias,
        bias_seed: Some(bias.seed),
        n,
        d,
        cap_hits: r.cap_hits,
        regularized,
    })
}

/// Renyi entropy from [`estimate_j_klnn`].
pub fn estimate_h_klnn(dataset: &Dataset, config: &EstimatorConfig, bias: &BiasEntry) -> Result<EstimateResult> {
    if config.alpha == 1.0 {
        return Err(Error::AlphaOne);
    }
    estimate_j_klnn(dataset, config, bias)?.into_renyi()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn symmetric_three_points() {
        let ds = Dataset::from_scalars(&[-1.0, 0.0, 1.0]).unwrap();
        let idx = build_index(&ds).unwrap();
        let lm = local_moments(&idx, 1, 2).unwrap();
        let w = (-0.5f64).exp();
        assert_relative_eq!(lm.s0, 2.0 * w, max_relative = 1e-15);
        assert_eq!(lm.s1[0], 0.0);
        assert_relative_eq!(lm.s2[0], 2.0 * w, max_relative = 1e-15);
        assert_eq!(lm.mu()[0], 0.0);
        assert_relative_eq!(lm.sigma()[0], 1.0, max_relative = 1e-15);
        assert!(!lm.regularized());
        let f = llde_density_at(&idx, 1, 2).unwrap();
        assert_relative_eq!(f, 0.161_313_8, max_relative = 1e-6);
        assert_relative_eq!(
            f,
            2.0 * w / (3.0 * (2.0 * std::f64::consts::PI).sqrt()),
            max_relative = 1e-14
        );
    }

    #[test]
    fn reflection_negates_first_moment() {
        let pts = [
            [0.1, 0.2],
            [0.9, -0.3],
            [0.4, 1.3],
            [-0.7, 0.5],
            [1.6, 1.1],
            [-0.2, -1.0],
        ];
        let ds = Dataset::from_rows(&pts).unwrap();
        let c = pts[0];
        let refl: Vec<[f64; 2]> = pts.iter().map(|p| [2.0 * c[0] - p[0], 2.0 * c[1] - p[1]]).collect();
        let ds2 = Dataset::from_rows(&refl).unwrap();
        let a = local_moments(&build_index(&ds).unwrap(), 0, 3).unwrap();
        let b = local_moments(&build_index(&ds2).unwrap(), 0, 3).unwrap();
        assert_relative_eq!(a.s0, b.s0, max_relative = 1e-14);
        for (x, y) in a.s1.iter().zip(&b.s1) {
            assert_relative_eq!(*x, -*y, max_relative = 1e-12);
        }
        for (x, y) in a.sigma().iter().zip(b.sigma()) {
            assert_relative_eq!(*x, *y, max_relative = 1e-12);
        }
    }

    #[test]
    fn collinear_points_are_regularized_or_rejected() {
        let pts: Vec<[f64; 2]> = (0..12).map(|i| [i as f64, 2.0 * i as f64]).collect();
        let ds = Dataset::from_rows(&pts).unwrap();
        let idx = build_index(&ds).unwrap();
        let lm = local_moments_with(&idx, 5, 4, 6, true).unwrap();
        assert!(lm.regularized());
        assert!(matches!(
            local_moments_with(&idx, 5, 4, 6, false),
            Err(Error::SingularSigma(5))
        ));
    }

    #[test]
    fn identity_fit_matches_closed_form() {
        let fit = GaussianFit::from_moments(2.0, &[0.0, 0.0], &[2.0, 0.0, 0.0, 2.0], 2, true).unwrap();
        assert_eq!(fit.log_det, 0.0);
        assert_eq!(fit.mahalanobis, 0.0);
        let fit = GaussianFit::from_moments(1.0, &[0.5, 0.0], &[1.25, 0.0, 0.0, 4.0], 2, true).unwrap();
        // Sigma = diag(1, 4), mu = (0.5, 0)
        assert_relative_eq!(fit.log_det, 4f64.ln(), max_relative = 1e-14);
        assert_relative_eq!(fit.mahalanobis, 0.25, max_relative = 1e-14);
    }
}
