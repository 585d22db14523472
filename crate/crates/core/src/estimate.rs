//! Types shared by all resubstitution estimators.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::bias::{BiasEntry, EstimatorKind};
use crate::error::{Error, Result};
use crate::kernels::{KernelFamily, KernelSpec};

/// Upper bound on per-point density values before exponentiation.
pub const DEFAULT_H_CAP: f64 = 1e12;

/// The estimators this crate provides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Kernel density estimate with k-NN bandwidth, debiased.
    Kde,
    /// Local likelihood (local Gaussian) estimate with k-NN bandwidth, debiased.
    Klnn,
    /// Classical k-NN resubstitution baseline.
    Leonenko,
    /// Fixed-bandwidth leave-one-out KDE baseline.
    KdeFixed,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Kde => "kde",
            Method::Klnn => "klnn",
            Method::Leonenko => "leonenko",
            Method::KdeFixed => "kde-fixed",
        }
    }

    /// Whether this method needs a precomputed bias constant.
    pub fn needs_bias(self) -> bool {
        matches!(self, Method::Kde | Method::Klnn)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kde" => Ok(Method::Kde),
            "klnn" => Ok(Method::Klnn),
            "leonenko" => Ok(Method::Leonenko),
            "kde-fixed" => Ok(Method::KdeFixed),
            other => Err(Error::InvalidParameter(format!("unknown method '{other}'"))),
        }
    }
}

/// How many nearest neighbors enter the local sums.
///
/// The debiasing constant depends on this count, so the default uses the
/// count the constant was simulated with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Truncation {
    /// The `m_trunc` recorded in the bias entry.
    #[default]
    MatchBias,
    /// `max(k, ceil(ln n))`, capped at `n - 1`.
    LogN,
    Fixed(usize),
}

impl fmt::Display for Truncation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Truncation::MatchBias => f.write_str("bias"),
            Truncation::LogN => f.write_str("log"),
            Truncation::Fixed(m) => write!(f, "{m}"),
        }
    }
}

impl FromStr for Truncation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bias" => Ok(Truncation::MatchBias),
            "log" => Ok(Truncation::LogN),
            other => other
                .parse::<usize>()
                .ok()
                .filter(|&m| m > 0)
                .map(Truncation::Fixed)
                .ok_or_else(|| {
                    Error::InvalidParameter(format!("truncation must be 'bias', 'log' or a count, got '{other}'"))
                }),
        }
    }
}

/// Configuration of the debiased k-NN bandwidth estimators.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorConfig {
    pub k: usize,
    pub alpha: f64,
    pub kernel: KernelSpec,
    /// Per-point density values are clamped to at most this.
    pub h_cap: f64,
    /// Regularize near-singular local covariances instead of failing.
    pub regularize: bool,
    /// Keep the per-point summands in the result.
    pub keep_terms: bool,
    pub truncation: Truncation,
}

impl EstimatorConfig {
    pub fn new(k: usize, alpha: f64, kernel: KernelSpec) -> Self {
        Self {
            k,
            alpha,
            kernel,
            h_cap: DEFAULT_H_CAP,
            regularize: true,
            keep_terms: false,
            truncation: Truncation::MatchBias,
        }
    }

    pub fn with_terms(mut self) -> Self {
        self.keep_terms = true;
        self
    }

    pub fn with_truncation(mut self, m: Truncation) -> Self {
        self.truncation = m;
        self
    }

    pub(crate) fn validate(&self, n: usize, d: usize) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        if !self.alpha.is_finite() {
            return Err(Error::InvalidParameter("alpha must be finite".into()));
        }
        if !(self.h_cap > 0.0) {
            return Err(Error::InvalidParameter("h_cap must be positive".into()));
        }
        if n < self.k + 1 {
            return Err(Error::MTooLarge {
                m: self.k,
                available: n.saturating_sub(1),
            });
        }
        if self.kernel.dim != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: self.kernel.dim,
            });
        }
        Ok(())
    }

    /// Neighbors used in local sums for a sample of size `n`.
    pub fn truncation_for(&self, n: usize, bias: &BiasEntry) -> Result<usize> {
        let m = match self.truncation {
            Truncation::MatchBias => bias.m_trunc,
            Truncation::Fixed(m) => m,
            Truncation::LogN => return crate::neighbors::truncation_size(n, self.k),
        };
        if m < self.k {
            return Err(Error::InvalidParameter(format!(
                "truncation {m} is below k = {}",
                self.k
            )));
        }
        if m > n - 1 {
            return Err(Error::MTooLarge { m, available: n - 1 });
        }
        Ok(m)
    }

    pub(crate) fn check_bias(&self, bias: &BiasEntry, d: usize, kind: EstimatorKind) -> Result<()> {
        let alpha_ok = bias.alpha == self.alpha;
        if bias.k != self.k || bias.d != d || !alpha_ok || bias.kind != kind {
            return Err(Error::BiasMismatch {
                entry: bias.key().to_string(),
                config: format!("(k={}, d={d}, alpha={}, {kind})", self.k, self.alpha),
            });
        }
        if !(bias.bias > 0.0) || !bias.bias.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "bias constant must be positive, got {}",
                bias.bias
            )));
        }
        Ok(())
    }
}

/// A scalar estimate of `J_alpha` or `H_alpha` with its configuration echo.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateResult {
    pub value: f64,
    /// The `n` summands `f_hat(X_i)^(alpha - 1)` when requested.
    pub per_point_terms: Option<Vec<f64>>,
    pub method: Method,
    pub k: usize,
    pub alpha: f64,
    pub kernel: Option<KernelFamily>,
    /// Debiasing constant that divided the plug-in mean (1 for baselines).
    pub bias: f64,
    pub bias_seed: Option<u64>,
    pub n: usize,
    pub d: usize,
    /// Per-point densities clamped by `h_cap`.
    pub cap_hits: usize,
    /// Points whose local covariance needed regularization.
    pub regularized: usize,
}

impl EstimateResult {
    /// Converts a `J_alpha` estimate into the Renyi entropy `log(J) / (1 - alpha)`.
    pub fn into_renyi(mut self) -> Result<Self> {
        self.value = renyi_from_j(self.value, self.alpha)?;
        Ok(self)
    }
}

/// `log(J) / (1 - alpha)`.
pub fn renyi_from_j(j: f64, alpha: f64) -> Result<f64> {
    if alpha == 1.0 {
        return Err(Error::AlphaOne);
    }
    if !(j > 0.0) || !j.is_finite() {
        return Err(Error::NonPositiveJ(j));
    }
    Ok(j.ln() / (1.0 - alpha))
}

/// Output of the common resubstitution step.
pub(crate) struct Resubstituted {
    pub value: f64,
    pub terms: Vec<f64>,
    pub cap_hits: usize,
}

/// `(1/n) sum_i min(f_i, cap)^(alpha - 1) / bias`, reduced in index order.
pub(crate) fn resubstitute(densities: &[f64], alpha: f64, bias: f64, h_cap: f64) -> Result<Resubstituted> {
    let exponent = alpha - 1.0;
    let mut cap_hits = 0;
    let mut terms = Vec::with_capacity(densities.len());
    for (i, &f) in densities.iter().enumerate() {
        if !f.is_finite() || f < 0.0 {
            return Err(Error::NonFinite { index: i });
        }
        let f = if f > h_cap {
            cap_hits += 1;
            h_cap
        } else {
            f
        };
        let term = if exponent == 0.0 { 1.0 } else { f.powf(exponent) };
        if !term.is_finite() {
            return Err(Error::NonFinite { index: i });
        }
        terms.push(term);
    }
    let n = densities.len() as f64;
    let value = terms.iter().sum::<f64>() / n / bias;
    Ok(Resubstituted { value, terms, cap_hits })
}

/// Evaluates `f` at every sample index in parallel, preserving order.
pub(crate) fn per_point<T, F>(n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    let results: Vec<Result<T>> = (0..n).into_par_iter().map(f).collect();
    results.into_iter().collect()
}
