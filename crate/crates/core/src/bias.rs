//! Monte Carlo evaluation of the universal debiasing constants.
//!
//! For fixed `k` the resubstitution estimators converge to `B * J_alpha`
//! rather than `J_alpha`, where `B` depends only on `(k, d, alpha)` and the
//! kernel. Conditional on a sample point, the rescaled neighbor offsets
//! behave like `xi_j * R_j^(1/d)` with `R_j` the partial sums of i.i.d.
//! standard exponentials and `xi_j` uniform directions on the sphere, so `B`
//! is an expectation over that model and is estimated here by simulation.
//!
//! Every trial draws from its own pair of ChaCha streams keyed by
//! `(seed, trial)`: one for the exponentials, one for the directions. Trial
//! values are reduced in trial order, so results do not depend on the number
//! of worker threads.

use std::fmt;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::{unit_ball_volume, KernelFamily, KernelSpec};
use crate::llde::GaussianFit;

/// Default Monte Carlo settings for the kernel table.
pub const KDE_DEFAULT_TRIALS: usize = 1_000_000;
/// Default Monte Carlo settings for the local-likelihood table.
pub const LLDE_DEFAULT_TRIALS: usize = 10_000;
pub const DEFAULT_M_TRUNC: usize = 5_000;

/// Which estimator a bias constant belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EstimatorKind {
    Kde(KernelFamily),
    Llde,
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EstimatorKind::Kde(kernel) => write!(f, "kde/{kernel}"),
            EstimatorKind::Llde => f.write_str("llde"),
        }
    }
}

/// Lookup key of a [`BiasEntry`]. `alpha` is compared bitwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BiasKey {
    pub k: usize,
    pub d: usize,
    alpha_bits: u64,
    pub kind: EstimatorKind,
}

impl BiasKey {
    pub fn new(k: usize, d: usize, alpha: f64, kind: EstimatorKind) -> Self {
        // Fold -0.0 into 0.0 so equal alphas compare equal.
        let alpha = if alpha == 0.0 { 0.0 } else { alpha };
        Self {
            k,
            d,
            alpha_bits: alpha.to_bits(),
            kind,
        }
    }

    pub fn alpha(&self) -> f64 {
        f64::from_bits(self.alpha_bits)
    }
}

impl fmt::Display for BiasKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(k={}, d={}, alpha={}, {})", self.k, self.d, self.alpha(), self.kind)
    }
}

/// A Monte Carlo estimate of one debiasing constant.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasEntry {
    pub k: usize,
    pub d: usize,
    pub alpha: f64,
    pub kind: EstimatorKind,
    pub bias: f64,
    pub stderr: f64,
    pub trials: usize,
    pub m_trunc: usize,
    pub seed: u64,
}

impl BiasEntry {
    pub fn key(&self) -> BiasKey {
        BiasKey::new(self.k, self.d, self.alpha, self.kind)
    }

    /// The trivial entry for `alpha = 1`.
    fn unit(k: usize, d: usize, kind: EstimatorKind, trials: usize, m_trunc: usize, seed: u64) -> Self {
        Self {
            k,
            d,
            alpha: 1.0,
            kind,
            bias: 1.0,
            stderr: 0.0,
            trials,
            m_trunc,
            seed,
        }
    }
}

/// The two independent random streams of one Monte Carlo trial.
#[derive(Debug, Clone)]
pub struct TrialRng {
    pub sums: ChaCha8Rng,
    pub directions: ChaCha8Rng,
}

impl TrialRng {
    pub fn new(seed: u64, trial: u64) -> Self {
        let mut sums = ChaCha8Rng::seed_from_u64(seed);
        sums.set_stream(2 * trial);
        let mut directions = ChaCha8Rng::seed_from_u64(seed);
        directions.set_stream(2 * trial + 1);
        Self { sums, directions }
    }

    #[inline]
    fn exponential(&mut self) -> f64 {
        self.sums.sample(Exp1)
    }
}

/// Draws a uniformly distributed unit vector into `out`.
pub fn haar_direction<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    if out.len() == 1 {
        out[0] = if rng.random::<bool>() { 1.0 } else { -1.0 };
        return;
    }
    loop {
        let mut norm2 = 0.0;
        for v in out.iter_mut() {
            *v = rng.sample(StandardNormal);
            norm2 += *v * *v;
        }
        let norm = norm2.sqrt();
        if norm >= 1e-100 {
            out.iter_mut().for_each(|v| *v /= norm);
            return;
        }
    }
}

/// `t^(2/d)`, the squared rescaled radius for a partial-sum ratio `t`.
#[inline]
pub(crate) fn radial_sq(t: f64, d: usize) -> f64 {
    match d {
        1 => t * t,
        2 => t,
        3 => {
            let c = t.cbrt();
            c * c
        }
        4 => t.sqrt(),
        _ => t.powf(2.0 / d as f64),
    }
}

/// One draw from the limiting nearest-neighbor model.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderStatSample {
    /// `R_1 < R_2 < ... < R_m`, partial sums of standard exponentials.
    pub partial_sums: Vec<f64>,
    /// `m` unit vectors of length `d`, row-major.
    pub directions: Vec<f64>,
    pub m: usize,
    pub d: usize,
}

impl OrderStatSample {
    pub fn direction(&self, j: usize) -> &[f64] {
        &self.directions[j * self.d..(j + 1) * self.d]
    }

    /// Builds a sample from explicit partial sums and directions.
    pub fn from_parts(partial_sums: Vec<f64>, directions: Vec<f64>, d: usize) -> Result<Self> {
        let m = partial_sums.len();
        if m == 0 || d == 0 || directions.len() != m * d {
            return Err(Error::InvalidParameter(
                "order-statistic sample needs m >= 1 sums and m directions of length d".into(),
            ));
        }
        if partial_sums[0] <= 0.0 || partial_sums.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(
                "partial sums must be positive and strictly increasing".into(),
            ));
        }
        Ok(Self {
            partial_sums,
            directions,
            m,
            d,
        })
    }
}

/// Draws `m` partial sums and `m` Haar directions in dimension `d`.
pub fn sample_order_stats(rng: &mut TrialRng, m: usize, d: usize) -> OrderStatSample {
    assert!(m >= 1 && d >= 1);
    let mut partial_sums = Vec::with_capacity(m);
    let mut acc = 0.0;
    for _ in 0..m {
        acc += rng.exponential();
        partial_sums.push(acc);
    }
    let mut directions = vec![0.0; m * d];
    for chunk in directions.chunks_exact_mut(d) {
        haar_direction(&mut rng.directions, chunk);
    }
    OrderStatSample {
        partial_sums,
        directions,
        m,
        d,
    }
}

/// `sum_j K(xi_j R_j^(1/d) / R_k^(1/d))` over the whole sample.
pub fn s_tilde_kde(sample: &OrderStatSample, k: usize, kernel: &KernelSpec) -> f64 {
    assert!(k >= 1 && k <= sample.m);
    let rk = sample.partial_sums[k - 1];
    sample
        .partial_sums
        .iter()
        .map(|&r| kernel.eval_sq_radius(radial_sq(r / rk, sample.d)))
        .sum()
}

/// Weighted local moments of the limiting model.
#[derive(Debug, Clone, PartialEq)]
pub struct TildeMoments {
    pub s0: f64,
    pub s1: Vec<f64>,
    /// Row-major `d x d`.
    pub s2: Vec<f64>,
}

#[derive(Debug, Clone)]
struct MomentAccumulator {
    d: usize,
    s0: f64,
    s1: Vec<f64>,
    s2: Vec<f64>,
}

impl MomentAccumulator {
    fn new(d: usize) -> Self {
        Self {
            d,
            s0: 0.0,
            s1: vec![0.0; d],
            s2: vec![0.0; d * d],
        }
    }

    /// Adds one term; returns the Gaussian weight.
    #[inline]
    fn add(&mut self, t: f64, xi: &[f64]) -> f64 {
        let r2 = radial_sq(t, self.d);
        let w = (-0.5 * r2).exp();
        if w == 0.0 {
            return 0.0;
        }
        let r = r2.sqrt();
        self.s0 += w;
        for a in 0..self.d {
            self.s1[a] += xi[a] * r * w;
            for b in a..self.d {
                self.s2[a * self.d + b] += xi[a] * xi[b] * r2 * w;
            }
        }
        w
    }

    fn finish(mut self) -> TildeMoments {
        let d = self.d;
        for a in 0..d {
            for b in 0..a {
                self.s2[a * d + b] = self.s2[b * d + a];
            }
        }
        TildeMoments {
            s0: self.s0,
            s1: self.s1,
            s2: self.s2,
        }
    }
}

/// `S~_0, S~_1, S~_2` with weights `exp(-(R_j/R_k)^(2/d) / 2)`.
pub fn s_tilde_llde(sample: &OrderStatSample, k: usize) -> TildeMoments {
    assert!(k >= 1 && k <= sample.m);
    let rk = sample.partial_sums[k - 1];
    let mut acc = MomentAccumulator::new(sample.d);
    for (j, &r) in sample.partial_sums.iter().enumerate() {
        acc.add(r / rk, sample.direction(j));
    }
    acc.finish()
}

/// Options shared by the two bias estimators.
#[derive(Debug, Clone, Copy)]
pub struct McConfig {
    pub trials: usize,
    pub m_trunc: usize,
    pub seed: u64,
}

impl McConfig {
    pub fn new(trials: usize, m_trunc: usize, seed: u64) -> Self {
        Self { trials, m_trunc, seed }
    }
}

fn validate(k: usize, d: usize, alpha: f64, mc: &McConfig) -> Result<()> {
    if k == 0 || d == 0 {
        return Err(Error::InvalidParameter("k and d must be positive".into()));
    }
    if mc.trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    if mc.m_trunc < k {
        return Err(Error::InvalidParameter(format!(
            "m_trunc = {} must be at least k = {k}",
            mc.m_trunc
        )));
    }
    if !alpha.is_finite() {
        return Err(Error::InvalidParameter("alpha must be finite".into()));
    }
    Ok(())
}

/// Mean and standard error of trial values, reduced in trial order.
fn summarize(values: &[f64]) -> Result<(f64, f64)> {
    if let Some(index) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let t = values.len() as f64;
    let mean = values.iter().sum::<f64>() / t;
    if values.len() < 2 {
        return Ok((mean, 0.0));
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    Ok((mean, (ss / (t - 1.0)).sqrt() / t.sqrt()))
}

/// The kernel sum `S~` for one trial, drawing only the exponentials it needs.
///
/// Bitwise equal to `s_tilde_kde(&sample_order_stats(..), ..)` on the same
/// trial stream: the omitted tail terms are exact zeros.
fn kde_trial(rng: &mut TrialRng, k: usize, d: usize, kernel: &KernelSpec, m: usize) -> (f64, f64) {
    let mut head = Vec::with_capacity(k);
    let mut acc = 0.0;
    for _ in 0..k {
        acc += rng.exponential();
        head.push(acc);
    }
    let rk = acc;
    let mut s = 0.0;
    for &r in &head {
        s += kernel.eval_sq_radius(radial_sq(r / rk, d));
    }
    let mut last_zero = head
        .last()
        .map(|&r| kernel.eval_sq_radius(radial_sq(r / rk, d)) == 0.0)
        .unwrap_or(false);
    let mut r = rk;
    for _ in k..m {
        if last_zero {
            break;
        }
        r += rng.exponential();
        let term = kernel.eval_sq_radius(radial_sq(r / rk, d));
        s += term;
        last_zero = term == 0.0;
    }
    (s, rk)
}

fn run_trials<F>(trials: usize, seed: u64, f: F) -> Vec<f64>
where
    F: Fn(&mut TrialRng) -> f64 + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|t| f(&mut TrialRng::new(seed, t as u64)))
        .collect()
}

/// Monte Carlo estimate of the kernel-estimator constant
/// `E[(c_d S~ / R_k)^(alpha - 1)]`.
pub fn bias_kde(k: usize, d: usize, alpha: f64, kernel: &KernelSpec, mc: McConfig) -> Result<BiasEntry> {
    validate(k, d, alpha, &mc)?;
    if kernel.dim != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: kernel.dim,
        });
    }
    let kind = EstimatorKind::Kde(kernel.family);
    if alpha == 1.0 {
        return Ok(BiasEntry::unit(k, d, kind, mc.trials, mc.m_trunc, mc.seed));
    }
    let c_d = unit_ball_volume(d);
    let values = run_trials(mc.trials, mc.seed, |rng| {
        let (s, rk) = kde_trial(rng, k, d, kernel, mc.m_trunc);
        (c_d * s / rk).powf(alpha - 1.0)
    });
    let (bias, stderr) = summarize(&values)?;
    Ok(BiasEntry {
        k,
        d,
        alpha,
        kind,
        bias,
        stderr,
        trials: mc.trials,
        m_trunc: mc.m_trunc,
        seed: mc.seed,
    })
}

/// Moments for one trial, stopping once the Gaussian weight underflows.
///
/// Matches `s_tilde_llde(&sample_order_stats(..), k)` on the same streams.
fn llde_trial(rng: &mut TrialRng, k: usize, d: usize, m: usize) -> (TildeMoments, f64) {
    let mut head = Vec::with_capacity(k);
    let mut acc_r = 0.0;
    for _ in 0..k {
        acc_r += rng.exponential();
        head.push(acc_r);
    }
    let rk = acc_r;
    let mut acc = MomentAccumulator::new(d);
    let mut xi = vec![0.0; d];
    let mut w = 1.0;
    for &r in &head {
        haar_direction(&mut rng.directions, &mut xi);
        w = acc.add(r / rk, &xi);
    }
    let mut r = rk;
    for _ in k..m {
        if w == 0.0 {
            break;
        }
        r += rng.exponential();
        haar_direction(&mut rng.directions, &mut xi);
        w = acc.add(r / rk, &xi);
    }
    (acc.finish(), rk)
}

/// The local-likelihood bias integrand for one set of limiting moments.
///
/// Returns the standardized density `c_d S~0 / (R_k (2 pi)^(d/2) |Sigma|^(1/2))
/// * exp(-mu' Sigma^-1 mu / 2)` and whether `Sigma` had to be regularized.
pub fn llde_standardized_density(moments: &TildeMoments, rk: f64, d: usize) -> (f64, bool) {
    let fit =
        GaussianFit::from_moments(moments.s0, &moments.s1, &moments.s2, d, true).expect("regularized fit cannot fail");
    let c_d = unit_ball_volume(d);
    let log_norm = (d as f64 / 2.0) * (2.0 * std::f64::consts::PI).ln();
    let value = (c_d.ln() + moments.s0.ln() - rk.ln() - log_norm - 0.5 * fit.log_det - 0.5 * fit.mahalanobis).exp();
    (value, fit.regularized)
}

/// Result of [`bias_llde_detailed`].
#[derive(Debug, Clone, PartialEq)]
pub struct LldeBias {
    pub entry: BiasEntry,
    pub regularized_trials: usize,
}

/// Monte Carlo estimate of the local-likelihood constant.
pub fn bias_llde(k: usize, d: usize, alpha: f64, mc: McConfig) -> Result<BiasEntry> {
    bias_llde_detailed(k, d, alpha, mc).map(|b| b.entry)
}

/// As [`bias_llde`], also reporting how many trials were regularized.
pub fn bias_llde_detailed(k: usize, d: usize, alpha: f64, mc: McConfig) -> Result<LldeBias> {
    validate(k, d, alpha, &mc)?;
    if alpha == 1.0 {
        return Ok(LldeBias {
            entry: BiasEntry::unit(k, d, EstimatorKind::Llde, mc.trials, mc.m_trunc, mc.seed),
            regularized_trials: 0,
        });
    }
    let outcomes: Vec<(f64, bool)> = (0..mc.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = TrialRng::new(mc.seed, t as u64);
            let (moments, rk) = llde_trial(&mut rng, k, d, mc.m_trunc);
            let (h, reg) = llde_standardized_density(&moments, rk, d);
            (h.powf(alpha - 1.0), reg)
        })
        .collect();
    let values: Vec<f64> = outcomes.iter().map(|o| o.0).collect();
    let regularized_trials = outcomes.iter().filter(|o| o.1).count();
    let (bias, stderr) = summarize(&values)?;
    if regularized_trials * 100 > mc.trials {
        return Err(Error::SingularExcess {
            regularized: regularized_trials,
            trials: mc.trials,
        });
    }
    Ok(LldeBias {
        entry: BiasEntry {
            k,
            d,
            alpha,
            kind: EstimatorKind::Llde,
            bias,
            stderr,
            trials: mc.trials,
            m_trunc: mc.m_trunc,
            seed: mc.seed,
        },
        regularized_trials,
    })
}

/// Per-trial values of `S~` for one trial index, via the full sampler.
///
/// Exposed for cross-checks between the streaming path and the reference.
pub fn kde_trial_reference(seed: u64, trial: u64, k: usize, kernel: &KernelSpec, m: usize) -> (f64, f64) {
    let mut rng = TrialRng::new(seed, trial);
    let sample = sample_order_stats(&mut rng, m, kernel.dim);
    (s_tilde_kde(&sample, k, kernel), sample.partial_sums[k - 1])
}

/// Streaming counterpart of [`kde_trial_reference`].
pub fn kde_trial_streaming(seed: u64, trial: u64, k: usize, kernel: &KernelSpec, m: usize) -> (f64, f64) {
    kde_trial(&mut TrialRng::new(seed, trial), k, kernel.dim, kernel, m)
}

/// Streaming local moments for one trial (see [`s_tilde_llde`]).
pub fn llde_trial_streaming(seed: u64, trial: u64, k: usize, d: usize, m: usize) -> (TildeMoments, f64) {
    llde_trial(&mut TrialRng::new(seed, trial), k, d, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn partial_sums_increase_and_directions_are_unit() {
        let mut rng = TrialRng::new(7, 0);
        for d in [1, 2, 3, 6] {
            let s = sample_order_stats(&mut rng, 100, d);
            assert!(s.partial_sums[0] > 0.0);
            assert!(s.partial_sums.windows(2).all(|w| w[1] > w[0]));
            for j in 0..s.m {
                let n: f64 = s.direction(j).iter().map(|x| x * x).sum::<f64>().sqrt();
                assert!((n - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gaussian_s_tilde_hand_value() {
        let s = OrderStatSample::from_parts(vec![1.0, 2.0, 3.0], vec![1.0, -1.0, 1.0], 1).unwrap();
        let g = KernelSpec::gaussian(1);
        let expected = (2.0 * PI).powf(-0.5) * ((-1.0f64 / 8.0).exp() + (-0.5f64).exp() + (-9.0f64 / 8.0).exp());
        assert_relative_eq!(s_tilde_kde(&s, 2, &g), expected, max_relative = 1e-14);
    }

    #[test]
    fn uniform_s_tilde_counts_first_k() {
        let mut rng = TrialRng::new(1, 3);
        for d in [1, 2, 3] {
            let s = sample_order_stats(&mut rng, 50, d);
            let u = KernelSpec::new(KernelFamily::Uniform, d);
            let expect = 6.0 / unit_ball_volume(d);
            assert_relative_eq!(s_tilde_kde(&s, 6, &u), expect, max_relative = 1e-14);
        }
    }

    #[test]
    fn llde_moments_hand_value() {
        let s = OrderStatSample::from_parts(vec![1.0, 4.0], vec![1.0, -1.0], 1).unwrap();
        let m = s_tilde_llde(&s, 2);
        let a = (-1.0f64 / 32.0).exp();
        let b = (-0.5f64).exp();
        assert_relative_eq!(m.s0, a + b, max_relative = 1e-15);
        assert_relative_eq!(m.s1[0], 0.25 * a - b, max_relative = 1e-14);
        assert_relative_eq!(m.s2[0], 0.0625 * a + b, max_relative = 1e-14);
    }

    #[test]
    fn llde_parity_under_direction_flip() {
        let mut rng = TrialRng::new(11, 5);
        let s = sample_order_stats(&mut rng, 40, 3);
        let flipped = OrderStatSample {
            directions: s.directions.iter().map(|x| -x).collect(),
            ..s.clone()
        };
        let a = s_tilde_llde(&s, 4);
        let b = s_tilde_llde(&flipped, 4);
        assert_eq!(a.s0, b.s0);
        assert_eq!(a.s2, b.s2);
        for (x, y) in a.s1.iter().zip(&b.s1) {
            assert_eq!(*x, -*y);
        }
    }

    #[test]
    fn k_equals_m_last_term_weight() {
        let s = OrderStatSample::from_parts(vec![0.5, 1.5], vec![0.6, 0.8, 0.0, 1.0], 2).unwrap();
        let full = s_tilde_llde(&s, 2);
        let w = (-0.5f64).exp();
        let head = {
            let t: f64 = 0.5 / 1.5;
            let ww = (-0.5 * t).exp();
            (ww, t.sqrt() * ww)
        };
        assert_relative_eq!(full.s0, head.0 + w, max_relative = 1e-15);
        assert_relative_eq!(full.s1[1], 0.8 * head.1 + w, max_relative = 1e-14);
    }

    #[test]
    fn streaming_matches_reference_bitwise() {
        for (d, fam) in [
            (1, KernelFamily::Gaussian),
            (2, KernelFamily::Gaussian),
            (3, KernelFamily::Epanechnikov),
            (2, KernelFamily::Uniform),
        ] {
            let kern = KernelSpec::new(fam, d);
            for t in 0..20 {
                let a = kde_trial_reference(99, t, 4, &kern, 300);
                let b = kde_trial_streaming(99, t, 4, &kern, 300);
                assert_eq!(a, b, "d={d} {fam} trial {t}");
            }
        }
        for d in [1, 2, 3] {
            for t in 0..10 {
                let mut rng = TrialRng::new(5, t);
                let sample = sample_order_stats(&mut rng, 400, d);
                let reference = s_tilde_llde(&sample, 5);
                let (streamed, rk) = llde_trial_streaming(5, t, 5, d, 400);
                assert_eq!(rk, sample.partial_sums[4]);
                assert_eq!(reference, streamed);
            }
        }
    }

    #[test]
    fn alpha_one_is_exact() {
        let mc = McConfig::new(10, 100, 0);
        let e = bias_kde(4, 2, 1.0, &KernelSpec::gaussian(2), mc).unwrap();
        assert_eq!((e.bias, e.stderr), (1.0, 0.0));
        let e = bias_llde(4, 2, 1.0, mc).unwrap();
        assert_eq!((e.bias, e.stderr), (1.0, 0.0));
    }

    #[test]
    fn rejects_bad_config() {
        let g = KernelSpec::gaussian(1);
        assert!(bias_kde(4, 1, 2.0, &g, McConfig::new(0, 10, 0)).is_err());
        assert!(bias_kde(4, 1, 2.0, &g, McConfig::new(10, 3, 0)).is_err());
        assert!(bias_kde(4, 2, 2.0, &g, McConfig::new(10, 10, 0)).is_err());
    }

    #[test]
    fn uniform_kernel_bias_matches_erlang_moment() {
        // With the uniform kernel c_d S~ / R_k = k / R_k and E[1/R_k] = 1/(k-1).
        let u = KernelSpec::new(KernelFamily::Uniform, 2);
        let e = bias_kde(5, 2, 2.0, &u, McConfig::new(100_000, 50, 3)).unwrap();
        assert!((e.bias - 1.25).abs() < 4.0 * e.stderr, "{e:?}");
    }
}
