//! Fixtures shared by the benchmarks.

use klnn::bias::{BiasEntry, EstimatorKind};
use klnn::{Dataset, Family, KernelFamily};

/// A correlated Gaussian sample from the synthetic families.
pub fn gaussian_sample(d: usize, n: usize) -> Dataset {
    let family = if d == 6 { Family::Gauss6dBlock } else { Family::Gauss2d };
    klnn::synth::sample(family, 0.9, n, 7, 0).expect("valid sample parameters")
}

/// A placeholder bias entry; benchmarks time the estimator, not its accuracy.
pub fn unit_bias(k: usize, d: usize, alpha: f64, llde: bool, m_trunc: usize) -> BiasEntry {
    BiasEntry {
        k,
        d,
        alpha,
        kind: if llde {
            EstimatorKind::Llde
        } else {
            EstimatorKind::Kde(KernelFamily::Gaussian)
        },
        bias: 1.0,
        stderr: 0.0,
        trials: 1,
        m_trunc,
        seed: 0,
    }
}
