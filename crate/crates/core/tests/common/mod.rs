#![allow(dead_code)]

use klnn::bias::{BiasEntry, EstimatorKind};
use klnn::{Dataset, KernelFamily};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` standard normal points in `R^d`.
pub fn normal_data(seed: u64, n: usize, d: usize) -> Dataset {
    let mut r = rng(seed);
    let coords = (0..n * d).map(|_| r.sample::<f64, _>(StandardNormal)).collect();
    Dataset::from_flat(coords, d).unwrap()
}

/// `n` points uniform on `[0, 1]^d`.
pub fn uniform_data(seed: u64, n: usize, d: usize) -> Dataset {
    let mut r = rng(seed);
    let coords = (0..n * d).map(|_| r.random::<f64>()).collect();
    Dataset::from_flat(coords, d).unwrap()
}

/// A Haar-random orthogonal matrix, from the QR factor of a Gaussian matrix
/// with the signs of `R`'s diagonal folded into `Q`.
pub fn random_rotation(seed: u64, d: usize) -> DMatrix<f64> {
    let mut r = rng(seed);
    let g = DMatrix::from_fn(d, d, |_, _| r.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let mut q = qr.q();
    let rr = qr.r();
    for j in 0..d {
        if rr[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// `x -> Q x + t` applied to every point.
pub fn rigid_motion(data: &Dataset, q: &DMatrix<f64>, t: &[f64]) -> Dataset {
    let d = data.d();
    data.map_points(d, |p, out| {
        for a in 0..d {
            out[a] = t[a] + (0..d).map(|b| q[(a, b)] * p[b]).sum::<f64>();
        }
    })
    .unwrap()
}

/// A bias entry with constant 1 for timing or invariance checks.
pub fn unit_bias(k: usize, d: usize, alpha: f64, kind: EstimatorKind, m_trunc: usize) -> BiasEntry {
    BiasEntry {
        k,
        d,
        alpha,
        kind,
        bias: 1.0,
        stderr: 0.0,
        trials: 1,
        m_trunc,
        seed: 0,
    }
}

pub fn gaussian_kde() -> EstimatorKind {
    EstimatorKind::Kde(KernelFamily::Gaussian)
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}
