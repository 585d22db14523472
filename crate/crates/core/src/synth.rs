//! Synthetic distributions with closed-form `J_alpha`, and a quadrature
//! oracle to check those closed forms.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Correlated Gaussian families used in the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// `N(0, [[1, r], [r, 1]])`.
    Gauss2d,
    /// Three independent copies of `Gauss2d` stacked into `R^6`.
    Gauss6dBlock,
    /// Equal mixture of `Gauss2d(r)` and `Gauss2d(-r)`.
    Mixture2d,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Gauss2d => "gauss2d",
            Family::Gauss6dBlock => "gauss6d",
            Family::Mixture2d => "mixture2d",
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Family::Gauss6dBlock => 6,
            _ => 2,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gauss2d" => Ok(Family::Gauss2d),
            "gauss6d" | "gauss6dblock" => Ok(Family::Gauss6dBlock),
            "mixture2d" | "mixture" => Ok(Family::Mixture2d),
            other => Err(Error::InvalidParameter(format!("unknown family '{other}'"))),
        }
    }
}

fn check_r(r: f64) -> Result<()> {
    if r.is_finite() && r.abs() < 1.0 {
        Ok(())
    } else {
        Err(Error::BadCorrelation(r))
    }
}

/// Draws `n` points of `family` with correlation `r`.
///
/// The Gaussian draws for `(seed, trial)` come from one stream and the
/// mixture labels from another, so two calls that differ only in `r` or in
/// `n` share their underlying normal variates.
pub fn sample(family: Family, r: f64, n: usize, seed: u64, trial: u64) -> Result<Dataset> {
    check_r(r)?;
    let mut normals = ChaCha8Rng::seed_from_u64(seed);
    normals.set_stream(2 * trial);
    let mut labels = ChaCha8Rng::seed_from_u64(seed);
    labels.set_stream(2 * trial + 1);
    let s = (1.0 - r * r).sqrt();
    let d = family.dim();
    let mut coords = Vec::with_capacity(n * d);
    for _ in 0..n {
        let sign = match family {
            Family::Mixture2d if labels.random::<bool>() => -1.0,
            _ => 1.0,
        };
        for _ in 0..d / 2 {
            let z1: f64 = normals.sample(StandardNormal);
            let z2: f64 = normals.sample(StandardNormal);
            coords.push(z1);
            coords.push(sign * r * z1 + s * z2);
        }
    }
    Dataset::from_flat(coords, d)
}

/// Closed-form `J_alpha` for the supported `(family, alpha)` pairs.
pub fn ground_truth(family: Family, alpha: f64, r: f64) -> Result<f64> {
    check_r(r)?;
    let q = 1.0 - r * r;
    match (family, alpha) {
        (Family::Gauss2d, 2.0) => Ok(1.0 / (4.0 * PI * q.sqrt())),
        (Family::Gauss2d, 3.0) => Ok(1.0 / (12.0 * PI * PI * q)),
        (Family::Gauss6dBlock, 2.0) => Ok((4.0 * PI * q.sqrt()).powi(-3)),
        (Family::Mixture2d, 2.0) => Ok(1.0 / (8.0 * PI * q.sqrt()) + 1.0 / (8.0 * PI)),
        _ => Err(Error::Unsupported(format!("{family} with alpha = {alpha}"))),
    }
}

/// Renyi entropy from [`ground_truth`].
pub fn ground_truth_renyi(family: Family, alpha: f64, r: f64) -> Result<f64> {
    crate::estimate::renyi_from_j(ground_truth(family, alpha, r)?, alpha)
}

fn gauss2d_pdf(x: f64, y: f64, r: f64) -> f64 {
    let q = 1.0 - r * r;
    (-(x * x - 2.0 * r * x * y + y * y) / (2.0 * q)).exp() / (2.0 * PI * q.sqrt())
}

/// Density of a two-dimensional family at `(x, y)`.
pub fn density_2d(family: Family, r: f64, x: f64, y: f64) -> Result<f64> {
    check_r(r)?;
    match family {
        Family::Gauss2d => Ok(gauss2d_pdf(x, y, r)),
        Family::Mixture2d => Ok(0.5 * (gauss2d_pdf(x, y, r) + gauss2d_pdf(x, y, -r))),
        Family::Gauss6dBlock => Err(Error::Unsupported("density_2d of a 6-d family".into())),
    }
}

const GL_ORDER: usize = 16;
const BOX: f64 = 8.0;
const MAX_PANELS: usize = 512;

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn tensor_rule(f: &dyn Fn(f64, f64) -> f64, panels: usize, nodes: &[f64], weights: &[f64]) -> f64 {
    let h = 2.0 * BOX / panels as f64;
    let mut xs = Vec::with_capacity(panels * nodes.len());
    let mut ws = Vec::with_capacity(panels * nodes.len());
    for p in 0..panels {
        let mid = -BOX + (p as f64 + 0.5) * h;
        for (t, w) in nodes.iter().zip(weights) {
            xs.push(mid + 0.5 * h * t);
            ws.push(0.5 * h * w);
        }
    }
    let mut total = 0.0;
    for (x, wx) in xs.iter().zip(&ws) {
        let mut row = 0.0;
        for (y, wy) in xs.iter().zip(&ws) {
            row += wy * f(*x, *y);
        }
        total += wx * row;
    }
    total
}

/// `integral f^alpha` by composite tensor Gauss-Legendre quadrature over
/// `[-8, 8]^2` (eight marginal standard deviations), doubling the panel
/// count until successive values agree to `rel_tol`.
pub fn quadrature_2d(f: &dyn Fn(f64, f64) -> f64, alpha: f64, rel_tol: f64) -> Result<f64> {
    let (nodes, weights) = gauss_legendre(GL_ORDER);
    let g = |x: f64, y: f64| f(x, y).powf(alpha);
    let mut panels = 8;
    let mut prev = tensor_rule(&g, panels, &nodes, &weights);
    while panels < MAX_PANELS {
        panels *= 2;
        let next = tensor_rule(&g, panels, &nodes, &weights);
        if (next - prev).abs() <= rel_tol * next.abs() {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::NonConvergence(format!(
        "no agreement to {rel_tol} with {MAX_PANELS} panels per axis"
    )))
}

/// Quadrature value of `J_alpha` for `family`, independent of [`ground_truth`].
///
/// The 6-d block family is handled as the cube of its 2-d block.
pub fn quadrature_oracle(family: Family, alpha: f64, r: f64) -> Result<f64> {
    check_r(r)?;
    const TOL: f64 = 1e-9;
    match family {
        Family::Gauss6dBlock => {
            let block = quadrature_2d(&|x, y| gauss2d_pdf(x, y, r), alpha, TOL)?;
            Ok(block.powi(3))
        }
        f => quadrature_2d(&|x, y| density_2d(f, r, x, y).unwrap_or(0.0), alpha, TOL),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn legendre_rule_is_exact_for_low_degree() {
        let (x, w) = gauss_legendre(GL_ORDER);
        assert_relative_eq!(w.iter().sum::<f64>(), 2.0, max_relative = 1e-14);
        let m4: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(4)).sum();
        assert_relative_eq!(m4, 0.4, max_relative = 1e-13);
        let m30: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert_relative_eq!(m30, 2.0 / 31.0, max_relative = 1e-12);
    }

    #[test]
    fn closed_form_values() {
        assert_relative_eq!(
            ground_truth(Family::Gauss2d, 2.0, 0.0).unwrap(),
            0.079_577_47,
            max_relative = 1e-7
        );
        assert_relative_eq!(
            ground_truth(Family::Gauss2d, 3.0, 0.0).unwrap(),
            0.008_443_43,
            max_relative = 1e-6
        );
        assert_relative_eq!(
            ground_truth(Family::Gauss6dBlock, 2.0, 0.9).unwrap(),
            0.006_084_71,
            max_relative = 1e-6
        );
        assert_relative_eq!(
            ground_truth(Family::Mixture2d, 2.0, 0.9).unwrap(),
            0.131_070_4,
            max_relative = 1e-6
        );
    }

    #[test]
    fn unsupported_and_bad_r() {
        assert!(matches!(
            ground_truth(Family::Mixture2d, 3.0, 0.5),
            Err(Error::Unsupported(_))
        ));
        assert!(matches!(
            ground_truth(Family::Gauss2d, 2.0, 1.0),
            Err(Error::BadCorrelation(_))
        ));
        assert!(matches!(
            sample(Family::Gauss2d, -1.5, 10, 0, 0),
            Err(Error::BadCorrelation(_))
        ));
    }

    #[test]
    fn gauss2d_truth_increases_towards_one() {
        let rs = [0.0, 0.5, 0.9, 0.99, 0.99999];
        let v: Vec<f64> = rs
            .iter()
            .map(|&r| ground_truth(Family::Gauss2d, 2.0, r).unwrap())
            .collect();
        assert!(v.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn samples_share_normals_across_r() {
        let a = sample(Family::Gauss2d, 0.5, 20, 3, 1).unwrap();
        let b = sample(Family::Gauss2d, 0.9, 50, 3, 1).unwrap();
        for i in 0..20 {
            assert_eq!(a.point(i)[0], b.point(i)[0]);
        }
        let c = sample(Family::Gauss2d, 0.5, 20, 3, 2).unwrap();
        assert_ne!(a.point(0)[0], c.point(0)[0]);
    }
}
