//! Normalized radial kernels and the unit-ball volume.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Volume of the unit Euclidean ball in `R^d`, `pi^(d/2) / Gamma(d/2 + 1)`.
pub fn unit_ball_volume(d: usize) -> f64 {
    // Closed forms for the common cases keep the low dimensions exact.
    match d {
        1 => 2.0,
        2 => PI,
        3 => 4.0 * PI / 3.0,
        _ => {
            let h = d as f64 / 2.0;
            (h * PI.ln() - ln_gamma(h + 1.0)).exp()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KernelFamily {
    Gaussian,
    Uniform,
    Epanechnikov,
}

impl KernelFamily {
    pub fn name(self) -> &'static str {
        match self {
            KernelFamily::Gaussian => "gaussian",
            KernelFamily::Uniform => "uniform",
            KernelFamily::Epanechnikov => "epanechnikov",
        }
    }
}

impl fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" => Ok(KernelFamily::Gaussian),
            "uniform" => Ok(KernelFamily::Uniform),
            "epanechnikov" => Ok(KernelFamily::Epanechnikov),
            other => Err(Error::InvalidParameter(format!("unknown kernel '{other}'"))),
        }
    }
}

/// A radially symmetric kernel on `R^d`.
///
/// With `scale == 1` the kernel integrates to one. Other scales exist so the
/// cancellation of kernel normalization in the debiased estimators can be
/// exercised; estimates built from a scaled kernel must use a bias computed
/// for the same scaled kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub family: KernelFamily,
    pub dim: usize,
    scale: f64,
    norm: f64,
}

impl KernelSpec {
    pub fn new(family: KernelFamily, dim: usize) -> Self {
        assert!(dim >= 1, "kernel dimension must be positive");
        let c_d = unit_ball_volume(dim);
        let norm = match family {
            KernelFamily::Gaussian => (2.0 * PI).powf(-(dim as f64) / 2.0),
            KernelFamily::Uniform => 1.0 / c_d,
            KernelFamily::Epanechnikov => (dim as f64 + 2.0) / (2.0 * c_d),
        };
        Self {
            family,
            dim,
            scale: 1.0,
            norm,
        }
    }

    pub fn gaussian(dim: usize) -> Self {
        Self::new(KernelFamily::Gaussian, dim)
    }

    /// The same kernel multiplied by `c > 0`.
    pub fn scaled(self, c: f64) -> Self {
        assert!(c > 0.0 && c.is_finite(), "kernel scale must be positive");
        Self {
            scale: self.scale * c,
            ..self
        }
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn is_normalized(&self) -> bool {
        self.scale == 1.0
    }

    /// Evaluates the kernel at squared radius `r2 = |u|^2`.
    #[inline]
    pub fn eval_sq_radius(&self, r2: f64) -> f64 {
        let shape = match self.family {
            KernelFamily::Gaussian => (-0.5 * r2).exp(),
            KernelFamily::Uniform => {
                if r2 <= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            KernelFamily::Epanechnikov => {
                if r2 <= 1.0 {
                    1.0 - r2
                } else {
                    0.0
                }
            }
        };
        self.scale * self.norm * shape
    }

    /// Evaluates the kernel at radius `r = |u|`.
    #[inline]
    pub fn eval_radius(&self, r: f64) -> f64 {
        self.eval_sq_radius(r * r)
    }

    pub fn eval(&self, u: &[f64]) -> Result<f64> {
        if u.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: u.len(),
            });
        }
        Ok(self.eval_sq_radius(u.iter().map(|x| x * x).sum()))
    }

    /// True when the kernel vanishes outside the unit ball.
    pub fn has_compact_support(&self) -> bool {
        !matches!(self.family, KernelFamily::Gaussian)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn peak_values() {
        let g = KernelSpec::gaussian(1);
        assert_relative_eq!(g.eval(&[0.0]).unwrap(), 0.398_942_280_401_432_7, epsilon = 1e-15);
        let u = KernelSpec::new(KernelFamily::Uniform, 2);
        assert_relative_eq!(u.eval(&[0.3, 0.4]).unwrap(), 1.0 / PI, epsilon = 1e-15);
        assert_eq!(u.eval(&[0.9, 0.9]).unwrap(), 0.0);
        let e = KernelSpec::new(KernelFamily::Epanechnikov, 1);
        assert_relative_eq!(e.eval(&[0.0]).unwrap(), 0.75, epsilon = 1e-15);
    }

    #[test]
    fn ball_volumes() {
        assert_eq!(unit_ball_volume(1), 2.0);
        assert_eq!(unit_ball_volume(2), PI);
        assert_relative_eq!(unit_ball_volume(3), 4.188_790_204_786_391, epsilon = 1e-14);
        // pi^3 / 6
        assert_relative_eq!(unit_ball_volume(6), PI.powi(3) / 6.0, max_relative = 1e-13);
        assert_relative_eq!(unit_ball_volume(4), PI * PI / 2.0, max_relative = 1e-13);
    }

    #[test]
    fn dimension_checked() {
        let g = KernelSpec::gaussian(2);
        assert!(matches!(
            g.eval(&[0.0]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn names_round_trip() {
        for f in [
            KernelFamily::Gaussian,
            KernelFamily::Uniform,
            KernelFamily::Epanechnikov,
        ] {
            assert_eq!(f.name().parse::<KernelFamily>().unwrap(), f);
        }
        assert!("triangle".parse::<KernelFamily>().is_err());
    }

    fn grid_integral(k: &KernelSpec, half_width: f64, steps: usize) -> f64 {
        let h = 2.0 * half_width / steps as f64;
        match k.dim {
            1 => {
                (0..steps)
                    .map(|i| k.eval(&[-half_width + (i as f64 + 0.5) * h]).unwrap())
                    .sum::<f64>()
                    * h
            }
            2 => {
                let mut s = 0.0;
                for i in 0..steps {
                    for j in 0..steps {
                        let x = -half_width + (i as f64 + 0.5) * h;
                        let y = -half_width + (j as f64 + 0.5) * h;
                        s += k.eval(&[x, y]).unwrap();
                    }
                }
                s * h * h
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn integrates_to_one() {
        for d in 1..=2 {
            for fam in [
                KernelFamily::Gaussian,
                KernelFamily::Uniform,
                KernelFamily::Epanechnikov,
            ] {
                let k = KernelSpec::new(fam, d);
                let w = if fam == KernelFamily::Gaussian { 9.0 } else { 1.0 };
                let steps = if d == 1 { 200_000 } else { 2_000 };
                let total = grid_integral(&k, w, steps);
                assert!((total - 1.0).abs() < 1e-3, "{fam} d={d}: {total}");
            }
        }
    }

    #[test]
    fn gaussian_tail_bound() {
        for d in 1..=3 {
            let k = KernelSpec::gaussian(d);
            let worst = (0..=4900)
                .map(|i| 1.0 + i as f64 * 0.01)
                .map(|r| k.eval_radius(r) * r.powi(2 * d as i32))
                .fold(0.0, f64::max);
            assert!(worst < 1.0, "d={d}: {worst}");
        }
    }

    #[test]
    fn scaling_multiplies_values() {
        let k = KernelSpec::gaussian(3);
        let k2 = k.scaled(2.0);
        assert!(!k2.is_normalized());
        assert_eq!(k2.eval_radius(0.7), 2.0 * k.eval_radius(0.7));
    }
}
