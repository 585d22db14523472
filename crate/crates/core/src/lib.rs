//! Debiased k-nearest-neighbor bandwidth estimators of density functionals
//! `J_alpha = integral f^alpha` and Renyi entropies.
//!
//! Two estimators are provided: a kernel density estimate and a local
//! likelihood (local Gaussian) density estimate, both with bandwidth set to
//! the distance to the `k`-th nearest neighbor. With fixed `k` both carry a
//! multiplicative bias that depends only on `(k, d, alpha)` and the kernel;
//! [`bias`] estimates these constants by simulation and [`bias_table`]
//! persists them.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::manual_is_multiple_of)]

pub mod baselines;
pub mod bias;
pub mod bias_table;
pub mod dataset;
pub mod error;
pub mod estimate;
pub mod experiment;
pub mod kde;
pub mod kernels;
pub mod llde;
pub mod neighbors;
pub mod synth;

pub use baselines::{estimate_j_kde_fixed, estimate_j_leonenko, Bandwidth};
pub use bias::{bias_kde, bias_llde, BiasEntry, BiasKey, EstimatorKind, McConfig};
pub use bias_table::BiasTable;
pub use dataset::Dataset;
pub use error::{Error, Result};
pub use estimate::{renyi_from_j, EstimateResult, EstimatorConfig, Method, Truncation};
pub use experiment::{run_experiment, ExperimentSpec, Report};
pub use kde::{estimate_h_kde, estimate_j_kde};
pub use kernels::{unit_ball_volume, KernelFamily, KernelSpec};
pub use llde::{estimate_h_klnn, estimate_j_klnn};
pub use neighbors::{build_index, NeighborIndex, NeighborList};
pub use synth::{ground_truth, Family};
