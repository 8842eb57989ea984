//! Information-theoretic clustering (ITC) of data on discrete 2D lattices.
//!
//! Codebook vectors are placed by minimizing the Cauchy-Schwarz divergence
//! between Parzen densities of the data and of the codebook. Two solvers are
//! provided: [`reference`] evaluates Gaussian kernels between every data point
//! and codebook vector, while [`lattice`] rewrites the same fix-point update in
//! terms of separable convolutions and mask-weighted window sums, which makes
//! each iteration independent of the number of data points.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! `*64` aliases below name the double-precision instantiations used by the
//! command line tools.

// `!(x > 0)` is used on purpose so that NaN fails positivity checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod conv;
pub mod error;
pub mod grid;
mod iterate;
pub mod kmeans;
pub mod lattice;
pub mod params;
pub mod reference;
pub mod scalar;
pub mod segmentation;
pub mod trace;
pub mod weighting;

pub use conv::{convolve_separable, convolve_sparse, gaussian_mask, local_weighted_sums, FilterMask, DEFAULT_RADIUS_FACTOR};
pub use error::{ItcError, Result};
pub use grid::{extract_points, rasterize, Codebook, GridField, PointSet, Position};
pub use kmeans::{run_kmeans, KmeansResult};
pub use lattice::{
    codebook_density, density_from_mask, lattice_potentials, run_lattice, update_codebook_lattice,
    LatticeItcState,
};
pub use params::{default_params, DivergenceReport, ItcParams};
pub use reference::{
    data_potential, gaussian_2d, potentials, run_reference, run_reference_from, update_codebook_reference,
};
pub use scalar::Scalar;
pub use segmentation::{segment, LabelMap, BACKGROUND};
pub use trace::{IterationRecord, Method, RunTrace};
pub use weighting::{chamfer_transform, weighted_density, Provenance, WeightMap};

pub type GridField64 = GridField<f64>;
pub type GridField32 = GridField<f32>;
pub type Codebook64 = Codebook<f64>;
pub type Codebook32 = Codebook<f32>;
pub type PointSet64 = PointSet<f64>;
pub type Position64 = Position<f64>;
pub type ItcParams64 = ItcParams<f64>;
pub type RunTrace64 = RunTrace<f64>;
