//! Gridded window, feature maps of a complex Gaussian field, its covariance
//! and pseudo-covariance Gram matrices, and the 2×2-block hafnian kernel.
//!
//! The feature space is `ℂ^d` with the involution given by componentwise
//! complex conjugation; inner products are linear in the first argument.

mod file;
mod grid;
mod model;

pub use file::{load_model, CellCounts, GridSpec, ModelFile};
pub use grid::{pairwise_disjoint, CellSet, Grid};
pub use model::{
    block_kernel, builtin_model, from_alpha_beta, intensity_integral, intensity_integral_l2,
    permanental_embedding, proper_from, real_structured_from, two_permanental_embedding,
    validate_features, BlockKernelMatrix, BuiltinParams, Features, GaussianFieldModel,
    IntensityProfile, Violation, ViolationKind, BUILTIN_MODELS,
};
