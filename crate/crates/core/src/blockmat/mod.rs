//! Exact integer matrices, permutations, band patterns and validators for
//! multi-stage and tree-fold block structure.

mod instance;
mod matrix;
mod permutation;
mod profile;

pub use instance::IPInstance;
pub use matrix::{band_check, band_violation, pad_zero, Band, IntMatrix};
pub use permutation::{apply_permutation, Permutation, PermutationPair};
pub use profile::{
    multistage_layout, validate_multistage, validate_profile, validate_treefold, BlockKind,
    BlockProfile, StageNode,
};
