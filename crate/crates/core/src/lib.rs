//! Exact-integer constructions around tree-fold and multi-stage integer
//! programs: block-structure validation, band reordering, hardness
//! reductions from subset sum, Graver bases, treedepth and file formats.

pub mod blockmat;
pub mod encoding;
pub mod error;
pub mod format;
pub mod graver;
pub mod oracle;
pub mod reduce;
pub mod restructure;
pub mod treedepth;

pub use error::{Error, Result};
