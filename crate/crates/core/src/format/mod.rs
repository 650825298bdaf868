//! File formats: a versioned JSON document (native, lossless) and a
//! fixed-format MPS writer for handing instances to external solvers.

mod json;
mod mps;

pub use json::{emit_document, emit_json, parse_document, parse_json, InstanceDocument, Provenance, SCHEMA};
pub use mps::{emit_mps, emit_mps_named};
