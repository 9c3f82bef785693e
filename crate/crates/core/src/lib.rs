//! Finite boolean concept classes: shattering and VC-dimension, dual classes, ε-packings,
//! teaching sets, a recursive sample compression scheme and PAC-bound simulations.
//!
//! A class is a deduplicated, lexicographically sorted set of bit vectors over the points
//! `0..n`. Every tie-break in the crate refers to that order, so all results are
//! deterministic.

pub mod class;
pub mod compression;
pub mod error;
pub mod generators;
pub mod metric;
pub mod pac;
pub mod teaching;

pub use class::{load_class, sauer_bound, Concept, ConceptClass, LabeledSample, LoadedClass};
pub use compression::{CompressedSample, SchemeParams, SideInfo};
pub use error::{Error, Result};
pub use metric::{Distribution, EpsilonSpec};
