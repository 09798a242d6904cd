//! Exact computational group theory at desk scale: finite groups given by
//! multiplication tables, the classical descending series (lower central,
//! derived, and their rational / mod-p / torsion-free / Cohn variants),
//! group homology in degrees one and two from the normalized bar resolution,
//! homologically defined classes of maps, and the stabilization operator
//! that measures how far a series is from being preserved by such maps.
//!
//! Everything is computed with arbitrary-precision integer arithmetic; there
//! is no floating point anywhere in this crate.

pub mod cache;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod group;
pub mod homology;
pub mod linalg;
pub mod map_classes;
pub mod report;
pub mod series;
pub mod stability;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
