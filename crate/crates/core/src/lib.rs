//! Cohomology of vector bundles on neighbourhoods of a rational curve.

pub mod cech;
pub mod cli;
pub mod curves;
pub mod error;
pub mod geometry;
pub mod invariants;
pub mod laurent;
pub mod linalg;
pub mod table;

pub use error::{Error, Result};
