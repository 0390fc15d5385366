//! Quantum sectors on combinatorial configuration spaces.
//!
//! Configuration spaces are finite 2-complexes ([`complex`]). Their
//! fundamental group is computed from a spanning tree ([`pi1`]), unitary
//! representations of it become flat edge connections ([`holonomy`]), and
//! each connection defines a sector whose twisted Laplacian spectrum makes
//! the sector observable ([`sectors`]). The [`cover`] module builds the
//! universal cover `V × π₁` with its left and right regular actions,
//! decomposes the cover Laplacian into sectors, and reports amenability.

pub mod complex;
pub mod cover;
pub mod eigen;
pub mod error;
pub mod group;
pub mod holonomy;
pub mod linalg;
pub mod pi1;
pub mod repfile;
pub mod scenario;
pub mod sectors;

pub use error::{Error, Result};
