//! Nonsymmetric algebraic multigrid laboratory.
//!
//! Builds AMG hierarchies for nonsymmetric advection problems, runs two-grid
//! and multilevel cycles, and evaluates the constants of the SVD-based
//! convergence theory (approximation properties, stability of the
//! Petrov-Galerkin coarse-grid correction, inner-product equivalence and
//! W-cycle relaxation requirements) against measured behaviour.

pub mod error;
pub mod linalg;
pub mod problem;
pub mod solver;
pub mod theory;
pub mod transfer;

pub use error::{Error, Result};
