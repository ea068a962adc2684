//! Advection test matrices, scaling and MatrixMarket I/O.

pub mod advection;
pub mod mtx;
pub mod scaling;

pub use advection::{
    gen_supg_advection, gen_upwind_advection, Discretization, ProblemSpec, DEFAULT_THETA,
};
pub use mtx::{parse_matrix_market, read_matrix_market, write_matrix_market};
pub use scaling::{diagonal_scale, normalize_spectral, prepare_system, ScaledSystem, ScalingInfo};
