//! Approximation-property constants, the structured bases for R and P,
//! stability and inner-product equivalence bounds, and the measured
//! quantities they are checked against.

pub mod angle;
pub mod basis;
pub mod block;
pub mod bounds;
pub mod equivalence;
pub mod fap;
pub mod projection;
pub mod stability;

pub use angle::{cgc_angle, AngleReport};
pub use bounds::{two_grid_bound, two_grid_bound_sap, wcycle_requirements, WcycleRequirements};
pub use equivalence::{coarse_pair, inner_product_equivalence, measured_equivalence, EquivalenceReport};
pub use projection::{measure_projection, projection_matrix, qa_norm_sigma_route, Metric, ProjectionReport};
pub use stability::{c_pi_from_scalars, stability_bound, stability_report, CPiBound, StabilityBound, StabilityReport};
pub use basis::{build_pr_bases, select_k, BasisChecks, BasisDecomposition, BasisParams, Deltas, Hypotheses};
pub use block::{block_bounds, block_bounds_with, scalar_block_extremes, BlockBounds, Pairing};
pub use fap::{
    check_fap_implications, check_fap_monotonicity, check_fap_theorem_proof, fap_constant, FapImplications,
    FapReport, FapSquareCheck, FAP_SLACK, SAP, SSAP, WAP,
};

use crate::error::{Error, Result};
use crate::linalg::SvdFactorization;

/// Tolerance on `|sigma_max - 1|` for a factorization to count as normalized.
pub const NORMALIZED_TOL: f64 = 1e-6;

pub(crate) fn check_normalized(f: &SvdFactorization) -> Result<()> {
    let s = f.sigma_max();
    if (s - 1.0).abs() > NORMALIZED_TOL {
        return Err(Error::NotNormalized(s));
    }
    Ok(())
}
