//! Richardson relaxation on the normal equations, hierarchies, two-grid and
//! recursive cycles, and measured convergence factors.

pub mod certify;
pub mod cycle;
pub mod hierarchy;
pub mod relax;
pub mod rho;

use serde::Serialize;

pub use certify::{certify_hierarchy, certify_transfers, HierarchyCertificate, LevelCertificate};
pub use cycle::{
    convergence_probe, cycle_error_operator, mu_cycle_solve, two_grid_solve, ProbeReport, QaMeter, SolveOptions,
    STAGNATION_WINDOW,
};
pub use hierarchy::{build_hierarchy, build_hierarchy_with, Hierarchy, HierarchyConfig, Level};
pub use relax::richardson_normal_apply;
pub use rho::{contraction_ratios, measure_rho, rho_from_ratios};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleKind {
    TwoGrid,
    MuCycle,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub cycle: CycleKind,
    pub nu: usize,
    pub mu: usize,
    pub level_sizes: Vec<usize>,
    pub iterations: usize,
    pub converged: bool,
    /// l2 residual of the scaled system, starting from the zero guess.
    pub residual_history: Vec<f64>,
    pub error_history_qa: Option<Vec<f64>>,
    pub rho_estimate: Option<f64>,
    #[serde(skip)]
    pub solution: Vec<f64>,
}
