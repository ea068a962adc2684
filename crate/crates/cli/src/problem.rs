use nsamg_core::linalg::SparseMatrix;
use nsamg_core::problem::{prepare_system, read_matrix_market, ScaledSystem};
use serde::Serialize;

use crate::config::{ProblemSource, RunConfig};
use crate::error::CliResult;

pub fn load_matrix(cfg: &RunConfig, n: usize) -> CliResult<SparseMatrix> {
    Ok(match &cfg.source {
        ProblemSource::Matrix(path) => read_matrix_market(path)?,
        ProblemSource::Generated(_) => cfg.spec_for(n).matrix()?,
    })
}

/// Diagonally scaled and normalized to unit spectral norm.
pub fn load_system(cfg: &RunConfig, n: usize) -> CliResult<ScaledSystem> {
    Ok(prepare_system(&load_matrix(cfg, n)?, true)?)
}

#[derive(Clone, Debug, Serialize)]
pub struct ProblemInfo {
    pub source: String,
    pub disc: Option<String>,
    pub n: Option<usize>,
    pub theta: Option<f64>,
    pub tau: Option<f64>,
    pub unknowns: usize,
    pub nnz: usize,
    pub scale: f64,
    pub seed: u64,
}

impl ProblemInfo {
    pub fn new(cfg: &RunConfig, n: usize, sys: &ScaledSystem) -> Self {
        let generated = matches!(cfg.source, ProblemSource::Generated(_));
        let spec = cfg.spec_for(n);
        Self {
            source: match &cfg.source {
                ProblemSource::Matrix(p) => p.display().to_string(),
                ProblemSource::Generated(_) => "generated".into(),
            },
            disc: generated.then(|| spec.disc.name().to_string()),
            n: generated.then_some(n),
            theta: generated.then_some(spec.theta),
            tau: generated.then_some(spec.tau),
            unknowns: sys.n(),
            nnz: sys.a.nnz(),
            scale: sys.scale,
            seed: cfg.seed,
        }
    }
}
