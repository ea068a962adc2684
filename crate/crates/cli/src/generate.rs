use std::path::PathBuf;

use nsamg_core::problem::write_matrix_market;
use serde::Serialize;

use crate::config::{ProblemSource, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{json_bytes, OutputSet};
use crate::problem::load_matrix;

#[derive(Serialize)]
struct ProblemFile {
    disc: &'static str,
    n: usize,
    theta: f64,
    tau: f64,
    seed: u64,
    unknowns: usize,
    nnz: usize,
}

/// Writes the unscaled matrix as `matrix.mtx` and its description as `problem.json`.
pub fn run_generate(cfg: &RunConfig) -> CliResult<Vec<PathBuf>> {
    if matches!(cfg.source, ProblemSource::Matrix(_)) {
        return Err(CliError::Config("generate needs a generated problem, not --matrix".into()));
    }
    let n = cfg.single_n()?;
    let a = load_matrix(cfg, n)?;
    let spec = cfg.spec_for(n);
    let mtx_path = cfg.out_path("matrix.mtx");
    std::fs::create_dir_all(&cfg.out_dir)?;
    let tmp = cfg.out_path(".matrix.mtx.tmp");
    write_matrix_market(&tmp, &a)?;
    std::fs::rename(&tmp, &mtx_path)?;
    let mut set = OutputSet::default();
    if cfg.formats.json {
        let desc = ProblemFile {
            disc: spec.disc.name(),
            n,
            theta: spec.theta,
            tau: spec.tau,
            seed: spec.seed,
            unknowns: a.rows(),
            nnz: a.nnz(),
        };
        set.add(cfg.out_path("problem.json"), json_bytes(&desc)?);
    }
    let written = set.commit();
    if written.is_err() {
        let _ = std::fs::remove_file(&mtx_path);
    }
    let mut out = vec![mtx_path];
    out.extend(written?);
    Ok(out)
}
