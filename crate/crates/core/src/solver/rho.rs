use crate::error::{Error, Result};
use crate::solver::SolveReport;

/// Number of trailing ratios averaged.
pub const RHO_WINDOW: usize = 5;
/// Ratios required before an estimate is made.
pub const RHO_MIN_RATIOS: usize = RHO_WINDOW + 1;

/// Successive ratios `h[i+1] / h[i]`, stopping at the first vanishing entry.
pub fn contraction_ratios(history: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    for w in history.windows(2) {
        if !(w[0] > 0.0 && w[1] > 0.0) {
            break;
        }
        out.push(w[1] / w[0]);
    }
    out
}

/// Geometric mean of the last five ratios.
pub fn rho_from_ratios(ratios: &[f64]) -> Result<f64> {
    if ratios.len() < RHO_MIN_RATIOS {
        return Err(Error::TooFewIterations {
            needed: RHO_MIN_RATIOS,
            got: ratios.len(),
        });
    }
    let tail = &ratios[ratios.len() - RHO_WINDOW..];
    Ok((tail.iter().map(|r| r.ln()).sum::<f64>() / RHO_WINDOW as f64).exp())
}

/// Uses the QA-error history when present and the residual history otherwise.
pub fn measure_rho(report: &SolveReport) -> Result<f64> {
    let history = report.error_history_qa.as_deref().unwrap_or(&report.residual_history);
    rho_from_ratios(&contraction_ratios(history))
}
