use std::path::PathBuf;

use nsamg_core::linalg::norm2;
use nsamg_core::solver::{
    build_hierarchy, certify_hierarchy, convergence_probe, measure_rho, mu_cycle_solve, two_grid_solve, CycleKind,
    Hierarchy, HierarchyCertificate, HierarchyConfig, SolveOptions, SolveReport,
};
use nsamg_core::theory::two_grid_bound;
use nsamg_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{csv_bytes, json_bytes, num, OutputSet};
use crate::problem::{load_system, ProblemInfo};

/// Hierarchies above this size are solved but not certified.
pub const CERTIFY_CAP: usize = 1024;
pub const PROBE_ITERS: usize = 40;
pub const BOUND_SLACK: f64 = 1e-6;

pub const CONVERGENCE_HEADER: &[&str] = &["iter", "l2_residual", "qa_error"];

/// One convergence bound and whether the probe rate respects it.
/// Bounds apply to the squared QA contraction.
#[derive(Clone, Debug, Serialize)]
pub struct BoundCheck {
    pub source: &'static str,
    pub rho_bound: f64,
    pub nu_min: Option<f64>,
    pub applies: bool,
    pub rho_squared: Option<f64>,
    pub satisfied: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveSummary {
    pub problem: ProblemInfo,
    pub interp: String,
    pub restrict: String,
    pub cycle: CycleKind,
    pub nu: usize,
    pub mu: usize,
    pub tol: f64,
    pub max_iters: usize,
    pub iterations: usize,
    pub converged: bool,
    pub stagnated: bool,
    pub rhs_norm: f64,
    pub final_residual: f64,
    pub level_sizes: Vec<usize>,
    pub coarsening_ratios: Vec<f64>,
    /// Geometric mean of the last contraction ratios of the solve itself.
    pub rho_measured: Option<f64>,
    /// Asymptotic QA contraction from the homogeneous probe.
    pub rho_probe: Option<f64>,
    pub rho_probe_squared: Option<f64>,
    pub bounds: Vec<BoundCheck>,
    pub certification: Option<HierarchyCertificate>,
}

pub struct SolveOutput {
    pub summary: SolveSummary,
    pub report: SolveReport,
}

fn check(source: &'static str, rho_bound: f64, nu_min: Option<f64>, nu: usize, rho_sq: Option<f64>) -> BoundCheck {
    let applies = nu_min.map_or(true, |m| nu as f64 >= m);
    BoundCheck {
        source,
        rho_bound,
        nu_min,
        applies,
        rho_squared: rho_sq,
        satisfied: match (applies, rho_sq) {
            (true, Some(r)) => Some(r <= rho_bound + BOUND_SLACK),
            _ => None,
        },
    }
}

fn bounds(cfg: &RunConfig, kind: CycleKind, cert: &HierarchyCertificate, rho_sq: Option<f64>) -> Vec<BoundCheck> {
    let mut out = Vec::new();
    match kind {
        CycleKind::TwoGrid if cfg.nu > 0 => {
            let l0 = &cert.levels[0];
            if let (true, Some(c_pi)) = (l0.certified, l0.c_pi) {
                if let Ok(b) = two_grid_bound(c_pi, l0.k_p1, cfg.nu as u32, cfg.beta) {
                    out.push(check("apriori", b, None, cfg.nu, rho_sq));
                }
            }
            if let Ok(b) = two_grid_bound(l0.pi_qa_sq.max(1.0), l0.k_p1, cfg.nu as u32, cfg.beta) {
                out.push(check("measured", b, None, cfg.nu, rho_sq));
            }
        }
        CycleKind::MuCycle if cfg.mu == 2 => {
            if let Some(r) = &cert.requirements {
                out.push(check("apriori", r.rho_bound, Some(r.nu_min), cfg.nu, rho_sq));
            }
            if let (true, Some(r)) = (cert.certified, &cert.requirements_measured) {
                out.push(check("measured", r.rho_bound, Some(r.nu_min), cfg.nu, rho_sq));
            }
        }
        _ => {}
    }
    out
}

/// The finest level is always coarsened at least once.
pub fn hierarchy_config(cfg: &RunConfig, n: usize) -> HierarchyConfig {
    let mut hc = HierarchyConfig::new(cfg.transfer, cfg.levels);
    hc.coarsest_max = hc.coarsest_max.min(n.saturating_sub(1));
    hc
}

/// Seeded true solution with entries in (-1, 1).
pub fn true_solution(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

/// Runs the solve; a stagnated run still yields its partial report.
pub fn solve(cfg: &RunConfig) -> CliResult<(SolveOutput, bool)> {
    let n = cfg.single_n()?;
    let sys = load_system(cfg, n)?;
    let h = build_hierarchy(&sys, &hierarchy_config(cfg, sys.n()))?;
    let kind = if h.num_levels() == 2 { CycleKind::TwoGrid } else { CycleKind::MuCycle };
    let x_true = true_solution(sys.n(), cfg.seed);
    let b = sys.a.matvec(&x_true);
    let has_svd = h.levels[0].svd().is_some();
    let opts = SolveOptions {
        nu: cfg.nu,
        mu: cfg.mu,
        tol: cfg.tol,
        max_iters: cfg.max_iters,
        x_true: has_svd.then_some(x_true.as_slice()),
    };
    let result = match kind {
        CycleKind::TwoGrid => two_grid_solve(&h, &b, &opts),
        CycleKind::MuCycle => mu_cycle_solve(&h, &b, &opts),
    };
    let (report, stagnated) = match result {
        Ok(r) => (r, false),
        Err(Error::Stagnation(r)) => (*r, true),
        Err(e) => return Err(e.into()),
    };
    let summary = summarize(cfg, n, &sys, &h, kind, &report, stagnated, norm2(&b));
    Ok((SolveOutput { summary, report }, stagnated))
}

#[allow(clippy::too_many_arguments)]
fn summarize(
    cfg: &RunConfig,
    n: usize,
    sys: &nsamg_core::problem::ScaledSystem,
    h: &Hierarchy,
    kind: CycleKind,
    report: &SolveReport,
    stagnated: bool,
    rhs_norm: f64,
) -> SolveSummary {
    let probe = if h.num_levels() >= 2 {
        convergence_probe(h, kind, cfg.nu, cfg.mu, PROBE_ITERS, cfg.seed).ok()
    } else {
        None
    };
    let rho_sq = probe.as_ref().map(|p| p.rho_squared());
    let certification = if sys.n() <= CERTIFY_CAP && h.num_levels() >= 2 {
        certify_hierarchy(h, cfg.beta, cfg.gamma).ok()
    } else {
        None
    };
    let bounds = certification
        .as_ref()
        .map(|c| bounds(cfg, kind, c, rho_sq))
        .unwrap_or_default();
    SolveSummary {
        problem: ProblemInfo::new(cfg, n, sys),
        interp: cfg.transfer.interp.name().into(),
        restrict: cfg.transfer.restrict.name().into(),
        cycle: kind,
        nu: cfg.nu,
        mu: cfg.mu,
        tol: cfg.tol,
        max_iters: cfg.max_iters,
        iterations: report.iterations,
        converged: report.converged,
        stagnated,
        rhs_norm,
        final_residual: report.residual_history.last().copied().unwrap_or(f64::NAN),
        level_sizes: h.sizes(),
        coarsening_ratios: h.coarsening_ratios(),
        rho_measured: measure_rho(report).ok(),
        rho_probe: probe.as_ref().map(|p| p.rho),
        rho_probe_squared: rho_sq,
        bounds,
        certification,
    }
}

pub fn convergence_rows(report: &SolveReport) -> Vec<Vec<String>> {
    report
        .residual_history
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let qa = report
                .error_history_qa
                .as_ref()
                .and_then(|h| h.get(i))
                .map_or_else(String::new, |e| num(*e));
            vec![i.to_string(), num(*r), qa]
        })
        .collect()
}

/// Writes convergence.csv and summary.json, then signals stagnation if it happened.
pub fn run_solve(cfg: &RunConfig) -> CliResult<Vec<PathBuf>> {
    let (out, stagnated) = solve(cfg)?;
    let mut set = OutputSet::default();
    if cfg.formats.csv {
        set.add(cfg.out_path("convergence.csv"), csv_bytes(CONVERGENCE_HEADER, &convergence_rows(&out.report))?);
    }
    if cfg.formats.json {
        set.add(cfg.out_path("summary.json"), json_bytes(&out.summary)?);
    }
    let written = set.commit()?;
    if stagnated {
        return Err(CliError::Core(Error::Stagnation(Box::new(out.report))));
    }
    Ok(written)
}
