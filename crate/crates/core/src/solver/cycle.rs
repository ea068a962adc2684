use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{norm2, DenseMatrix, Lu, SvdFactorization};
use crate::solver::hierarchy::Hierarchy;
use crate::solver::relax::richardson_normal_in_place;
use crate::solver::rho::{measure_rho, rho_from_ratios};
use crate::solver::{CycleKind, SolveReport};

/// Consecutive non-contracting iterations tolerated before giving up.
pub const STAGNATION_WINDOW: usize = 10;

/// `|e|_QA = |Sigma^{1/2} V^T e|`.
pub struct QaMeter<'a> {
    f: &'a SvdFactorization,
    half: Vec<f64>,
}

impl<'a> QaMeter<'a> {
    pub fn new(f: &'a SvdFactorization) -> Self {
        Self {
            f,
            half: f.sigma.iter().map(|s| s.max(0.0).sqrt()).collect(),
        }
    }

    pub fn norm(&self, e: &[f64]) -> f64 {
        let c = self.f.v.tr_matvec(e);
        c.iter().zip(&self.half).map(|(x, h)| (x * h).powi(2)).sum::<f64>().sqrt()
    }
}

/// One application of the chosen cycle at level 0.
enum Stepper<'h> {
    TwoGrid { h: &'h Hierarchy, coarse: Lu },
    Mu { h: &'h Hierarchy, mu: usize },
}

impl<'h> Stepper<'h> {
    fn new(h: &'h Hierarchy, kind: CycleKind, mu: usize) -> Result<Self> {
        if h.num_levels() < 2 {
            return Err(Error::InvalidArgument("cycle needs a hierarchy with at least 2 levels".into()));
        }
        Ok(match kind {
            CycleKind::TwoGrid => {
                let coarse = if h.num_levels() == 2 {
                    h.coarsest_lu().clone()
                } else {
                    Lu::new(&h.levels[1].a.to_dense())
                        .map_err(|_| Error::SingularCoarseOperator { level: 1, ratio: 0.0 })?
                };
                Stepper::TwoGrid { h, coarse }
            }
            CycleKind::MuCycle => {
                if mu == 0 {
                    return Err(Error::InvalidArgument("mu must be at least 1".into()));
                }
                Stepper::Mu { h, mu }
            }
        })
    }

    fn step(&self, x: &mut [f64], b: &[f64], nu: usize) {
        match self {
            Stepper::TwoGrid { h, coarse } => {
                let lvl = &h.levels[0];
                richardson_normal_in_place(&lvl.a, x, b, nu);
                let rc = restrict_residual(h, 0, x, b);
                let ec = coarse.solve(&rc);
                prolong_add(h, 0, x, &ec);
            }
            Stepper::Mu { h, mu } => mu_cycle(h, 0, x, b, nu, *mu),
        }
    }
}

/// `scale_{l+1} R^T (b - A x)`: the right-hand side of the normalized coarse problem.
fn restrict_residual(h: &Hierarchy, l: usize, x: &[f64], b: &[f64]) -> Vec<f64> {
    let lvl = &h.levels[l];
    let ax = lvl.a.matvec(x);
    let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    let s = h.levels[l + 1].scale;
    lvl.r().expect("non-coarsest level").tr_matvec(&r).into_iter().map(|v| v * s).collect()
}

fn prolong_add(h: &Hierarchy, l: usize, x: &mut [f64], ec: &[f64]) {
    let corr = h.levels[l].p().expect("non-coarsest level").matvec(ec);
    for (xi, c) in x.iter_mut().zip(&corr) {
        *xi += c;
    }
}

fn mu_cycle(h: &Hierarchy, l: usize, x: &mut [f64], b: &[f64], nu: usize, mu: usize) {
    if l + 1 == h.num_levels() {
        x.copy_from_slice(&h.coarsest_lu().solve(b));
        return;
    }
    richardson_normal_in_place(&h.levels[l].a, x, b, nu);
    let rc = restrict_residual(h, l, x, b);
    let mut ec = vec![0.0; rc.len()];
    for _ in 0..mu {
        mu_cycle(h, l + 1, &mut ec, &rc, nu, mu);
    }
    prolong_add(h, l, x, &ec);
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions<'a> {
    pub nu: usize,
    pub mu: usize,
    pub tol: f64,
    pub max_iters: usize,
    pub x_true: Option<&'a [f64]>,
}

fn iterate(h: &Hierarchy, kind: CycleKind, b: &[f64], opts: &SolveOptions) -> Result<SolveReport> {
    let stepper = Stepper::new(h, kind, opts.mu)?;
    let a = &h.levels[0].a;
    let n = a.rows();
    if b.len() != n {
        return Err(Error::DimensionMismatch(format!("b has {} entries, n = {n}", b.len())));
    }
    if let Some(xt) = opts.x_true {
        if xt.len() != n {
            return Err(Error::DimensionMismatch(format!("x_true has {} entries, n = {n}", xt.len())));
        }
    }
    let meter = opts.x_true.and_then(|_| h.levels[0].svd()).map(QaMeter::new);
    let qa_error = |x: &[f64]| -> Option<f64> {
        let xt = opts.x_true?;
        let e: Vec<f64> = xt.iter().zip(x).map(|(t, v)| t - v).collect();
        meter.as_ref().map(|m| m.norm(&e))
    };
    let residual = |x: &[f64]| -> f64 {
        let ax = a.matvec(x);
        norm2(&b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect::<Vec<_>>())
    };

    let mut x = vec![0.0; n];
    let bnorm = norm2(b);
    let mut report = SolveReport {
        cycle: kind,
        nu: opts.nu,
        mu: if kind == CycleKind::TwoGrid { 1 } else { opts.mu },
        level_sizes: h.sizes(),
        iterations: 0,
        converged: false,
        residual_history: vec![residual(&x)],
        error_history_qa: meter.as_ref().map(|_| vec![qa_error(&x).expect("metered")]),
        rho_estimate: None,
        solution: Vec::new(),
    };
    let mut bad_run = 0;
    report.converged = report.residual_history[0] <= opts.tol * bnorm;
    while !report.converged && report.iterations < opts.max_iters {
        stepper.step(&mut x, b, opts.nu);
        report.iterations += 1;
        let res = residual(&x);
        if !res.is_finite() {
            return Err(Error::NonFinite);
        }
        let prev_res = *report.residual_history.last().expect("seeded");
        report.residual_history.push(res);
        let ratio = match report.error_history_qa.as_mut() {
            Some(hist) => {
                let prev = *hist.last().expect("seeded");
                let e = qa_error(&x).expect("metered");
                hist.push(e);
                e / prev
            }
            None => res / prev_res,
        };
        bad_run = if ratio >= 1.0 { bad_run + 1 } else { 0 };
        report.converged = res <= opts.tol * bnorm;
        if bad_run >= STAGNATION_WINDOW && !report.converged {
            report.solution = x;
            report.rho_estimate = measure_rho(&report).ok();
            return Err(Error::Stagnation(Box::new(report)));
        }
    }
    report.solution = x;
    report.rho_estimate = measure_rho(&report).ok();
    Ok(report)
}

/// Two-grid iteration `e <- (I - Pi) G^nu e` with an exact coarse solve on level 1.
pub fn two_grid_solve(h: &Hierarchy, b: &[f64], opts: &SolveOptions) -> Result<SolveReport> {
    iterate(h, CycleKind::TwoGrid, b, opts)
}

/// Recursive cycle with `mu` coarse visits per level (2 = W-cycle), direct solve on the coarsest.
pub fn mu_cycle_solve(h: &Hierarchy, b: &[f64], opts: &SolveOptions) -> Result<SolveReport> {
    iterate(h, CycleKind::MuCycle, b, opts)
}

/// The level-0 error propagation operator of one cycle, column by column.
pub fn cycle_error_operator(h: &Hierarchy, kind: CycleKind, nu: usize, mu: usize) -> Result<DenseMatrix> {
    let stepper = Stepper::new(h, kind, mu)?;
    let n = h.levels[0].n();
    let zero = vec![0.0; n];
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        stepper.step(&mut e, &zero, nu);
        cols.push(e);
    }
    Ok(DenseMatrix::from_columns(n, &cols))
}

/// Asymptotic QA contraction of the homogeneous iteration from a random start.
#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub cycle: CycleKind,
    pub nu: usize,
    pub mu: usize,
    pub ratios: Vec<f64>,
    pub rho: f64,
}

impl ProbeReport {
    /// The squared factor, which is what the convergence bounds control.
    pub fn rho_squared(&self) -> f64 {
        self.rho * self.rho
    }
}

pub fn convergence_probe(
    h: &Hierarchy,
    kind: CycleKind,
    nu: usize,
    mu: usize,
    iters: usize,
    seed: u64,
) -> Result<ProbeReport> {
    let stepper = Stepper::new(h, kind, mu)?;
    let lvl = &h.levels[0];
    let n = lvl.n();
    let f = lvl.svd().ok_or(Error::TooLarge {
        n,
        cap: crate::linalg::DENSE_CAP,
    })?;
    let meter = QaMeter::new(f);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut e: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let zero = vec![0.0; n];
    let mut annihilated = false;
    let mut ratios = Vec::with_capacity(iters);
    for _ in 0..iters {
        let before = meter.norm(&e);
        for v in e.iter_mut() {
            *v /= before;
        }
        stepper.step(&mut e, &zero, nu);
        let after = meter.norm(&e);
        if !after.is_finite() {
            return Err(Error::NonFinite);
        }
        if after == 0.0 {
            annihilated = true;
            break;
        }
        ratios.push(after);
    }
    let rho = match rho_from_ratios(&ratios) {
        Ok(r) => r,
        // an exact solver annihilates the error: report the machine-level floor
        Err(_) if annihilated => f64::MIN_POSITIVE,
        Err(e) => return Err(e),
    };
    Ok(ProbeReport {
        cycle: kind,
        nu,
        mu: if kind == CycleKind::TwoGrid { 1 } else { mu },
        ratios,
        rho,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{operator_norm_weighted, qa_power, DenseMatrix};
    use crate::problem::{prepare_system, ProblemSpec, ScaledSystem};
    use crate::solver::hierarchy::{build_hierarchy, HierarchyConfig};
    use crate::transfer::{InterpKind, RestrictKind, TransferConfig};

    fn upwind(n: usize) -> ScaledSystem {
        prepare_system(&ProblemSpec::upwind(n).matrix().unwrap(), true).unwrap()
    }

    fn two_level(sys: &ScaledSystem, t: TransferConfig) -> Hierarchy {
        let cfg = HierarchyConfig {
            coarsest_max: 1,
            ..HierarchyConfig::new(t, 2)
        };
        build_hierarchy(sys, &cfg).unwrap()
    }

    fn opts(nu: usize, mu: usize, x_true: Option<&[f64]>) -> SolveOptions<'_> {
        SolveOptions {
            nu,
            mu,
            tol: 1e-10,
            max_iters: 200,
            x_true,
        }
    }

    #[test]
    fn recovers_constant_solution() {
        let sys = upwind(10);
        let h = two_level(&sys, TransferConfig::default());
        let ones = vec![1.0; 100];
        let b = sys.a.matvec(&ones);
        let rep = two_grid_solve(&h, &b, &opts(2, 1, Some(&ones))).unwrap();
        assert!(rep.converged);
        assert!(rep.solution.iter().all(|v| (v - 1.0).abs() < 1e-8));
        assert!(*rep.residual_history.last().unwrap() <= 1e-10 * norm2(&b));
    }

    #[test]
    fn error_map_matches_explicit_operator() {
        let sys = upwind(6);
        let h = two_level(&sys, TransferConfig::default());
        let nu = 2;
        let a = sys.a.to_dense();
        let t = h.levels[0].transfers.as_ref().unwrap();
        let (p, r) = (t.p.to_dense(), t.r.to_dense());
        let ac = r.tr_matmul(&a.matmul(&p));
        let pi = p.matmul(&Lu::new(&ac).unwrap().solve_matrix(&r.tr_matmul(&a)));
        let g1 = DenseMatrix::identity(36).sub(&a.tr_matmul(&a));
        let explicit = DenseMatrix::identity(36).sub(&pi).matmul(&g1.matmul(&g1));

        let measured = cycle_error_operator(&h, CycleKind::TwoGrid, nu, 1).unwrap();
        assert!(measured.max_abs_diff(&explicit) <= 1e-10);

        let stepper = Stepper::new(&h, CycleKind::TwoGrid, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let e: Vec<f64> = (0..36).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut x = e.clone();
            stepper.step(&mut x, &[0.0; 36], nu);
            let want = explicit.matvec(&e);
            assert!(x.iter().zip(&want).all(|(u, v)| (u - v).abs() <= 1e-10));
        }
    }

    #[test]
    fn two_level_mu_cycle_equals_two_grid() {
        let sys = upwind(8);
        let h = two_level(&sys, TransferConfig::default());
        let x_true: Vec<f64> = (0..64).map(|i| (i as f64 * 0.37).sin()).collect();
        let b = sys.a.matvec(&x_true);
        let tg = two_grid_solve(&h, &b, &opts(1, 1, Some(&x_true))).unwrap();
        for mu in 1..=3 {
            let mc = mu_cycle_solve(&h, &b, &opts(1, mu, Some(&x_true))).unwrap();
            assert_eq!(mc.residual_history, tg.residual_history);
            assert_eq!(mc.error_history_qa, tg.error_history_qa);
        }
    }

    #[test]
    fn exact_svd_two_grid_beats_bound() {
        let sys = upwind(8);
        let h = two_level(&sys, TransferConfig::new(InterpKind::Svd, RestrictKind::Svd));
        let f = h.levels[0].svd().unwrap();
        let s = f.sigma[32];
        // |(I - Pi) G|_QA = 1 - s^2 exactly
        let e = cycle_error_operator(&h, CycleKind::TwoGrid, 1, 1).unwrap();
        let norm = operator_norm_weighted(&e, &qa_power(f, 1.0)).unwrap();
        assert!((norm - (1.0 - s * s)).abs() < 1e-10, "{norm}");
        let probe = convergence_probe(&h, CycleKind::TwoGrid, 1, 1, 30, 1).unwrap();
        assert!(probe.rho <= norm + 1e-12);
        let bound = crate::theory::two_grid_bound(1.0, 1.0 / s, 1, 1.0).unwrap();
        assert!(probe.rho_squared() <= bound);
    }

    #[test]
    fn w_cycle_converges() {
        let sys = upwind(16);
        let h = build_hierarchy(&sys, &HierarchyConfig::new(TransferConfig::default(), 3)).unwrap();
        assert_eq!(h.num_levels(), 3);
        let x_true: Vec<f64> = (0..256).map(|i| (i as f64 * 0.11).cos()).collect();
        let b = sys.a.matvec(&x_true);
        let rep = mu_cycle_solve(&h, &b, &opts(4, 2, Some(&x_true))).unwrap();
        assert!(rep.converged, "{:?}", rep.residual_history);
        let rho = rep.rho_estimate.unwrap();
        assert!(rho > 0.0 && rho < 1.0);
    }

    #[test]
    fn stagnation_without_relaxation() {
        let sys = upwind(8);
        let h = two_level(&sys, TransferConfig::default());
        let x_true: Vec<f64> = (0..64).map(|i| ((i * 7) % 5) as f64 - 2.0).collect();
        let b = sys.a.matvec(&x_true);
        match mu_cycle_solve(&h, &b, &opts(0, 1, Some(&x_true))) {
            Err(Error::Stagnation(rep)) => {
                assert!(rep.iterations >= STAGNATION_WINDOW);
                assert_eq!(rep.residual_history.len(), rep.iterations + 1);
            }
            other => panic!("expected stagnation, got {other:?}"),
        }
    }

    #[test]
    fn scaled_solution_solves_original_system() {
        let spec = ProblemSpec::upwind(8);
        let raw = spec.matrix().unwrap();
        let sys = prepare_system(&raw, true).unwrap();
        let h = two_level(&sys, TransferConfig::default());
        let b_raw: Vec<f64> = (0..64).map(|i| 1.0 + (i % 3) as f64).collect();
        let b = sys.scale_rhs(&b_raw);
        let rep = two_grid_solve(&h, &b, &SolveOptions { tol: 1e-14, max_iters: 500, ..opts(2, 1, None) }).unwrap();
        let direct = Lu::new(&raw.to_dense()).unwrap().solve(&b_raw);
        let scale = direct.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        assert!(rep.solution.iter().zip(&direct).all(|(u, v)| (u - v).abs() <= 1e-10 * scale));
    }

    #[test]
    fn needs_two_levels() {
        let sys = upwind(4);
        let h = build_hierarchy(&sys, &HierarchyConfig::default()).unwrap();
        assert!(two_grid_solve(&h, &[0.0; 16], &opts(1, 1, None)).is_err());
    }
}
