use serde::Serialize;

use crate::error::Result;
use crate::linalg::{DenseMatrix, SvdFactorization};
use crate::theory::basis::{BasisDecomposition, BasisParams, Deltas, Hypotheses};
use crate::theory::block::block_bounds;
use crate::theory::projection::{measure_projection, Metric};

/// The stability constant and the lower bound `eta0` of the middle factor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CPiBound {
    pub eta0: f64,
    pub eta1: f64,
    /// `(1 + sigma_k^{2beta-1} Khat_P)(1 + sigma_k^{2gamma-1} Khat_R) / eta0`
    pub c_pi: f64,
    /// Product of the outer-factor bounds derived in the proof over `eta0`;
    /// never smaller than `c_pi`.
    pub c_pi_proof: f64,
}

fn outer_factor(x: f64, full: bool) -> f64 {
    if full {
        1.0 + x
    } else {
        1.0 + 0.5 * (x + (x * x + 4.0 * x).sqrt())
    }
}

/// Evaluates the stability bound from scalars. `s1` is `None` when `k = n_c`.
pub fn c_pi_from_scalars(sigma_k: f64, params: &BasisParams, s1: Option<f64>) -> Result<CPiBound> {
    let d = Deltas::new(sigma_k, params);
    let x = sigma_k.powf(2.0 * params.beta - 1.0) * d.khat_p;
    let y = sigma_k.powf(2.0 * params.gamma - 1.0) * d.khat_r;
    let a0 = 1.0 - d.delta_pr_sq;
    let a1 = 1.0 + d.delta_pr_sq;
    let (eta0, eta1) = match s1 {
        None => (a0 * a0, a1 * a1),
        Some(s1) => {
            let b = sigma_k.powf(params.gamma - 0.5) * d.khat_r.sqrt();
            let c = sigma_k.powf(params.beta - 0.5) * d.khat_p.sqrt();
            block_bounds(a0, a1, b, c, s1, 1.0)?
        }
    };
    let full = s1.is_none();
    Ok(CPiBound {
        eta0,
        eta1,
        c_pi: (1.0 + x) * (1.0 + y) / eta0,
        c_pi_proof: outer_factor(x, full) * outer_factor(y, full) / eta0,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilityBound {
    pub k: usize,
    pub hypotheses: Hypotheses,
    pub deltas: Deltas,
    pub s1: Option<f64>,
    /// Present only when every hypothesis holds.
    pub bound: Option<CPiBound>,
}

pub fn stability_bound(dec: &BasisDecomposition) -> Result<StabilityBound> {
    let hypotheses = dec.hypotheses();
    let s1 = dec.s1();
    let bound = if hypotheses.all() {
        let s = if dec.k == dec.n_c { None } else { s1 };
        Some(c_pi_from_scalars(dec.deltas.sigma_k, &dec.params, s)?)
    } else {
        None
    };
    Ok(StabilityBound {
        k: dec.k,
        hypotheses,
        deltas: dec.deltas,
        s1,
        bound,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilityReport {
    pub theory: StabilityBound,
    pub measured_pi_qa: f64,
    pub measured_pi_l2: f64,
}

impl StabilityReport {
    /// `|Pi|_QA^2 <= C_Pi + 1e-6`; `None` when the bound is not available.
    pub fn bound_holds(&self) -> Option<bool> {
        self.theory
            .bound
            .map(|b| self.measured_pi_qa * self.measured_pi_qa <= b.c_pi + 1e-6)
    }
}

pub fn stability_report(
    p: &DenseMatrix,
    r: &DenseMatrix,
    f: &SvdFactorization,
    dec: &BasisDecomposition,
) -> Result<StabilityReport> {
    let theory = stability_bound(dec)?;
    let qa = measure_projection(p, r, f, Metric::Qa)?;
    let l2 = measure_projection(p, r, f, Metric::L2)?;
    Ok(StabilityReport {
        theory,
        measured_pi_qa: qa.norm,
        measured_pi_l2: l2.norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{polar_q, svd};
    use crate::problem::{prepare_system, ProblemSpec};
    use crate::theory::{build_pr_bases, fap_constant, select_k};
    use crate::transfer::{build_pair, q_pair_restrict, svd_transfer, InterpKind, RestrictKind, Side, TransferConfig};

    #[test]
    fn hand_example() {
        let params = BasisParams { beta: 1.0, gamma: 1.0, k_p: 4.0, k_r: 4.0 };
        let b = c_pi_from_scalars(0.1, &params, Some(0.9)).unwrap();
        // recomputed step by step
        let khat = 4.0 / 0.96;
        let dpr = 0.1 * khat;
        let a0: f64 = 1.0 - dpr;
        let bc = 0.1_f64.sqrt() * khat.sqrt();
        let d0: f64 = 0.9;
        let tr = a0 * a0 + 2.0 * bc * bc + d0 * d0;
        let disc = (a0 * a0 - d0 * d0).powi(2) + 4.0 * (bc * (a0 + d0)).powi(2);
        let eta0 = 0.5 * (tr - disc.sqrt());
        let c_pi = (1.0 + 0.1 * khat).powi(2) / eta0;
        assert!((b.eta0 - eta0).abs() <= 1e-10 * eta0);
        assert!((b.c_pi - c_pi).abs() <= 1e-10 * c_pi);
        assert!((bc - 0.6455).abs() < 1e-4);
        assert!((b.eta0 - 5.915e-3).abs() < 2e-5);
        assert!(b.c_pi > 330.0 && b.c_pi < 345.0);
        assert!(b.c_pi_proof >= b.c_pi);
    }

    #[test]
    fn orthogonal_limit() {
        let params = BasisParams { beta: 1.0, gamma: 1.0, k_p: 0.0, k_r: 0.0 };
        let b = c_pi_from_scalars(0.5, &params, Some(1.0)).unwrap();
        assert!((b.c_pi - 1.0).abs() < 1e-15);
        let b = c_pi_from_scalars(0.5, &params, None).unwrap();
        assert!((b.c_pi - 1.0).abs() < 1e-15);
    }

    fn certified_pairs() -> Vec<(DenseMatrix, DenseMatrix, SvdFactorization)> {
        let mut out = Vec::new();
        for n in [6, 8] {
            let sys = prepare_system(&ProblemSpec::upwind(n).matrix().unwrap(), true).unwrap();
            let f = svd(&sys.a.to_dense()).unwrap();
            for (ip, rs) in [
                (InterpKind::Classical, RestrictKind::Lair),
                (InterpKind::Laip, RestrictKind::Lair),
                (InterpKind::Classical, RestrictKind::QStar),
                (InterpKind::Svd, RestrictKind::Svd),
            ] {
                let pair = build_pair(&sys.a, &TransferConfig::new(ip, rs), Some(&f)).unwrap();
                out.push((pair.p.to_dense(), pair.r.to_dense(), f.clone()));
            }
        }
        out
    }

    #[test]
    fn measured_norm_below_bound_when_certified() {
        let mut certified = 0;
        for (p, r, f) in certified_pairs() {
            for beta in [1.0, 1.5] {
                let params = BasisParams {
                    beta,
                    gamma: beta,
                    k_p: fap_constant(&p, &f, beta, 0.0).unwrap().uniform_k,
                    k_r: fap_constant(&r, &f.transposed(), beta, 0.0).unwrap().uniform_k,
                };
                if let Some(dec) = select_k(&p, &r, &f, &params).unwrap() {
                    let rep = stability_report(&p, &r, &f, &dec).unwrap();
                    assert_eq!(rep.bound_holds(), Some(true), "{rep:?}");
                    certified += 1;
                }
            }
        }
        assert!(certified >= 4);
    }

    #[test]
    fn flags_reported_when_violated() {
        let sys = prepare_system(&ProblemSpec::upwind(6).matrix().unwrap(), true).unwrap();
        let f = svd(&sys.a.to_dense()).unwrap();
        let p = svd_transfer(&f, 18, Side::Right).unwrap();
        let r = q_pair_restrict(&p, &polar_q(&f).unwrap()).unwrap();
        let params = BasisParams { beta: 1.0, gamma: 1.0, k_p: 1e6, k_r: 1e6 };
        let dec = build_pr_bases(&p, &r, &f, 18, &params).unwrap();
        let b = stability_bound(&dec).unwrap();
        assert!(!b.hypotheses.delta_p);
        assert!(b.bound.is_none());
        let rep = stability_report(&p, &r, &f, &dec).unwrap();
        assert!((rep.measured_pi_qa - 1.0).abs() < 1e-8);
        assert_eq!(rep.bound_holds(), None);
    }
}
