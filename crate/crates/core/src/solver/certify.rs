use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, SvdFactorization};
use crate::solver::hierarchy::Hierarchy;
use crate::theory::{
    fap_constant, inner_product_equivalence, measure_projection, select_k, stability_bound, wcycle_requirements,
    BasisParams, Hypotheses, Metric, WcycleRequirements,
};

/// Theory constants for one level's transfers.
#[derive(Clone, Debug, Serialize)]
pub struct LevelCertificate {
    pub level: usize,
    pub n: usize,
    pub n_c: usize,
    /// Uniform FAP(beta, 0) constant of P.
    pub k_p: f64,
    /// Uniform FAP(gamma, 0) constant of R.
    pub k_r: f64,
    /// Uniform FAP(beta, 1) constant of P.
    pub k_p1: f64,
    pub k: Option<usize>,
    pub hypotheses: Option<Hypotheses>,
    pub c_pi: Option<f64>,
    pub pi_qa_sq: f64,
    pub c0: Option<f64>,
    pub c1: Option<f64>,
    pub c0_measured: f64,
    pub c1_measured: f64,
    pub certified: bool,
}

pub fn certify_transfers(
    level: usize,
    p: &DenseMatrix,
    r: &DenseMatrix,
    f: &SvdFactorization,
    beta: f64,
    gamma: f64,
) -> Result<LevelCertificate> {
    let k_p = fap_constant(p, f, beta, 0.0)?.uniform_k;
    let k_r = fap_constant(r, &f.transposed(), gamma, 0.0)?.uniform_k;
    let k_p1 = fap_constant(p, f, beta, 1.0)?.uniform_k;
    let pi_qa = measure_projection(p, r, f, Metric::Qa)?.norm;
    let mut cert = LevelCertificate {
        level,
        n: f.n(),
        n_c: p.cols(),
        k_p,
        k_r,
        k_p1,
        k: None,
        hypotheses: None,
        c_pi: None,
        pi_qa_sq: pi_qa * pi_qa,
        c0: None,
        c1: None,
        c0_measured: f64::NAN,
        c1_measured: f64::NAN,
        certified: false,
    };
    let params = BasisParams { beta, gamma, k_p, k_r };
    let Some(dec) = select_k(p, r, f, &params)? else {
        let (ac, g) = crate::theory::coarse_pair(p, r, f)?;
        let (c0, c1, _, _) = crate::theory::measured_equivalence(&ac, &g)?;
        cert.c0_measured = c0;
        cert.c1_measured = c1;
        return Ok(cert);
    };
    let stab = stability_bound(&dec)?;
    let eq = inner_product_equivalence(p, r, f, &dec)?;
    cert.k = Some(dec.k);
    cert.hypotheses = Some(stab.hypotheses);
    cert.c_pi = stab.bound.map(|b| b.c_pi);
    cert.c0 = eq.c0_bound;
    cert.c1 = eq.c1_bound;
    cert.c0_measured = eq.c0_measured;
    cert.c1_measured = eq.c1_measured;
    cert.certified = cert.c_pi.is_some() && eq.certified() && eq.c0_bound.is_some();
    Ok(cert)
}

/// Per-level certificates and the W-cycle requirements built from the
/// worst constants over all levels.
#[derive(Clone, Debug, Serialize)]
pub struct HierarchyCertificate {
    pub beta: f64,
    pub gamma: f64,
    pub levels: Vec<LevelCertificate>,
    pub certified: bool,
    pub c0: Option<f64>,
    pub c1: Option<f64>,
    pub k_p1: f64,
    pub c_pi: Option<f64>,
    /// From the a-priori bounds; present only when every level is certified.
    pub requirements: Option<WcycleRequirements>,
    pub c0_measured: f64,
    pub c1_measured: f64,
    /// Largest measured `|Pi|_QA^2`.
    pub c_pi_measured: f64,
    /// From the measured constants, which are the sharpest admissible ones.
    pub requirements_measured: Option<WcycleRequirements>,
}

pub fn certify_hierarchy(h: &Hierarchy, beta: f64, gamma: f64) -> Result<HierarchyCertificate> {
    let mut levels = Vec::new();
    for (i, lvl) in h.levels.iter().enumerate() {
        let Some(t) = &lvl.transfers else { continue };
        let f = lvl.svd().ok_or(Error::TooLarge {
            n: lvl.n(),
            cap: crate::linalg::DENSE_CAP,
        })?;
        levels.push(certify_transfers(i, &t.p.to_dense(), &t.r.to_dense(), f, beta, gamma)?);
    }
    let certified = !levels.is_empty() && levels.iter().all(|c| c.certified);
    let k_p1 = levels.iter().map(|c| c.k_p1).fold(0.0, f64::max);
    let (mut c0, mut c1, mut c_pi, mut requirements) = (None, None, None, None);
    if certified {
        let lo = levels.iter().filter_map(|c| c.c0).fold(f64::INFINITY, f64::min);
        let hi = levels.iter().filter_map(|c| c.c1).fold(0.0, f64::max);
        let cp = levels.iter().filter_map(|c| c.c_pi).fold(1.0, f64::max);
        requirements = Some(wcycle_requirements(lo, hi, k_p1, cp, beta)?);
        c0 = Some(lo);
        c1 = Some(hi);
        c_pi = Some(cp);
    }
    let c0_measured = levels.iter().map(|c| c.c0_measured).fold(f64::INFINITY, f64::min);
    let c1_measured = levels.iter().map(|c| c.c1_measured).fold(0.0, f64::max);
    let c_pi_measured = levels.iter().map(|c| c.pi_qa_sq).fold(1.0, f64::max);
    let requirements_measured = wcycle_requirements(c0_measured, c1_measured, k_p1, c_pi_measured, beta).ok();
    Ok(HierarchyCertificate {
        beta,
        gamma,
        levels,
        certified,
        c0,
        c1,
        k_p1,
        c_pi,
        requirements,
        c0_measured,
        c1_measured,
        c_pi_measured,
        requirements_measured,
    })
}
