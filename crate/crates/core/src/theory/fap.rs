use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{orthonormal_basis, spectral_norm, DenseMatrix, SvdFactorization};
use crate::theory::check_normalized;

/// FAP(beta, eta) constants of a transfer with respect to `V Σ V^T`.
#[derive(Clone, Debug, Serialize)]
pub struct FapReport {
    pub beta: f64,
    pub eta: f64,
    /// `(sigma_i, K_i)` for each singular vector, ascending sigma.
    pub per_vector: Vec<(f64, f64)>,
    /// Smallest constant valid for every fine-grid vector.
    pub uniform_k: f64,
    /// `max_i K_i`; never larger than `uniform_k`.
    pub max_per_vector: f64,
}

impl FapReport {
    pub fn constants(&self) -> Vec<f64> {
        self.per_vector.iter().map(|p| p.1).collect()
    }
}

fn powf0(x: f64, p: f64) -> f64 {
    if p == 0.0 {
        1.0
    } else {
        x.powf(p)
    }
}

/// Computes the FAP constants of `p` against the right singular vectors of
/// `f` (pass `f.transposed()` to measure a restriction against `AQ`).
pub fn fap_constant(p: &DenseMatrix, f: &SvdFactorization, beta: f64, eta: f64) -> Result<FapReport> {
    check_normalized(f)?;
    if !(beta >= 0.0 && eta >= 0.0) {
        return Err(Error::InvalidArgument(format!("FAP powers must be >= 0 (beta = {beta}, eta = {eta})")));
    }
    let n = f.n();
    if p.rows() != n {
        return Err(Error::DimensionMismatch(format!("P has {} rows, A is {n}x{n}", p.rows())));
    }
    let sigma = &f.sigma;
    let half_eta: Vec<f64> = sigma.iter().map(|&s| powf0(s, 0.5 * eta)).collect();
    // minimization in the Σ^eta inner product, V coordinates
    let b = f.v.tr_matmul(p).scale_rows(&half_eta);
    let qb = if p.cols() == 0 {
        DenseMatrix::zeros(n, 0)
    } else {
        orthonormal_basis(&b)?
    };
    let n_c = qb.cols();

    let mut per_vector = Vec::with_capacity(n);
    for i in 0..n {
        let qi = qb.row(i);
        let mut r2 = 0.0;
        for j in 0..n {
            let proj: f64 = qb.row(j).iter().zip(qi).map(|(a, b)| a * b).sum();
            let e = if i == j { 1.0 - proj } else { -proj };
            r2 += e * e;
        }
        let k = powf0(sigma[i], eta - 2.0 * beta) * r2;
        per_vector.push((sigma[i], k));
    }
    let max_per_vector = per_vector.iter().fold(0.0_f64, |m, x| m.max(x.1));

    let uniform_k = if n_c == n {
        max_per_vector
    } else {
        // sup_w |(I - Qb Qb^T) Σ^{eta/2 - beta} w|^2 / |w|^2
        let d: Vec<f64> = sigma.iter().map(|&s| powf0(s, 0.5 * eta - beta)).collect();
        let proj = qb.matmul(&qb.transpose());
        let comp = DenseMatrix::identity(n).sub(&proj).scale_cols(&d);
        let s = spectral_norm(&comp);
        (s * s * powf0(f.sigma_max(), 2.0 * beta - eta)).max(max_per_vector)
    };

    Ok(FapReport {
        beta,
        eta,
        per_vector,
        uniform_k,
        max_per_vector,
    })
}

pub const WAP: (f64, f64) = (0.5, 0.0);
pub const SAP: (f64, f64) = (1.0, 1.0);
pub const SSAP: (f64, f64) = (1.0, 0.0);

/// Uniform WAP/SAP/SSAP constants and the orderings between them.
#[derive(Clone, Debug, Serialize)]
pub struct FapImplications {
    pub k_wap: f64,
    pub k_sap: f64,
    pub k_ssap: f64,
    pub violations: Vec<String>,
}

fn le_slack(lhs: f64, rhs: f64, slack: f64) -> bool {
    lhs <= rhs + slack * rhs.abs().max(1.0)
}

pub const FAP_SLACK: f64 = 1e-8;

pub fn check_fap_implications(p: &DenseMatrix, f: &SvdFactorization) -> Result<FapImplications> {
    let k_wap = fap_constant(p, f, WAP.0, WAP.1)?.uniform_k;
    let k_sap = fap_constant(p, f, SAP.0, SAP.1)?.uniform_k;
    let k_ssap = fap_constant(p, f, SSAP.0, SSAP.1)?.uniform_k;
    let mut violations = Vec::new();
    if !le_slack(k_wap, k_ssap, FAP_SLACK) {
        violations.push(format!("K_W = {k_wap:e} > K_S = {k_ssap:e}"));
    }
    if !le_slack(k_sap, k_ssap, FAP_SLACK) {
        violations.push(format!("K_SAP = {k_sap:e} > K_S = {k_ssap:e}"));
    }
    if !le_slack(k_ssap, k_sap * k_sap, FAP_SLACK) {
        violations.push(format!("K_S = {k_ssap:e} > K_SAP^2 = {:e}", k_sap * k_sap));
    }
    Ok(FapImplications {
        k_wap,
        k_sap,
        k_ssap,
        violations,
    })
}

/// `K_{beta,0} <= K_{beta,beta}^2` for beta in {1/2, 1, 3/2}.
#[derive(Clone, Debug, Serialize)]
pub struct FapSquareCheck {
    /// `(beta, K_{beta,0}, K_{beta,beta})`
    pub rows: Vec<(f64, f64, f64)>,
    pub violations: Vec<String>,
}

pub fn check_fap_theorem_proof(p: &DenseMatrix, f: &SvdFactorization) -> Result<FapSquareCheck> {
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for beta in [0.5, 1.0, 1.5] {
        let k0 = fap_constant(p, f, beta, 0.0)?.uniform_k;
        let kb = fap_constant(p, f, beta, beta)?.uniform_k;
        if !le_slack(k0, kb * kb, FAP_SLACK) {
            violations.push(format!("beta = {beta}: K_0 = {k0:e} > K_beta^2 = {:e}", kb * kb));
        }
        rows.push((beta, k0, kb));
    }
    Ok(FapSquareCheck { rows, violations })
}

/// Uniform constants on a (beta, eta) grid must be nonincreasing in eta and
/// nondecreasing in beta.
pub fn check_fap_monotonicity(p: &DenseMatrix, f: &SvdFactorization, betas: &[f64], etas: &[f64]) -> Result<Vec<String>> {
    let mut grid = vec![vec![0.0; etas.len()]; betas.len()];
    for (i, &b) in betas.iter().enumerate() {
        for (j, &e) in etas.iter().enumerate() {
            grid[i][j] = fap_constant(p, f, b, e)?.uniform_k;
        }
    }
    let mut violations = Vec::new();
    for i in 0..betas.len() {
        for j in 0..etas.len() {
            if j + 1 < etas.len() && etas[j + 1] >= etas[j] && !le_slack(grid[i][j + 1], grid[i][j], FAP_SLACK) {
                violations.push(format!(
                    "beta = {}: K(eta = {}) = {:e} > K(eta = {}) = {:e}",
                    betas[i],
                    etas[j + 1],
                    grid[i][j + 1],
                    etas[j],
                    grid[i][j]
                ));
            }
            if i + 1 < betas.len() && betas[i + 1] >= betas[i] && !le_slack(grid[i][j], grid[i + 1][j], FAP_SLACK) {
                violations.push(format!(
                    "eta = {}: K(beta = {}) = {:e} > K(beta = {}) = {:e}",
                    etas[j],
                    betas[i],
                    grid[i][j],
                    betas[i + 1],
                    grid[i + 1][j]
                ));
            }
        }
    }
    Ok(violations)
}
