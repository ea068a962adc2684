use serde::Serialize;

use crate::error::Result;
use crate::linalg::{qa_power, spd_sqrt_pair, svd, symmetric_eigenvalues, DenseMatrix, SvdFactorization};
use crate::theory::basis::{BasisDecomposition, Hypotheses};
use crate::theory::block::block_bounds;
use crate::transfer::coarse_operator;

/// Constants relating `A_c = R^T A P` to `G = P^T (QA) P`.
#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceReport {
    /// Extreme eigenvalues of the pencil `((A_c^T A_c)^{1/2}, G)`.
    pub c0_measured: f64,
    pub c1_measured: f64,
    /// Extremes of `|A_c x|^2 / |G x|^2`.
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub c0_bound: Option<f64>,
    pub c1_bound: Option<f64>,
    pub c0_tilde: Option<f64>,
    pub c1_tilde: Option<f64>,
    /// `delta_hat_P^2 = sigma_k^{2beta-1} Khat_P`
    pub delta_hat_p_sq: f64,
    pub hyp5_ok: bool,
    pub beta_ok: bool,
    pub hypotheses: Hypotheses,
}

impl EquivalenceReport {
    pub fn certified(&self) -> bool {
        self.hypotheses.all() && self.hyp5_ok && self.beta_ok
    }

    /// `c0_bound <= c0 <= c1 <= c1_bound` for both the pencil and the norm ratio.
    pub fn sandwich_holds(&self) -> Option<bool> {
        let (lo, hi) = (self.c0_bound?, self.c1_bound?);
        let tol = 1e-6;
        Some(
            lo <= self.c0_measured * (1.0 + tol)
                && self.c0_measured <= self.c1_measured
                && self.c1_measured <= hi * (1.0 + tol)
                && lo <= self.ratio_min * (1.0 + tol)
                && self.ratio_max <= hi * (1.0 + tol),
        )
    }
}

/// `(A_c, G)` for the given transfers.
pub fn coarse_pair(p: &DenseMatrix, r: &DenseMatrix, f: &SvdFactorization) -> Result<(DenseMatrix, DenseMatrix)> {
    let a = f.reconstruct();
    let ac = coarse_operator(r, &a, p)?;
    let g = p.tr_matmul(&qa_power(f, 1.0).matmul(p)).symmetrized();
    Ok((ac, g))
}

/// Measured extremes: `(pencil_min, pencil_max, ratio_min, ratio_max)`.
pub fn measured_equivalence(ac: &DenseMatrix, g: &DenseMatrix) -> Result<(f64, f64, f64, f64)> {
    let fc = svd(ac)?;
    // (A_c^T A_c)^{1/2} = V_c Σ_c V_c^T
    let h = qa_power(&fc, 1.0);
    let (_, g_inv_half) = spd_sqrt_pair(g)?;
    let pencil = symmetric_eigenvalues(&g_inv_half.matmul(&h).matmul(&g_inv_half))?;
    let g_inv = g_inv_half.matmul(&g_inv_half);
    let fr = svd(&ac.matmul(&g_inv))?;
    Ok((
        pencil[0],
        pencil[pencil.len() - 1],
        fr.sigma_min().powi(2),
        fr.sigma_max().powi(2),
    ))
}

fn norm_and_inverse_norm(b: &DenseMatrix) -> Result<(f64, f64)> {
    let f = svd(b)?;
    Ok((f.sigma_max(), 1.0 / f.sigma_min()))
}

pub fn inner_product_equivalence(
    p: &DenseMatrix,
    r: &DenseMatrix,
    f: &SvdFactorization,
    dec: &BasisDecomposition,
) -> Result<EquivalenceReport> {
    let (ac, g) = coarse_pair(p, r, f)?;
    let (c0_measured, c1_measured, ratio_min, ratio_max) = measured_equivalence(&ac, &g)?;

    let d = dec.deltas;
    let params = dec.params;
    let sk = d.sigma_k;
    let delta_hat_p_sq = sk.powf(2.0 * params.beta - 1.0) * d.khat_p;
    let hyp5_ok = delta_hat_p_sq < 1.0;
    let beta_ok = params.beta >= 1.0 && params.gamma > 0.0;
    let hypotheses = dec.hypotheses();

    let (mut c0_tilde, mut c1_tilde, mut c0_bound, mut c1_bound) = (None, None, None, None);
    if hypotheses.all() && hyp5_ok && beta_ok {
        let full = dec.k == dec.n_c;
        let c_p = sk.powf(params.beta - 1.0) * d.khat_p.sqrt();
        let (y0, y1) = if full {
            (1.0, (1.0 + delta_hat_p_sq).powi(2))
        } else {
            block_bounds(1.0, 1.0 + delta_hat_p_sq, sk.powf(params.beta) * d.khat_p.sqrt(), c_p, 1.0, 1.0)?
        };
        let (x0, x1) = if full {
            ((1.0 - d.delta_pr_sq).powi(2), (1.0 + d.delta_pr_sq).powi(2))
        } else {
            block_bounds(
                1.0 - d.delta_pr_sq,
                1.0 + d.delta_pr_sq,
                sk.powf(params.gamma) * d.khat_r.sqrt(),
                c_p,
                dec.s1().unwrap_or(1.0),
                1.0,
            )?
        };
        let t0 = x0 / y1;
        let t1 = x1 / y0;
        let (bp, bp_inv) = norm_and_inverse_norm(&dec.b_p)?;
        let (br, br_inv) = norm_and_inverse_norm(&dec.b_r)?;
        c0_tilde = Some(t0);
        c1_tilde = Some(t1);
        c0_bound = Some(t0 / (bp_inv * br).powi(2));
        c1_bound = Some((bp * br_inv).powi(2) * t1);
    }

    Ok(EquivalenceReport {
        c0_measured,
        c1_measured,
        ratio_min,
        ratio_max,
        c0_bound,
        c1_bound,
        c0_tilde,
        c1_tilde,
        delta_hat_p_sq,
        hyp5_ok,
        beta_ok,
        hypotheses,
    })
}
