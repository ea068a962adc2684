use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{orthogonal_complement, orthonormal_basis, qa_power, operator_norm_weighted, svd, DenseMatrix, SvdFactorization};
use crate::theory::projection::projection_matrix;

/// Minimal QA-angle between range(Pi) and range(I - Pi), with the norm identities.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct AngleReport {
    pub theta_min: f64,
    pub cos_theta: f64,
    pub sin_theta: f64,
    pub norm_pi: f64,
    pub norm_complement: f64,
}

impl AngleReport {
    pub fn inv_sin(&self) -> f64 {
        1.0 / self.sin_theta
    }

    /// Largest relative defect among `|Pi| = |I - Pi| = 1 / sin(theta)`.
    pub fn identity_defect(&self) -> f64 {
        let a = (self.norm_pi - self.inv_sin()).abs() / self.norm_pi;
        let b = (self.norm_pi - self.norm_complement).abs() / self.norm_pi;
        a.max(b)
    }
}

pub fn cgc_angle(p: &DenseMatrix, r: &DenseMatrix, f: &SvdFactorization) -> Result<AngleReport> {
    let n = f.n();
    let n_c = p.cols();
    if n_c == 0 || n_c >= n {
        return Err(Error::TrivialProjection { n, n_c });
    }
    let a = f.reconstruct();
    let pi = projection_matrix(p, r, &a)?;

    // QA inner product becomes Euclidean after x -> Σ^{1/2} V^T x
    let half: Vec<f64> = f.sigma.iter().map(|s| s.sqrt()).collect();
    let range_pi = f.v.tr_matmul(p).scale_rows(&half);
    // null(Pi) = range(A^T R)^perp; A^T R = V Σ U^T R
    let atr = f.u.tr_matmul(r).scale_rows(&f.sigma);
    let null_pi = orthogonal_complement(&atr).scale_rows(&half);
    let qx = orthonormal_basis(&range_pi)?;
    let qy = orthonormal_basis(&null_pi)?;

    let cos_theta = svd(&qx.tr_matmul(&qy))?.sigma_max().min(1.0);
    let resid = qy.sub(&qx.matmul(&qx.tr_matmul(&qy)));
    let sin_theta = svd(&resid)?.sigma_min().min(1.0);
    let theta_min = sin_theta.atan2(cos_theta);

    let w = qa_power(f, 1.0);
    let norm_pi = operator_norm_weighted(&pi, &w)?;
    let comp = DenseMatrix::identity(n).sub(&pi);
    let norm_complement = operator_norm_weighted(&comp, &w)?;
    Ok(AngleReport {
        theta_min,
        cos_theta,
        sin_theta,
        norm_pi,
        norm_complement,
    })
}
