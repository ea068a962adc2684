use crate::error::{Error, Result};
use crate::linalg::dense::{dot, DenseMatrix};
use crate::linalg::eigen::{symmetric_eigen, SymmetricEigen};
use crate::linalg::svd::{svd, SvdFactorization};

const SYMMETRY_TOL: f64 = 1e-10;

/// Polar factor `Q = V U^T`, so that `QA = V Σ V^T` and `AQ = U Σ U^T`.
pub fn polar_q(f: &SvdFactorization) -> Result<DenseMatrix> {
    let n = f.n();
    if n == 0 {
        return Ok(DenseMatrix::zeros(0, 0));
    }
    if f.sigma_min() <= 1e-14 * f.sigma_max() {
        return Err(Error::SingularInput {
            ratio: f.sigma_min() / f.sigma_max(),
        });
    }
    Ok(f.v.matmul(&f.u.transpose()))
}

/// `V Σ^p V^T`, i.e. `(QA)^p`, assembled directly from the factorization.
pub fn qa_power(f: &SvdFactorization, p: f64) -> DenseMatrix {
    let d: Vec<f64> = f.sigma.iter().map(|s| powf_safe(*s, p)).collect();
    f.v.scale_cols(&d).matmul(&f.v.transpose())
}

/// `U Σ^p U^T`, i.e. `(AQ)^p`.
pub fn aq_power(f: &SvdFactorization, p: f64) -> DenseMatrix {
    let d: Vec<f64> = f.sigma.iter().map(|s| powf_safe(*s, p)).collect();
    f.u.scale_cols(&d).matmul(&f.u.transpose())
}

#[inline]
pub(crate) fn powf_safe(x: f64, p: f64) -> f64 {
    if p == 0.0 {
        1.0
    } else {
        x.powf(p)
    }
}

fn check_symmetric(m: &DenseMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let asym = m.asymmetry();
    if asym > SYMMETRY_TOL {
        return Err(Error::InvalidArgument(format!(
            "matrix is not symmetric (relative asymmetry {asym:e})"
        )));
    }
    Ok(())
}

fn spd_eigen(m: &DenseMatrix) -> Result<SymmetricEigen> {
    check_symmetric(m)?;
    let eig = symmetric_eigen(m)?;
    let n = eig.values.len();
    if n > 0 {
        let lo = eig.values[0];
        let hi = eig.values[n - 1];
        if lo < -1e-10 * hi.abs().max(f64::MIN_POSITIVE) {
            return Err(Error::NotSpd {
                min_eig: lo,
                max_eig: hi,
            });
        }
    }
    Ok(eig)
}

/// `M^p` for symmetric positive (semi)definite `M`.
pub fn spd_fractional_power(m: &DenseMatrix, p: f64) -> Result<DenseMatrix> {
    let eig = spd_eigen(m)?;
    let n = eig.values.len();
    if p < 0.0 && n > 0 && eig.values[0] <= 0.0 {
        return Err(Error::NotSpd {
            min_eig: eig.values[0],
            max_eig: eig.values[n - 1],
        });
    }
    let d: Vec<f64> = eig
        .values
        .iter()
        .map(|&l| powf_safe(l.max(0.0), p))
        .collect();
    let out = eig.vectors.scale_cols(&d).matmul(&eig.vectors.transpose());
    Ok(out.symmetrized())
}

/// Moore-Penrose inverse, truncating singular values below `rtol * sigma_max`.
pub fn pseudo_inverse(a: &DenseMatrix, rtol: f64) -> Result<DenseMatrix> {
    let f = svd(a)?;
    let smax = f.sigma_max();
    let inv: Vec<f64> = f
        .sigma
        .iter()
        .map(|&s| if smax > 0.0 && s > rtol * smax { 1.0 / s } else { 0.0 })
        .collect();
    Ok(f.v.scale_cols(&inv).matmul(&f.u.transpose()))
}

/// `sqrt(<Wv, v>)`, clamped at zero.
pub fn weighted_norm(v: &[f64], w: &DenseMatrix) -> Result<f64> {
    if w.rows() != v.len() || w.cols() != v.len() {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} against a {}x{} weight",
            v.len(),
            w.rows(),
            w.cols()
        )));
    }
    Ok(dot(&w.matvec(v), v).max(0.0).sqrt())
}

/// Largest singular value, from the largest eigenvalue of the smaller Gram matrix.
pub fn spectral_norm(m: &DenseMatrix) -> f64 {
    if m.rows() == 0 || m.cols() == 0 {
        return 0.0;
    }
    let gram = if m.rows() >= m.cols() {
        m.tr_matmul(m)
    } else {
        m.matmul(&m.transpose())
    };
    let vals = symmetric_eigen(&gram).expect("Gram matrix is finite and square").values;
    vals.last().copied().unwrap_or(0.0).max(0.0).sqrt()
}

/// Smallest singular value of a square or tall matrix.
pub fn min_singular_value(m: &DenseMatrix) -> Result<f64> {
    Ok(svd(m)?.sigma_min())
}

/// `sup ||Mx||_W / ||x||_W = ||W^{1/2} M W^{-1/2}||_2` for SPD `W`.
pub fn operator_norm_weighted(m: &DenseMatrix, w: &DenseMatrix) -> Result<f64> {
    let (half, neg_half) = spd_sqrt_pair(w)?;
    if m.rows() != w.rows() || m.cols() != w.rows() {
        return Err(Error::DimensionMismatch(format!(
            "operator {}x{} against a {}x{} weight",
            m.rows(),
            m.cols(),
            w.rows(),
            w.cols()
        )));
    }
    Ok(spectral_norm(&half.matmul(m).matmul(&neg_half)))
}

/// `(W^{1/2}, W^{-1/2})` for SPD `W` from a single eigendecomposition.
pub fn spd_sqrt_pair(w: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    let eig = spd_eigen(w)?;
    let n = eig.values.len();
    if n > 0 && eig.values[0] <= 0.0 {
        return Err(Error::NotSpd {
            min_eig: eig.values[0],
            max_eig: eig.values[n - 1],
        });
    }
    let s: Vec<f64> = eig.values.iter().map(|l| l.sqrt()).collect();
    let si: Vec<f64> = s.iter().map(|x| 1.0 / x).collect();
    let vt = eig.vectors.transpose();
    Ok((
        eig.vectors.scale_cols(&s).matmul(&vt),
        eig.vectors.scale_cols(&si).matmul(&vt),
    ))
}
