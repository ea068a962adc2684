use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{spectral_norm, SparseMatrix, DENSE_CAP};

/// A matrix rescaled for analysis: `a = scale * D^{-1} A_in` (or without the
/// diagonal factor when `diag` is `None`).
#[derive(Clone, Debug)]
pub struct ScaledSystem {
    pub a: SparseMatrix,
    /// The applied `1 / sigma_max` factor.
    pub scale: f64,
    pub diag_applied: bool,
    /// Diagonal of the input when pointwise scaling was applied.
    pub diag: Option<Vec<f64>>,
    /// True once `a` has unit spectral norm.
    pub normalized: bool,
}

impl ScaledSystem {
    /// Maps a right-hand side of the original system to the scaled one.
    pub fn scale_rhs(&self, b: &[f64]) -> Vec<f64> {
        match &self.diag {
            Some(d) => b.iter().zip(d).map(|(bi, di)| self.scale * bi / di).collect(),
            None => b.iter().map(|bi| self.scale * bi).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }
}

/// Summary of a scaled system for reports.
#[derive(Clone, Debug, Serialize)]
pub struct ScalingInfo {
    pub scale: f64,
    pub diag_applied: bool,
}

impl From<&ScaledSystem> for ScalingInfo {
    fn from(s: &ScaledSystem) -> Self {
        Self {
            scale: s.scale,
            diag_applied: s.diag_applied,
        }
    }
}

/// `D^{-1} A` with `D = diag(A)`.
pub fn diagonal_scale(a: &SparseMatrix) -> Result<SparseMatrix> {
    let d = a.diagonal();
    if let Some(i) = d.iter().position(|&v| v == 0.0) {
        return Err(Error::ZeroDiagonal(i));
    }
    if d.len() < a.rows() {
        return Err(Error::ZeroDiagonal(d.len()));
    }
    let inv: Vec<f64> = d.iter().map(|v| 1.0 / v).collect();
    let mut out = a.scale_rows(&inv);
    // exact unit diagonal
    let trip: Vec<(usize, usize, f64)> = out
        .triplets()
        .into_iter()
        .map(|(i, j, v)| if i == j { (i, j, 1.0) } else { (i, j, v) })
        .collect();
    out = SparseMatrix::from_triplets(out.rows(), out.cols(), &trip)?;
    Ok(out)
}

/// Divides by the largest singular value.
pub fn normalize_spectral(a: &SparseMatrix) -> Result<ScaledSystem> {
    let n = a.rows().max(a.cols());
    if n > DENSE_CAP {
        return Err(Error::TooLarge { n, cap: DENSE_CAP });
    }
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let smax = spectral_norm(&a.to_dense());
    if smax == 0.0 {
        return Err(Error::InvalidArgument("cannot normalize a zero matrix".into()));
    }
    let scale = 1.0 / smax;
    let scaled = if scale == 1.0 { a.clone() } else { a.scaled(scale) };
    Ok(ScaledSystem {
        a: scaled,
        scale,
        diag_applied: false,
        diag: None,
        normalized: true,
    })
}

/// Optional pointwise diagonal scaling followed by spectral normalization.
pub fn prepare_system(a: &SparseMatrix, diag_scale: bool) -> Result<ScaledSystem> {
    if !diag_scale {
        return normalize_spectral(a);
    }
    let scaled = diagonal_scale(a)?;
    let mut sys = normalize_spectral(&scaled)?;
    sys.diag_applied = true;
    sys.diag = Some(a.diagonal());
    Ok(sys)
}
