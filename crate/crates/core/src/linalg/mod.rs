//! Dense and sparse kernels: Jacobi SVD, symmetric eigensolver, LU/QR,
//! fractional SPD powers and weighted norms.

pub mod dense;
pub mod eigen;
pub mod factor;
pub mod ops;
pub mod sparse;
pub mod svd;

pub use dense::{axpy, dot, norm2, DenseMatrix};
pub use eigen::{symmetric_eigen, symmetric_eigenvalues, SymmetricEigen};
pub use factor::{full_q, orthogonal_complement, orthonormal_basis, qr, Lu, Qr};
pub use ops::{
    aq_power, min_singular_value, operator_norm_weighted, polar_q, pseudo_inverse, qa_power,
    spd_fractional_power, spd_sqrt_pair, spectral_norm, weighted_norm,
};
pub use sparse::SparseMatrix;
pub use svd::{svd, SvdFactorization};

/// Largest matrix size the dense analysis path accepts.
pub const DENSE_CAP: usize = 5000;

#[cfg(test)]
pub(crate) mod test_util {
    use super::DenseMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub fn random_matrix(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DenseMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0))
    }

    pub fn random_spd(n: usize, seed: u64) -> DenseMatrix {
        let b = random_matrix(n, n, seed);
        b.tr_matmul(&b).add(&DenseMatrix::identity(n).scaled(0.1))
    }

    /// `||M^T M - I||_F`
    pub fn orthonormality_defect(m: &DenseMatrix) -> f64 {
        m.tr_matmul(m).sub(&DenseMatrix::identity(m.cols())).frobenius_norm()
    }

    /// Cyclic two-sided Jacobi eigenvalues of a symmetric matrix, ascending.
    /// Independent of the production eigensolver.
    pub fn jacobi_eigenvalues(m: &DenseMatrix) -> Vec<f64> {
        let n = m.rows();
        let mut a = m.symmetrized();
        for _ in 0..100 {
            let mut off = 0.0;
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        off += a[(i, j)] * a[(i, j)];
                    }
                }
            }
            if off.sqrt() <= 1e-15 * a.frobenius_norm() {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    if a[(p, q)].abs() < 1e-300 {
                        continue;
                    }
                    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = c * akp - s * akq;
                        a[(k, q)] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = c * apk - s * aqk;
                        a[(q, k)] = s * apk + c * aqk;
                    }
                }
            }
        }
        let mut d = a.diagonal();
        d.sort_by(f64::total_cmp);
        d
    }
}
