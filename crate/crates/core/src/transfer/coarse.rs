use crate::error::{Error, Result};
use crate::linalg::{svd, DenseMatrix, SparseMatrix};

pub const COARSE_SINGULAR_RTOL: f64 = 1e-12;

/// `A_c = R^T A P`, rejected when `sigma_min / sigma_max < 1e-12`.
pub fn coarse_operator(r: &DenseMatrix, a: &DenseMatrix, p: &DenseMatrix) -> Result<DenseMatrix> {
    coarse_operator_at(0, r, a, p)
}

pub fn coarse_operator_at(level: usize, r: &DenseMatrix, a: &DenseMatrix, p: &DenseMatrix) -> Result<DenseMatrix> {
    if r.rows() != a.rows() || p.rows() != a.cols() || r.cols() != p.cols() {
        return Err(Error::DimensionMismatch(format!(
            "R {}x{}, A {}x{}, P {}x{}",
            r.rows(),
            r.cols(),
            a.rows(),
            a.cols(),
            p.rows(),
            p.cols()
        )));
    }
    let ac = r.tr_matmul(&a.matmul(p));
    check_nonsingular(level, &ac)?;
    Ok(ac)
}

/// Sparse Petrov-Galerkin product `R^T A P`.
pub fn coarse_operator_sparse(r: &SparseMatrix, a: &SparseMatrix, p: &SparseMatrix) -> SparseMatrix {
    r.transpose().matmul(&a.matmul(p))
}

pub fn check_nonsingular(level: usize, ac: &DenseMatrix) -> Result<()> {
    let f = svd(ac)?;
    let smax = f.sigma_max();
    let ratio = if smax > 0.0 { f.sigma_min() / smax } else { 0.0 };
    if !(ratio >= COARSE_SINGULAR_RTOL) {
        return Err(Error::SingularCoarseOperator { level, ratio });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::test_util::random_matrix;
    use crate::transfer::exact::{counterexample_pair, svd_transfer, Side};

    #[test]
    fn identity_transfers_reproduce_a() {
        let a = random_matrix(4, 4, 50);
        let i = DenseMatrix::identity(4);
        assert!(coarse_operator(&i, &a, &i).unwrap().max_abs_diff(&a) < 1e-15);
    }

    #[test]
    fn exact_pair_gives_diagonal() {
        let a = random_matrix(5, 5, 51);
        let f = svd(&a).unwrap();
        let p = svd_transfer(&f, 2, Side::Right).unwrap();
        let r = svd_transfer(&f, 2, Side::Left).unwrap();
        let ac = coarse_operator(&r, &a, &p).unwrap();
        assert!(ac.max_abs_diff(&DenseMatrix::from_diag(&f.sigma[..2])) < 1e-12);
    }

    #[test]
    fn counterexample_is_singular() {
        let a = random_matrix(6, 6, 52);
        let f = svd(&a).unwrap();
        let (r, p) = counterexample_pair(&f, 3, 2).unwrap();
        assert!(matches!(
            coarse_operator(&r, &a, &p),
            Err(Error::SingularCoarseOperator { level: 0, .. })
        ));
    }

    #[test]
    fn sparse_and_dense_products_agree() {
        let a = random_matrix(6, 6, 53);
        let p = random_matrix(6, 3, 54);
        let r = random_matrix(6, 3, 55);
        let dense = r.tr_matmul(&a.matmul(&p));
        let sparse = coarse_operator_sparse(
            &SparseMatrix::from_dense(&r, 0.0),
            &SparseMatrix::from_dense(&a, 0.0),
            &SparseMatrix::from_dense(&p, 0.0),
        );
        assert!(sparse.to_dense().max_abs_diff(&dense) < 1e-14);
    }
}
