use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, SvdFactorization};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Right singular vectors (columns of V).
    Right,
    /// Left singular vectors (columns of U).
    Left,
}

/// The first `n_c` singular vectors (ascending sigma) of the requested side.
pub fn svd_transfer(f: &SvdFactorization, n_c: usize, side: Side) -> Result<DenseMatrix> {
    if n_c > f.n() {
        return Err(Error::InvalidArgument(format!("n_c = {n_c} exceeds n = {}", f.n())));
    }
    Ok(match side {
        Side::Right => f.v.column_block(0, n_c),
        Side::Left => f.u.column_block(0, n_c),
    })
}

/// `R = Q^T P` with `Q = V U^T`, i.e. `R = U V^T P`.
pub fn q_pair_restrict(p: &DenseMatrix, q: &DenseMatrix) -> Result<DenseMatrix> {
    if q.rows() != p.rows() || !q.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "Q is {}x{}, P is {}x{}",
            q.rows(),
            q.cols(),
            p.rows(),
            p.cols()
        )));
    }
    Ok(q.tr_matmul(p))
}

/// Transfers that individually approximate well but give a singular coarse
/// operator: `P = [v_1..v_{l-1}, v_{l+1}..v_{n_c+1}]`, `R = [u_1..u_{n_c}]`
/// (`ell` is 1-based).
pub fn counterexample_pair(f: &SvdFactorization, n_c: usize, ell: usize) -> Result<(DenseMatrix, DenseMatrix)> {
    let n = f.n();
    if !(ell >= 1 && ell <= n_c && n_c < n) {
        return Err(Error::InvalidArgument(format!(
            "counterexample needs 1 <= ell <= n_c < n (ell = {ell}, n_c = {n_c}, n = {n})"
        )));
    }
    let cols: Vec<usize> = (0..=n_c).filter(|&j| j != ell - 1).collect();
    let p = f.v.select_columns(&cols);
    let r = f.u.column_block(0, n_c);
    Ok((r, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{polar_q, svd};

    fn diag_f() -> SvdFactorization {
        svd(&DenseMatrix::from_diag(&[0.4, 0.1, 1.0, 0.7])).unwrap()
    }

    #[test]
    fn full_block_is_whole_basis() {
        let f = diag_f();
        assert_eq!(svd_transfer(&f, 4, Side::Right).unwrap(), f.v);
        assert_eq!(svd_transfer(&f, 4, Side::Left).unwrap(), f.u);
        assert!(svd_transfer(&f, 5, Side::Right).is_err());
    }

    #[test]
    fn diagonal_picks_smallest_entries() {
        let f = diag_f();
        let p = svd_transfer(&f, 2, Side::Right).unwrap();
        assert_eq!(p.column(0), vec![0.0, 1.0, 0.0, 0.0]);
        assert_eq!(p.column(1), vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn exact_pair_coarse_operator_is_sigma1() {
        let a = crate::linalg::test_util::random_matrix(6, 6, 40);
        let f = svd(&a).unwrap();
        let p = svd_transfer(&f, 3, Side::Right).unwrap();
        let r = svd_transfer(&f, 3, Side::Left).unwrap();
        let ac = r.tr_matmul(&a.matmul(&p));
        assert!(ac.max_abs_diff(&DenseMatrix::from_diag(&f.sigma[..3])) < 1e-12);
    }

    #[test]
    fn q_pair_cases() {
        let p = crate::linalg::test_util::random_matrix(5, 2, 41);
        assert_eq!(q_pair_restrict(&p, &DenseMatrix::identity(5)).unwrap(), p);
        let spd = crate::linalg::test_util::random_spd(5, 42);
        let q = polar_q(&svd(&spd).unwrap()).unwrap();
        assert!(q_pair_restrict(&p, &q).unwrap().max_abs_diff(&p) < 1e-10);
        assert!(q_pair_restrict(&p, &DenseMatrix::identity(4)).is_err());
    }

    #[test]
    fn counterexample_has_zero_last_column() {
        let a = DenseMatrix::from_diag(&[0.25, 0.5, 0.75, 1.0]);
        let f = svd(&a).unwrap();
        let (r, p) = counterexample_pair(&f, 2, 1).unwrap();
        let ac = r.tr_matmul(&a.matmul(&p));
        let last = ac.column(1);
        assert!(last.iter().all(|v| v.abs() <= 1e-15));
        assert!(crate::linalg::min_singular_value(&ac).unwrap() <= 1e-12);
        assert!(counterexample_pair(&f, 4, 1).is_err());
        assert!(counterexample_pair(&f, 2, 3).is_err());
    }
}
