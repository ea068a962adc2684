use crate::error::{Error, Result};
use crate::linalg::dense::{dot, DenseMatrix};

const MAX_SWEEPS: usize = 60;

/// `A = U diag(sigma) V^T` with sigma in ascending order.
///
/// For an m x n input with r = min(m, n), U is m x r and V is n x r.
#[derive(Clone, Debug)]
pub struct SvdFactorization {
    pub u: DenseMatrix,
    pub sigma: Vec<f64>,
    pub v: DenseMatrix,
    pub sweeps: usize,
}

impl SvdFactorization {
    pub fn n(&self) -> usize {
        self.sigma.len()
    }

    pub fn sigma_max(&self) -> f64 {
        self.sigma.last().copied().unwrap_or(0.0)
    }

    pub fn sigma_min(&self) -> f64 {
        self.sigma.first().copied().unwrap_or(0.0)
    }

    /// `U diag(sigma) V^T`
    pub fn reconstruct(&self) -> DenseMatrix {
        self.u.scale_cols(&self.sigma).matmul(&self.v.transpose())
    }

    pub fn right_vector(&self, i: usize) -> Vec<f64> {
        self.v.column(i)
    }

    pub fn left_vector(&self, i: usize) -> Vec<f64> {
        self.u.column(i)
    }

    /// Factorization of `A^T`: the roles of U and V swap.
    pub fn transposed(&self) -> SvdFactorization {
        SvdFactorization {
            u: self.v.clone(),
            sigma: self.sigma.clone(),
            v: self.u.clone(),
            sweeps: self.sweeps,
        }
    }
}

/// Singular value decomposition by one-sided (Hestenes) Jacobi rotations.
pub fn svd(a: &DenseMatrix) -> Result<SvdFactorization> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    if a.rows() < a.cols() {
        let t = svd(&a.transpose())?;
        let mut f = SvdFactorization {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
            sweeps: t.sweeps,
        };
        fix_signs(&mut f);
        return Ok(f);
    }
    let m = a.rows();
    let n = a.cols();
    if n == 0 {
        return Ok(SvdFactorization {
            u: DenseMatrix::zeros(m, 0),
            sigma: Vec::new(),
            v: DenseMatrix::zeros(0, 0),
            sweeps: 0,
        });
    }

    // columns of A and of V stored as rows for contiguous access
    let mut w = a.transpose();
    let mut vt = DenseMatrix::identity(n);
    let tol = (m as f64) * f64::EPSILON;

    let mut sweeps = 0;
    let mut norms: Vec<f64> = (0..n).map(|j| dot(w.row(j), w.row(j))).collect();
    loop {
        sweeps += 1;
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let alpha = norms[p];
                let beta = norms[q];
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma = dot(w.row(p), w.row(q));
                if gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_rows(&mut w, p, q, c, s);
                rotate_rows(&mut vt, p, q, c, s);
                norms[p] = dot(w.row(p), w.row(p));
                norms[q] = dot(w.row(q), w.row(q));
            }
        }
        if !rotated || sweeps >= MAX_SWEEPS {
            break;
        }
    }

    let sigma_raw: Vec<f64> = (0..n).map(|j| norms[j].sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sigma_raw[i].total_cmp(&sigma_raw[j]).then(i.cmp(&j)));

    let smax = sigma_raw.iter().cloned().fold(0.0, f64::max);
    let zero_tol = smax * (m as f64) * f64::EPSILON;

    let mut u = DenseMatrix::zeros(m, n);
    let mut v = DenseMatrix::zeros(n, n);
    let mut sigma = Vec::with_capacity(n);
    let mut deficient = Vec::new();
    for (dst, &src) in order.iter().enumerate() {
        let s = sigma_raw[src];
        sigma.push(s);
        v.set_column(dst, vt.row(src));
        if s > zero_tol && s > 0.0 {
            let col: Vec<f64> = w.row(src).iter().map(|x| x / s).collect();
            u.set_column(dst, &col);
        } else {
            deficient.push(dst);
        }
    }
    complete_basis(&mut u, &deficient);

    let mut f = SvdFactorization { u, sigma, v, sweeps };
    fix_signs(&mut f);
    Ok(f)
}

fn rotate_rows(m: &mut DenseMatrix, p: usize, q: usize, c: f64, s: f64) {
    let cols = m.cols();
    for k in 0..cols {
        let a = m[(p, k)];
        let b = m[(q, k)];
        m[(p, k)] = c * a - s * b;
        m[(q, k)] = s * a + c * b;
    }
}

/// Fills the listed columns of `u` with unit vectors orthogonal to all other
/// columns (Gram-Schmidt against canonical candidates).
fn complete_basis(u: &mut DenseMatrix, missing: &[usize]) {
    if missing.is_empty() {
        return;
    }
    let m = u.rows();
    let mut accepted: Vec<Vec<f64>> = (0..u.cols())
        .filter(|j| !missing.contains(j))
        .map(|j| u.column(j))
        .collect();
    let mut candidate = 0;
    for &j in missing {
        loop {
            assert!(candidate < m, "cannot complete orthonormal basis");
            let mut x = vec![0.0; m];
            x[candidate] = 1.0;
            candidate += 1;
            for _ in 0..2 {
                for a in &accepted {
                    let proj = dot(a, &x);
                    for (xi, ai) in x.iter_mut().zip(a) {
                        *xi -= proj * ai;
                    }
                }
            }
            let nrm = dot(&x, &x).sqrt();
            if nrm > 1e-8 {
                for xi in &mut x {
                    *xi /= nrm;
                }
                u.set_column(j, &x);
                accepted.push(x);
                break;
            }
        }
    }
}

/// First nonzero entry of each V column made positive, U follows.
fn fix_signs(f: &mut SvdFactorization) {
    for j in 0..f.v.cols() {
        let col = f.v.column(j);
        let lead = col.iter().find(|x| x.abs() > 1e-14).copied().unwrap_or(1.0);
        if lead < 0.0 {
            let neg: Vec<f64> = col.iter().map(|x| -x).collect();
            f.v.set_column(j, &neg);
            let uc: Vec<f64> = f.u.column(j).iter().map(|x| -x).collect();
            f.u.set_column(j, &uc);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::test_util::{jacobi_eigenvalues, orthonormality_defect, random_matrix};
    use proptest::prelude::*;

    #[test]
    fn identity_has_unit_singular_values() {
        let f = svd(&DenseMatrix::identity(3)).unwrap();
        assert_eq!(f.sigma, vec![1.0, 1.0, 1.0]);
        assert!(f.u.max_abs_diff(&DenseMatrix::identity(3)) < 1e-15);
        assert!(f.v.max_abs_diff(&DenseMatrix::identity(3)) < 1e-15);
    }

    #[test]
    fn diagonal_sorted_ascending() {
        let f = svd(&DenseMatrix::from_diag(&[4.0, 3.0])).unwrap();
        assert_eq!(f.sigma, vec![3.0, 4.0]);
        // columns are signed canonical vectors
        assert_eq!(f.v.column(0), vec![0.0, 1.0]);
        assert_eq!(f.v.column(1), vec![1.0, 0.0]);
        assert_eq!(f.u.column(0), vec![0.0, 1.0]);
    }

    #[test]
    fn random_8x8_matches_eigen_oracle() {
        let a = random_matrix(8, 8, 17);
        let f = svd(&a).unwrap();
        let resid = f.reconstruct().sub(&a).frobenius_norm();
        assert!(resid <= 1e-10 * a.frobenius_norm(), "residual {resid}");
        assert!(orthonormality_defect(&f.u) <= 1e-10 * 8.0);
        assert!(orthonormality_defect(&f.v) <= 1e-10 * 8.0);
        let eig = jacobi_eigenvalues(&a.tr_matmul(&a));
        for (s, l) in f.sigma.iter().zip(&eig) {
            assert!((s * s - l).abs() <= 1e-10 * eig[7], "{s} vs {l}");
        }
    }

    #[test]
    fn nonfinite_rejected() {
        let mut a = DenseMatrix::identity(2);
        a[(0, 1)] = f64::INFINITY;
        assert!(matches!(svd(&a), Err(Error::NonFinite)));
    }

    #[test]
    fn rank_deficient_completes_u() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0], vec![0.0, 0.0, 0.0]]);
        let f = svd(&a).unwrap();
        assert!(f.sigma[0].abs() < 1e-14 && f.sigma[1].abs() < 1e-14);
        assert!(orthonormality_defect(&f.u) < 1e-12);
        assert!(f.reconstruct().max_abs_diff(&a) < 1e-12);
    }

    #[test]
    fn rectangular_shapes() {
        let a = random_matrix(5, 3, 4);
        let f = svd(&a).unwrap();
        assert_eq!((f.u.rows(), f.u.cols(), f.v.rows()), (5, 3, 3));
        assert!(f.reconstruct().max_abs_diff(&a) < 1e-12);
        let g = svd(&a.transpose()).unwrap();
        assert_eq!((g.u.rows(), g.v.rows(), g.v.cols()), (3, 5, 3));
        assert!(g.reconstruct().max_abs_diff(&a.transpose()) < 1e-12);
        for (x, y) in f.sigma.iter().zip(&g.sigma) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn graded_matrix_small_singular_values_relative_accuracy() {
        let d = [1e-9, 1e-6, 1e-3, 1.0];
        let q = crate::linalg::factor::qr(&random_matrix(4, 4, 9)).q;
        let a = q.scale_cols(&d);
        let f = svd(&a).unwrap();
        for (s, e) in f.sigma.iter().zip(&d) {
            assert!(((s - e) / e).abs() < 1e-8, "{s} vs {e}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn invariants_hold(n in 1usize..9, seed in 0u64..10_000) {
            let a = random_matrix(n, n, seed);
            let f = svd(&a).unwrap();
            prop_assert!(f.sigma.windows(2).all(|w| w[0] <= w[1]));
            prop_assert!(f.reconstruct().sub(&a).frobenius_norm() <= 1e-10 * a.frobenius_norm().max(1e-300));
            prop_assert!(orthonormality_defect(&f.u) <= 1e-10 * n as f64);
            prop_assert!(orthonormality_defect(&f.v) <= 1e-10 * n as f64);
            let again = svd(&a).unwrap();
            prop_assert_eq!(again.sigma, f.sigma);
        }
    }
}
