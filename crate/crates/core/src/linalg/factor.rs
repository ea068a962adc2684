use crate::error::{Error, Result};
use crate::linalg::dense::{dot, DenseMatrix};

/// LU factorization with partial pivoting, `PA = LU` stored compactly.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: DenseMatrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn new(a: &DenseMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "LU of a {}x{} matrix",
                a.rows(),
                a.cols()
            )));
        }
        if !a.is_finite() {
            return Err(Error::NonFinite);
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.max_abs();
        for k in 0..n {
            let mut piv = k;
            let mut best = lu[(k, k)].abs();
            for i in k + 1..n {
                if lu[(i, k)].abs() > best {
                    best = lu[(i, k)].abs();
                    piv = i;
                }
            }
            if best <= scale * 1e-300 || best == 0.0 {
                return Err(Error::SingularInput { ratio: 0.0 });
            }
            if piv != k {
                perm.swap(k, piv);
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(piv, j)];
                    lu[(piv, j)] = t;
                }
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                if factor != 0.0 {
                    for j in k + 1..n {
                        let ukj = lu[(k, j)];
                        lu[(i, j)] -= factor * ukj;
                    }
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn n(&self) -> usize {
        self.perm.len()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n();
        assert_eq!(b.len(), n);
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s = dot(&self.lu.row(i)[..i], &x[..i]);
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s = dot(&self.lu.row(i)[i + 1..], &x[i + 1..]);
            x[i] = (x[i] - s) / self.lu[(i, i)];
        }
        x
    }

    /// Solves `A^T x = b`.
    pub fn solve_transpose(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n();
        assert_eq!(b.len(), n);
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.lu[(k, i)] * y[k];
            }
            y[i] = s / self.lu[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= self.lu[(k, i)] * y[k];
            }
            y[i] = s;
        }
        let mut x = vec![0.0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = y[i];
        }
        x
    }

    /// Solves `A X = B` column by column.
    pub fn solve_matrix(&self, b: &DenseMatrix) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(b.rows(), b.cols());
        for j in 0..b.cols() {
            out.set_column(j, &self.solve(&b.column(j)));
        }
        out
    }

    pub fn inverse(&self) -> DenseMatrix {
        self.solve_matrix(&DenseMatrix::identity(self.n()))
    }
}

/// Householder QR of an m x n matrix with m >= n.
#[derive(Clone, Debug)]
pub struct Qr {
    /// m x n with orthonormal columns.
    pub q: DenseMatrix,
    /// n x n upper triangular.
    pub r: DenseMatrix,
}

struct Reflectors {
    vs: Vec<Vec<f64>>,
    r: DenseMatrix,
}

fn householder(a: &DenseMatrix) -> Reflectors {
    let m = a.rows();
    let n = a.cols();
    let mut r = a.clone();
    let mut vs = Vec::with_capacity(n.min(m));
    for k in 0..n.min(m) {
        let mut v: Vec<f64> = (k..m).map(|i| r[(i, k)]).collect();
        let alpha = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if alpha == 0.0 {
            vs.push(vec![0.0; m - k]);
            continue;
        }
        let sign = if v[0] >= 0.0 { 1.0 } else { -1.0 };
        v[0] += sign * alpha;
        let vn = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in &mut v {
            *x /= vn;
        }
        for j in k..n {
            let mut s = 0.0;
            for (t, vi) in v.iter().enumerate() {
                s += vi * r[(k + t, j)];
            }
            for (t, vi) in v.iter().enumerate() {
                r[(k + t, j)] -= 2.0 * s * vi;
            }
        }
        vs.push(v);
    }
    Reflectors { vs, r }
}

/// Applies `H_0 H_1 ... H_{p-1}` to the columns of `x`.
fn apply_q(vs: &[Vec<f64>], x: &mut DenseMatrix) {
    let m = x.rows();
    for (k, v) in vs.iter().enumerate().rev() {
        for j in 0..x.cols() {
            let mut s = 0.0;
            for (t, vi) in v.iter().enumerate() {
                s += vi * x[(k + t, j)];
            }
            if s != 0.0 {
                for (t, vi) in v.iter().enumerate() {
                    x[(k + t, j)] -= 2.0 * s * vi;
                }
            }
        }
        debug_assert!(k + v.len() == m);
    }
}

/// Thin QR. Requires rows >= cols.
pub fn qr(a: &DenseMatrix) -> Qr {
    assert!(a.rows() >= a.cols(), "thin QR needs rows >= cols");
    let m = a.rows();
    let n = a.cols();
    let h = householder(a);
    let mut q = DenseMatrix::zeros(m, n);
    for i in 0..n {
        q[(i, i)] = 1.0;
    }
    apply_q(&h.vs, &mut q);
    let r = h.r.block(0, n, 0, n);
    Qr { q, r }
}

/// Full m x m orthogonal factor of the QR factorization of `a`.
pub fn full_q(a: &DenseMatrix) -> DenseMatrix {
    let m = a.rows();
    let h = householder(a);
    let mut q = DenseMatrix::identity(m);
    apply_q(&h.vs, &mut q);
    q
}

/// Orthonormal basis for the range of a full-column-rank matrix.
pub fn orthonormal_basis(a: &DenseMatrix) -> Result<DenseMatrix> {
    let f = qr(a);
    let diag = f.r.diagonal();
    let rmax = diag.iter().fold(0.0_f64, |m, d| m.max(d.abs()));
    let rmin = diag.iter().fold(f64::INFINITY, |m, d| m.min(d.abs()));
    if a.cols() > 0 && (rmax == 0.0 || rmin <= 1e-13 * rmax) {
        return Err(Error::RankDeficient { sigma_min: rmin });
    }
    Ok(f.q)
}

/// Orthonormal basis of the orthogonal complement of range(a), for a with
/// full column rank: the trailing m - n columns of the full QR factor.
pub fn orthogonal_complement(a: &DenseMatrix) -> DenseMatrix {
    let m = a.rows();
    let n = a.cols();
    assert!(n <= m);
    full_q(a).column_block(n, m)
}
