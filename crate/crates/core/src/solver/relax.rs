use crate::linalg::SparseMatrix;

/// `nu` sweeps of `x <- x + A^T (b - A x)`. With `|A| = 1` the error is
/// multiplied by `(I - A^T A)^nu`.
pub fn richardson_normal_apply(a: &SparseMatrix, x: &[f64], b: &[f64], nu: usize) -> Vec<f64> {
    let mut out = x.to_vec();
    richardson_normal_in_place(a, &mut out, b, nu);
    out
}

pub(crate) fn richardson_normal_in_place(a: &SparseMatrix, x: &mut [f64], b: &[f64], nu: usize) {
    for _ in 0..nu {
        let ax = a.matvec(x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let step = a.tr_matvec(&r);
        for (xi, s) in x.iter_mut().zip(&step) {
            *xi += s;
        }
    }
}
