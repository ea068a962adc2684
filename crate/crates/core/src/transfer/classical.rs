use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;
use crate::transfer::split::CfSplit;

/// Classical (direct Ruge-Stuben) interpolation. C rows are identity rows;
/// strong F-F couplings are distributed over the row's strong C points and
/// weak couplings are lumped into the diagonal.
pub fn classical_interp(a: &SparseMatrix, s: &SparseMatrix, cf: &CfSplit) -> Result<SparseMatrix> {
    let n = a.rows();
    let n_c = cf.n_coarse();
    let mut trip = Vec::new();
    for i in 0..n {
        if let Some(ic) = cf.coarse_index[i] {
            trip.push((i, ic, 1.0));
            continue;
        }
        let strong: Vec<usize> = s.row(i).0.to_vec();
        let is_strong = |j: usize| strong.binary_search(&j).is_ok();
        let c_i: Vec<usize> = strong.iter().copied().filter(|&j| cf.is_c(j)).collect();
        if c_i.is_empty() {
            return Err(Error::SingularRow(i));
        }

        let mut denom = a.get(i, i);
        let mut numer: Vec<f64> = c_i.iter().map(|&j| a.get(i, j)).collect();
        for (k, a_ik) in a.row_iter(i) {
            if k == i {
                continue;
            }
            if !is_strong(k) {
                denom += a_ik;
                continue;
            }
            if cf.is_c(k) {
                continue;
            }
            // strong F neighbour: distribute through the C points of row i
            let a_kc: Vec<f64> = c_i.iter().map(|&m| a.get(k, m)).collect();
            let total: f64 = a_kc.iter().sum();
            if total == 0.0 {
                denom += a_ik;
            } else {
                for (w, akj) in numer.iter_mut().zip(&a_kc) {
                    *w += a_ik * akj / total;
                }
            }
        }
        if denom.abs() < 1e-14 {
            return Err(Error::SingularRow(i));
        }
        for (&j, w) in c_i.iter().zip(&numer) {
            let weight = -w / denom;
            trip.push((i, cf.coarse_index[j].expect("C point"), weight));
        }
    }
    SparseMatrix::from_triplets(n, n_c, &trip)
}
