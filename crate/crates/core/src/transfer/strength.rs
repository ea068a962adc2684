use crate::linalg::SparseMatrix;

pub const DEFAULT_THETA_S: f64 = 0.25;

/// Classical strength of connection: edge i -> j when
/// `-a_ij >= theta_s * max_{k != i} (-a_ik)`. Positive couplings are weak.
/// Edges are stored with value 1.
pub fn strength_graph(a: &SparseMatrix, theta_s: f64) -> SparseMatrix {
    let mut trip = Vec::new();
    for i in 0..a.rows() {
        let max_neg = a
            .row_iter(i)
            .filter(|&(j, _)| j != i)
            .map(|(_, v)| -v)
            .fold(0.0_f64, f64::max);
        if max_neg <= 0.0 {
            continue;
        }
        for (j, v) in a.row_iter(i) {
            if j != i && -v > 0.0 && -v >= theta_s * max_neg {
                trip.push((i, j, 1.0));
            }
        }
    }
    SparseMatrix::from_triplets(a.rows(), a.cols(), &trip).expect("indices come from a valid matrix")
}
