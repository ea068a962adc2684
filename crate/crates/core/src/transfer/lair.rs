use crate::linalg::{pseudo_inverse, DenseMatrix, Lu, SparseMatrix};
use crate::transfer::split::CfSplit;
use crate::transfer::strength::strength_graph;

/// F-point neighbourhood of C point `c`: strong F neighbours reachable in at
/// most `degree` steps through F points. Sorted.
pub fn lair_neighbourhood(s: &SparseMatrix, cf: &CfSplit, c: usize, degree: usize) -> Vec<usize> {
    let mut found: Vec<usize> = Vec::new();
    let mut frontier = vec![c];
    for _ in 0..degree {
        let mut next = Vec::new();
        for &p in &frontier {
            for &f in s.row(p).0 {
                if f != c && !cf.is_c(f) && !found.contains(&f) {
                    found.push(f);
                    next.push(f);
                }
            }
        }
        frontier = next;
    }
    found.sort_unstable();
    found
}

/// Local approximate ideal restriction. Returns R as an n x n_c matrix whose
/// column for C point c has a 1 at c and weights `r_cf` on the neighbourhood
/// N_c, chosen so that `(R^T A)_{c, f'} = 0` for every `f'` in N_c.
pub fn lair_restrict(a: &SparseMatrix, s: &SparseMatrix, cf: &CfSplit, degree: usize) -> SparseMatrix {
    let n = a.rows();
    let mut trip = Vec::new();
    for c in 0..n {
        let Some(ic) = cf.coarse_index[c] else { continue };
        trip.push((c, ic, 1.0));
        let nbhd = lair_neighbourhood(s, cf, c, degree);
        if nbhd.is_empty() {
            continue;
        }
        let m = nbhd.len();
        // row f' of the local system is  sum_f r_f a_{f f'} = -a_{c f'}
        let local = DenseMatrix::from_fn(m, m, |row, col| a.get(nbhd[col], nbhd[row]));
        let rhs: Vec<f64> = nbhd.iter().map(|&f| -a.get(c, f)).collect();
        let r = match Lu::new(&local) {
            Ok(lu) => {
                let x = lu.solve(&rhs);
                if x.iter().all(|v| v.is_finite()) {
                    x
                } else {
                    pinv_solve(&local, &rhs)
                }
            }
            Err(_) => pinv_solve(&local, &rhs),
        };
        for (&f, &w) in nbhd.iter().zip(&r) {
            trip.push((f, ic, w));
        }
    }
    SparseMatrix::from_triplets(n, cf.n_coarse(), &trip).expect("finite local weights")
}

fn pinv_solve(m: &DenseMatrix, rhs: &[f64]) -> Vec<f64> {
    pseudo_inverse(m, 1e-12)
        .map(|p| p.matvec(rhs))
        .unwrap_or_else(|_| vec![0.0; rhs.len()])
}

/// Local approximate ideal prolongation: the restriction construction applied
/// to `A^T` with its own strength graph, read as interpolation.
pub fn laip_interp(a: &SparseMatrix, theta_s: f64, cf: &CfSplit, degree: usize) -> SparseMatrix {
    let at = a.transpose();
    let st = strength_graph(&at, theta_s);
    lair_restrict(&at, &st, cf, degree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{diagonal_scale, gen_upwind_advection, ProblemSpec};
    use crate::transfer::split::{cf_split, CfLabel};
    use proptest::prelude::*;

    #[test]
    fn all_coarse_is_identity() {
        let a = diagonal_scale(&gen_upwind_advection(&ProblemSpec::upwind(3)).unwrap()).unwrap();
        let s = strength_graph(&a, 0.25);
        let cf = CfSplit::from_labels(vec![CfLabel::C; 9]);
        assert_eq!(lair_restrict(&a, &s, &cf, 1), SparseMatrix::identity(9));
        assert_eq!(laip_interp(&a, 0.25, &cf, 2), SparseMatrix::identity(9));
    }

    fn two_by_two() -> SparseMatrix {
        SparseMatrix::from_triplets(2, 2, &[(0, 0, 2.0), (0, 1, -0.7), (1, 0, -0.4), (1, 1, 1.5)]).unwrap()
    }

    #[test]
    fn scalar_restriction() {
        let a = two_by_two();
        let s = strength_graph(&a, 0.25);
        let cf = CfSplit::from_labels(vec![CfLabel::C, CfLabel::F]);
        let r = lair_restrict(&a, &s, &cf, 1);
        assert!((r.get(1, 0) - 0.7 / 1.5).abs() < 1e-15);
        let rta = r.transpose().matmul(&a);
        assert!(rta.get(0, 1).abs() < 1e-15);
    }

    #[test]
    fn scalar_prolongation() {
        let a = two_by_two();
        let cf = CfSplit::from_labels(vec![CfLabel::C, CfLabel::F]);
        let p = laip_interp(&a, 0.25, &cf, 1);
        assert!((p.get(1, 0) - 0.4 / 1.5).abs() < 1e-15);
        assert_eq!(p.get(0, 0), 1.0);
        let ap = a.matmul(&p);
        assert!(ap.get(1, 0).abs() < 1e-15);
    }

    #[test]
    fn symmetric_input_gives_equal_transfers() {
        let mut t = Vec::new();
        let n = 7;
        for i in 0..n {
            t.push((i, i, 2.0));
            if i > 0 {
                t.push((i, i - 1, -1.0));
                t.push((i - 1, i, -1.0));
            }
        }
        let a = SparseMatrix::from_triplets(n, n, &t).unwrap();
        let s = strength_graph(&a, 0.25);
        let cf = cf_split(&s);
        for degree in [1, 2] {
            assert_eq!(lair_restrict(&a, &s, &cf, degree), laip_interp(&a, 0.25, &cf, degree));
        }
    }

    fn neighbourhood_residual(n: usize, degree: usize) -> f64 {
        let a = diagonal_scale(&gen_upwind_advection(&ProblemSpec::upwind(n)).unwrap()).unwrap();
        let s = strength_graph(&a, 0.25);
        let cf = cf_split(&s);
        let r = lair_restrict(&a, &s, &cf, degree);
        let rta = r.transpose().matmul(&a);
        let mut worst = 0.0_f64;
        for c in cf.c_points() {
            let ic = cf.coarse_index[c].unwrap();
            for f in lair_neighbourhood(&s, &cf, c, degree) {
                worst = worst.max(rta.get(ic, f).abs());
            }
        }
        worst
    }

    #[test]
    fn upwind_neighbourhood_rows_vanish() {
        assert!(neighbourhood_residual(4, 1) <= 1e-12);
        assert!(neighbourhood_residual(8, 2) <= 1e-10);
    }

    #[test]
    fn identity_block_at_c_points() {
        let a = diagonal_scale(&gen_upwind_advection(&ProblemSpec::upwind(6)).unwrap()).unwrap();
        let s = strength_graph(&a, 0.25);
        let cf = cf_split(&s);
        for m in [lair_restrict(&a, &s, &cf, 2), laip_interp(&a, 0.25, &cf, 2)] {
            for c in cf.c_points() {
                for (j, v) in m.row_iter(c) {
                    assert_eq!(v, if Some(j) == cf.coarse_index[c] { 1.0 } else { 0.0 });
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn residual_on_random_angles(n in 3usize..9, theta in 0.1f64..1.4, degree in 1usize..3) {
            let spec = ProblemSpec { theta, ..ProblemSpec::upwind(n) };
            let a = diagonal_scale(&gen_upwind_advection(&spec).unwrap()).unwrap();
            let s = strength_graph(&a, 0.25);
            let cf = cf_split(&s);
            let r = lair_restrict(&a, &s, &cf, degree);
            let rta = r.transpose().matmul(&a);
            for c in cf.c_points() {
                let ic = cf.coarse_index[c].unwrap();
                for f in lair_neighbourhood(&s, &cf, c, degree) {
                    prop_assert!(rta.get(ic, f).abs() <= 1e-10);
                }
            }
        }
    }
}
