use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{aq_power, operator_norm_weighted, qa_power, spectral_norm, DenseMatrix, Lu, SvdFactorization};
use crate::transfer::coarse_operator;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Metric {
    #[serde(rename = "l2")]
    L2,
    #[serde(rename = "QA")]
    Qa,
    #[serde(rename = "AQ")]
    Aq,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::L2 => "l2",
            Metric::Qa => "QA",
            Metric::Aq => "AQ",
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l2" => Ok(Metric::L2),
            "QA" | "qa" => Ok(Metric::Qa),
            "AQ" | "aq" => Ok(Metric::Aq),
            other => Err(Error::InvalidArgument(format!("unknown metric '{other}' (l2|QA|AQ)"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProjectionReport {
    pub metric: Metric,
    /// `(sigma_i, |Pi v_i| / |v_i|)` in the metric, per right singular vector.
    pub amplifications: Vec<(f64, f64)>,
    pub norm: f64,
    /// The same norm through the singular-vector coordinates (QA and AQ only).
    pub norm_sigma_route: Option<f64>,
}

fn check_dims(p: &DenseMatrix, r: &DenseMatrix, n: usize) -> Result<()> {
    if p.rows() != n || r.rows() != n || p.cols() != r.cols() {
        return Err(Error::DimensionMismatch(format!(
            "P {}x{}, R {}x{}, A {n}x{n}",
            p.rows(),
            p.cols(),
            r.rows(),
            r.cols()
        )));
    }
    Ok(())
}

/// `Pi = P (R^T A P)^{-1} R^T A`.
pub fn projection_matrix(p: &DenseMatrix, r: &DenseMatrix, a: &DenseMatrix) -> Result<DenseMatrix> {
    check_dims(p, r, a.rows())?;
    let ac = coarse_operator(r, a, p)?;
    let rta = r.tr_matmul(a);
    Ok(p.matmul(&Lu::new(&ac)?.solve_matrix(&rta)))
}

/// `|Σ^{1/2} 𝒫 (ℛ^T Σ 𝒫)^{-1} ℛ^T Σ^{1/2}|` with `𝒫 = V^T P`, `ℛ = U^T R`.
pub fn qa_norm_sigma_route(p: &DenseMatrix, r: &DenseMatrix, f: &SvdFactorization) -> Result<f64> {
    check_dims(p, r, f.n())?;
    let half: Vec<f64> = f.sigma.iter().map(|s| s.sqrt()).collect();
    let pv = f.v.tr_matmul(p);
    let ru = f.u.tr_matmul(r);
    let mid = ru.tr_matmul(&pv.scale_rows(&f.sigma));
    crate::transfer::check_nonsingular(0, &mid)?;
    let right = ru.transpose().scale_cols(&half);
    let inner = Lu::new(&mid)?.solve_matrix(&right);
    Ok(spectral_norm(&pv.scale_rows(&half).matmul(&inner)))
}

pub fn measure_projection(p: &DenseMatrix, r: &DenseMatrix, f: &SvdFactorization, metric: Metric) -> Result<ProjectionReport> {
    let a = f.reconstruct();
    let pi = projection_matrix(p, r, &a)?;
    let n = f.n();
    let sigma = &f.sigma;
    let (amplifications, norm, norm_sigma_route) = match metric {
        Metric::L2 => {
            let piv = pi.matmul(&f.v);
            let amps = (0..n)
                .map(|i| (sigma[i], crate::linalg::norm2(&piv.column(i))))
                .collect();
            (amps, spectral_norm(&pi), None)
        }
        Metric::Qa => {
            // V^T Pi V, measured with Σ
            let t = f.v.tr_matmul(&pi.matmul(&f.v));
            let half: Vec<f64> = sigma.iter().map(|s| s.sqrt()).collect();
            let ts = t.scale_rows(&half);
            let amps = (0..n)
                .map(|i| (sigma[i], crate::linalg::norm2(&ts.column(i)) / half[i]))
                .collect();
            let direct = operator_norm_weighted(&pi, &qa_power(f, 1.0))?;
            (amps, direct, Some(qa_norm_sigma_route(p, r, f)?))
        }
        Metric::Aq => {
            let w = aq_power(f, 1.0);
            let piv = pi.matmul(&f.v);
            let amps = (0..n)
                .map(|i| {
                    let v = f.v.column(i);
                    let num = crate::linalg::weighted_norm(&piv.column(i), &w)?;
                    let den = crate::linalg::weighted_norm(&v, &w)?;
                    Ok((sigma[i], num / den))
                })
                .collect::<Result<Vec<_>>>()?;
            let direct = operator_norm_weighted(&pi, &w)?;
            let t = f.u.tr_matmul(&pi.matmul(&f.u));
            let half: Vec<f64> = sigma.iter().map(|s| s.sqrt()).collect();
            let inv: Vec<f64> = half.iter().map(|h| 1.0 / h).collect();
            (amps, direct, Some(spectral_norm(&t.scale_rows(&half).scale_cols(&inv))))
        }
    };
    Ok(ProjectionReport {
        metric,
        amplifications,
        norm,
        norm_sigma_route,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::test_util::random_matrix;
    use crate::linalg::{polar_q, svd};
    use crate::problem::{prepare_system, ProblemSpec};
    use crate::transfer::{build_pair, counterexample_pair, q_pair_restrict, TransferConfig};
    use proptest::prelude::*;

    fn upwind(n: usize) -> (crate::linalg::SparseMatrix, SvdFactorization) {
        let sys = prepare_system(&ProblemSpec::upwind(n).matrix().unwrap(), true).unwrap();
        let f = svd(&sys.a.to_dense()).unwrap();
        (sys.a, f)
    }

    #[test]
    fn q_pair_is_qa_orthogonal() {
        let (a, f) = upwind(6);
        let pair = build_pair(&a, &TransferConfig::default(), None).unwrap();
        let p = pair.p.to_dense();
        let r = q_pair_restrict(&p, &polar_q(&f).unwrap()).unwrap();
        let rep = measure_projection(&p, &r, &f, Metric::Qa).unwrap();
        assert!((rep.norm - 1.0).abs() < 1e-8, "{}", rep.norm);
        assert!((rep.norm_sigma_route.unwrap() - 1.0).abs() < 1e-8);
        assert!(rep.amplifications.iter().all(|&(_, x)| x <= 1.0 + 1e-8));
    }

    #[test]
    fn square_transfers_give_identity() {
        let (_, f) = upwind(4);
        let p = random_matrix(16, 16, 1);
        let r = random_matrix(16, 16, 2);
        for m in [Metric::L2, Metric::Qa, Metric::Aq] {
            let rep = measure_projection(&p, &r, &f, m).unwrap();
            assert!((rep.norm - 1.0).abs() < 1e-8);
            assert!(rep.amplifications.iter().all(|&(_, x)| (x - 1.0).abs() < 1e-8));
        }
    }

    #[test]
    fn counterexample_is_singular() {
        let (_, f) = upwind(4);
        let (r, p) = counterexample_pair(&f, 8, 3).unwrap();
        assert!(matches!(
            measure_projection(&p, &r, &f, Metric::Qa),
            Err(Error::SingularCoarseOperator { .. })
        ));
    }

    #[test]
    fn projection_is_idempotent() {
        let (a, f) = upwind(5);
        let pair = build_pair(&a, &TransferConfig::default(), None).unwrap();
        let pi = projection_matrix(&pair.p.to_dense(), &pair.r.to_dense(), &f.reconstruct()).unwrap();
        assert!(pi.matmul(&pi).max_abs_diff(&pi) < 1e-10);
    }

    #[test]
    fn routes_agree_on_builders() {
        let (a, f) = upwind(6);
        for cfg in ["lair+classical", "classical_t+classical", "lair+laip", "svd+svd"] {
            let (rs, ip) = cfg.split_once('+').unwrap();
            let cfg = TransferConfig::new(ip.parse().unwrap(), rs.parse().unwrap());
            let pair = build_pair(&a, &cfg, Some(&f)).unwrap();
            let (p, r) = (pair.p.to_dense(), pair.r.to_dense());
            for m in [Metric::Qa, Metric::Aq] {
                let rep = measure_projection(&p, &r, &f, m).unwrap();
                let alt = rep.norm_sigma_route.unwrap();
                assert!((rep.norm - alt).abs() <= 1e-8 * rep.norm, "{m:?}: {} vs {alt}", rep.norm);
                let top = rep.amplifications.iter().fold(0.0_f64, |x, y| x.max(y.1));
                assert!(top <= rep.norm * (1.0 + 1e-10));
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn change_of_basis_invariance(seed in 0u64..1000, n_c in 2usize..8) {
            let (_, f) = upwind(4);
            let p = random_matrix(16, n_c, seed);
            let r = random_matrix(16, n_c, seed + 1);
            let bp = random_matrix(n_c, n_c, seed + 2).add(&DenseMatrix::identity(n_c).scaled(2.0));
            let br = random_matrix(n_c, n_c, seed + 3).add(&DenseMatrix::identity(n_c).scaled(2.0));
            for m in [Metric::L2, Metric::Qa, Metric::Aq] {
                let x = measure_projection(&p, &r, &f, m);
                let y = measure_projection(&p.matmul(&bp), &r.matmul(&br), &f, m);
                let (Ok(x), Ok(y)) = (x, y) else { continue };
                let scale = x.norm.max(1.0);
                prop_assert!((x.norm - y.norm).abs() <= 1e-8 * scale);
                for (u, v) in x.amplifications.iter().zip(&y.amplifications) {
                    prop_assert!((u.1 - v.1).abs() <= 1e-8 * scale);
                }
            }
        }
    }
}
