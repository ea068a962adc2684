use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    orthogonal_complement, qr, spd_fractional_power, svd, symmetric_eigenvalues, DenseMatrix, Lu,
    SvdFactorization,
};
use crate::theory::check_normalized;

/// Approximation powers and FAP(.,0) constants of R and P.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BasisParams {
    pub beta: f64,
    pub gamma: f64,
    /// FAP(beta, 0) constant of P with respect to QA.
    pub k_p: f64,
    /// FAP(gamma, 0) constant of R with respect to AQ.
    pub k_r: f64,
}

/// Scalars derived from `sigma_k` and the FAP constants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Deltas {
    pub sigma_k: f64,
    pub delta_p: f64,
    pub delta_r: f64,
    pub khat_p: f64,
    pub khat_r: f64,
    /// `delta_PR^2 = sigma_k^{beta+gamma-1} (Khat_P Khat_R)^{1/2}`
    pub delta_pr_sq: f64,
}

fn khat(k: f64, delta: f64) -> f64 {
    if delta < 1.0 {
        k / (1.0 - delta * delta)
    } else {
        f64::INFINITY
    }
}

impl Deltas {
    pub fn new(sigma_k: f64, params: &BasisParams) -> Self {
        let delta_p = sigma_k.powf(params.beta) * params.k_p.sqrt();
        let delta_r = sigma_k.powf(params.gamma) * params.k_r.sqrt();
        let khat_p = khat(params.k_p, delta_p);
        let khat_r = khat(params.k_r, delta_r);
        let delta_pr_sq = if khat_p * khat_r == 0.0 {
            0.0
        } else {
            sigma_k.powf(params.beta + params.gamma - 1.0) * (khat_p * khat_r).sqrt()
        };
        Self {
            sigma_k,
            delta_p,
            delta_r,
            khat_p,
            khat_r,
            delta_pr_sq,
        }
    }

    /// `s_1` must exceed this when `k < n_c`.
    pub fn s1_threshold(&self) -> f64 {
        if self.delta_pr_sq < 1.0 {
            self.delta_pr_sq / (1.0 - self.delta_pr_sq)
        } else {
            f64::INFINITY
        }
    }
}

/// Hypothesis flags for the stability theorem (all reported, even when false).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Hypotheses {
    pub delta_p: bool,
    pub delta_r: bool,
    pub delta_pr: bool,
    /// True when satisfied or waived.
    pub s1: bool,
    pub s1_waived: bool,
}

impl Hypotheses {
    pub fn all(&self) -> bool {
        self.delta_p && self.delta_r && self.delta_pr && self.s1
    }

    fn first_three(d: &Deltas) -> (bool, bool, bool) {
        let lim = std::f64::consts::FRAC_1_SQRT_2;
        (d.delta_p < lim, d.delta_r < lim, d.delta_pr_sq < 0.5)
    }
}

/// Structured bases for P and R in singular-vector coordinates.
#[derive(Clone, Debug)]
pub struct BasisDecomposition {
    pub k: usize,
    pub n_c: usize,
    pub params: BasisParams,
    pub deltas: Deltas,
    /// `sigma_{k+1}`, absent when `k = n`.
    pub sigma_k1: Option<f64>,
    pub w2: DenseMatrix,
    pub z2: DenseMatrix,
    pub n2: DenseMatrix,
    pub m2: DenseMatrix,
    /// Ascending.
    pub s2: Vec<f64>,
    pub b_p: DenseMatrix,
    pub b_r: DenseMatrix,
    /// `V^T P B_P`
    pub p_tilde: DenseMatrix,
    /// `U^T R B_R`
    pub r_tilde: DenseMatrix,
}

/// Residuals of the structural conclusions of the decomposition.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BasisChecks {
    pub w2_orthonormality: f64,
    pub z2_orthonormality: f64,
    pub w2_n2: f64,
    pub z2_m2: f64,
    pub n2_norm: f64,
    pub m2_norm: f64,
    pub s2_diagonality: f64,
}

impl BasisDecomposition {
    pub fn s1(&self) -> Option<f64> {
        self.s2.first().copied()
    }

    pub fn hypotheses(&self) -> Hypotheses {
        let (p, r, pr) = Hypotheses::first_three(&self.deltas);
        let waived = self.k == self.n_c;
        let s1 = waived || self.s1().is_some_and(|s| s > self.deltas.s1_threshold());
        Hypotheses {
            delta_p: p,
            delta_r: r,
            delta_pr: pr,
            s1,
            s1_waived: waived,
        }
    }

    pub fn checks(&self, f: &SvdFactorization) -> BasisChecks {
        let sigma2 = &f.sigma[self.k..];
        let eye = DenseMatrix::identity(self.n_c - self.k);
        let w2s = self.w2.scale_rows(sigma2);
        let z2s = self.z2.scale_rows(sigma2);
        let c = self.z2.tr_matmul(&w2s);
        BasisChecks {
            w2_orthonormality: self.w2.tr_matmul(&w2s).sub(&eye).max_abs(),
            z2_orthonormality: self.z2.tr_matmul(&z2s).sub(&eye).max_abs(),
            w2_n2: self.w2.tr_matmul(&self.n2).max_abs(),
            z2_m2: self.z2.tr_matmul(&self.m2).max_abs(),
            n2_norm: crate::linalg::spectral_norm(&self.n2),
            m2_norm: crate::linalg::spectral_norm(&self.m2),
            s2_diagonality: c.sub(&DenseMatrix::from_diag(&self.s2)).max_abs(),
        }
    }
}

/// One side's orthonormal coordinates, computed once per transfer.
struct SideFrame {
    /// Orthonormal basis of `X` (V^T P or U^T R).
    q: DenseMatrix,
    x: DenseMatrix,
}

impl SideFrame {
    fn new(x: DenseMatrix) -> Result<Self> {
        let q = crate::linalg::orthonormal_basis(&x)?;
        Ok(Self { q, x })
    }
}

struct SideBasis {
    /// Unrotated, `W^T Σ_2 W = I`.
    w2: DenseMatrix,
    n2: DenseMatrix,
}

fn side_basis(frame: &SideFrame, sigma: &[f64], k: usize, power: f64) -> Result<SideBasis> {
    let n = frame.q.rows();
    let n_c = frame.q.cols();
    let q1 = frame.q.row_block(0, k);
    let q2 = frame.q.row_block(k, n);
    let smin = svd(&q1)?.sigma_min();
    if !(smin >= 1e-12) {
        return Err(Error::DegenerateBlock { k });
    }
    // I - N11 = Q1 Q1^T,  N21 = -Q2 Q1^T
    let m = q1.matmul(&q1.transpose());
    let lu = Lu::new(&m).map_err(|_| Error::DegenerateBlock { k })?;
    let n21t = q1.matmul(&q2.transpose()).scaled(-1.0);
    let s1_neg: Vec<f64> = sigma[..k].iter().map(|s| s.powf(-power)).collect();
    let n2 = lu.solve_matrix(&n21t).transpose().scale_cols(&s1_neg);

    let w2 = if k < n_c {
        let y = orthogonal_complement(&q1.transpose());
        let w = q2.matmul(&y);
        let g = w.tr_matmul(&w.scale_rows(&sigma[k..]));
        w.matmul(&spd_fractional_power(&g, -0.5)?)
    } else {
        DenseMatrix::zeros(n - k, 0)
    };
    Ok(SideBasis { w2, n2 })
}

fn tilde(k: usize, n: usize, sigma: &[f64], power: f64, n2: &DenseMatrix, w2: &DenseMatrix) -> DenseMatrix {
    let n_c = k + w2.cols();
    let mut t = DenseMatrix::zeros(n, n_c);
    for i in 0..k {
        t[(i, i)] = 1.0;
    }
    let s1: Vec<f64> = sigma[..k].iter().map(|s| s.powf(power)).collect();
    t.set_block(k, 0, &n2.scale_cols(&s1).scaled(-1.0));
    t.set_block(k, k, w2);
    t
}

/// Solves `X B = T` for `T` in range(X).
fn change_of_basis(x: &DenseMatrix, t: &DenseMatrix) -> Result<DenseMatrix> {
    let f = qr(x);
    Ok(Lu::new(&f.r)?.solve_matrix(&f.q.tr_matmul(t)))
}

fn check_inputs(p: &DenseMatrix, r: &DenseMatrix, f: &SvdFactorization) -> Result<()> {
    check_normalized(f)?;
    let n = f.n();
    if p.rows() != n || r.rows() != n || p.cols() != r.cols() {
        return Err(Error::DimensionMismatch(format!(
            "P {}x{}, R {}x{}, A {n}x{n}",
            p.rows(),
            p.cols(),
            r.rows(),
            r.cols()
        )));
    }
    if p.cols() == 0 || p.cols() > n {
        return Err(Error::InvalidArgument(format!("n_c = {} outside 1..={n}", p.cols())));
    }
    Ok(())
}

struct Frames {
    p: SideFrame,
    r: SideFrame,
}

impl Frames {
    fn new(p: &DenseMatrix, r: &DenseMatrix, f: &SvdFactorization) -> Result<Self> {
        Ok(Self {
            p: SideFrame::new(f.v.tr_matmul(p))?,
            r: SideFrame::new(f.u.tr_matmul(r))?,
        })
    }
}

fn assemble(frames: &Frames, f: &SvdFactorization, k: usize, params: &BasisParams) -> Result<BasisDecomposition> {
    let n = f.n();
    let n_c = frames.p.q.cols();
    let sigma = &f.sigma;
    let ps = side_basis(&frames.p, sigma, k, params.beta)?;
    let rs = side_basis(&frames.r, sigma, k, params.gamma)?;
    let (w2, z2, s2) = if k < n_c {
        let c = rs.w2.tr_matmul(&ps.w2.scale_rows(&sigma[k..]));
        let cf = svd(&c)?;
        (ps.w2.matmul(&cf.v), rs.w2.matmul(&cf.u), cf.sigma)
    } else {
        (ps.w2, rs.w2, Vec::new())
    };
    let p_tilde = tilde(k, n, sigma, params.beta, &ps.n2, &w2);
    let r_tilde = tilde(k, n, sigma, params.gamma, &rs.n2, &z2);
    let b_p = change_of_basis(&frames.p.x, &p_tilde)?;
    let b_r = change_of_basis(&frames.r.x, &r_tilde)?;
    Ok(BasisDecomposition {
        k,
        n_c,
        params: *params,
        deltas: Deltas::new(sigma[k - 1], params),
        sigma_k1: sigma.get(k).copied(),
        w2,
        z2,
        n2: ps.n2,
        m2: rs.n2,
        s2,
        b_p,
        b_r,
        p_tilde,
        r_tilde,
    })
}

/// Builds the structured bases of R and P for a given `k` (1-based, `k <= n_c`).
pub fn build_pr_bases(
    p: &DenseMatrix,
    r: &DenseMatrix,
    f: &SvdFactorization,
    k: usize,
    params: &BasisParams,
) -> Result<BasisDecomposition> {
    check_inputs(p, r, f)?;
    if k == 0 || k > p.cols() {
        return Err(Error::InvalidArgument(format!("k = {k} outside 1..={}", p.cols())));
    }
    assemble(&Frames::new(p, r, f)?, f, k, params)
}

/// Smallest singular value of `Z_2^T Σ_2 W_2` through the eigenvalues of its Gram matrix.
fn s1_estimate(frames: &Frames, f: &SvdFactorization, k: usize, params: &BasisParams) -> Result<f64> {
    let ps = side_basis(&frames.p, &f.sigma, k, params.beta)?;
    let rs = side_basis(&frames.r, &f.sigma, k, params.gamma)?;
    let c = rs.w2.tr_matmul(&ps.w2.scale_rows(&f.sigma[k..]));
    let vals = symmetric_eigenvalues(&c.tr_matmul(&c))?;
    Ok(vals.first().copied().unwrap_or(0.0).max(0.0).sqrt())
}

/// Largest `k` whose decomposition satisfies the stability hypotheses, or
/// `None` when no `k` qualifies.
pub fn select_k(
    p: &DenseMatrix,
    r: &DenseMatrix,
    f: &SvdFactorization,
    params: &BasisParams,
) -> Result<Option<BasisDecomposition>> {
    check_inputs(p, r, f)?;
    let frames = Frames::new(p, r, f)?;
    let n_c = p.cols();
    for k in (1..=n_c).rev() {
        let d = Deltas::new(f.sigma[k - 1], params);
        let (a, b, c) = Hypotheses::first_three(&d);
        if !(a && b && c) {
            continue;
        }
        if k < n_c {
            let thr = d.s1_threshold();
            let est = match s1_estimate(&frames, f, k, params) {
                Ok(s) => s,
                Err(Error::DegenerateBlock { .. }) => continue,
                Err(e) => return Err(e),
            };
            // the Gram route loses accuracy near zero; only clear failures are skipped
            if est < thr - 1e-6 {
                continue;
            }
        }
        match assemble(&frames, f, k, params) {
            Ok(dec) if dec.hypotheses().all() => return Ok(Some(dec)),
            Ok(_) | Err(Error::DegenerateBlock { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::test_util::random_matrix;
    use crate::linalg::polar_q;
    use crate::problem::{prepare_system, ProblemSpec};
    use crate::theory::fap_constant;
    use crate::transfer::{
        build_pair, counterexample_pair, q_pair_restrict, svd_transfer, InterpKind, RestrictKind, Side,
        TransferConfig,
    };
    use proptest::prelude::*;

    fn normalized(a: DenseMatrix) -> (DenseMatrix, SvdFactorization) {
        let s = svd(&a).unwrap().sigma_max();
        let a = a.scaled(1.0 / s);
        let f = svd(&a).unwrap();
        (a, f)
    }

    fn params_for(p: &DenseMatrix, r: &DenseMatrix, f: &SvdFactorization, beta: f64, gamma: f64) -> BasisParams {
        BasisParams {
            beta,
            gamma,
            k_p: fap_constant(p, f, beta, 0.0).unwrap().uniform_k,
            k_r: fap_constant(r, &f.transposed(), gamma, 0.0).unwrap().uniform_k,
        }
    }

    fn assert_conclusions(dec: &BasisDecomposition, f: &SvdFactorization) {
        let c = dec.checks(f);
        assert!(c.w2_orthonormality <= 1e-8, "{c:?}");
        assert!(c.z2_orthonormality <= 1e-8, "{c:?}");
        assert!(c.w2_n2 <= 1e-8, "{c:?}");
        assert!(c.z2_m2 <= 1e-8, "{c:?}");
        assert!(c.s2_diagonality <= 1e-8, "{c:?}");
        if dec.deltas.delta_p < 1.0 {
            assert!(c.n2_norm <= dec.deltas.khat_p.sqrt() + 1e-8, "{c:?} {:?}", dec.deltas);
        }
        if dec.deltas.delta_r < 1.0 {
            assert!(c.m2_norm <= dec.deltas.khat_r.sqrt() + 1e-8, "{c:?} {:?}", dec.deltas);
        }
        for w in dec.s2.windows(2) {
            assert!(w[0] <= w[1]);
        }
        assert!(dec.s2.iter().all(|&s| (0.0..=1.0 + 1e-10).contains(&s)));
    }

    /// `P B_P` reproduces the tilde form in V coordinates.
    fn assert_change_of_basis(dec: &BasisDecomposition, p: &DenseMatrix, r: &DenseMatrix, f: &SvdFactorization) {
        let pt = f.v.tr_matmul(&p.matmul(&dec.b_p));
        assert!(pt.max_abs_diff(&dec.p_tilde) <= 1e-9);
        let rt = f.u.tr_matmul(&r.matmul(&dec.b_r));
        assert!(rt.max_abs_diff(&dec.r_tilde) <= 1e-9);
    }

    fn diag6() -> (DenseMatrix, SvdFactorization) {
        normalized(DenseMatrix::from_diag(&[0.1, 0.2, 0.35, 0.5, 0.8, 1.0]))
    }

    #[test]
    fn hand_built_diagonal() {
        let (_, f) = diag6();
        // P mixes e1 with a little of e4, and spans e2 + e5, e3
        let p = DenseMatrix::from_columns(
            6,
            &[
                vec![1.0, 0.0, 0.0, 0.1, 0.0, 0.0],
                vec![0.0, 1.0, 0.0, 0.0, 0.2, 0.0],
                vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.3],
            ],
        );
        let r = DenseMatrix::from_columns(
            6,
            &[
                vec![1.0, 0.0, 0.0, 0.0, 0.1, 0.0],
                vec![0.0, 1.0, 0.0, 0.05, 0.0, 0.0],
                vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
            ],
        );
        let params = params_for(&p, &r, &f, 1.0, 1.0);
        for k in 1..=3 {
            let dec = build_pr_bases(&p, &r, &f, k, &params).unwrap();
            assert_conclusions(&dec, &f);
            assert_change_of_basis(&dec, &p, &r, &f);
        }
        // k = 1 by hand: the first P column is e1 + 0.1 e4, so N21 (I - N11)^{-1} = -0.1 e4
        let dec = build_pr_bases(&p, &r, &f, 1, &params).unwrap();
        let sigma1 = f.sigma[0];
        assert!((dec.n2[(2, 0)] - (-0.1) / sigma1).abs() < 1e-12);
        assert!(dec.n2[(0, 0)].abs() < 1e-14 && dec.n2[(4, 0)].abs() < 1e-14);
    }

    #[test]
    fn full_k_has_empty_blocks() {
        let (_, f) = diag6();
        let p = svd_transfer(&f, 3, Side::Right).unwrap();
        let r = svd_transfer(&f, 3, Side::Left).unwrap();
        let params = params_for(&p, &r, &f, 1.0, 1.0);
        let dec = build_pr_bases(&p, &r, &f, 3, &params).unwrap();
        assert_eq!(dec.w2.cols(), 0);
        assert!(dec.s2.is_empty());
        assert!(dec.hypotheses().s1_waived);
        assert!(dec.n2.max_abs() < 1e-14);
    }

    #[test]
    fn exact_pair_is_selected_with_unit_s() {
        let (_, f) = normalized(random_matrix(10, 10, 11));
        let p = svd_transfer(&f, 5, Side::Right).unwrap();
        let r = svd_transfer(&f, 5, Side::Left).unwrap();
        // with zero constants every delta vanishes and k = n_c
        let zero = BasisParams { beta: 1.0, gamma: 1.0, k_p: 0.0, k_r: 0.0 };
        let dec = select_k(&p, &r, &f, &zero).unwrap().unwrap();
        assert_eq!(dec.k, 5);
        // with the true constants the coupled blocks stay orthogonal: s = 1
        let params = params_for(&p, &r, &f, 1.0, 1.0);
        for k in 1..5 {
            let dec = build_pr_bases(&p, &r, &f, k, &params).unwrap();
            assert!(dec.s2.iter().all(|s| (s - 1.0).abs() < 1e-10), "{:?}", dec.s2);
        }
    }

    #[test]
    fn q_pair_gives_unit_cosines() {
        let sys = prepare_system(&ProblemSpec::upwind(5).matrix().unwrap(), true).unwrap();
        let f = svd(&sys.a.to_dense()).unwrap();
        let pair = build_pair(&sys.a, &TransferConfig::new(InterpKind::Classical, RestrictKind::Lair), None).unwrap();
        let p = pair.p.to_dense();
        let r = q_pair_restrict(&p, &polar_q(&f).unwrap()).unwrap();
        let params = params_for(&p, &r, &f, 1.0, 1.0);
        assert!((params.k_p - params.k_r).abs() <= 1e-8 * params.k_p.max(1.0));
        for k in [1, 2, p.cols() / 2] {
            let dec = build_pr_bases(&p, &r, &f, k, &params).unwrap();
            assert!(dec.s2.iter().all(|s| (s - 1.0).abs() < 1e-8), "{:?}", dec.s2);
            assert_conclusions(&dec, &f);
        }
    }

    #[test]
    fn counterexample_below_ell_has_zero_cosine() {
        let (_, f) = normalized(DenseMatrix::from_diag(&[0.1, 0.2, 0.3, 0.4, 0.6, 0.8, 0.9, 1.0]));
        let (r, p) = counterexample_pair(&f, 4, 3).unwrap();
        let params = params_for(&p, &r, &f, 1.0, 1.0);
        for k in 1..3 {
            let dec = build_pr_bases(&p, &r, &f, k, &params).unwrap();
            assert!(dec.s1().unwrap() <= 1e-10, "k = {k}: {:?}", dec.s2);
        }
        assert!(select_k(&p, &r, &f, &params).unwrap().is_none());
    }

    #[test]
    fn degenerate_block_is_reported() {
        let (_, f) = diag6();
        // P has no component along e1
        let p = DenseMatrix::from_columns(6, &[vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0], vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0]]);
        let params = BasisParams { beta: 1.0, gamma: 1.0, k_p: 1.0, k_r: 1.0 };
        assert!(matches!(
            build_pr_bases(&p, &p, &f, 1, &params),
            Err(Error::DegenerateBlock { k: 1 })
        ));
    }

    #[test]
    fn deltas_by_hand() {
        let params = BasisParams { beta: 1.0, gamma: 1.0, k_p: 4.0, k_r: 4.0 };
        let d = Deltas::new(0.1, &params);
        assert!((d.delta_p - 0.2).abs() < 1e-15);
        assert!((d.khat_p - 4.0 / 0.96).abs() < 1e-13);
        assert!((d.delta_pr_sq - 0.1 * 4.0 / 0.96).abs() < 1e-13);
        let far = Deltas::new(1.0, &params);
        assert!(far.khat_p.is_infinite());
    }

    #[test]
    fn upwind_lair_classical_is_reproducible() {
        let sys = prepare_system(&ProblemSpec::upwind(8).matrix().unwrap(), true).unwrap();
        let f = svd(&sys.a.to_dense()).unwrap();
        let pair = build_pair(&sys.a, &TransferConfig::default(), None).unwrap();
        let (p, r) = (pair.p.to_dense(), pair.r.to_dense());
        let params = params_for(&p, &r, &f, 1.0, 1.0);
        let a = select_k(&p, &r, &f, &params).unwrap().map(|d| d.k);
        let b = select_k(&p, &r, &f, &params).unwrap().map(|d| d.k);
        assert_eq!(a, b);
        if let Some(k) = a {
            let dec = build_pr_bases(&p, &r, &f, k, &params).unwrap();
            assert_conclusions(&dec, &f);
            assert!(dec.hypotheses().all());
        }
    }

    #[test]
    fn change_of_basis_condition_bound() {
        let sys = prepare_system(&ProblemSpec::upwind(6).matrix().unwrap(), true).unwrap();
        let f = svd(&sys.a.to_dense()).unwrap();
        let p = svd_transfer(&f, 18, Side::Right).unwrap().add(&random_matrix(36, 18, 5).scaled(1e-3));
        let r = svd_transfer(&f, 18, Side::Left).unwrap().add(&random_matrix(36, 18, 6).scaled(1e-3));
        let params = params_for(&p, &r, &f, 1.0, 1.0);
        let dec = select_k(&p, &r, &f, &params).unwrap().expect("near-exact pair certifies");
        assert_conclusions(&dec, &f);
        let bound = dec.sigma_k1.map_or(2.0, |s| (1.0 / s).max(2.0));
        for (x, b) in [(&p, &dec.b_p), (&r, &dec.b_r)] {
            let g = svd(&x.tr_matmul(x)).unwrap();
            let zeta = g.sigma_max() / g.sigma_min();
            let bb = svd(&b.tr_matmul(b)).unwrap();
            let cond = bb.sigma_max() / bb.sigma_min();
            assert!(cond <= bound * zeta * (1.0 + 1e-8), "cond {cond} > {bound} * {zeta}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]
        #[test]
        fn conclusions_on_random_pairs(n in 4usize..10, seed in 0u64..300, beta in 0.5f64..1.5) {
            let (_, f) = normalized(random_matrix(n, n, seed));
            let n_c = n / 2;
            let p = svd_transfer(&f, n_c, Side::Right).unwrap().add(&random_matrix(n, n_c, seed + 1).scaled(0.05));
            let r = svd_transfer(&f, n_c, Side::Left).unwrap().add(&random_matrix(n, n_c, seed + 2).scaled(0.05));
            let params = params_for(&p, &r, &f, beta, beta);
            for k in 1..=n_c {
                match build_pr_bases(&p, &r, &f, k, &params) {
                    Ok(dec) => {
                        assert_conclusions(&dec, &f);
                        assert_change_of_basis(&dec, &p, &r, &f);
                    }
                    Err(Error::DegenerateBlock { .. }) => {}
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }
}
