use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{svd, DenseMatrix, Lu, SparseMatrix, SvdFactorization, DENSE_CAP};
use crate::problem::{normalize_spectral, ScaledSystem};
use crate::transfer::{build_pair, check_nonsingular, TransferConfig, TransferPair};

pub const DEFAULT_COARSEST_MAX: usize = 40;
pub const DEFAULT_MAX_LEVELS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HierarchyConfig {
    pub transfer: TransferConfig,
    pub max_levels: usize,
    pub coarsest_max: usize,
}

impl Default for HierarchyConfig {
    fn default() -> Self {
        Self {
            transfer: TransferConfig::default(),
            max_levels: DEFAULT_MAX_LEVELS,
            coarsest_max: DEFAULT_COARSEST_MAX,
        }
    }
}

impl HierarchyConfig {
    pub fn new(transfer: TransferConfig, max_levels: usize) -> Self {
        Self {
            transfer,
            max_levels,
            ..Self::default()
        }
    }
}

/// One level: `a` has unit spectral norm and `a = scale * (R^T A P)` of the
/// level above (or of the scaled input at level 0).
#[derive(Debug)]
pub struct Level {
    pub a: SparseMatrix,
    pub scale: f64,
    pub transfers: Option<TransferPair>,
    pub a_coarse_raw: Option<DenseMatrix>,
    svd: OnceLock<Option<SvdFactorization>>,
}

impl Level {
    fn new(a: SparseMatrix, scale: f64) -> Self {
        Self {
            a,
            scale,
            transfers: None,
            a_coarse_raw: None,
            svd: OnceLock::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn r(&self) -> Option<&SparseMatrix> {
        self.transfers.as_ref().map(|t| &t.r)
    }

    pub fn p(&self) -> Option<&SparseMatrix> {
        self.transfers.as_ref().map(|t| &t.p)
    }

    /// Dense SVD, computed once. `None` above the dense cap.
    pub fn svd(&self) -> Option<&SvdFactorization> {
        self.svd
            .get_or_init(|| {
                if self.n() > DENSE_CAP {
                    return None;
                }
                svd(&self.a.to_dense()).ok()
            })
            .as_ref()
    }
}

#[derive(Debug)]
pub struct Hierarchy {
    pub levels: Vec<Level>,
    pub config: HierarchyConfig,
    coarsest: Lu,
}

impl Hierarchy {
    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn coarsest_size(&self) -> usize {
        self.levels.last().map_or(0, Level::n)
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.levels.iter().map(Level::n).collect()
    }

    /// `n_{l+1} / n_l` for each coarsening step.
    pub fn coarsening_ratios(&self) -> Vec<f64> {
        self.levels
            .windows(2)
            .map(|w| w[1].n() as f64 / w[0].n() as f64)
            .collect()
    }

    pub(crate) fn coarsest_lu(&self) -> &Lu {
        &self.coarsest
    }
}

pub fn build_hierarchy(sys: &ScaledSystem, config: &HierarchyConfig) -> Result<Hierarchy> {
    build_hierarchy_with(sys, config, None)
}

/// Like [`build_hierarchy`], with `first` replacing the level-0 transfers.
pub fn build_hierarchy_with(
    sys: &ScaledSystem,
    config: &HierarchyConfig,
    first: Option<TransferPair>,
) -> Result<Hierarchy> {
    if !sys.normalized {
        return Err(Error::InvalidArgument("hierarchy needs a normalized system".into()));
    }
    if config.max_levels == 0 {
        return Err(Error::InvalidArgument("max_levels must be at least 1".into()));
    }
    config.transfer.validate()?;
    let mut first = first;
    let mut levels = vec![Level::new(sys.a.clone(), sys.scale)];
    loop {
        let depth = levels.len() - 1;
        let cur = &levels[depth];
        let n = cur.n();
        if n <= config.coarsest_max || levels.len() >= config.max_levels {
            break;
        }
        let pair = match first.take() {
            Some(p) => p,
            None => {
                let needs_svd = matches!(config.transfer.interp, crate::transfer::InterpKind::Svd)
                    || matches!(
                        config.transfer.restrict,
                        crate::transfer::RestrictKind::Svd | crate::transfer::RestrictKind::QStar
                    );
                let f = if needs_svd { cur.svd() } else { None };
                build_pair(&cur.a, &config.transfer, f)?
            }
        };
        if pair.p.rows() != n || pair.r.rows() != n || pair.p.cols() != pair.r.cols() {
            return Err(Error::DimensionMismatch(format!(
                "level {depth} transfers do not match n = {n}"
            )));
        }
        let n_c = pair.n_coarse();
        if n_c == 0 || n_c >= n {
            break;
        }
        let raw = pair.r.transpose().matmul(&cur.a.matmul(&pair.p)).to_dense();
        check_nonsingular(depth, &raw)?;
        let next = normalize_spectral(&SparseMatrix::from_dense(&raw, 0.0))?;
        let cur = &mut levels[depth];
        cur.transfers = Some(pair);
        cur.a_coarse_raw = Some(raw);
        levels.push(Level::new(next.a, next.scale));
    }
    let coarsest = Lu::new(&levels.last().expect("at least one level").a.to_dense()).map_err(|_| {
        Error::SingularCoarseOperator {
            level: levels.len() - 1,
            ratio: 0.0,
        }
    })?;
    Ok(Hierarchy {
        levels,
        config: *config,
        coarsest,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::spectral_norm;
    use crate::problem::{prepare_system, ProblemSpec};
    use crate::transfer::{counterexample_transfer, InterpKind, RestrictKind};

    fn upwind(n: usize) -> ScaledSystem {
        prepare_system(&ProblemSpec::upwind(n).matrix().unwrap(), true).unwrap()
    }

    #[test]
    fn small_problem_is_one_level() {
        let h = build_hierarchy(&upwind(5), &HierarchyConfig::default()).unwrap();
        assert_eq!(h.num_levels(), 1);
        assert_eq!(h.coarsest_size(), 25);
    }

    #[test]
    fn upwind_levels_are_unit_norm() {
        let h = build_hierarchy(&upwind(16), &HierarchyConfig::default()).unwrap();
        assert!(h.num_levels() >= 2);
        let sizes = h.sizes();
        assert!(sizes.windows(2).all(|w| w[1] < w[0]));
        for (i, lvl) in h.levels.iter().enumerate() {
            let s = lvl.svd().unwrap().sigma_max();
            assert!((s - 1.0).abs() <= 1e-6, "level {i}: {s}");
            if let (Some(t), Some(raw)) = (&lvl.transfers, &lvl.a_coarse_raw) {
                let direct = t.r.to_dense().tr_matmul(&lvl.a.to_dense().matmul(&t.p.to_dense()));
                assert!(direct.max_abs_diff(raw) <= 1e-12);
                let next = &h.levels[i + 1];
                assert!(next.a.to_dense().max_abs_diff(&raw.scaled(next.scale)) <= 1e-12);
                assert!((next.scale * spectral_norm(raw) - 1.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn max_levels_caps_depth() {
        let cfg = HierarchyConfig::new(TransferConfig::new(InterpKind::Svd, RestrictKind::Svd), 3);
        let h = build_hierarchy(&upwind(16), &cfg).unwrap();
        assert_eq!(h.sizes(), vec![256, 128, 64]);
        assert_eq!(h.coarsening_ratios(), vec![0.5, 0.5]);
    }

    #[test]
    fn counterexample_is_rejected() {
        let sys = upwind(8);
        let f = svd(&sys.a.to_dense()).unwrap();
        let pair = counterexample_transfer(&f, 32, 3).unwrap();
        let err = build_hierarchy_with(&sys, &HierarchyConfig::default(), Some(pair)).unwrap_err();
        assert!(matches!(err, Error::SingularCoarseOperator { level: 0, .. }));
    }

    #[test]
    fn unnormalized_system_rejected() {
        let mut sys = upwind(4);
        sys.normalized = false;
        assert!(build_hierarchy(&sys, &HierarchyConfig::default()).is_err());
    }
}
