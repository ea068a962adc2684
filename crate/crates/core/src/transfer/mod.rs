//! Interpolation and restriction builders: classical AMG, local approximate
//! ideal restriction/prolongation, exact singular-vector transfers and the
//! polar-factor pairing.

pub mod classical;
pub mod coarse;
pub mod exact;
pub mod lair;
pub mod split;
pub mod strength;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

pub use classical::classical_interp;
pub use coarse::{check_nonsingular, coarse_operator, coarse_operator_at, coarse_operator_sparse};
pub use exact::{counterexample_pair, q_pair_restrict, svd_transfer, Side};
pub use lair::{laip_interp, lair_neighbourhood, lair_restrict};
pub use split::{cf_split, CfLabel, CfSplit};
pub use strength::{strength_graph, DEFAULT_THETA_S};

use crate::error::{Error, Result};
use crate::linalg::{min_singular_value, polar_q, svd, SparseMatrix, SvdFactorization};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InterpKind {
    Classical,
    Laip,
    Svd,
    Counterexample,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RestrictKind {
    /// `R = P` (Galerkin).
    ClassicalT,
    Lair,
    /// `R = Q^T P`.
    QStar,
    Svd,
    Counterexample,
}

impl InterpKind {
    pub fn name(self) -> &'static str {
        match self {
            InterpKind::Classical => "classical",
            InterpKind::Laip => "laip",
            InterpKind::Svd => "svd",
            InterpKind::Counterexample => "counterexample",
        }
    }

    fn needs_split(self) -> bool {
        matches!(self, InterpKind::Classical | InterpKind::Laip)
    }
}

impl RestrictKind {
    pub fn name(self) -> &'static str {
        match self {
            RestrictKind::ClassicalT => "classical_t",
            RestrictKind::Lair => "lair",
            RestrictKind::QStar => "qstar",
            RestrictKind::Svd => "svd",
            RestrictKind::Counterexample => "counterexample",
        }
    }

    fn needs_split(self) -> bool {
        matches!(self, RestrictKind::Lair)
    }
}

impl fmt::Display for InterpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for RestrictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InterpKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classical" => Ok(InterpKind::Classical),
            "laip" => Ok(InterpKind::Laip),
            "svd" => Ok(InterpKind::Svd),
            other => Err(Error::InvalidArgument(format!(
                "unknown interpolation '{other}' (classical|laip|svd)"
            ))),
        }
    }
}

impl FromStr for RestrictKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classical_t" => Ok(RestrictKind::ClassicalT),
            "lair" => Ok(RestrictKind::Lair),
            "qstar" => Ok(RestrictKind::QStar),
            "svd" => Ok(RestrictKind::Svd),
            other => Err(Error::InvalidArgument(format!(
                "unknown restriction '{other}' (classical_t|lair|qstar|svd)"
            ))),
        }
    }
}

/// How to build one level's transfers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TransferConfig {
    pub interp: InterpKind,
    pub restrict: RestrictKind,
    pub theta_s: f64,
    pub degree: usize,
}

impl Default for TransferConfig {
    fn default() -> Self {
        Self {
            interp: InterpKind::Classical,
            restrict: RestrictKind::Lair,
            theta_s: DEFAULT_THETA_S,
            degree: 1,
        }
    }
}

impl TransferConfig {
    pub fn new(interp: InterpKind, restrict: RestrictKind) -> Self {
        Self {
            interp,
            restrict,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta_s > 0.0 && self.theta_s <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "theta_s = {} outside (0, 1]",
                self.theta_s
            )));
        }
        if !(self.degree == 1 || self.degree == 2) {
            return Err(Error::InvalidArgument(format!("degree = {} (1 or 2)", self.degree)));
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        format!("{}+{}", self.restrict, self.interp)
    }
}

/// Restriction and interpolation for one level, both n x n_c.
#[derive(Clone, Debug)]
pub struct TransferPair {
    pub r: SparseMatrix,
    pub p: SparseMatrix,
    pub builder_r: RestrictKind,
    pub builder_p: InterpKind,
    pub split: Option<CfSplit>,
}

impl TransferPair {
    pub fn n(&self) -> usize {
        self.p.rows()
    }

    pub fn n_coarse(&self) -> usize {
        self.p.cols()
    }

    pub fn coarsening_ratio(&self) -> f64 {
        self.n_coarse() as f64 / self.n() as f64
    }

    /// Both operators must have full column rank.
    pub fn check_rank(&self) -> Result<()> {
        for m in [&self.p, &self.r] {
            let smin = min_singular_value(&m.to_dense())?;
            if smin <= 1e-10 {
                return Err(Error::RankDeficient { sigma_min: smin });
            }
        }
        Ok(())
    }
}

/// Coarse size used when no C/F splitting is involved.
pub fn default_svd_coarse_size(n: usize) -> usize {
    n.div_ceil(2)
}

/// Builds the transfers for a (normalized) operator `a`. Exact singular-vector
/// builders use `f` when given and factor `a` otherwise.
pub fn build_pair(a: &SparseMatrix, cfg: &TransferConfig, f: Option<&SvdFactorization>) -> Result<TransferPair> {
    cfg.validate()?;
    let n = a.rows();
    let split = if cfg.interp.needs_split() || cfg.restrict.needs_split() {
        let s = strength_graph(a, cfg.theta_s);
        Some((cf_split(&s), s))
    } else {
        None
    };
    let n_c = split
        .as_ref()
        .map_or_else(|| default_svd_coarse_size(n), |(cf, _)| cf.n_coarse());

    let needs_svd = matches!(cfg.interp, InterpKind::Svd)
        || matches!(cfg.restrict, RestrictKind::Svd | RestrictKind::QStar);
    let owned;
    let f = match (needs_svd, f) {
        (false, _) => None,
        (true, Some(f)) => Some(f),
        (true, None) => {
            owned = svd(&a.to_dense())?;
            Some(&owned)
        }
    };

    let p = match cfg.interp {
        InterpKind::Classical => {
            let (cf, s) = split.as_ref().expect("split built");
            classical_interp(a, s, cf)?
        }
        InterpKind::Laip => {
            let (cf, _) = split.as_ref().expect("split built");
            laip_interp(a, cfg.theta_s, cf, cfg.degree)
        }
        InterpKind::Svd => SparseMatrix::from_dense(&svd_transfer(f.expect("svd"), n_c, Side::Right)?, 0.0),
        InterpKind::Counterexample => {
            return Err(Error::InvalidArgument("use counterexample_transfer".into()))
        }
    };
    let r = match cfg.restrict {
        RestrictKind::ClassicalT => p.clone(),
        RestrictKind::Lair => {
            let (cf, s) = split.as_ref().expect("split built");
            lair_restrict(a, s, cf, cfg.degree)
        }
        RestrictKind::QStar => {
            let q = polar_q(f.expect("svd"))?;
            SparseMatrix::from_dense(&q_pair_restrict(&p.to_dense(), &q)?, 0.0)
        }
        RestrictKind::Svd => SparseMatrix::from_dense(&svd_transfer(f.expect("svd"), n_c, Side::Left)?, 0.0),
        RestrictKind::Counterexample => {
            return Err(Error::InvalidArgument("use counterexample_transfer".into()))
        }
    };
    Ok(TransferPair {
        r,
        p,
        builder_r: cfg.restrict,
        builder_p: cfg.interp,
        split: split.map(|(cf, _)| cf),
    })
}

/// The singular counterexample pair wrapped as a [`TransferPair`].
pub fn counterexample_transfer(f: &SvdFactorization, n_c: usize, ell: usize) -> Result<TransferPair> {
    let (r, p) = counterexample_pair(f, n_c, ell)?;
    Ok(TransferPair {
        r: SparseMatrix::from_dense(&r, 0.0),
        p: SparseMatrix::from_dense(&p, 0.0),
        builder_r: RestrictKind::Counterexample,
        builder_p: InterpKind::Counterexample,
        split: None,
    })
}
