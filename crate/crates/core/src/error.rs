use thiserror::Error;

use crate::solver::SolveReport;

/// Errors raised by the numeric kernels, generators, builders and solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix contains a non-finite entry")]
    NonFinite,
    #[error("matrix is numerically singular (sigma_min / sigma_max = {ratio:e})")]
    SingularInput { ratio: f64 },
    #[error("matrix is not symmetric positive (semi)definite (min eigenvalue {min_eig:e}, max {max_eig:e})")]
    NotSpd { min_eig: f64, max_eig: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid problem specification: {0}")]
    InvalidSpec(String),
    #[error("zero diagonal entry in row {0}")]
    ZeroDiagonal(usize),
    #[error("matrix of size {n} exceeds the dense analysis cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("MatrixMarket parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unsupported MatrixMarket field or symmetry: {0}")]
    UnsupportedField(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("interpolation row {0} has a vanishing denominator")]
    SingularRow(usize),
    #[error("transfer operator is rank deficient (sigma_min = {sigma_min:e})")]
    RankDeficient { sigma_min: f64 },
    #[error("coarse operator R*AP is singular at level {level} (sigma_min / sigma_max = {ratio:e})")]
    SingularCoarseOperator { level: usize, ratio: f64 },
    #[error("I - N11 is numerically singular for k = {k}")]
    DegenerateBlock { k: usize },
    #[error("block bound requires a0*d0 > b*c (got {lhs:e} <= {rhs:e})")]
    DeterminantCondition { lhs: f64, rhs: f64 },
    #[error("projection is trivial (coarse dimension {n_c} of {n})")]
    TrivialProjection { n: usize, n_c: usize },
    #[error("fractional power beta = {0} must exceed 1/2")]
    InvalidBeta(f64),
    #[error("operator is not normalized to unit spectral norm (sigma_max = {0})")]
    NotNormalized(f64),
    #[error("iteration stagnated after {} iterations", .0.iterations)]
    Stagnation(Box<SolveReport>),
    #[error("need at least {needed} recorded ratios, got {got}")]
    TooFewIterations { needed: usize, got: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
