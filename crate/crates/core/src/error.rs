use thiserror::Error;

/// Errors raised by the estimation, simulation and Monte Carlo layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("design matrix is rank deficient: column `{column}` is collinear with earlier columns")]
    RankDeficient { column: String },

    #[error("insufficient observations: {n} rows for {m} regressors")]
    InsufficientObservations { n: usize, m: usize },

    #[error("design has no regressors")]
    InsufficientRegressors,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("standard error of coefficient {index} is zero")]
    ZeroStandardError { index: usize },

    #[error("break date {tb} must satisfy {t_first} <= TB < {t_last}")]
    InvalidBreakDate { tb: i64, t_first: i64, t_last: i64 },

    #[error("error AR polynomial is not stationary (root on or inside the unit circle)")]
    NonStationaryErrorPolynomial,

    #[error("residual variance is degenerate (exact or near-exact fit)")]
    DegenerateResidualVariance,

    #[error("degrees of freedom are degenerate: T_eff = {t_effective}, m = {m}")]
    DegenerateDof { t_effective: usize, m: usize },

    #[error("no critical value for {method}/{statistic} at quantile {quantile}")]
    MissingCriticalValue {
        method: String,
        statistic: String,
        quantile: f64,
    },

    #[error("{dropped} of {reps} replications were degenerate (limit 0.1%)")]
    TooManyDegenerate { dropped: usize, reps: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
