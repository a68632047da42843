use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("denominator vanishes at origin")]
    DenominatorVanishesAtOrigin,

    #[error("series coefficient is not an integer")]
    NonIntegralSeries,

    #[error("exponent vector has length {got}, expected {expected}")]
    ExponentLength { expected: usize, got: usize },

    #[error("rank exceeds Hankel format: 2r = {} > d = {d}", 2 * .r)]
    RankExceedsHankelFormat { d: usize, r: usize },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("ring mismatch: {0}")]
    RingMismatch(String),

    #[error("unsupported query: {0}")]
    Unsupported(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid variable partition: {0}")]
    InvalidPartition(String),

    #[error("equation {0} has degree zero")]
    ZeroDegreeEquation(usize),

    #[error("path budget exceeded: {paths} start points > limit {limit}")]
    PathBudget { paths: u128, limit: u128 },

    #[error("inconsistent count: {0}")]
    InconsistentCount(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
