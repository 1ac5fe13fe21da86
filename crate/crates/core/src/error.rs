use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("column `{0}` not found in header")]
    MissingColumn(String),

    #[error("row {row}, column `{column}`: cannot parse `{value}` as a number")]
    NonNumeric {
        row: usize,
        column: String,
        value: String,
    },

    #[error("row {row}, column `{column}`: non-finite value {value}")]
    NonFinite {
        row: usize,
        column: String,
        value: f64,
    },

    #[error("dataset has no rows")]
    Empty,

    #[error("dataset needs at least one conditioning column")]
    NoConditioning,

    #[error("column lengths disagree: {0}")]
    Shape(String),

    #[error("column `{column}` declared binary but has {distinct} distinct values")]
    NotBinary { column: String, distinct: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("stratification does not partition the window's samples: {0}")]
    StratificationMismatch(String),

    #[error("common odds ratio undefined: both Mantel-Haenszel sums are zero")]
    UndefinedOddsRatio,

    #[error("variance undefined: Mantel-Haenszel {0} sum is zero")]
    ZeroAggregate(&'static str),

    #[error("infeasible margins: {0}")]
    InfeasibleMargins(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
