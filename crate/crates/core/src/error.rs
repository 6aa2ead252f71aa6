use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid system config: {0}")]
    InvalidConfig(String),

    #[error("unknown user id `{0}`")]
    UnknownUser(String),

    #[error("privacy budget must be finite and > 0, got {0}")]
    InvalidEpsilon(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("value {value} reported by user `{user}` is outside its support")]
    OutOfSupport { user: String, value: f64 },

    #[error("mixtures use different noise scales ({0} vs {1})")]
    MismatchedScale(f64, f64),

    #[error("root finder did not converge after {iterations} iterations (bracket [{lo}, {hi}])")]
    NoConvergence { iterations: usize, lo: f64, hi: f64 },

    #[error("csv error at line {line}: {message}")]
    Csv { line: u64, message: String },

    #[error("column `{0}` not found in csv header")]
    MissingColumn(String),

    #[error("no rows matched the filter")]
    EmptyMatch,

    #[error("category `{category}` has no code in the codes file for column `{column}`")]
    UnknownCategory { column: String, category: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
