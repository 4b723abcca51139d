use thiserror::Error;

/// Error type shared by all engine modules.
///
/// The CLI maps these to exit codes: input-shaped errors (configuration,
/// schema, domain, malformed or ambiguous data, degenerate input) exit with
/// code 2, mathematical failures (inexact division, inconsistent fixtures,
/// non-pointed cones) exit with code 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("malformed fixed-point data: {0}")]
    MalformedPoint(String),
    #[error("ambiguous fixed-point data: {0}")]
    AmbiguousData(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("degenerate subgroup pair: {0}")]
    DegeneratePair(String),
    #[error("inexact division: {0}")]
    InexactDivision(String),
    #[error("inconsistent fixture: {0}")]
    Inconsistency(String),
    #[error("not a finite combination of irreducible subgroup characters: {0}")]
    NotAKCharacter(String),
    #[error("partition cone is not pointed: {0}")]
    NonPointedCone(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code the CLI contract assigns to this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::Domain(_)
            | Error::Schema(_)
            | Error::MalformedPoint(_)
            | Error::AmbiguousData(_)
            | Error::DegenerateInput(_)
            | Error::DegeneratePair(_)
            | Error::Io(_)
            | Error::Json(_) => 2,
            Error::InexactDivision(_)
            | Error::Inconsistency(_)
            | Error::NotAKCharacter(_)
            | Error::NonPointedCone(_) => 3,
        }
    }
}
