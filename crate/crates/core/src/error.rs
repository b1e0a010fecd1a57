//! Error type shared across the crate.

use thiserror::Error;

/// Unified error type. The CLI maps variants onto process exit codes:
/// configuration/usage problems exit 1, data problems exit 2, and
/// numerical/domain failures exit 3.
#[derive(Debug, Error)]
pub enum Error {
    /// A required CSV column is absent from the header row.
    #[error("missing required column `{0}`")]
    MissingColumn(String),

    /// A count column holds something that is not a number.
    #[error("line {line}: invalid value `{value}` in column `{column}`")]
    InvalidValue {
        line: u64,
        column: String,
        value: String,
    },

    /// Aggregated counts violate a structural invariant (e.g. H > AB).
    #[error("data integrity violation for {player_id} {year}: {reason}")]
    DataIntegrity {
        player_id: String,
        year: i32,
        reason: String,
    },

    /// Too few usable observations to fit a model.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A numeric argument is outside the function's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Pitching component probabilities make the FIP denominator vanish.
    #[error("degenerate pitcher components: {0}")]
    DegeneratePitcher(String),

    /// Inconsistent configuration or call sequence.
    #[error("configuration error: {0}")]
    Config(String),

    /// A player id that does not appear in any eligible season.
    #[error("unknown player id `{0}`")]
    UnknownPlayer(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code for the CLI: 1 usage, 2 data error, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::MissingColumn(_)
            | Error::InvalidValue { .. }
            | Error::DataIntegrity { .. }
            | Error::InsufficientData(_)
            | Error::UnknownPlayer(_)
            | Error::Io(_)
            | Error::Csv(_) => 2,
            Error::Domain(_) | Error::DegeneratePitcher(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
