use thiserror::Error;

use crate::energy::SubmodularityReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("objects are bound to different grid domains")]
    DomainMismatch,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("out of bounds: {0}")]
    OutOfBounds(String),

    #[error("negative weight {0} (weights must be nonnegative)")]
    NegativeWeight(String),

    #[error("measure support violates the Dirichlet precondition: {0}")]
    SupportViolation(String),

    #[error("set disagrees with the frozen assignment at cell {cell}")]
    FrozenDisagreement { cell: usize },

    #[error("energy is not submodular ({} violating face(s))", .0.violations.len())]
    NonSubmodular(Box<SubmodularityReport>),

    #[error("exhaustive search over {cells} free cells exceeds the cap of {cap}")]
    ExhaustiveCapacityExceeded { cells: usize, cap: usize },

    #[error("integer range exceeded while scaling weights for exhaustive search")]
    NumericRange,

    #[error("empty admissible class: {0}")]
    EmptyClass(String),

    #[error("volume {v} outside [0, {max}]")]
    VolumeOutOfRange { v: usize, max: usize },

    #[error("measures are not mutually singular")]
    NotMutuallySingular,

    #[error("malformed flow network: {0}")]
    MalformedNetwork(String),

    #[error("invalid input: {0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonSubmodular(_)
            | Error::ExhaustiveCapacityExceeded { .. }
            | Error::NumericRange
            | Error::MalformedNetwork(_) => 3,
            Error::Io(_) => 1,
            _ => 2,
        }
    }
}
