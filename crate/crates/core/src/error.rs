use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square or sizes disagree: {0}")]
    Shape(String),

    #[error("{matrix} violates its symmetry at ({row}, {col})")]
    SymmetryViolation {
        matrix: &'static str,
        row: usize,
        col: usize,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("eigenvalue {eigenvalue} sits on the critical value |lambda| = 2")]
    CriticalSpectrum { eigenvalue: f64 },

    #[error("canonical ray of the zero vector is undefined")]
    ZeroVector,

    #[error("unknown preset Hamiltonian {0:?}")]
    UnknownPreset(String),

    #[error("propagation domain too small: {0}")]
    DomainTooSmall(String),

    #[error("field geometry does not match the requested propagation: {0}")]
    GeometryMismatch(String),

    #[error("diagonal propagation needs one extra point on the next diagonal")]
    MissingExtraPoint,

    #[error("sequence of length {0} is too short (need at least 3)")]
    LengthTooShort(usize),

    #[error("edge ({0}, {1}) is not part of the topology")]
    EdgeNotInTopology(usize, usize),

    #[error("invalid topology: {0}")]
    InvalidTopology(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("schedule exhausted at step {0}")]
    ScheduleExhausted(usize),

    #[error("{bits} configuration bits exceed the limit of {limit}")]
    DimensionOverflow { bits: usize, limit: usize },

    #[error("map is not a phased permutation: {0}")]
    NotPermutation(String),

    #[error("rule does not act on edge bits only: basis state {0} changes its vertex bits")]
    NotEdgeLocal(usize),

    #[error("operator is not self-adjoint (max |M - M^dagger| = {0:e})")]
    NotSelfAdjoint(f64),

    #[error("optimum sits on the family boundary: {0}")]
    FamilyTooNarrow(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid config at {path}: {message}")]
    ConfigInvalid { path: String, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::ConfigInvalid {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, found })
        }
    }
}
