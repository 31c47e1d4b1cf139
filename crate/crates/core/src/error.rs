use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("scenario mismatch: expected {expected} parties, found {found}")]
    ScenarioMismatch { expected: usize, found: usize },
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("invalid behavior: {0}")]
    InvalidBehavior(String),
    #[error("mixing weight {0} outside [0, 1]")]
    WeightOutOfRange(String),
    #[error("reconstructed probability {value} is negative at index {index}")]
    NegativeProbability { index: usize, value: String },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("model NS[3/1] needs the tripartite non-signaling vertex list")]
    MissingNs3Vertices,
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("linear program did not converge after {iterations} iterations")]
    LpNoConvergence { iterations: usize },
    #[error("linear program is unbounded")]
    LpUnbounded,
    #[error("operation requires the exact rational backend")]
    ExactBackendRequired,
    #[error("value does not fit the compact exact representation: {0}")]
    Overflow(String),
    #[error("point set is empty")]
    EmptyPointSet,
    #[error("polyhedron is not pointed or not bounded: {0}")]
    Unbounded(String),
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("inequality is not violated at full visibility (value {value}, bound {bound})")]
    NoViolation { value: String, bound: String },
    #[error("vertex set is not non-signaling: {0}")]
    NotNonSignaling(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}
