use thiserror::Error;

/// Errors raised by state manipulation, protocol execution and verification.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("local dimension must be at least 2, got {0}")]
    InvalidDimension(u32),

    #[error("site index {site} out of range for a {len}-site register")]
    SiteOutOfRange { site: usize, len: usize },

    #[error("two-site gate needs distinct sites, got {0} twice")]
    IdenticalSites(usize),

    #[error("duplicate site label `{0}`")]
    DuplicateLabel(String),

    #[error("unknown register `{0}`")]
    UnknownRegister(String),

    #[error("register `{0}` is not an emitter")]
    NotAnEmitter(String),

    #[error("amplitude vector has length {got}, expected {expected}")]
    LengthMismatch { got: usize, expected: usize },

    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),

    #[error("state shapes differ: {0}")]
    ShapeMismatch(String),

    #[error("forced outcome {outcome} on `{emitter}` has probability {probability:e}")]
    ImpossibleOutcome {
        emitter: String,
        outcome: u32,
        probability: f64,
    },

    #[error("outcome variable `{0}` used before it was bound")]
    UnboundVariable(String),

    #[error("outcome variable `{0}` bound twice")]
    RebindVariable(String),

    #[error("emitter `{0}` was already measured")]
    AlreadyMeasured(String),

    #[error("forced outcome list has {got} entries but the protocol measures {expected} times")]
    OutcomeCount { got: usize, expected: usize },

    #[error("emitters left unmeasured at end of protocol: {0:?}")]
    UnmeasuredEmitters(Vec<String>),

    #[error("invalid protocol: {0}")]
    InvalidProtocol(String),

    #[error("photon ordering does not match emitted photons: {0}")]
    BadOrdering(String),

    #[error("state amplitudes are not of uniform magnitude")]
    NonFlatMagnitude,

    #[error("amplitude phases do not follow a quadratic form")]
    NonQuadraticPhase,

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("unknown builtin `{0}`")]
    UnknownBuiltin(String),

    #[error("builtin `{name}` does not support local dimension {q}")]
    UnsupportedDimension { name: String, q: u32 },

    #[error("invalid builtin parameter: {0}")]
    InvalidParameter(String),

    #[error("empty site subset")]
    EmptySubset,

    #[error("invalid code: {0}")]
    InvalidCode(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("malformed JSON: {0}")]
    Json(String),
}

/// A protocol-text parse failure, tagged with the 1-based source line.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            message: message.into(),
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Json(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
