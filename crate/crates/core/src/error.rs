use thiserror::Error;

/// Errors raised while building codes and trellises or decoding frames.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("zero run defined only for circular spans")]
    LinearSpanZeroRun,

    #[error("invalid span [{lo},{hi}] for row {row}: {reason}")]
    InvalidSpan {
        row: String,
        lo: usize,
        hi: usize,
        reason: &'static str,
    },

    #[error("generator rows are linearly dependent")]
    DependentRows,

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("enumeration limit exceeded: {what} ({count} > {limit})")]
    EnumerationLimit {
        what: &'static str,
        count: u128,
        limit: u128,
    },

    #[error("elementary trellis requires a nonzero row")]
    ZeroRow,

    #[error("trellis depth mismatch: {0} vs {1}")]
    DepthMismatch(usize, usize),

    #[error("section width mismatch at section {section}")]
    WidthMismatch { section: usize },

    #[error("subtrellis indices must differ (got {0} twice)")]
    SameSubtrellis(usize),

    #[error("subtrellis index {index} out of range (L = {count})")]
    SubtrellisOutOfRange { index: usize, count: usize },

    #[error("circle too short: circle length {circle} must exceed memory {memory}")]
    CircleTooShort { circle: usize, memory: usize },

    #[error("invalid convolutional code: {0}")]
    InvalidConvCode(String),

    #[error("malformed input at line {line}: {msg}")]
    Malformed { line: usize, msg: String },

    #[error("edge at section {section} refers to missing node {node}")]
    DanglingNode { section: usize, node: u32 },

    #[error("duplicate edge at section {section}")]
    DuplicateEdge { section: usize },

    #[error("trellis is not reduced: {0}")]
    NotReduced(String),

    #[error("unknown code '{0}'")]
    UnknownCode(String),

    #[error("diagnosis precondition violated: {0}")]
    Diagnosis(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
