use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("metric is degenerate: |det| = {det:.3e} below threshold {threshold:.3e}")]
    DegenerateMetric { det: f64, threshold: f64 },

    #[error("declared signature {declared} does not match metric inertia {actual}")]
    SignatureMismatch { declared: String, actual: String },

    #[error("g(y,y) = {norm:.3e} is null within tolerance; normalized generators are singular on the null cone")]
    NullVectorForM { norm: f64 },

    #[error("unknown 1-form `{0}`")]
    UnknownForm(String),

    #[error("unsupported generator arity {0}: form families take 1 to 3 one-forms")]
    UnsupportedArity(usize),

    #[error("vector is not null within tolerance: g(y,y) = {0:.3e}")]
    NotNull(f64),

    #[error("sequence length {0} too short, need at least 4")]
    SequenceTooShort(usize),

    #[error("finite-difference breakdown: {0}")]
    NumericalBreakdown(String),

    #[error("momentum component {component} = {value} is not commensurate with the periodic box of length {box_len}")]
    IncommensurateMomentum {
        component: usize,
        value: f64,
        box_len: f64,
    },

    #[error("operator requires a strictly positive mass")]
    MassRequired,

    #[error("operator harness requires a flat orthonormal metric with components diag(±1)")]
    FlatOnly,

    #[error("gamma index {0} out of range 1..=4")]
    GammaIndex(u8),

    #[error("invalid context: {0}")]
    InvalidContext(String),

    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Positioned diagnostic produced by the expression parser.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{kind} at line {line}, column {column}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("empty input")]
    EmptyInput,
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("unexpected token `{0}`")]
    UnexpectedToken(String),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("malformed number `{0}`")]
    Number(String),
    #[error("form list of arity {0} invalid: expected 1 to 3 names")]
    Arity(usize),
    #[error("grade index must be a non-negative integer")]
    GradeIndex,
    #[error("trailing input after expression")]
    TrailingInput,
    #[error("expression nested too deeply")]
    TooDeep,
}
