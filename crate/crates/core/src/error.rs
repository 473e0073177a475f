use thiserror::Error;

use crate::typeexpr::ValidationResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised at info-function, pipeline and tool boundaries.
///
/// Ordinary validation mismatches are not errors inside the `typeexpr`
/// module; they become errors here, carrying their [`ValidationResult`].
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("cyclic value: a container refers back to itself")]
    CyclicValue,

    #[error("signature mismatch for `{function}`: {detail}")]
    SignatureMismatch { function: String, detail: String },

    #[error("missing required argument `{0}`")]
    MissingArgument(String),

    #[error("unexpected argument `{0}`")]
    UnexpectedArgument(String),

    #[error("{0}")]
    BadCall(String),

    #[error("inflow violation: {0}")]
    Inflow(Box<ValidationResult>),

    #[error("outflow violation: {0}")]
    Outflow(Box<ValidationResult>),

    #[error("argument `{name}` violates its constraint: {result}")]
    ArgumentViolation {
        name: String,
        result: Box<ValidationResult>,
    },

    #[error("configuration error: {0}")]
    Config(String),

    /// An error raised by a user body.
    #[error("{kind}: {message}")]
    Body { kind: String, message: String },

    #[error("bad step name {0:?}: names must be non-empty and contain no '.'")]
    BadName(String),

    #[error("incompatible steps at junction {junction}: step returns `{returns}` but next step expects `{expects}`")]
    IncompatibleSteps {
        junction: usize,
        returns: String,
        expects: String,
    },

    #[error("duplicate step name `{0}`")]
    DuplicateStepName(String),

    #[error("argument key `{0}` does not resolve to any step parameter")]
    UnresolvedArg(String),

    #[error("conflicting values for argument `{0}`")]
    Conflict(String),

    #[error("step `{step}` failed: {source}")]
    Step { step: String, source: Box<Error> },

    #[error("format error: {0}")]
    Format(String),

    #[error("unknown method `{0}`")]
    UnknownMethod(String),

    #[error("sandbox failure: cases {failed:?} failed")]
    SandboxFailure { failed: Vec<usize> },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Convenience constructor for errors raised by user bodies.
    pub fn body(kind: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Body {
            kind: kind.into(),
            message: message.into(),
        }
    }

    /// Stable kind name used in logs and test expectations.
    ///
    /// Step annotations are transparent: the kind is that of the wrapped error.
    pub fn kind(&self) -> &str {
        match self {
            Error::CyclicValue => "CyclicValueError",
            Error::SignatureMismatch { .. } => "SignatureMismatchError",
            Error::MissingArgument(_) => "MissingArgumentError",
            Error::UnexpectedArgument(_) => "UnexpectedArgumentError",
            Error::BadCall(_) => "TypeError",
            Error::Inflow(_) => "InflowViolation",
            Error::Outflow(_) => "OutflowViolation",
            Error::ArgumentViolation { .. } => "ArgumentViolation",
            Error::Config(_) => "ConfigError",
            Error::Body { kind, .. } => kind,
            Error::BadName(_) => "BadNameError",
            Error::IncompatibleSteps { .. } => "IncompatibleStepsError",
            Error::DuplicateStepName(_) => "DuplicateStepNameError",
            Error::UnresolvedArg(_) => "UnresolvedArgError",
            Error::Conflict(_) => "ConflictError",
            Error::Step { source, .. } => source.kind(),
            Error::Format(_) => "FormatError",
            Error::UnknownMethod(_) => "UnknownMethodError",
            Error::SandboxFailure { .. } => "SandboxFailure",
            Error::Io(_) => "IoError",
        }
    }

    /// Strips step annotations.
    pub fn root(&self) -> &Error {
        match self {
            Error::Step { source, .. } => source.root(),
            e => e,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
