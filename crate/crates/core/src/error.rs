use thiserror::Error;

/// Errors raised by the library.
///
/// Parse failures are kept apart from mathematical precondition failures so
/// the command line can map them to different exit codes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at `{token}`: {message}")]
    Parse { token: String, message: String },

    #[error("zero is not a unit")]
    ZeroElement,

    #[error("field mismatch: {0}")]
    FieldMismatch(String),

    #[error("{element} is not a unit at {place} (valuation {valuation})")]
    NotAUnit {
        element: String,
        place: String,
        valuation: i64,
    },

    #[error("archimedean place {0} has no tame symbol")]
    Archimedean(String),

    #[error("index {index} out of range (length {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("map is not injective: {0}")]
    NotInjective(String),

    #[error("invalid root datum: {0}")]
    InvalidRootDatum(String),

    #[error("quadratic form is not Weyl-invariant under reflection {reflection}")]
    NotWeylInvariant { reflection: usize },

    #[error("coefficient mismatch: {0}")]
    CoefficientMismatch(String),

    #[error("homomorphism undefined on {0}")]
    UndefinedHom(String),

    #[error("invalid BD triple: {0}")]
    InvalidTriple(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    /// An internal consistency trap fired. Seeing this indicates a bug.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub fn parse(token: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            token: token.into(),
            message: message.into(),
        }
    }

    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
