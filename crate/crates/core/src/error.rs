use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("variable x{index} out of range 1..={nvars}")]
    VariableOutOfRange { index: usize, nvars: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("weight (2*ceil({degree}/2))! overflows the floating point range")]
    WeightOverflow { degree: u32 },

    #[error("monomial {exponent} has degree above the available range {max_degree}")]
    DegreeOutOfRange { exponent: String, max_degree: u32 },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("preordering with {generators} generators exceeds the cap of {cap}")]
    PreorderCap { generators: usize, cap: usize },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("solver failure: {0}")]
    Solver(String),
}

impl Error {
    pub(crate) fn format(line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            line,
            message: message.into(),
        }
    }
}
