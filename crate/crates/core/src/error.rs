use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    /// The instance falls outside the restricted class a solver handles.
    #[error("instance not in class {class}: {reason}")]
    NotInClass { class: &'static str, reason: String },

    #[error("enumeration budget exceeded: {0}")]
    Budget(String),

    #[error("cycle {cycle:?} has a non-empty label xor-sum")]
    CycleViolation { cycle: Vec<usize> },

    #[error("the instance has no genotypes")]
    EmptyKernel,

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
