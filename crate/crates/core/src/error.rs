use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument fell outside the region where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration value violates a constraint.
    #[error("invalid config: {key}: {constraint}")]
    Config { key: String, constraint: String },

    /// A config file could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// The raw-basis regularization phase hit a node of the mode.
    #[error("singular theta gradient at node x = {x}")]
    Singularity { x: f64 },

    #[error("step-size error: {0}")]
    StepSize(String),

    #[error("numerical blow-up at step {step} (t = {t})")]
    Blowup { step: usize, t: f64 },

    /// Grid or sample mismatch between two fields being compared.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("undefined profile width: field integrates to zero")]
    UndefinedWidth,

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(key: impl Into<String>, constraint: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            constraint: constraint.into(),
        }
    }

    /// True for errors caused by user configuration rather than numerics.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Config { .. } | Error::Parse { .. } | Error::Usage(_) | Error::Io(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
