use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A point does not belong to the domain of a vector field.
    #[error("point is not in the domain of the vector field: {0}")]
    NotInDomain(String),

    /// An iterative numerical procedure did not reach its tolerance.
    #[error("numeric failure: {message}")]
    Numeric {
        message: String,
        /// Best estimate available when the procedure gave up.
        last_estimate: Option<f64>,
    },

    /// An experiment or schedule configuration is invalid.
    #[error("configuration error at `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn numeric(msg: impl Into<String>, last_estimate: Option<f64>) -> Self {
        Error::Numeric {
            message: msg.into(),
            last_estimate,
        }
    }

    pub fn config(field: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: msg.into(),
        }
    }

    /// True for failures of iterative solvers, as opposed to invalid input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::Numeric { .. })
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
