use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent input data.
    #[error("input error: {0}")]
    Input(String),

    /// A parameter outside its admissible range.
    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("vertex {vertex} has zero degree")]
    ZeroDegree { vertex: usize },

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    /// The local-correlation formula needs a mass-conserving heat kernel.
    #[error("not applicable: {0}")]
    Applicability(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// Process exit status: 1 usage, 2 numeric, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) | Error::Parameter(_) => 1,
            Error::ZeroDegree { .. }
            | Error::Degenerate(_)
            | Error::Numeric(_)
            | Error::Applicability(_) => 2,
            Error::Io { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
