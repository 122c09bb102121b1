use std::path::PathBuf;

/// Errors produced anywhere in the chain-mapping pipeline.
///
/// Every variant maps onto one of the three exit categories used by the
/// command-line front end, see [`Error::exit_code`].
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter is out of range or inconsistent. `path` names the
    /// offending parameter (e.g. `spectral.params.gamma`).
    #[error("invalid parameter `{path}`: {message}")]
    Parameter { path: String, message: String },

    /// The configuration document could not be parsed.
    #[error("config error: {0}")]
    Config(String),

    /// A mathematical precondition failed (e.g. a logarithm of a
    /// nonpositive population, a divergent integral).
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical procedure failed to reach its tolerance.
    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Serialization(String),
}

impl Error {
    pub fn parameter(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parameter {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 1 config, 2 numerical, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parameter { .. } | Error::Config(_) => 1,
            Error::Domain(_) | Error::Numerical(_) => 2,
            Error::Io { .. } | Error::Serialization(_) => 3,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
