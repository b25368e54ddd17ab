use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent configuration (laws, options, JSON documents).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A geometric precondition does not hold.
    #[error("geometry error: {0}")]
    Geometry(String),

    /// The lattice at the requested mesh cannot represent the domain.
    #[error("mesh error: {0}")]
    Mesh(String),

    #[error("flow error: {0}")]
    Flow(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code used by the command line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Geometry(_) | Error::Mesh(_) => 3,
            _ => 2,
        }
    }
}

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

pub(crate) fn geometry(msg: impl Into<String>) -> Error {
    Error::Geometry(msg.into())
}

pub(crate) fn mesh(msg: impl Into<String>) -> Error {
    Error::Mesh(msg.into())
}
