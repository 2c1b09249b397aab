use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("edge bitmap has length {got}, graph has {expected} edges")]
    LengthMismatch { expected: u64, got: u64 },

    #[error("samples belong to different host graphs")]
    HostMismatch,

    #[error("graph is disconnected")]
    Disconnected,

    #[error("graph is not regular")]
    NotRegular,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("infeasible construction: {0}")]
    Infeasible(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("bad generator spec `{spec}`: {msg}")]
    Spec { spec: String, msg: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
