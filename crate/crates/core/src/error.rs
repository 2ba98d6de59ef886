use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path:?}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("mesh interior is disconnected into {} components (sizes {sizes:?})", sizes.len())]
    Disconnected { sizes: Vec<usize> },

    #[error("non-manifold face {vertices:?} shared by {count} tetrahedra")]
    NonManifold { vertices: [usize; 3], count: usize },

    #[error("label class {label} is not face-connected")]
    DisconnectedLabel { label: usize },

    #[error("empty isosurface at level {0}")]
    EmptyIsosurface(f64),

    #[error("requested {requested} modes but only {available} are available")]
    Dimension { requested: usize, available: usize },

    #[error("solver did not converge: {0}")]
    NonConvergence(String),

    #[error("shape is unfracturable: {0}")]
    Unfracturable(String),

    #[error("surface has zero area")]
    ZeroArea,

    #[error("surface is not closed: {0}")]
    OpenSurface(String),

    #[error("pattern {pattern} splits atomic piece {atomic}")]
    Refinement { pattern: usize, atomic: usize },

    #[error("archive error: {0}")]
    Archive(String),

    #[error("checksum mismatch in section {0}")]
    Checksum(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
