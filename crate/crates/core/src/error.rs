use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot access {}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("skeleton mismatch: {0}")]
    SkeletonMismatch(String),

    #[error("frame {frame}: expected {expected} joints, found {found}")]
    Dimension {
        frame: usize,
        expected: usize,
        found: usize,
    },

    #[error("sequence too short: {found} frames, {required} required")]
    TooShort { found: usize, required: usize },

    #[error("joint `{joint}`: gap of {len} frames at [{start}, {end}] exceeds max_gap {max_gap}")]
    UnrecoverableGap {
        joint: String,
        start: usize,
        end: usize,
        len: usize,
        max_gap: usize,
    },

    #[error("joint `{joint}`: missing positions at sequence boundary, frames [{start}, {end}]")]
    BoundaryGap {
        joint: String,
        start: usize,
        end: usize,
    },

    #[error("role `{0}` is not mapped in the skeleton")]
    UnresolvedRole(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singular fit: {0}")]
    SingularFit(String),

    #[error("empty data: {0}")]
    EmptyData(String),

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("class `{class}` appears in {groups} groups, at least {k} required")]
    TooFewGroups {
        class: String,
        groups: usize,
        k: usize,
    },

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("unsupported format version `{0}`")]
    UnsupportedVersion(String),

    #[error("model has no cover counts")]
    MissingCover,

    #[error("model uses {found} distinct features, brute-force limit is {limit}")]
    TooManyFeatures { found: usize, limit: usize },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
