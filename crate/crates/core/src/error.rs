use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{op}: domain error: {msg}")]
    Domain { op: &'static str, msg: String },

    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{0}: point set is empty")]
    EmptySet(&'static str),

    #[error("{op}: cap scale alpha={alpha} (mode {mode}) is not supported here")]
    InvalidMode {
        op: &'static str,
        alpha: f64,
        mode: &'static str,
    },

    #[error("normalization error: {0}")]
    Normalization(String),

    #[error("{op}: size limit exceeded ({size} > {limit})")]
    SizeLimit {
        op: &'static str,
        size: usize,
        limit: usize,
    },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("internal consistency error: {0}")]
    InternalConsistency(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain { op, msg: msg.into() }
    }

    /// Stable short name used in machine-readable error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain { .. } => "domain",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::EmptySet(_) => "empty_set",
            Error::InvalidMode { .. } => "invalid_mode",
            Error::Normalization(_) => "normalization",
            Error::SizeLimit { .. } => "size_limit",
            Error::Degenerate(_) => "degenerate",
            Error::InternalConsistency(_) => "internal_consistency",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }
}
