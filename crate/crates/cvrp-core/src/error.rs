use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CvrpError {
    #[error("malformed instance file (line {line}): {message}")]
    MalformedFile { line: usize, message: String },

    #[error("unsupported EDGE_WEIGHT_TYPE {0:?}, only EUC_2D is handled")]
    UnsupportedEdgeWeightType(String),

    #[error("{section} has {found} entries but DIMENSION is {expected}")]
    InconsistentDimension {
        section: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("best-known cost must be positive, got {0}")]
    NonPositiveBks(f64),

    #[error("route has no visits")]
    EmptyRoute,

    #[error("malformed BKS registry (line {line}): {message}")]
    MalformedRegistry { line: usize, message: String },
}

impl CvrpError {
    pub(crate) fn malformed(line: usize, message: impl Into<String>) -> Self {
        CvrpError::MalformedFile {
            line,
            message: message.into(),
        }
    }
}
