use thiserror::Error;

/// Errors produced by the stability library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("parameter `{name}` = {value} out of range: {reason}")]
    ParameterRange {
        name: &'static str,
        value: f64,
        reason: String,
    },

    /// An iteration failed to converge or a bracket did not contain a root.
    #[error("numerical failure in {context}: {detail}")]
    NumericalFailure {
        context: &'static str,
        detail: String,
    },

    /// Input is structurally valid but carries no information (zero vector, zero matrix).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// Two computations that must agree do not; points at a discretization bug.
    #[error("internal consistency violated: {0}")]
    InternalConsistency(String),

    /// Malformed external dataset.
    #[error("could not ingest dataset, offending lines: {lines:?}: {detail}")]
    Ingestion { lines: Vec<usize>, detail: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn range(name: &'static str, value: f64, reason: impl Into<String>) -> Self {
        Error::ParameterRange {
            name,
            value,
            reason: reason.into(),
        }
    }

    pub(crate) fn numerical(context: &'static str, detail: impl Into<String>) -> Self {
        Error::NumericalFailure {
            context,
            detail: detail.into(),
        }
    }
}
