use thiserror::Error;

/// Errors raised by system construction and analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GdmsError {
    /// Malformed system description.
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    /// Well-formed description that violates a structural requirement.
    #[error("{}{message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Validation { line: Option<usize>, message: String },

    /// Bad argument to an operation (unknown edge, negative parameter, ...).
    #[error("invalid input: {0}")]
    Input(String),

    /// Point outside the domain of the map being evaluated.
    #[error("domain error: {0}")]
    Domain(String),

    /// The analysis does not apply to this system (empty limit set, reducible matrix, ...).
    #[error("not applicable: {0}")]
    NotApplicable(String),

    /// The analysis is not implemented for this combination of family and incidence rule.
    #[error("unsupported analysis: {0}")]
    Unsupported(String),

    /// A partition sum or pressure is infinite.
    #[error("divergent: {0}")]
    Divergent(String),

    /// An enumeration or overflow guard was hit.
    #[error("resource limit exceeded: {what} (bound {bound})")]
    ResourceLimit { what: String, bound: u128 },
}

impl GdmsError {
    pub(crate) fn validation(line: Option<usize>, message: impl Into<String>) -> Self {
        GdmsError::Validation {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, GdmsError>;
