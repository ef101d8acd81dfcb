use thiserror::Error;

/// Every failure the lab can report.
///
/// The variants fall into the four buckets the command line maps onto exit
/// codes: usage/parse problems, resource refusals, failed inequality checks
/// and plain runtime errors.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("invalid group parameters: {0}")]
    Semantic(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("refusing {what}: size {size} exceeds cap {cap}")]
    Refused { what: String, size: u128, cap: u128 },

    #[error("generating set does not generate the group: reached a subgroup of order {reached} (group order {order})")]
    NotGenerating { reached: u128, order: u128 },

    #[error("ball enumeration truncated at radius {radius} before reaching radius {needed}")]
    Truncated { radius: usize, needed: usize },

    #[error("subgroup oracle is inconsistent: {0}")]
    OracleInconsistent(String),

    #[error("subgroup is not normal: {0}")]
    NotNormal(String),

    #[error("group is not nilpotent within {0} steps of the lower central series")]
    NotNilpotent(usize),

    #[error("eigensolver did not converge (best residual {residual:e}): {detail}")]
    NoConvergence { residual: f64, detail: String },

    #[error("check failed: {name}: {detail}")]
    CheckFailed { name: String, detail: String },

    #[error("invalid element: {0}")]
    InvalidElement(String),

    #[error("decode error: {0}")]
    Decode(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl LabError {
    pub(crate) fn syntax(offset: usize, message: impl Into<String>) -> Self {
        LabError::Syntax {
            offset,
            message: message.into(),
        }
    }

    /// Exit code used by the command line for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Syntax { .. } | LabError::Semantic(_) | LabError::Unsupported(_) => 2,
            LabError::Refused { .. } | LabError::Truncated { .. } => 3,
            LabError::CheckFailed { .. } => 1,
            _ => 1,
        }
    }
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;
