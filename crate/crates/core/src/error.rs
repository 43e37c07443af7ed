use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("cannot parse {what} {input:?}: {reason}")]
    Parse {
        what: &'static str,
        input: String,
        reason: String,
    },

    #[error("group order (at least {order}) exceeds the configured maximum {max}")]
    GroupTooLarge { order: usize, max: usize },

    #[error("lattice too large: group order {order} exceeds the subgroup-lattice bound {max}")]
    LatticeTooLarge { order: usize, max: usize },

    #[error("invalid setup: {0}")]
    InvalidSetup(String),

    #[error("index {index} out of range for a tuple of size {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("no fit: {0}")]
    NoFit(String),

    #[error("not stabilized: {0}")]
    NotStabilized(String),

    #[error("inconsistent data: {0}")]
    Inconsistent(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(what: &'static str, input: &str, reason: impl Into<String>) -> Self {
        Error::Parse {
            what,
            input: input.to_string(),
            reason: reason.into(),
        }
    }
}
