use thiserror::Error;

/// Errors surfaced by the library.
///
/// A failed axiom check is *not* an error: checkers return a
/// [`CheckReport`](crate::report::CheckReport) with a `fail` verdict and a
/// witness. `Error` is reserved for invalid inputs and for pipeline steps
/// that contradict a guarantee established earlier in the same run.
#[derive(Debug, Error)]
pub enum Error {
    /// Bad arguments, malformed files, or violated preconditions.
    #[error("input error: {0}")]
    Input(String),

    /// A construction contradicted a property that a checker certified,
    /// which points at a tolerance inconsistency rather than bad input.
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn inconsistency(msg: impl Into<String>) -> Self {
        Error::Inconsistency(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
