use thiserror::Error;

/// Crate-wide error type. `Input` covers malformed instances and bad
/// arguments, `SolverLimit` covers node/iteration caps that left a solver
/// without a proven answer, and `Invariant` flags internal bugs (a stage
/// produced a state that violates its own contract).
#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("solver limit reached: {0}")]
    SolverLimit(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
