use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building or running a walk.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("state has zero norm")]
    ZeroState,

    #[error("invalid basis label: {0}")]
    Label(String),

    #[error("invalid arena: {0}")]
    Arena(String),

    #[error("state spaces do not match: {0}")]
    SpaceMismatch(String),

    #[error("measurement basis is not orthonormal: {0}")]
    Basis(String),

    #[error("measurement basis does not cover the state support (missing weight {missing:.3e})")]
    Coverage { missing: f64 },

    #[error("operator is not unitary (defect {defect:.3e})")]
    Unitarity { defect: f64 },

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("invalid target: {0}")]
    Target(String),

    #[error("invalid method: {0}")]
    Method(String),

    #[error("parity requirement violated: {0}")]
    Parity(String),

    #[error("coprimality requirement violated: {0}")]
    Coprimality(String),

    #[error("dense dimension {dim} exceeds the limit {limit}")]
    Size { dim: usize, limit: usize },

    #[error("no recovery exists: {0}")]
    Infeasible(String),
}

impl Error {
    /// True for errors caused by inadmissible parameters rather than by the
    /// engine itself.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::ZeroState
                | Error::Label(_)
                | Error::Arena(_)
                | Error::Target(_)
                | Error::Method(_)
                | Error::Parity(_)
                | Error::Coprimality(_)
                | Error::Contract(_)
        )
    }
}
