use crate::algebra::AlgebraError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("degenerate system: {0}")]
    Degenerate(String),
    #[error("series procedure found g = 0 up to order {cutoff}")]
    DegenerateBeyondCutoff { cutoff: usize },
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("unclassified invariant tuple {0}")]
    Unclassified(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("invalid data: {0}")]
    Data(String),
}

pub type Result<T> = std::result::Result<T, Error>;
