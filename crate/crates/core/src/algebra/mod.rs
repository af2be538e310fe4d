//! Exact arithmetic: rationals, univariate and multivariate polynomials,
//! resultants, real root isolation and simple real number fields.

pub mod bipoly;
pub mod multipoly;
pub mod numfield;
pub mod rat;
pub mod unipoly;

pub use bipoly::BiPoly;
pub use multipoly::MultiPoly;
pub use numfield::{AlgNum, Generator};
pub use rat::Rat;
pub use unipoly::{RealRoot, RootIsolation, UniPoly};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("cannot parse number: {0:?}")]
    Parse(String),
    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("expected {expected} variables, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("both polynomials are constant in variable x{0}")]
    ConstantInVariable(usize),
    #[error("polynomial involves more than one variable")]
    NotUnivariate,
    #[error("relation is not monic in the reduction variable")]
    NotMonic,
    #[error("invalid algebraic generator: {0}")]
    BadGenerator(String),
    #[error("division by zero")]
    DivisionByZero,
}
