pub mod algebra;
pub mod atlas;
pub mod bifurcation;
pub mod classify;
pub mod error;
pub mod infinity;
pub mod portrait;
pub mod qsystem;
pub mod singular;

pub use error::{Error, Result};
