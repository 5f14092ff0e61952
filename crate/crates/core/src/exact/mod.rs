//! Exact arithmetic shared by the lattice, torsion and cohomology code.

pub mod cyclotomic;
pub mod frac;
pub mod intmat;
pub mod poly;

pub use cyclotomic::{Cyclo, CyclotomicField};
pub use frac::Frac;
pub use intmat::IntMatrix;
pub use poly::Poly;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is not unimodular")]
    NotUnimodular,
    #[error("division by zero")]
    DivisionByZero,
}
