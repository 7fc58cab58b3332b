//! Dense complex matrices and the handful of factorizations the rest of the
//! crate needs: singular values (spectral norm, conditioning), Hermitian and
//! general eigendecompositions, and LU solves.
//!
//! The heavy lifting is delegated to `nalgebra`; this module owns the shape
//! and finiteness contracts, eigenvalue ordering, eigenvectors of the complex
//! Schur form, and all the acceptance checks on the factorizations.

mod class;
mod eig;
mod matrix;
mod norm;
mod solve;

use thiserror::Error;

pub use class::{classify, OperatorClass};
pub use eig::{general_eig, hermitian_eig, GeneralEig, HermitianEig};
pub use matrix::{vector_norm, Matrix};
pub use norm::{condition_number, singular_values, spectral_norm};
pub use solve::{inverse, solve};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is not Hermitian: ‖A − A*‖ = {deviation:e}, allowed {allowed:e}")]
    NotHermitian { deviation: f64, allowed: f64 },
    #[error("matrix is not diagonalizable to working precision: eigenvector condition {conditioning:e}")]
    NonDiagonalizable { conditioning: f64 },
    #[error("singular matrix: condition number {condition:e}")]
    Singular { condition: f64 },
    #[error("{0} failed to converge")]
    NoConvergence(&'static str),
}

pub type Result<T> = std::result::Result<T, LinalgError>;
