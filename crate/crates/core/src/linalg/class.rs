use serde::{Deserialize, Serialize};

use super::{general_eig, spectral_norm, LinalgError, Matrix, Result};
use crate::Tolerances;

/// Strongest structural class a square matrix belongs to, in the order
/// Hermitian > Normal > DiagonalizableGeneral > GeneralSquare.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OperatorClass {
    Hermitian,
    Normal,
    DiagonalizableGeneral,
    GeneralSquare,
}

/// Classifies `m`. `tol` is relative: Hermitian needs `‖A − A*‖ ≤ tol(1+‖A‖)`,
/// normal needs `‖AA* − A*A‖ ≤ tol(1+‖A‖)²`.
pub fn classify(m: &Matrix, tol: f64) -> Result<OperatorClass> {
    if !m.is_square() {
        return Err(LinalgError::Shape(format!("classify of a {:?} matrix", m.shape())));
    }
    let norm = spectral_norm(m)?;
    let adj = m.adjoint();
    if spectral_norm(&(m - &adj))? <= tol * (1.0 + norm) {
        return Ok(OperatorClass::Hermitian);
    }
    if spectral_norm(&(m * &adj - &adj * m))? <= tol * (1.0 + norm).powi(2) {
        return Ok(OperatorClass::Normal);
    }
    match general_eig(m, &Tolerances::default()) {
        Ok(_) => Ok(OperatorClass::DiagonalizableGeneral),
        Err(LinalgError::NonDiagonalizable { .. }) | Err(LinalgError::NoConvergence(_)) => {
            Ok(OperatorClass::GeneralSquare)
        }
        Err(e) => Err(e),
    }
}
