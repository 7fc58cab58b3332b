use super::{condition_number, LinalgError, Matrix, Result};
use crate::Tolerances;

/// Solves `a·x = b` by LU with partial pivoting.
///
/// Systems whose condition number exceeds `tol.singular_condition` are
/// rejected as singular.
pub fn solve(a: &Matrix, b: &Matrix, tol: &Tolerances) -> Result<Matrix> {
    if !a.is_square() || b.rows() != a.rows() {
        return Err(LinalgError::Shape(format!(
            "solve with a {:?} and b {:?}",
            a.shape(),
            b.shape()
        )));
    }
    if !b.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let condition = condition_number(a)?;
    if !(condition <= tol.singular_condition) {
        return Err(LinalgError::Singular { condition });
    }
    let x = a
        .as_dmatrix()
        .clone()
        .lu()
        .solve(b.as_dmatrix())
        .ok_or(LinalgError::Singular { condition })?;
    Matrix::from_dmatrix(x)
}

pub fn inverse(a: &Matrix, tol: &Tolerances) -> Result<Matrix> {
    if !a.is_square() {
        return Err(LinalgError::Shape(format!("inverse of a {:?} matrix", a.shape())));
    }
    solve(a, &Matrix::identity(a.rows()), tol)
}
