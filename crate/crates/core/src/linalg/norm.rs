use nalgebra::SVD;

use super::{LinalgError, Matrix, Result};

const SVD_MAX_ITERATIONS: usize = 10_000;

/// Singular values in descending order, from a full SVD.
pub fn singular_values(m: &Matrix) -> Result<Vec<f64>> {
    if !m.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let svd = SVD::try_new(m.as_dmatrix().clone(), false, false, f64::EPSILON, SVD_MAX_ITERATIONS)
        .ok_or(LinalgError::NoConvergence("singular value decomposition"))?;
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// Operator norm induced by the Euclidean vector norm: the largest singular value.
pub fn spectral_norm(m: &Matrix) -> Result<f64> {
    Ok(singular_values(m)?.first().copied().unwrap_or(0.0))
}

/// `σ_max / σ_min` for a square matrix; infinite when `σ_min` is zero.
pub fn condition_number(m: &Matrix) -> Result<f64> {
    if !m.is_square() {
        return Err(LinalgError::Shape(format!("condition number of a {:?} matrix", m.shape())));
    }
    let sv = singular_values(m)?;
    let max = sv[0];
    let min = *sv.last().unwrap();
    if max == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(if min == 0.0 { f64::INFINITY } else { max / min })
}
