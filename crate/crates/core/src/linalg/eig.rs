use nalgebra::linalg::{Schur, SymmetricEigen};
use nalgebra::{DMatrix, DVector};

use super::{condition_number, spectral_norm, LinalgError, Matrix, Result};
use crate::{Tolerances, C64};

const EIG_MAX_ITERATIONS: usize = 10_000;

/// Eigendecomposition `A = V Λ V*` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Unitary; column `k` belongs to `eigenvalues[k]`.
    pub vectors: Matrix,
    /// `‖A V − V Λ‖`.
    pub residual: f64,
}

impl HermitianEig {
    /// `V · diag(values) · V*`.
    pub fn reassemble(&self, values: &[C64]) -> Matrix {
        let v = self.vectors.as_dmatrix();
        let scaled = v * DMatrix::from_diagonal(&DVector::from_column_slice(values));
        Matrix::wrap(scaled * v.adjoint())
    }
}

/// Eigendecomposition `A = V Λ V⁻¹` of a diagonalizable matrix.
#[derive(Debug, Clone)]
pub struct GeneralEig {
    pub eigenvalues: Vec<C64>,
    /// Columns normalized to unit length.
    pub vectors: Matrix,
    /// Condition number of `vectors`.
    pub conditioning: f64,
    /// `‖A V − V Λ‖`.
    pub residual: f64,
}

fn hermitian_deviation(m: &Matrix) -> Result<f64> {
    spectral_norm(&(m - m.adjoint()))
}

/// Hermitian eigensolver. Eigenvalues come back in ascending order.
pub fn hermitian_eig(m: &Matrix, tol: &Tolerances) -> Result<HermitianEig> {
    if !m.is_square() {
        return Err(LinalgError::Shape(format!("hermitian_eig of a {:?} matrix", m.shape())));
    }
    let norm = spectral_norm(m)?;
    let deviation = hermitian_deviation(m)?;
    let allowed = tol.class * (1.0 + norm);
    if deviation > allowed {
        return Err(LinalgError::NotHermitian { deviation, allowed });
    }
    let a = m.as_dmatrix();
    let symmetrized = (a + a.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::try_new(symmetrized, f64::EPSILON, EIG_MAX_ITERATIONS)
        .ok_or(LinalgError::NoConvergence("Hermitian eigensolver"))?;

    let n = a.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);

    let lambda = DMatrix::from_diagonal(&DVector::from_iterator(
        n,
        eigenvalues.iter().map(|&x| C64::new(x, 0.0)),
    ));
    let residual = spectral_norm(&Matrix::wrap(a * &vectors - &vectors * lambda))?;
    let unitarity = spectral_norm(&Matrix::wrap(vectors.adjoint() * &vectors - DMatrix::identity(n, n)))?;
    if residual > tol.decomposition * (1.0 + norm) || unitarity > tol.unitarity {
        return Err(LinalgError::NoConvergence("Hermitian eigensolver"));
    }
    Ok(HermitianEig { eigenvalues, vectors: Matrix::wrap(vectors), residual })
}

/// Eigenvectors of an upper-triangular matrix by back substitution.
///
/// Near-zero pivots `T_ii − T_kk` are replaced by a floor of `ε‖T‖`, so a
/// defective matrix yields nearly parallel columns rather than a division by
/// zero; the caller detects that through the condition number.
fn triangular_eigenvectors(t: &DMatrix<C64>) -> DMatrix<C64> {
    let n = t.nrows();
    let scale = t.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let floor = (f64::EPSILON * scale).max(f64::MIN_POSITIVE);
    let mut x = DMatrix::<C64>::zeros(n, n);
    for k in 0..n {
        x[(k, k)] = C64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut acc = C64::new(0.0, 0.0);
            for j in (i + 1)..=k {
                acc += t[(i, j)] * x[(j, k)];
            }
            let mut pivot = t[(i, i)] - t[(k, k)];
            if pivot.norm() < floor {
                pivot = C64::new(floor, 0.0);
            }
            x[(i, k)] = -acc / pivot;
        }
        let len = x.column(k).norm();
        x.column_mut(k).unscale_mut(len);
    }
    x
}

/// General eigensolver via the complex Schur form.
///
/// Fails with [`LinalgError::NonDiagonalizable`] when the eigenvector matrix
/// is more ill-conditioned than `tol.defective_condition`.
pub fn general_eig(m: &Matrix, tol: &Tolerances) -> Result<GeneralEig> {
    if !m.is_square() {
        return Err(LinalgError::Shape(format!("general_eig of a {:?} matrix", m.shape())));
    }
    let norm = spectral_norm(m)?;
    let a = m.as_dmatrix();
    let (q, t) = Schur::try_new(a.clone(), f64::EPSILON, EIG_MAX_ITERATIONS)
        .ok_or(LinalgError::NoConvergence("complex Schur decomposition"))?
        .unpack();
    let n = a.nrows();
    let eigenvalues: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
    let mut vectors = &q * triangular_eigenvectors(&t);
    for mut col in vectors.column_iter_mut() {
        let len = col.norm();
        col.unscale_mut(len);
    }
    let vectors = Matrix::from_dmatrix(vectors)
        .map_err(|_| LinalgError::NonDiagonalizable { conditioning: f64::INFINITY })?;
    let conditioning = condition_number(&vectors)?;
    if !(conditioning <= tol.defective_condition) {
        return Err(LinalgError::NonDiagonalizable { conditioning });
    }
    let lambda = DMatrix::from_diagonal(&DVector::from_column_slice(&eigenvalues));
    let v = vectors.as_dmatrix();
    let residual = spectral_norm(&Matrix::wrap(a * v - v * lambda))?;
    if residual > tol.decomposition * conditioning * (1.0 + norm) {
        return Err(LinalgError::NoConvergence("general eigensolver"));
    }
    Ok(GeneralEig { eigenvalues, vectors, conditioning, residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted_re(v: &[C64]) -> Vec<f64> {
        let mut re: Vec<f64> = v.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        re
    }

    #[test]
    fn hermitian_diagonal_is_sorted() {
        let tol = Tolerances::default();
        let e = hermitian_eig(&Matrix::from_real_diagonal(&[2.0, 1.0]).unwrap(), &tol).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 2.0]);
        // columns are the swapped unit vectors, up to a unimodular phase
        assert!((e.vectors.get(1, 0).norm() - 1.0).abs() < 1e-15);
        assert!((e.vectors.get(0, 1).norm() - 1.0).abs() < 1e-15);
        assert!(e.vectors.get(0, 0).norm() < 1e-15);
    }

    #[test]
    fn hermitian_swap_matrix() {
        // det([[−λ,1],[1,−λ]]) = λ² − 1
        let tol = Tolerances::default();
        let m = Matrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let e = hermitian_eig(&m, &tol).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-15);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hermitian_zero() {
        let tol = Tolerances::default();
        let e = hermitian_eig(&Matrix::zeros(3, 3), &tol).unwrap();
        assert_eq!(e.eigenvalues, vec![0.0; 3]);
        assert_eq!(e.residual, 0.0);
    }

    #[test]
    fn hermitian_rejects_non_hermitian_and_rectangular() {
        let tol = Tolerances::default();
        let m = Matrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(hermitian_eig(&m, &tol), Err(LinalgError::NotHermitian { .. })));
        assert!(matches!(hermitian_eig(&Matrix::zeros(2, 3), &tol), Err(LinalgError::Shape(_))));
    }

    #[test]
    fn general_diagonal() {
        let tol = Tolerances::default();
        let e = general_eig(&Matrix::from_real_diagonal(&[1.0, 2.0]).unwrap(), &tol).unwrap();
        assert_eq!(sorted_re(&e.eigenvalues), vec![1.0, 2.0]);
        assert!((e.conditioning - 1.0).abs() < 1e-12);
    }

    #[test]
    fn general_nilpotent_is_defective() {
        let tol = Tolerances::default();
        let m = Matrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(general_eig(&m, &tol), Err(LinalgError::NonDiagonalizable { .. })));
    }

    #[test]
    fn general_upper_triangular() {
        // eigenvectors (1,0) and (1,1)/√2; V = [[1, 1/√2],[0, 1/√2]] has
        // singular values² = 1 ± 1/√2, so cond = √((1+1/√2)/(1−1/√2)) = 1 + √2.
        let tol = Tolerances::default();
        let m = Matrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 2.0]]).unwrap();
        let e = general_eig(&m, &tol).unwrap();
        let vals = sorted_re(&e.eigenvalues);
        assert!((vals[0] - 1.0).abs() < 1e-14 && (vals[1] - 2.0).abs() < 1e-14);
        assert!((e.conditioning - (1.0 + 2f64.sqrt())).abs() < 1e-10);
        assert!(e.residual < 1e-14);
    }

    #[test]
    fn general_repeated_eigenvalue_but_diagonalizable() {
        let tol = Tolerances::default();
        let e = general_eig(&Matrix::identity(3), &tol).unwrap();
        assert!((e.conditioning - 1.0).abs() < 1e-12);
    }
}
