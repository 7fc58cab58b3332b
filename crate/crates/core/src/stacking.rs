//! Two-block constructions on `X₁ ⊕ X₂`: direct sums, upper-right corner
//! embeddings, and unipotent corner matrices `[[I, c·S], [0, I]]`, plus the
//! checks that the Euclidean direct-sum norm has the stacking property.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{spectral_norm, vector_norm, LinalgError, Matrix};
use crate::{Tolerances, C64};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StackingError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("corner matrix failed its inverse check: ‖QQ⁻¹ − I‖ = {residual:e}")]
    CornerInverse { residual: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, StackingError>;

/// Dimensions of the two summands in `X₁ ⊕ X₂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSpec {
    pub top_dim: usize,
    pub bottom_dim: usize,
}

impl BlockSpec {
    pub fn new(top_dim: usize, bottom_dim: usize) -> Self {
        Self { top_dim, bottom_dim }
    }

    pub fn total(&self) -> usize {
        self.top_dim + self.bottom_dim
    }
}

fn paste(target: &mut Matrix, src: &Matrix, r0: usize, c0: usize) {
    target
        .inner_mut()
        .view_mut((r0, c0), src.shape())
        .copy_from(src.as_dmatrix());
}

/// `diag(a1, a2)`.
pub fn direct_sum(a1: &Matrix, a2: &Matrix) -> Result<Matrix> {
    if !a1.is_square() || !a2.is_square() {
        return Err(StackingError::Shape(format!(
            "direct sum needs square blocks, got {:?} and {:?}",
            a1.shape(),
            a2.shape()
        )));
    }
    let (n1, n2) = (a1.rows(), a2.rows());
    let mut out = Matrix::zeros(n1 + n2, n1 + n2);
    paste(&mut out, a1, 0, 0);
    paste(&mut out, a2, n1, n1);
    Ok(out)
}

/// `[[0, r], [0, 0]]` on `X₁ ⊕ X₂`.
pub fn embed_upper_right(r: &Matrix, spec: BlockSpec) -> Result<Matrix> {
    if r.shape() != (spec.top_dim, spec.bottom_dim) {
        return Err(StackingError::Shape(format!(
            "corner block {:?} does not fit {spec:?}",
            r.shape()
        )));
    }
    let mut out = Matrix::zeros(spec.total(), spec.total());
    paste(&mut out, r, 0, spec.top_dim);
    Ok(out)
}

fn unipotent(s: &Matrix, scale: C64) -> Matrix {
    let (top, bottom) = s.shape();
    let mut q = Matrix::identity(top + bottom);
    paste(&mut q, &s.scale(scale), 0, top);
    q
}

/// `[[I, scale·s], [0, I]]`, checked against its inverse `[[I, −scale·s], [0, I]]`.
///
/// `scale = −1` gives the corner matrix that turns a commutator with
/// `diag(A₁, A₂)` into the quasi-commutator `A₁S − SA₂`; `scale = ε⁻¹` with
/// `s = I` gives the shifted construction.
pub fn corner_q(s: &Matrix, scale: C64, tol: &Tolerances) -> Result<Matrix> {
    let q = unipotent(s, scale);
    let q_inv = unipotent(s, -scale);
    let n = q.rows();
    let residual = spectral_norm(&(&q * &q_inv - Matrix::identity(n)))?;
    if residual > tol.corner_inverse {
        return Err(StackingError::CornerInverse { residual });
    }
    Ok(q)
}

/// Measured outcome of the direct-sum norm conditions for one sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceStackingCheck {
    /// `|‖(x₁, 0)‖ − ‖x₁‖| / (1 + ‖x₁‖)`
    pub top_embedding_residual: f64,
    /// `‖(x₁, x₂)‖ − ‖x₂‖`, nonnegative when the condition holds.
    pub bottom_projection_margin: f64,
    /// `|‖[[0, R], [0, 0]]‖ − ‖R‖| / (1 + ‖R‖)`
    pub corner_norm_residual: f64,
    pub top_embedding_holds: bool,
    pub bottom_projection_holds: bool,
    pub corner_norm_holds: bool,
}

impl SpaceStackingCheck {
    pub fn holds(&self) -> bool {
        self.top_embedding_holds && self.bottom_projection_holds && self.corner_norm_holds
    }
}

/// Measures both vector conditions on `(x1, x2)` and the corner-norm identity
/// for `r: X₂ → X₁`. Violations are reported in the record, not as errors.
pub fn verify_space_stacking(r: &Matrix, x1: &[C64], x2: &[C64], tol: &Tolerances) -> Result<SpaceStackingCheck> {
    if x1.len() != r.rows() || x2.len() != r.cols() {
        return Err(StackingError::Shape(format!(
            "vectors of length {} and {} against a {:?} corner",
            x1.len(),
            x2.len(),
            r.shape()
        )));
    }
    let padded: Vec<C64> = x1.iter().copied().chain(std::iter::repeat_n(C64::new(0.0, 0.0), x2.len())).collect();
    let joined: Vec<C64> = x1.iter().chain(x2).copied().collect();
    let n1 = vector_norm(x1);
    let n2 = vector_norm(x2);

    let top_embedding_residual = (vector_norm(&padded) - n1).abs() / (1.0 + n1);
    let bottom_projection_margin = vector_norm(&joined) - n2;

    let r_norm = spectral_norm(r)?;
    let embedded = embed_upper_right(r, BlockSpec::new(r.rows(), r.cols()))?;
    let corner_norm_residual = (spectral_norm(&embedded)? - r_norm).abs() / (1.0 + r_norm);

    Ok(SpaceStackingCheck {
        top_embedding_residual,
        bottom_projection_margin,
        corner_norm_residual,
        top_embedding_holds: top_embedding_residual <= tol.stacking,
        bottom_projection_holds: bottom_projection_margin >= -tol.stacking * (1.0 + n2),
        corner_norm_holds: corner_norm_residual <= tol.stacking,
    })
}
