//! Scalar function catalog and the matrix functional calculus `A ↦ f(A)`.
//!
//! Three evaluation paths are available: spectral (`V f(Λ) V*`) for Hermitian
//! input, eigenvector similarity (`V f(Λ) V⁻¹`) for diagonalizable input, and
//! Horner's scheme for polynomials, which works on any square matrix.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, general_eig, hermitian_eig, inverse, spectral_norm, LinalgError, Matrix};
use crate::stacking;
use crate::{Tolerances, C64};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FuncalcError {
    #[error("{function} is undefined at {value}")]
    Domain { function: String, value: C64 },
    #[error("{path} path unavailable: {reason}")]
    Path { path: CalculusPath, reason: String },
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Stacking(#[from] stacking::StackingError),
}

pub type Result<T> = std::result::Result<T, FuncalcError>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Builtin {
    Exp,
    Sin,
    Sqrt,
    Abs,
    Identity,
    /// `z ↦ m·z + f0`
    Affine { m: C64, f0: C64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionKind {
    /// Coefficients in ascending degree.
    Polynomial(Vec<C64>),
    Builtin(Builtin),
}

/// Where on the complex plane a function may be evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Entire,
    NonNegativeReal,
    Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarFunction {
    name: String,
    kind: FunctionKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CalculusPath {
    HermitianEigPath,
    DiagonalizablePath,
    PolynomialHornerPath,
}

impl fmt::Display for CalculusPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CalculusPath::HermitianEigPath => "Hermitian eigen",
            CalculusPath::DiagonalizablePath => "diagonalizable",
            CalculusPath::PolynomialHornerPath => "polynomial Horner",
        })
    }
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

impl ScalarFunction {
    pub fn polynomial(name: impl Into<String>, coefficients: Vec<C64>) -> Result<Self> {
        match coefficients.last() {
            None => return Err(FuncalcError::InvalidPolynomial("no coefficients".into())),
            Some(c) if coefficients.len() > 1 && *c == C64::new(0.0, 0.0) => {
                return Err(FuncalcError::InvalidPolynomial("leading coefficient is zero".into()))
            }
            _ => {}
        }
        if coefficients.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(FuncalcError::InvalidPolynomial("non-finite coefficient".into()));
        }
        Ok(Self { name: name.into(), kind: FunctionKind::Polynomial(coefficients) })
    }

    pub fn builtin(builtin: Builtin) -> Self {
        let name = match builtin {
            Builtin::Exp => "exp".to_string(),
            Builtin::Sin => "sin".to_string(),
            Builtin::Sqrt => "sqrt".to_string(),
            Builtin::Abs => "abs".to_string(),
            Builtin::Identity => "identity".to_string(),
            Builtin::Affine { m, f0 } => format!("affine:{m},{f0}"),
        };
        Self { name, kind: FunctionKind::Builtin(builtin) }
    }

    pub fn identity() -> Self {
        Self::builtin(Builtin::Identity)
    }

    pub fn exp() -> Self {
        Self::builtin(Builtin::Exp)
    }

    pub fn sin() -> Self {
        Self::builtin(Builtin::Sin)
    }

    pub fn sqrt() -> Self {
        Self::builtin(Builtin::Sqrt)
    }

    pub fn abs() -> Self {
        Self::builtin(Builtin::Abs)
    }

    pub fn affine(m: C64, f0: C64) -> Self {
        Self::builtin(Builtin::Affine { m, f0 })
    }

    /// `x²`
    pub fn square() -> Self {
        Self::polynomial("square", vec![real(0.0), real(0.0), real(1.0)]).unwrap()
    }

    /// `3x² + x`
    pub fn quadratic() -> Self {
        Self::polynomial("quadratic", vec![real(0.0), real(1.0), real(3.0)]).unwrap()
    }

    /// Named catalog entries, in a fixed order.
    pub fn catalog() -> Vec<ScalarFunction> {
        let mut affine = Self::affine(C64::new(2.0, 1.0), real(0.5));
        affine.name = "affine".into();
        vec![
            Self::identity(),
            Self::square(),
            Self::quadratic(),
            Self::exp(),
            Self::sin(),
            Self::sqrt(),
            Self::abs(),
            affine,
        ]
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &FunctionKind {
        &self.kind
    }

    pub fn domain(&self) -> Domain {
        match self.kind {
            FunctionKind::Builtin(Builtin::Sqrt) => Domain::NonNegativeReal,
            FunctionKind::Builtin(Builtin::Abs) => Domain::Real,
            _ => Domain::Entire,
        }
    }

    /// Ascending coefficients when `f` is a polynomial in disguise
    /// (identity and affine included).
    pub fn polynomial_coefficients(&self) -> Option<Vec<C64>> {
        match &self.kind {
            FunctionKind::Polynomial(c) => Some(c.clone()),
            FunctionKind::Builtin(Builtin::Identity) => Some(vec![real(0.0), real(1.0)]),
            FunctionKind::Builtin(Builtin::Affine { m, f0 }) => Some(vec![*f0, *m]),
            FunctionKind::Builtin(_) => None,
        }
    }

    pub fn is_polynomial(&self) -> bool {
        self.polynomial_coefficients().is_some()
    }
}

impl FromStr for ScalarFunction {
    type Err = FuncalcError;

    /// Accepts catalog names, `poly:c0,c1,...` (ascending, complex literals
    /// such as `2+1i` allowed) and `affine:m,f0`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse_list = |body: &str| -> Result<Vec<C64>> {
            body.split(',')
                .map(|t| {
                    C64::from_str(t.trim())
                        .map_err(|_| FuncalcError::UnknownFunction(format!("{s}: bad coefficient `{t}`")))
                })
                .collect()
        };
        if let Some(body) = s.strip_prefix("poly:") {
            return Self::polynomial(s, parse_list(body)?);
        }
        if let Some(body) = s.strip_prefix("affine:") {
            let c = parse_list(body)?;
            if c.len() != 2 {
                return Err(FuncalcError::UnknownFunction(format!("{s}: expected affine:m,f0")));
            }
            let mut f = Self::affine(c[0], c[1]);
            f.name = s.to_string();
            return Ok(f);
        }
        Self::catalog()
            .into_iter()
            .find(|f| f.name == s)
            .ok_or_else(|| FuncalcError::UnknownFunction(s.to_string()))
    }
}

/// Evaluates `f(z)`. Real-domain functions accept values within
/// `tol.domain_slack` of their domain and clamp them onto it.
pub fn eval_scalar(f: &ScalarFunction, z: C64, tol: &Tolerances) -> Result<C64> {
    let slack = tol.domain_slack;
    let violation = || FuncalcError::Domain { function: f.name.clone(), value: z };
    match &f.kind {
        FunctionKind::Polynomial(c) => Ok(c.iter().rev().fold(real(0.0), |acc, &ck| acc * z + ck)),
        FunctionKind::Builtin(b) => match *b {
            Builtin::Identity => Ok(z),
            Builtin::Affine { m, f0 } => Ok(m * z + f0),
            Builtin::Exp => Ok(z.exp()),
            Builtin::Sin => Ok(z.sin()),
            Builtin::Sqrt => {
                if z.im.abs() > slack || z.re < -slack {
                    return Err(violation());
                }
                Ok(real(z.re.max(0.0).sqrt()))
            }
            Builtin::Abs => {
                if z.im.abs() > slack {
                    return Err(violation());
                }
                Ok(real(z.re.abs()))
            }
        },
    }
}

fn eval_all(f: &ScalarFunction, values: impl Iterator<Item = C64>, tol: &Tolerances) -> Result<Vec<C64>> {
    values.map(|z| eval_scalar(f, z, tol)).collect()
}

fn horner(coefficients: &[C64], a: &Matrix) -> Matrix {
    let n = a.rows();
    let (&lead, rest) = coefficients.split_last().expect("nonempty coefficients");
    let mut acc = Matrix::identity(n).scale(lead);
    for &c in rest.iter().rev() {
        acc = (&acc * a).shift(c);
    }
    acc
}

/// Computes `f(a)` along the requested path.
pub fn apply_function(f: &ScalarFunction, a: &Matrix, path: CalculusPath, tol: &Tolerances) -> Result<Matrix> {
    if !a.is_square() {
        return Err(LinalgError::Shape(format!("f(A) of a {:?} matrix", a.shape())).into());
    }
    let out = match path {
        CalculusPath::HermitianEigPath => {
            let eig = hermitian_eig(a, tol).map_err(|e| match e {
                LinalgError::NotHermitian { .. } => FuncalcError::Path { path, reason: e.to_string() },
                other => other.into(),
            })?;
            let values = eval_all(f, eig.eigenvalues.iter().map(|&x| real(x)), tol)?;
            eig.reassemble(&values)
        }
        CalculusPath::DiagonalizablePath => {
            let eig = general_eig(a, tol).map_err(|e| match e {
                LinalgError::NonDiagonalizable { .. } => FuncalcError::Path { path, reason: e.to_string() },
                other => other.into(),
            })?;
            let values = eval_all(f, eig.eigenvalues.iter().copied(), tol)?;
            let v = &eig.vectors;
            let d = Matrix::from_diagonal(&values)?;
            v * d * inverse(v, tol)?
        }
        CalculusPath::PolynomialHornerPath => {
            let coefficients = f.polynomial_coefficients().ok_or_else(|| FuncalcError::Path {
                path,
                reason: format!("{} is not a polynomial", f.name),
            })?;
            horner(&coefficients, a)
        }
    };
    if !out.is_finite() {
        return Err(LinalgError::NonFinite.into());
    }
    Ok(out)
}

/// Picks the most exact path available: Horner for polynomials, spectral for
/// Hermitian input, eigenvector similarity otherwise.
pub fn preferred_path(f: &ScalarFunction, a: &Matrix, tol: &Tolerances) -> Result<CalculusPath> {
    if f.is_polynomial() {
        return Ok(CalculusPath::PolynomialHornerPath);
    }
    let norm = spectral_norm(a)?;
    let hermitian = a.is_square() && spectral_norm(&(a - a.adjoint()))? <= tol.class * (1.0 + norm);
    Ok(if hermitian {
        CalculusPath::HermitianEigPath
    } else {
        CalculusPath::DiagonalizablePath
    })
}

/// `apply_function` along [`preferred_path`].
pub fn apply_auto(f: &ScalarFunction, a: &Matrix, tol: &Tolerances) -> Result<Matrix> {
    let path = preferred_path(f, a, tol)?;
    apply_function(f, a, path, tol)
}

/// Evaluates `f` on the stacked matrix `diag(a1, a2)` as a whole.
pub fn apply_block_diagonal(
    f: &ScalarFunction,
    a1: &Matrix,
    a2: &Matrix,
    path: CalculusPath,
    tol: &Tolerances,
) -> Result<Matrix> {
    let stacked = stacking::direct_sum(a1, a2)?;
    apply_function(f, &stacked, path, tol)
}

/// `‖f(diag(a1,a2)) − diag(f(a1), f(a2))‖ / (1 + ‖f(a1)‖ + ‖f(a2)‖)`.
pub fn block_diagonal_residual(
    f: &ScalarFunction,
    a1: &Matrix,
    a2: &Matrix,
    path: CalculusPath,
    tol: &Tolerances,
) -> Result<f64> {
    let stacked = apply_block_diagonal(f, a1, a2, path, tol)?;
    let f1 = apply_function(f, a1, path, tol)?;
    let f2 = apply_function(f, a2, path, tol)?;
    let parts = stacking::direct_sum(&f1, &f2)?;
    let gap = linalg::spectral_norm(&(&stacked - &parts))?;
    Ok(gap / (1.0 + spectral_norm(&f1)? + spectral_norm(&f2)?))
}
