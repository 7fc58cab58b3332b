//! Concrete bound functions `g` for commutator estimates and the two checks
//! that use them: the commutator hypothesis `‖Qf(A) − f(A)Q‖ ≤ g(‖QA − AQ‖)`
//! and its transfer `‖f(A₁)S − Sf(A₂)‖ ≤ g(‖A₁S − SA₂‖)` with the same `g`.
//!
//! Bounds are only constructed for polynomial (and affine) `f`, where the
//! telescoping identity `[Q, Aᵏ] = Σⱼ Aʲ [Q, A] A^{k−1−j}` gives
//! `‖[Q, p(A)]‖ ≤ (Σₖ |cₖ| k rᵏ⁻¹) ‖[Q, A]‖` whenever `‖A‖ ≤ r`. The slope
//! depends on the radius `r` only, never on `Q`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::funcalc::{apply_auto, apply_function, CalculusPath, FuncalcError, ScalarFunction};
use crate::linalg::{condition_number, spectral_norm, LinalgError, Matrix};
use crate::stacking::direct_sum;
use crate::stacking::StackingError;
use crate::{Tolerances, C64};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("no constructive bound for {0}")]
    Unsupported(String),
    #[error("invalid bound function: {0}")]
    InvalidBound(String),
    #[error("bound evaluated at {t} outside its table (max {max})")]
    OutOfRange { t: f64, max: f64 },
    #[error("operator norm {norm} exceeds the bound's radius {radius}")]
    RadiusNotCovered { norm: f64, radius: f64 },
    #[error("Q is not invertible to working precision (condition {condition:e})")]
    SingularQ { condition: f64 },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Funcalc(#[from] FuncalcError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Stacking(#[from] StackingError),
}

pub type Result<T> = std::result::Result<T, BoundsError>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum BoundForm {
    /// `t ↦ slope·t`
    Linear { slope: f64 },
    /// Piecewise-linear through `(t, g(t))` samples starting at `t = 0`.
    Tabulated { points: Vec<(f64, f64)> },
}

/// A nondecreasing `g: [0, ∞) → [0, ∞)`, valid for operators of norm at most
/// `radius` when one is recorded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundFunction {
    pub form: BoundForm,
    pub provenance: String,
    pub radius: Option<f64>,
}

impl BoundFunction {
    pub fn linear(slope: f64, provenance: impl Into<String>) -> Result<Self> {
        if !(slope.is_finite() && slope >= 0.0) {
            return Err(BoundsError::InvalidBound(format!("slope {slope}")));
        }
        Ok(Self { form: BoundForm::Linear { slope }, provenance: provenance.into(), radius: None })
    }

    pub fn tabulated(points: Vec<(f64, f64)>, provenance: impl Into<String>) -> Result<Self> {
        match points.first() {
            Some(&(t0, _)) if t0 == 0.0 => {}
            _ => return Err(BoundsError::InvalidBound("table must start at t = 0".into())),
        }
        for w in points.windows(2) {
            let ((t0, g0), (t1, g1)) = (w[0], w[1]);
            if !(t1 > t0) || g1 < g0 {
                return Err(BoundsError::InvalidBound(format!(
                    "table must be strictly increasing in t and nondecreasing in g near t = {t1}"
                )));
            }
        }
        if points.iter().any(|&(t, g)| !(t.is_finite() && g.is_finite() && g >= 0.0)) {
            return Err(BoundsError::InvalidBound("entries must be finite and g ≥ 0".into()));
        }
        Ok(Self { form: BoundForm::Tabulated { points }, provenance: provenance.into(), radius: None })
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = Some(radius);
        self
    }

    pub fn slope(&self) -> Option<f64> {
        match self.form {
            BoundForm::Linear { slope } => Some(slope),
            BoundForm::Tabulated { .. } => None,
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        match &self.form {
            BoundForm::Linear { slope } => Ok(slope * t),
            BoundForm::Tabulated { points } => {
                let max = points.last().unwrap().0;
                if !(0.0..=max).contains(&t) {
                    return Err(BoundsError::OutOfRange { t, max });
                }
                let k = points.partition_point(|&(ti, _)| ti <= t);
                if k == points.len() {
                    return Ok(points[k - 1].1);
                }
                let ((t0, g0), (t1, g1)) = (points[k - 1], points[k]);
                Ok(g0 + (g1 - g0) * (t - t0) / (t1 - t0))
            }
        }
    }

    fn covers(&self, norm: f64) -> Result<()> {
        match self.radius {
            Some(radius) if norm > radius * (1.0 + 1e-12) => Err(BoundsError::RadiusNotCovered { norm, radius }),
            _ => Ok(()),
        }
    }
}

/// Linear bound with slope `Σₖ |cₖ|·k·radius^{k−1}` for polynomial (or affine) `f`.
pub fn polynomial_g1(f: &ScalarFunction, radius: f64) -> Result<BoundFunction> {
    let coefficients = f
        .polynomial_coefficients()
        .ok_or_else(|| BoundsError::Unsupported(f.name().to_string()))?;
    if !(radius.is_finite() && radius >= 0.0) {
        return Err(BoundsError::InvalidBound(format!("radius {radius}")));
    }
    let slope: f64 = coefficients
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c.norm() * k as f64 * radius.powi(k as i32 - 1))
        .sum();
    Ok(BoundFunction::linear(
        slope,
        format!("telescoping commutator bound for {} on ‖A‖ ≤ {radius}", f.name()),
    )?
    .with_radius(radius))
}

/// `(‖Q f(A) − f(A) Q‖, |m|·‖QA − AQ‖)` for `f(z) = m z + f0`; the two agree
/// exactly in exact arithmetic because the constant term commutes.
pub fn affine_exactness(m: C64, f0: C64, q: &Matrix, a: &Matrix, tol: &Tolerances) -> Result<(f64, f64)> {
    if !q.is_square() || q.shape() != a.shape() {
        return Err(BoundsError::Shape(format!("Q {:?}, A {:?}", q.shape(), a.shape())));
    }
    let f = ScalarFunction::affine(m, f0);
    let fa = apply_function(&f, a, CalculusPath::PolynomialHornerPath, tol)?;
    let lhs = spectral_norm(&(q * &fa - &fa * q))?;
    let rhs = m.norm() * spectral_norm(&q.commutator(a)?)?;
    Ok((lhs, rhs))
}

/// Outcome of one `lhs ≤ g(argument)` comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub argument: f64,
    pub lhs: f64,
    pub g_value: f64,
    /// `g_value − lhs`
    pub margin: f64,
    pub slack: f64,
    pub satisfied: bool,
}

impl BoundCheck {
    pub fn new(argument: f64, lhs: f64, g_value: f64, tol: &Tolerances) -> Self {
        let margin = g_value - lhs;
        let slack = tol.slack * (1.0 + g_value);
        Self { argument, lhs, g_value, margin, slack, satisfied: margin >= -slack }
    }
}

/// Checks `‖Q f(A) − f(A) Q‖ ≤ g(‖QA − AQ‖)` for one invertible `Q`.
pub fn check_hypothesis(
    g: &BoundFunction,
    q: &Matrix,
    a: &Matrix,
    f: &ScalarFunction,
    tol: &Tolerances,
) -> Result<BoundCheck> {
    if !q.is_square() || q.shape() != a.shape() {
        return Err(BoundsError::Shape(format!("Q {:?}, A {:?}", q.shape(), a.shape())));
    }
    let condition = condition_number(q)?;
    if !(condition <= tol.singular_condition) {
        return Err(BoundsError::SingularQ { condition });
    }
    g.covers(spectral_norm(a)?)?;
    let fa = apply_auto(f, a, tol)?;
    let argument = spectral_norm(&q.commutator(a)?)?;
    let lhs = spectral_norm(&q.commutator(&fa)?)?;
    Ok(BoundCheck::new(argument, lhs, g.eval(argument)?, tol))
}

/// Checks `‖f(A₁)S − S f(A₂)‖ ≤ g(‖A₁S − SA₂‖)` with the same `g` that bounds
/// commutators on the stacked space.
pub fn check_transfer(
    g: &BoundFunction,
    a1: &Matrix,
    a2: &Matrix,
    s: &Matrix,
    f: &ScalarFunction,
    tol: &Tolerances,
) -> Result<BoundCheck> {
    if !a1.is_square() || !a2.is_square() || s.shape() != (a1.rows(), a2.rows()) {
        return Err(BoundsError::Shape(format!(
            "A₁ {:?}, A₂ {:?}, S {:?}",
            a1.shape(),
            a2.shape(),
            s.shape()
        )));
    }
    g.covers(spectral_norm(&direct_sum(a1, a2)?)?)?;
    let fa1 = apply_auto(f, a1, tol)?;
    let fa2 = apply_auto(f, a2, tol)?;
    let argument = spectral_norm(&(a1 * s - s * a2))?;
    let lhs = spectral_norm(&(&fa1 * s - s * &fa2))?;
    Ok(BoundCheck::new(argument, lhs, g.eval(argument)?, tol))
}
