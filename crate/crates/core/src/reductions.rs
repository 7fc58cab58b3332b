//! Block constructions that turn quasi-commutators into commutators.
//!
//! With `Q = [[I, −S], [0, I]]` and `A = diag(A₁, A₂)` the commutator
//! `Q f(A) − f(A) Q` is exactly `[[0, f(A₁)S − S f(A₂)], [0, 0]]`, and the same
//! holds with `f` replaced by the identity. Conjugating `A` by `Q` instead gives
//! `B = [[A₁, A₁S − SA₂], [0, A₂]]`, whose `f(B)` carries the quasi-commutator
//! in its corner. The shift construction uses `Q_ε = [[I, ε⁻¹I], [0, I]]` on
//! `diag(A₁, A₁ + εI)` to produce a difference quotient of `f`.
//!
//! Each operation materializes every block, measures every identity, and
//! returns a [`ReductionWitness`].

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::BoundCheck;
use crate::funcalc::{apply_auto, apply_function, CalculusPath, FuncalcError, ScalarFunction};
use crate::linalg::{condition_number, solve, spectral_norm, LinalgError, Matrix};
use crate::stacking::{corner_q, direct_sum, embed_upper_right, BlockSpec, StackingError};
use crate::{Tolerances, C64};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReductionError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("shift ε must be nonzero")]
    DegenerateShift,
    #[error("operators do not commute: ‖A₁A₂ − A₂A₁‖ = {commutator:e}, allowed {allowed:e}")]
    NotCommuting { commutator: f64, allowed: f64 },
    #[error("A₁ − A₂ is singular to working precision (condition {condition:e})")]
    SingularDifference { condition: f64 },
    #[error(transparent)]
    Funcalc(#[from] FuncalcError),
    #[error(transparent)]
    Stacking(#[from] StackingError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, ReductionError>;

/// Which construction produced a witness. Tags follow the CLI suite names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Theorem {
    /// Quasi-commutator bound from a commutator bound via the corner `Q`.
    Thm1,
    /// Difference quotient from the shifted corner `Q_ε`.
    Thm3,
    /// Quasi-commutator bound from a Lipschitz bound via `B = Q A Q⁻¹`.
    Thm4,
    /// `S = (A₁ − A₂)⁻¹` for commuting `A₁`, `A₂`.
    CommutingCorollary,
}

/// A measured residual next to the threshold it is judged against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub value: f64,
    pub limit: f64,
}

impl Residual {
    pub fn new(value: f64, limit: f64) -> Self {
        Self { value, limit }
    }

    pub fn holds(&self) -> bool {
        self.value <= self.limit
    }
}

#[derive(Debug, Clone)]
pub struct WitnessInputs {
    pub a1: Matrix,
    pub a2: Option<Matrix>,
    pub s: Option<Matrix>,
    pub eps: Option<C64>,
    pub function: ScalarFunction,
}

#[derive(Debug, Clone)]
pub struct Constructed {
    pub q: Matrix,
    pub a_stacked: Matrix,
    pub b: Option<Matrix>,
}

/// Everything one instance of a construction produced.
#[derive(Debug, Clone)]
pub struct ReductionWitness {
    pub theorem: Theorem,
    pub inputs: WitnessInputs,
    pub constructed: Constructed,
    /// Named residuals, each already divided by `1 + ‖expected block‖`.
    pub residuals: BTreeMap<&'static str, Residual>,
    /// The residual of the construction's main block identity.
    pub structural_residual: f64,
    pub commutator_norm: f64,
    pub quasi_norm: f64,
    pub bound_check: Option<BoundCheck>,
    /// Why an independent route could not be evaluated, if it could not.
    pub oracle_unavailable: Option<String>,
}

impl ReductionWitness {
    /// All measured identities are within their limits.
    pub fn identity_verified(&self) -> bool {
        self.residuals.values().all(Residual::holds)
    }

    pub fn failing(&self) -> Vec<&'static str> {
        self.residuals
            .iter()
            .filter(|(_, r)| !r.holds())
            .map(|(&k, _)| k)
            .collect()
    }
}

fn relative_gap(actual: &Matrix, expected: &Matrix) -> Result<f64> {
    Ok(spectral_norm(&(actual - expected))? / (1.0 + spectral_norm(expected)?))
}

fn norm_gap(measured: f64, reference: f64) -> f64 {
    (measured - reference).abs() / (1.0 + reference)
}

fn check_pair_shapes(a1: &Matrix, a2: &Matrix, s: &Matrix) -> Result<()> {
    if !a1.is_square() || !a2.is_square() || s.shape() != (a1.rows(), a2.rows()) {
        return Err(ReductionError::Shape(format!(
            "A₁ {:?}, A₂ {:?}, S {:?}",
            a1.shape(),
            a2.shape(),
            s.shape()
        )));
    }
    Ok(())
}

fn neg_one() -> C64 {
    C64::new(-1.0, 0.0)
}

/// Corner construction for `f(A₁)S − S f(A₂)`.
pub fn thm1_reduce(a1: &Matrix, a2: &Matrix, s: &Matrix, f: &ScalarFunction, tol: &Tolerances) -> Result<ReductionWitness> {
    check_pair_shapes(a1, a2, s)?;
    let spec = BlockSpec::new(a1.rows(), a2.rows());
    let q = corner_q(s, neg_one(), tol)?;
    let a = direct_sum(a1, a2)?;

    let fa = apply_auto(f, &a, tol)?;
    let fa1 = apply_auto(f, a1, tol)?;
    let fa2 = apply_auto(f, a2, tol)?;

    let quasi_block = &fa1 * s - s * &fa2;
    let comm_block = a1 * s - s * a2;
    let quasi_norm = spectral_norm(&quasi_block)?;
    let commutator_norm = spectral_norm(&comm_block)?;

    let f_commutator = fa.commutator(&q).map(|m| -m)?;
    let commutator = a.commutator(&q).map(|m| -m)?;
    let f_side = relative_gap(&f_commutator, &embed_upper_right(&quasi_block, spec)?)?;
    let plain_side = relative_gap(&commutator, &embed_upper_right(&comm_block, spec)?)?;

    let mut residuals = BTreeMap::new();
    residuals.insert("f_side_identity", Residual::new(f_side, tol.structural));
    residuals.insert("commutator_identity", Residual::new(plain_side, tol.structural));
    residuals.insert(
        "quasi_norm_bridge",
        Residual::new(norm_gap(spectral_norm(&f_commutator)?, quasi_norm), tol.norm_bridge),
    );
    residuals.insert(
        "commutator_norm_bridge",
        Residual::new(norm_gap(spectral_norm(&commutator)?, commutator_norm), tol.norm_bridge),
    );

    Ok(ReductionWitness {
        theorem: Theorem::Thm1,
        inputs: WitnessInputs {
            a1: a1.clone(),
            a2: Some(a2.clone()),
            s: Some(s.clone()),
            eps: None,
            function: f.clone(),
        },
        constructed: Constructed { q, a_stacked: a, b: None },
        residuals,
        structural_residual: f_side,
        commutator_norm,
        quasi_norm,
        bound_check: None,
        oracle_unavailable: None,
    })
}

/// Shifted corner construction on `diag(A₁, A₁ + εI)`.
pub fn thm3_construct(a1: &Matrix, eps: C64, f: &ScalarFunction, tol: &Tolerances) -> Result<ReductionWitness> {
    if !a1.is_square() {
        return Err(ReductionError::Shape(format!("A₁ {:?}", a1.shape())));
    }
    if eps == C64::new(0.0, 0.0) {
        return Err(ReductionError::DegenerateShift);
    }
    let n = a1.rows();
    let spec = BlockSpec::new(n, n);
    let identity = Matrix::identity(n);
    let inv = eps.inv();
    let shifted = a1.shift(eps);
    let q = corner_q(&identity, inv, tol)?;
    let a = direct_sum(a1, &shifted)?;

    let commutator = a.commutator(&q).map(|m| -m)?;
    let corner = relative_gap(&commutator, &embed_upper_right(&identity, spec)?)?;

    let fa = apply_auto(f, &a, tol)?;
    let f1 = apply_auto(f, a1, tol)?;
    let f2 = apply_auto(f, &shifted, tol)?;
    let quotient = (&f2 - &f1).scale(inv);
    let f_commutator = fa.commutator(&q).map(|m| -m)?;
    let f_side = relative_gap(&f_commutator, &embed_upper_right(&quotient, spec)?)?;

    let quasi_norm = spectral_norm(&quotient)?;
    let identity_norm = spectral_norm(&identity)?;

    let mut residuals = BTreeMap::new();
    residuals.insert("corner_identity", Residual::new(corner, tol.corner_identity));
    residuals.insert("f_side_identity", Residual::new(f_side, tol.structural));
    residuals.insert("identity_norm", Residual::new((identity_norm - 1.0).abs(), tol.norm_bridge));
    residuals.insert(
        "quasi_norm_bridge",
        Residual::new(norm_gap(spectral_norm(&f_commutator)?, quasi_norm), tol.norm_bridge),
    );

    Ok(ReductionWitness {
        theorem: Theorem::Thm3,
        inputs: WitnessInputs { a1: a1.clone(), a2: None, s: None, eps: Some(eps), function: f.clone() },
        constructed: Constructed { q, a_stacked: a, b: None },
        residuals,
        structural_residual: f_side,
        commutator_norm: identity_norm,
        quasi_norm,
        bound_check: None,
        oracle_unavailable: None,
    })
}

/// Coefficients of `(p(x + ε) − p(x)) / ε`, i.e. `dⱼ = Σ_{k>j} cₖ C(k, j) ε^{k−1−j}`.
fn difference_quotient_coefficients(c: &[C64], eps: C64) -> Vec<C64> {
    if c.len() < 2 {
        return vec![C64::new(0.0, 0.0)];
    }
    (0..c.len() - 1)
        .map(|j| {
            let mut binom = 1.0;
            let mut power = C64::new(1.0, 0.0);
            let mut sum = C64::new(0.0, 0.0);
            for k in j + 1..c.len() {
                // C(k, j) from C(k−1, j)
                binom = binom * k as f64 / (k - j) as f64;
                sum += c[k] * binom * power;
                power *= eps;
            }
            sum
        })
        .collect()
}

/// `‖f(A₁ + εI) − f(A₁)‖ / |ε|` for each `ε`, in grid order.
///
/// Polynomial `f` is expanded around `A₁` so the difference is formed
/// without cancellation; other functions subtract the two matrix values.
pub fn thm3_lipschitz_quotient(
    a1: &Matrix,
    eps_grid: &[C64],
    f: &ScalarFunction,
    tol: &Tolerances,
) -> Result<Vec<(C64, f64)>> {
    if !a1.is_square() {
        return Err(ReductionError::Shape(format!("A₁ {:?}", a1.shape())));
    }
    if eps_grid.iter().any(|e| *e == C64::new(0.0, 0.0)) {
        return Err(ReductionError::DegenerateShift);
    }
    if let Some(coefficients) = f.polynomial_coefficients() {
        return eps_grid
            .iter()
            .map(|&eps| {
                let dq = ScalarFunction::polynomial("difference quotient", difference_quotient_coefficients(&coefficients, eps))?;
                let m = apply_function(&dq, a1, CalculusPath::PolynomialHornerPath, tol)?;
                Ok((eps, spectral_norm(&m)?))
            })
            .collect();
    }
    let base = apply_auto(f, a1, tol)?;
    eps_grid
        .iter()
        .map(|&eps| {
            let moved = apply_auto(f, &a1.shift(eps), tol)?;
            Ok((eps, spectral_norm(&(&moved - &base))? / eps.norm()))
        })
        .collect()
}

/// `B = Q diag(A₁, A₂) Q⁻¹` with `Q = [[I, −S], [0, I]]`, built two ways.
#[derive(Debug, Clone)]
pub struct SimilarityConstruction {
    pub b: Matrix,
    pub q: Matrix,
    pub q_inverse: Matrix,
    /// `[[A₁, A₁S − SA₂], [0, A₂]]` assembled block by block.
    pub block_form: Matrix,
    /// `‖b − block_form‖ / (1 + ‖b‖)`
    pub route_residual: f64,
}

pub fn thm4_construct_b(a1: &Matrix, a2: &Matrix, s: &Matrix, tol: &Tolerances) -> Result<SimilarityConstruction> {
    check_pair_shapes(a1, a2, s)?;
    let q = corner_q(s, neg_one(), tol)?;
    let q_inverse = corner_q(s, C64::new(1.0, 0.0), tol)?;
    let b = &q * direct_sum(a1, a2)? * &q_inverse;
    let block_form = upper_block(a1, &(a1 * s - s * a2), a2)?;
    let route_residual = spectral_norm(&(&b - &block_form))? / (1.0 + spectral_norm(&b)?);
    Ok(SimilarityConstruction { b, q, q_inverse, block_form, route_residual })
}

/// `[[top, corner], [0, bottom]]`
fn upper_block(top: &Matrix, corner: &Matrix, bottom: &Matrix) -> Result<Matrix> {
    let spec = BlockSpec::new(top.rows(), bottom.rows());
    Ok(direct_sum(top, bottom)? + embed_upper_right(corner, spec)?)
}

/// `f(B)` through the conjugated block-diagonal calculus, checked against
/// `f` applied to `B` directly.
pub fn thm4_f_of_b(a1: &Matrix, a2: &Matrix, s: &Matrix, f: &ScalarFunction, tol: &Tolerances) -> Result<ReductionWitness> {
    let sim = thm4_construct_b(a1, a2, s, tol)?;
    let a = direct_sum(a1, a2)?;
    let fa1 = apply_auto(f, a1, tol)?;
    let fa2 = apply_auto(f, a2, tol)?;
    let f_b = &sim.q * direct_sum(&fa1, &fa2)? * &sim.q_inverse;

    let quasi_block = &fa1 * s - s * &fa2;
    let comm_block = a1 * s - s * a2;
    let quasi_norm = spectral_norm(&quasi_block)?;
    let commutator_norm = spectral_norm(&comm_block)?;

    let mut residuals = BTreeMap::new();
    residuals.insert("similarity_route", Residual::new(sim.route_residual, tol.similarity_route));
    let block_form = relative_gap(&f_b, &upper_block(&fa1, &quasi_block, &fa2)?)?;
    residuals.insert("f_block_form", Residual::new(block_form, tol.similarity_route));

    let oracle_path = if f.is_polynomial() {
        CalculusPath::PolynomialHornerPath
    } else {
        CalculusPath::DiagonalizablePath
    };
    let (structural_residual, oracle_unavailable) = match apply_function(f, &sim.b, oracle_path, tol) {
        Ok(direct) => {
            let cond = condition_number(&sim.q)?;
            let gap = relative_gap(&f_b, &direct)?;
            residuals.insert("oracle_route", Residual::new(gap, tol.oracle_route * cond * cond));
            (gap, None)
        }
        Err(e) => (block_form, Some(e.to_string())),
    };

    let fa = apply_auto(f, &a, tol)?;
    residuals.insert(
        "quasi_norm_chain",
        Residual::new(norm_gap(spectral_norm(&(&f_b - &fa))?, quasi_norm), tol.norm_bridge),
    );
    residuals.insert(
        "commutator_norm_chain",
        Residual::new(norm_gap(spectral_norm(&(&sim.b - &a))?, commutator_norm), tol.norm_bridge),
    );

    Ok(ReductionWitness {
        theorem: Theorem::Thm4,
        inputs: WitnessInputs {
            a1: a1.clone(),
            a2: Some(a2.clone()),
            s: Some(s.clone()),
            eps: None,
            function: f.clone(),
        },
        constructed: Constructed { q: sim.q, a_stacked: a, b: Some(sim.b) },
        residuals,
        structural_residual,
        commutator_norm,
        quasi_norm,
        bound_check: None,
        oracle_unavailable,
    })
}

/// For commuting `A₁`, `A₂` with `A₁ − A₂` invertible, `S = (A₁ − A₂)⁻¹`
/// satisfies `A₁S − SA₂ = I`; the quasi side is `(A₁ − A₂)⁻¹(f(A₂) − f(A₁))`.
pub fn commuting_corollary(a1: &Matrix, a2: &Matrix, f: &ScalarFunction, tol: &Tolerances) -> Result<ReductionWitness> {
    if !a1.is_square() || a1.shape() != a2.shape() {
        return Err(ReductionError::Shape(format!("A₁ {:?}, A₂ {:?}", a1.shape(), a2.shape())));
    }
    let n = a1.rows();
    let commutator = spectral_norm(&a1.commutator(a2)?)?;
    let allowed = tol.commuting * (1.0 + spectral_norm(a1)?) * (1.0 + spectral_norm(a2)?);
    if commutator > allowed {
        return Err(ReductionError::NotCommuting { commutator, allowed });
    }
    let difference = a1 - a2;
    let condition = condition_number(&difference)?;
    if !(condition <= tol.difference_condition) {
        return Err(ReductionError::SingularDifference { condition });
    }
    let identity = Matrix::identity(n);
    let s = solve(&difference, &identity, tol).map_err(|e| match e {
        LinalgError::Singular { condition } => ReductionError::SingularDifference { condition },
        other => other.into(),
    })?;

    let lhs = a1 * &s - &s * a2;
    let identity_gap = spectral_norm(&(&lhs - &identity))? / 2.0;

    let fa1 = apply_auto(f, a1, tol)?;
    let fa2 = apply_auto(f, a2, tol)?;
    let quasi_norm = spectral_norm(&(&s * (&fa2 - &fa1)))?;
    let quasi_generic = spectral_norm(&(&fa1 * &s - &s * &fa2))?;

    let mut residuals = BTreeMap::new();
    residuals.insert("quasi_identity", Residual::new(identity_gap, tol.corollary * condition));
    residuals.insert("quasi_form_agreement", Residual::new(norm_gap(quasi_generic, quasi_norm), tol.structural));

    Ok(ReductionWitness {
        theorem: Theorem::CommutingCorollary,
        inputs: WitnessInputs {
            a1: a1.clone(),
            a2: Some(a2.clone()),
            s: Some(s.clone()),
            eps: None,
            function: f.clone(),
        },
        constructed: Constructed { q: corner_q(&s, neg_one(), tol)?, a_stacked: direct_sum(a1, a2)?, b: None },
        residuals,
        structural_residual: identity_gap,
        commutator_norm: spectral_norm(&lhs)?,
        quasi_norm,
        bound_check: None,
        oracle_unavailable: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn scalar(x: f64) -> Matrix {
        Matrix::from_real_diagonal(&[x]).unwrap()
    }

    #[test]
    fn corner_zero_corner() {
        let tol = Tolerances::default();
        let a1 = Matrix::from_real_rows(&[&[0.3, 0.1], &[0.1, -0.2]]).unwrap();
        let a2 = scalar(0.7);
        let w = thm1_reduce(&a1, &a2, &Matrix::zeros(2, 1), &ScalarFunction::exp(), &tol).unwrap();
        assert_eq!(w.quasi_norm, 0.0);
        assert_eq!(w.commutator_norm, 0.0);
        assert!(w.structural_residual < 1e-15);
        assert!(w.identity_verified());
    }

    #[test]
    fn corner_scalar_square() {
        // [1]·[1] − [1]·[2] = −1 and 1² − 2² = −3
        let tol = Tolerances::default();
        let w = thm1_reduce(&scalar(1.0), &scalar(2.0), &scalar(1.0), &ScalarFunction::square(), &tol).unwrap();
        assert_eq!(w.commutator_norm, 1.0);
        assert!((w.quasi_norm - 3.0).abs() < 1e-15);
        assert!(w.structural_residual <= 1e-14);
        assert!(w.identity_verified());
    }

    #[test]
    fn corner_shape_errors() {
        let tol = Tolerances::default();
        let err = thm1_reduce(&scalar(1.0), &scalar(2.0), &Matrix::zeros(2, 1), &ScalarFunction::square(), &tol);
        assert!(matches!(err, Err(ReductionError::Shape(_))));
    }

    #[test]
    fn corner_domain_error_propagates() {
        let tol = Tolerances::default();
        let err = thm1_reduce(&scalar(-1.0), &scalar(2.0), &scalar(1.0), &ScalarFunction::sqrt(), &tol);
        assert!(matches!(err, Err(ReductionError::Funcalc(FuncalcError::Domain { .. }))));
    }

    #[test]
    fn shift_scalar_square() {
        let tol = Tolerances::default();
        let w = thm3_construct(&scalar(0.0), c(1.0), &ScalarFunction::square(), &tol).unwrap();
        assert_eq!(w.quasi_norm, 1.0);
        assert_eq!(w.commutator_norm, 1.0);
        assert_eq!(w.residuals["corner_identity"].value, 0.0);
        assert_eq!(w.residuals["f_side_identity"].value, 0.0);
    }

    #[test]
    fn shift_zero_shift_rejected() {
        let tol = Tolerances::default();
        assert_eq!(
            thm3_construct(&scalar(0.0), c(0.0), &ScalarFunction::square(), &tol).unwrap_err(),
            ReductionError::DegenerateShift
        );
        assert_eq!(
            thm3_lipschitz_quotient(&scalar(0.0), &[c(1.0), c(0.0)], &ScalarFunction::square(), &tol).unwrap_err(),
            ReductionError::DegenerateShift
        );
    }

    #[test]
    fn quotient_of_square_on_diagonal() {
        // (diag(ε², 2ε + ε²)) / |ε| has norm max(|ε|, |2 + ε|)
        let tol = Tolerances::default();
        let a1 = Matrix::from_real_diagonal(&[0.0, 1.0]).unwrap();
        let grid = [c(-3.0), c(-0.5), c(0.25), c(2.0)];
        let out = thm3_lipschitz_quotient(&a1, &grid, &ScalarFunction::square(), &tol).unwrap();
        for (eps, ratio) in out {
            let want = eps.re.abs().max((2.0 + eps.re).abs());
            assert!((ratio - want).abs() < 1e-14, "ε = {eps}: {ratio} vs {want}");
        }
    }

    #[test]
    fn quotient_of_identity_is_one() {
        let tol = Tolerances::default();
        let a1 = Matrix::from_real_rows(&[&[0.2, 0.4], &[0.4, -0.1]]).unwrap();
        let grid = [c(0.01), C64::new(0.0, 2.0), c(-7.0)];
        for (_, r) in thm3_lipschitz_quotient(&a1, &grid, &ScalarFunction::identity(), &tol).unwrap() {
            assert!((r - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn similarity_scalar_instance() {
        let tol = Tolerances::default();
        let sim = thm4_construct_b(&scalar(1.0), &scalar(2.0), &scalar(1.0), &tol).unwrap();
        assert_eq!(sim.b, Matrix::from_real_rows(&[&[1.0, -1.0], &[0.0, 2.0]]).unwrap());
        assert_eq!(sim.route_residual, 0.0);

        let w = thm4_f_of_b(&scalar(1.0), &scalar(2.0), &scalar(1.0), &ScalarFunction::square(), &tol).unwrap();
        let f_b = &w.constructed.q
            * direct_sum(&scalar(1.0), &scalar(4.0)).unwrap()
            * corner_q(&scalar(1.0), c(1.0), &tol).unwrap();
        assert_eq!(f_b, Matrix::from_real_rows(&[&[1.0, -3.0], &[0.0, 4.0]]).unwrap());
        assert_eq!(w.residuals["oracle_route"].value, 0.0);
        assert!(w.oracle_unavailable.is_none());
        assert!(w.identity_verified());
    }

    #[test]
    fn similarity_zero_corner_and_identity() {
        let tol = Tolerances::default();
        let a1 = Matrix::from_real_rows(&[&[0.5, 0.2], &[0.2, 0.1]]).unwrap();
        let a2 = scalar(-0.4);
        let sim = thm4_construct_b(&a1, &a2, &Matrix::zeros(2, 1), &tol).unwrap();
        assert_eq!(sim.b, direct_sum(&a1, &a2).unwrap());

        let s = Matrix::from_real_rows(&[&[1.0], &[-2.0]]).unwrap();
        let w = thm4_f_of_b(&a1, &a2, &s, &ScalarFunction::identity(), &tol).unwrap();
        assert_eq!(w.structural_residual, 0.0);
    }

    #[test]
    fn similarity_ill_conditioned_b_reports_missing_oracle() {
        // B = [[0, −10⁹·δ], [0, δ]] has nearly parallel eigenvectors.
        let tol = Tolerances::default();
        let (a1, a2, s) = (scalar(0.0), scalar(1e-3), scalar(1e9));
        let w = thm4_f_of_b(&a1, &a2, &s, &ScalarFunction::exp(), &tol).unwrap();
        assert!(w.oracle_unavailable.is_some());
        assert!(!w.residuals.contains_key("oracle_route"));
        // the conjugated route is still there
        let corner = w.quasi_norm;
        assert!((corner - 1e9 * (1e-3f64.exp() - 1.0)).abs() < 1e-3);
        // a polynomial f falls back to Horner on B and needs no eigenvectors
        let w = thm4_f_of_b(&a1, &a2, &s, &ScalarFunction::square(), &tol).unwrap();
        assert!(w.oracle_unavailable.is_none());
    }

    #[test]
    fn corollary_diagonal_instance() {
        let tol = Tolerances::default();
        let a1 = Matrix::from_real_diagonal(&[1.0, 2.0]).unwrap();
        let a2 = Matrix::from_real_diagonal(&[3.0, 5.0]).unwrap();
        let w = commuting_corollary(&a1, &a2, &ScalarFunction::identity(), &tol).unwrap();
        let s = w.inputs.s.as_ref().unwrap();
        let want = Matrix::from_real_diagonal(&[-0.5, -1.0 / 3.0]).unwrap();
        assert!(spectral_norm(&(s - &want)).unwrap() < 1e-16);
        assert!(w.structural_residual < 1e-15);
        // (A₁ − A₂)⁻¹(A₂ − A₁) = −I
        assert!((w.quasi_norm - 1.0).abs() < 1e-15);
    }

    #[test]
    fn difference_quotient_expansion_matches_subtraction() {
        // 3x² + x at x = 2, ε = 0.5: (3·6.25 + 2.5 − 14) / 0.5 = 14.5
        let d = difference_quotient_coefficients(&[c(0.0), c(1.0), c(3.0)], c(0.5));
        assert_eq!(d, vec![c(2.5), c(6.0)]);
        assert_eq!(d[0] + d[1] * 2.0, c(14.5));
        let cubic = difference_quotient_coefficients(&[c(1.0), c(0.0), c(0.0), c(1.0)], c(2.0));
        // ((x+2)³ − x³)/2 = 3x² + 6x + 4
        assert_eq!(cubic, vec![c(4.0), c(6.0), c(3.0)]);
        assert_eq!(difference_quotient_coefficients(&[c(7.0)], c(1.0)), vec![c(0.0)]);
    }

    #[test]
    fn corollary_rejections() {
        let tol = Tolerances::default();
        let a1 = Matrix::from_real_diagonal(&[1.0, 2.0]).unwrap();
        assert!(matches!(
            commuting_corollary(&a1, &a1, &ScalarFunction::exp(), &tol),
            Err(ReductionError::SingularDifference { .. })
        ));
        let a2 = Matrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        assert!(matches!(
            commuting_corollary(&a1, &a2, &ScalarFunction::exp(), &tol),
            Err(ReductionError::NotCommuting { .. })
        ));
    }
}
