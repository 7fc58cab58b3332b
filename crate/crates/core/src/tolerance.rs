//! Named numerical tolerances shared by every module.
//!
//! Each field can be overridden by name (`--tol <name>=<value>` on the CLI).

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ToleranceError {
    #[error("unknown tolerance name `{0}`")]
    UnknownName(String),
    #[error("tolerance `{name}` must be finite and nonnegative, got {value}")]
    InvalidValue { name: String, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Hermitian / normal class checks, relative to `1 + ‖A‖`.
    pub class: f64,
    /// Eigendecomposition residual, relative to `1 + ‖A‖`.
    pub decomposition: f64,
    /// `‖V*V − I‖` for Hermitian eigenvectors.
    pub unitarity: f64,
    /// Eigenvector condition number above which a matrix counts as defective.
    pub defective_condition: f64,
    /// Condition number above which `solve` reports a singular system.
    pub singular_condition: f64,
    /// Slack band for spectrum domain predicates (sqrt, abs).
    pub domain_slack: f64,
    /// Commuting check for the corollary, relative to `(1+‖A₁‖)(1+‖A₂‖)`.
    pub commuting: f64,
    /// Condition threshold for `A₁ − A₂` in the corollary.
    pub difference_condition: f64,
    /// Block identities involving a functional calculus.
    pub structural: f64,
    /// Norm equalities obtained through the corner-norm identity.
    pub norm_bridge: f64,
    /// `[Q_ε, A] = [[0, I], [0, 0]]`.
    pub corner_identity: f64,
    /// Two algebraic routes to the similarity-conjugated block matrix.
    pub similarity_route: f64,
    /// Factor in front of `cond(Q)²` for conjugated f(B) vs. direct f(B).
    pub oracle_route: f64,
    /// Factor in front of `cond(A₁ − A₂)` for `A₁S − SA₂ = I`.
    pub corollary: f64,
    /// Bound-check slack, relative to `1 + g(t)`.
    pub slack: f64,
    /// Corner-norm identity and the direct-sum vector conditions.
    pub stacking: f64,
    /// Constancy of the difference quotient for affine functions.
    pub affine_quotient: f64,
    /// `‖Q Q⁻¹ − I‖` for unipotent corner matrices.
    pub corner_inverse: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            class: 1e-10,
            decomposition: 1e-10,
            unitarity: 1e-10,
            defective_condition: 1e8,
            singular_condition: 1e14,
            domain_slack: 1e-12,
            commuting: 1e-10,
            difference_condition: 1e8,
            structural: 1e-9,
            norm_bridge: 1e-12,
            corner_identity: 1e-14,
            similarity_route: 1e-13,
            oracle_route: 1e-8,
            corollary: 1e-9,
            slack: 1e-10,
            stacking: 1e-12,
            affine_quotient: 1e-13,
            corner_inverse: 1e-13,
        }
    }
}

impl Tolerances {
    pub const NAMES: [&'static str; 18] = [
        "class",
        "decomposition",
        "unitarity",
        "defective_condition",
        "singular_condition",
        "domain_slack",
        "commuting",
        "difference_condition",
        "structural",
        "norm_bridge",
        "corner_identity",
        "similarity_route",
        "oracle_route",
        "corollary",
        "slack",
        "stacking",
        "affine_quotient",
        "corner_inverse",
    ];

    fn slot(&mut self, name: &str) -> Option<&mut f64> {
        Some(match name {
            "class" => &mut self.class,
            "decomposition" => &mut self.decomposition,
            "unitarity" => &mut self.unitarity,
            "defective_condition" => &mut self.defective_condition,
            "singular_condition" => &mut self.singular_condition,
            "domain_slack" => &mut self.domain_slack,
            "commuting" => &mut self.commuting,
            "difference_condition" => &mut self.difference_condition,
            "structural" => &mut self.structural,
            "norm_bridge" => &mut self.norm_bridge,
            "corner_identity" => &mut self.corner_identity,
            "similarity_route" => &mut self.similarity_route,
            "oracle_route" => &mut self.oracle_route,
            "corollary" => &mut self.corollary,
            "slack" => &mut self.slack,
            "stacking" => &mut self.stacking,
            "affine_quotient" => &mut self.affine_quotient,
            "corner_inverse" => &mut self.corner_inverse,
            _ => return None,
        })
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<(), ToleranceError> {
        if !value.is_finite() || value < 0.0 {
            return Err(ToleranceError::InvalidValue { name: name.to_string(), value });
        }
        let slot = self
            .slot(name)
            .ok_or_else(|| ToleranceError::UnknownName(name.to_string()))?;
        *slot = value;
        Ok(())
    }

    /// Parses a `name=value` override and applies it.
    pub fn apply_override(&mut self, spec: &str) -> Result<(), ToleranceError> {
        let (name, value) = spec
            .split_once('=')
            .ok_or_else(|| ToleranceError::UnknownName(spec.to_string()))?;
        let name = name.trim();
        let value: f64 = value.trim().parse().map_err(|_| ToleranceError::InvalidValue {
            name: name.to_string(),
            value: f64::NAN,
        })?;
        self.set(name, value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_name_is_settable() {
        let mut tol = Tolerances::default();
        for name in Tolerances::NAMES {
            tol.set(name, 0.5).unwrap();
        }
        assert_eq!(tol.structural, 0.5);
        assert_eq!(tol.corner_inverse, 0.5);
    }

    #[test]
    fn override_parsing() {
        let mut tol = Tolerances::default();
        tol.apply_override("structural=1e-7").unwrap();
        assert_eq!(tol.structural, 1e-7);
        assert!(matches!(tol.apply_override("nope=1"), Err(ToleranceError::UnknownName(_))));
        assert!(tol.apply_override("slack=-1").is_err());
        assert!(tol.apply_override("slack").is_err());
    }
}
