//! Finite-dimensional laboratory for the transfer of commutator estimates
//! `‖Q f(A) − f(A) Q‖ ≤ g(‖QA − AQ‖)` to quasi-commutator estimates
//! `‖f(A₁) S − S f(A₂)‖ ≤ g(‖A₁S − SA₂‖)` through block-operator stacking.
//!
//! Every operator is a dense complex matrix and every norm is the spectral
//! norm, i.e. the operator norm induced by the Euclidean norm on the
//! concatenated vector of a direct sum.
//!
//! Layout:
//! - [`linalg`]: matrices, spectral norm, eigensolvers, linear solves, class tags
//! - [`funcalc`]: scalar function catalog and matrix functional calculus
//! - [`stacking`]: direct sums, corner embeddings, unipotent corner matrices
//! - [`reductions`]: the block constructions and their witnesses
//! - [`bounds`]: concrete bound functions and the hypothesis/transfer checks
//! - [`harness`]: seeded ensembles, suites, and line-delimited reports

pub mod bounds;
pub mod funcalc;
pub mod harness;
pub mod linalg;
pub mod reductions;
pub mod stacking;
pub mod tolerance;

pub use num_complex::Complex64 as C64;

pub use bounds::{BoundForm, BoundFunction};
pub use funcalc::{CalculusPath, ScalarFunction};
pub use linalg::{Matrix, OperatorClass};
pub use reductions::{ReductionWitness, Theorem};
pub use tolerance::Tolerances;
