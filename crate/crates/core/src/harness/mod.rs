//! Seeded trial orchestration for every verification suite, plus the
//! line-delimited report format.
//!
//! Trial `i` draws from `ChaCha20Rng::seed_from_u64(seed)` with its stream set
//! to `i`, so results never depend on how trials are scheduled.

pub mod config;
pub mod ensemble;
pub mod report;
pub mod suites;

use thiserror::Error;

pub use config::{parse_eps_grid, validate, Suite, TrialConfig, ValidatedConfig};
pub use ensemble::{generate, generate_pair, Ensemble};
pub use report::{aggregate, emit_report, read_report, Aggregate, ReportHeader, TrialRecord, VerificationReport};
pub use suites::{run_suite, run_trial, run_validated};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub const GENERATOR_ID: &str = "rand_chacha 0.9 ChaCha20Rng::seed_from_u64(seed), set_stream(trial_index); rand_distr 0.5 StandardNormal";

#[derive(Debug, Error)]
pub enum HarnessError {
    /// Rejected before any trial runs.
    #[error("configuration error: {0}")]
    Config(String),
    #[error("sample generation failed: {0}")]
    Generation(String),
    #[error("report is malformed: {0}")]
    Malformed(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Linalg(#[from] crate::linalg::LinalgError),
    #[error(transparent)]
    Funcalc(#[from] crate::funcalc::FuncalcError),
    #[error(transparent)]
    Stacking(#[from] crate::stacking::StackingError),
    #[error(transparent)]
    Reduction(#[from] crate::reductions::ReductionError),
    #[error(transparent)]
    Bounds(#[from] crate::bounds::BoundsError),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

impl HarnessError {
    pub fn is_config(&self) -> bool {
        matches!(self, HarnessError::Config(_))
    }
}
