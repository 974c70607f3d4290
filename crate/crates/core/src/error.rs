//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, CoreError>;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("fields live on different lattices")]
    LatticeMismatch,

    #[error("invalid moduli point: {0}")]
    InvalidModuli(String),

    #[error("moduli point not admissible: {0}")]
    Inadmissible(String),

    #[error("evaluation at a lattice point (pole of ζ)")]
    PoleAtLatticePoint,

    #[error("Sobolev index {0} out of range 0..=3")]
    SobolevIndexOutOfRange(usize),

    #[error("grid too large for dense assembly: grid_n = {0} > {1}")]
    GridTooLarge(usize, usize),

    #[error("CFL violation: dt = {dt} exceeds {max_dt}")]
    CflViolation { dt: f64, max_dt: f64 },

    #[error("blow-up detected at t = {t}: {reason}")]
    BlowUp { t: f64, reason: String },

    #[error("trajectory left the admissible chart at tau = {tau}: {reason}")]
    ChartExit { tau: f64, reason: String },

    #[error("step-size rejection: {0}")]
    StepRejected(String),

    #[error("singular linear system: {0}")]
    SingularMatrix(String),

    #[error("iteration failed to converge: {0}")]
    NonConvergence(String),

    #[error("spectrum indeterminate: {0}")]
    IndeterminateSpectrum(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("validation failure: {0}")]
    ValidationFailure(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
