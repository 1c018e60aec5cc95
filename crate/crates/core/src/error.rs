//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A derivative evaluation produced a non-finite value.
    #[error("non-finite derivative in component {component}")]
    NonFinite { component: usize },

    #[error("trajectory length mismatch: {left} vs {right} samples")]
    LengthMismatch { left: usize, right: usize },

    /// The drive-amplitude scaling denominator vanishes at the upper
    /// critical dissipation strength.
    #[error("drive-amplitude scaling evaluated at its pole (kappa = kappa''_c)")]
    ScalingPole,

    /// Oscillator-model validity requires |beta|^2 < 1.
    #[error("oscillator-model validity breached: |beta|^2 = {beta_sq}")]
    ValidityBreach { beta_sq: f64 },

    #[error("operation not applicable: {0}")]
    NotApplicable(String),

    /// Too few envelope maxima to form amplitude statistics.
    #[error("insufficient data: only {found} envelope maxima in the tail window")]
    InsufficientData { found: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed file: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
