//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    /// A parameter or constructed object violates an invariant.
    #[error("invalid parameter: {0}")]
    Invalid(String),

    /// The comb is not on a Raman carrier resonance (q not integer within
    /// tolerance), so the resonant Rabi rate is undefined.
    #[error("comb is not on a Raman resonance: q = {q:.6} classified {class}")]
    NotOnResonance { q: f64, class: &'static str },

    /// Population reached the top of the truncated Fock basis.
    #[error("Fock cutoff too small: leakage {leakage:.3e} exceeds {limit:.1e}")]
    CutoffTooSmall { leakage: f64, limit: f64 },

    /// Sideband thermometry needs red strength strictly below blue.
    #[error("invalid sideband ratio: red {red} must be in [0, blue) with blue {blue}")]
    InvalidRatio { red: f64, blue: f64 },

    /// A parity scan must cover at least one period of cos 2φ.
    #[error("parity scan spans {span:.4} rad in phi; need at least {required:.4}")]
    InsufficientScan { span: f64, required: f64 },

    /// One or more configuration fields failed validation; every error is
    /// listed with its field path.
    #[error("configuration errors:\n  {}", .0.join("\n  "))]
    Schema(Vec<String>),
}

pub type Result<T> = std::result::Result<T, SimError>;
