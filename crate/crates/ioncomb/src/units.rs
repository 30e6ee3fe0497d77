//! Frequency-unit conversions.
//!
//! All user-facing frequencies in this crate are ordinary frequencies in Hz;
//! angular frequencies (rad/s) appear only inside the dynamics. Every 2π
//! lives here.

use std::f64::consts::TAU;

/// Ordinary frequency (Hz) to angular frequency (rad/s).
#[inline]
pub fn angular(hz: f64) -> f64 {
    TAU * hz
}

/// Angular frequency (rad/s) to ordinary frequency (Hz).
#[inline]
pub fn ordinary(rad_per_s: f64) -> f64 {
    rad_per_s / TAU
}
