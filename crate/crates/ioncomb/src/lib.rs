// Validation guards are written `!(x > 0.0)` on purpose: the negated form
// also rejects NaN, which `x <= 0.0` lets through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Simulation of trapped-ion qubits driven by the frequency comb of an
//! ultrafast laser pulse train.
//!
//! The crate models the comb spectrum of a picked pulse train, propagates
//! joint spin-motion states pulse by pulse in a truncated Fock basis, and
//! builds the standard trapped-ion toolbox on top of that: comb-driven Raman
//! carrier flopping, resolved sidebands, sideband cooling, the two-ion
//! Mølmer-Sørensen gate and its parity-oscillation entanglement witness.
//!
//! Module map:
//! - [`comb`]: pulse-train spectrum, Raman Rabi rates, resonance bookkeeping.
//! - [`hilbert`]: states, operators and unitaries on qubit ⊗ truncated-Fock
//!   spaces.
//! - [`dynamics`]: stroboscopic kick propagation and the first-order
//!   sideband amplitudes.
//! - [`spectroscopy`]: carrier scans, sideband spectra, sideband cooling and
//!   thermometry.
//! - [`msgate`]: the bichromatic entangling gate, parity scans and the
//!   fidelity witness.
//! - [`config`] / [`runner`]: experiment configs, presets and deterministic
//!   CSV/JSON output for the CLI.

pub mod comb;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod hilbert;
pub mod msgate;
pub mod runner;
pub mod spectroscopy;
pub mod units;

pub use error::SimError;