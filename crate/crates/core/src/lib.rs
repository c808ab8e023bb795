//! Benchmarking noisy quantum processors with one clean qubit.
//!
//! The crate simulates the DQC1 trace-estimation algorithm on a dense
//! density-matrix simulator with configurable gate noise and uses it for two
//! benchmark suites:
//!
//! * visibility decay of `⟨σx⟩` for controlled phase payloads repeated `l`
//!   times ([`bench`]), fitted to `a·e^{-x/τ}` with an `R²` figure of merit;
//! * Jones-polynomial evaluation at `t = e^{2πi/5}` for trace closures of
//!   three-strand braids via the Fibonacci representation ([`knots`]).
//!
//! Every estimate has an exact classical counterpart
//! ([`dqc1::ideal_normalized_trace`], [`knots::jones_oracle`]) so simulated
//! results can be checked against ground truth.
//!
//! Qubit 0 is always the clean (control) qubit. Basis states are indexed
//! with qubit 0 as the most significant bit, so `|01⟩` means qubit 0 in `|0⟩`
//! and qubit 1 in `|1⟩`.

pub mod bench;
pub mod circuit;
pub mod cli;
pub mod dqc1;
mod error;
pub mod knots;
pub mod noise;
pub mod qstate;
pub mod seed;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Tolerance for checks on exactly constructed matrices.
pub const EXACT_TOL: f64 = 1e-10;
/// Tolerance for quantities accumulated over long gate sequences.
pub const ACCUM_TOL: f64 = 1e-9;
