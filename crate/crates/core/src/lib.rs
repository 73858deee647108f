//! Deterministic simulation of photonic qudit graph-state generation.
//!
//! Quantum emitters with q-level ground manifolds are driven by Fourier
//! gates, controlled-phase gates and photon pumping. Measuring the emitters
//! and applying outcome-dependent corrections leaves the emitted photons in
//! a weighted graph state. The crate executes such protocols on dense state
//! vectors and certifies the outputs: graph-state equality up to global
//! phase, absolute maximal entanglement (AME), and Knill-Laflamme conditions
//! for small codes.
//!
//! ```
//! use quemit::protocol::{builtin, run, OutcomeMode};
//! use quemit::verify::is_ame;
//!
//! let p = builtin("ame5-two-emitter", 3, None).unwrap();
//! let record = run(&p, &OutcomeMode::Sample(7)).unwrap();
//! assert!(is_ame(&record.state, 1e-9).verdict);
//! ```

pub mod algebra;
pub mod error;
pub mod graph;
pub mod protocol;
pub mod reference;
pub mod state;
pub mod verify;

pub use error::{Error, ParseError, Result};

/// Tolerance for state-vector comparisons.
pub const STATE_TOL: f64 = 1e-9;
/// Tolerance on `‖ψ‖² = 1` accepted when loading amplitudes.
pub const NORM_TOL: f64 = 1e-9;
/// Tolerance for entrywise operator identities.
pub const MATRIX_TOL: f64 = 1e-12;
