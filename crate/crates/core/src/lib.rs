//! Entanglement detection from moments of randomized local measurements.
//!
//! The crate covers Bloch decompositions and sector lengths, polytope
//! criteria for qubits and qudits, analytic and Monte Carlo moments of the
//! measured correlations, and the moment-plane regions used to flag bound
//! entanglement.

pub mod bloch;
pub mod cli;
pub mod detect;
pub mod error;
pub mod moments;
pub mod optsearch;
pub mod polytope;
pub mod qmat;
pub mod statezoo;

pub use error::{Error, Result};

/// Numerical tolerances shared across modules.
pub mod tol {
    /// Hermiticity, trace and positivity checks on states.
    pub const STATE: f64 = 1e-9;
    /// Slack used when evaluating criteria inequalities.
    pub const CRITERION: f64 = 1e-9;
    /// Slack for membership in the sampled moment-plane regions.
    pub const REGION: f64 = 1e-7;
}
