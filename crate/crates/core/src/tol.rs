//! Numerical tolerances used across the crate.

/// Tolerance for norms and probabilities. Double-precision complex arithmetic
/// on <= 20 qubits accumulates rounding well below this.
pub const PROB_TOL: f64 = 1e-12;

/// Tolerance for end-to-end fidelity assertions (protocol outputs against
/// closed-form targets).
pub const FIDELITY_TOL: f64 = 1e-9;
