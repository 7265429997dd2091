//! Exact simulator for LOCC network coding on quantum repeater networks.
//!
//! The crate layers three things on top of two interchangeable exact
//! backends (dense statevector and stabilizer tableau):
//!
//! * a network model where nodes own registers, every classical bit is a
//!   logged message, and locality is enforced on every gate;
//! * the LOCC primitives (`con`, `fanout`, `add`, `rem`, `rem_add`) plus the
//!   entanglement-swapping and teleportation baselines;
//! * a protocol script engine that runs scenario files, checks per-step state
//!   checkpoints, and exhaustively enumerates measurement branches.

pub mod backend;
pub mod engine;
pub mod error;
pub mod expect;
pub mod locc;
pub mod net;
pub mod registers;
pub mod script;
pub mod stab;
pub mod statevec;
pub mod suites;
pub mod tol;

pub use backend::{BackendKind, BackendState};
pub use error::{Result, SimError};
pub use registers::{Label, LabelMap, QubitIndex};
pub use statevec::{MeasurementOutcome, OutcomePolicy, SingleState, StateVector};
