//! Entanglement-asymmetry diagnostics for bipartite quantum states.
//!
//! The crate computes the G-concurrence (exactly on pure states, as a
//! convex-roof upper bound on mixed ones), decides whether a state can be
//! mapped to its subsystem swap by local unitaries, bounds the single-copy
//! asymmetry parameter over restricted LOCC classes, brackets the asymptotic
//! symmetry of entanglement between `E_D/E_c` and one, and runs Monte-Carlo
//! campaigns checking the determinant-weight inequalities for separable
//! operations.

pub mod channels;
pub mod config;
pub mod error;
pub mod exec;
pub mod linalg;
pub mod measures;
pub mod optim;
pub mod states;
pub mod swap;
pub mod verify;

pub use config::Tolerances;
pub use error::{Error, Result};
pub use exec::Execution;
pub use linalg::{ComplexMatrix, Side, Spectrum, C64};
pub use states::BipartiteState;
