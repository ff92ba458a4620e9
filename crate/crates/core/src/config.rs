//! Numerical tolerances shared by every module.
//!
//! Campaigns report violations against these values, so they live in one
//! record rather than as scattered literals.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative Frobenius bound on `‖m − m†‖ / ‖m‖`.
    pub hermiticity: f64,
    /// Eigenvalues in `[psd_floor, 0)` are treated as zero.
    pub psd_floor: f64,
    /// Decomposition reconstruction residual.
    pub reconstruction: f64,
    /// Unit-norm and unit-trace slack for states.
    pub normalization: f64,
    /// Trace-preservation slack for instruments.
    pub trace_preserving: f64,
    /// Relative singular-value cutoff for Schmidt rank.
    pub rank: f64,
    /// Largest admissible row or column count produced by `kron`.
    pub max_dim: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            hermiticity: 1e-10,
            psd_floor: -1e-10,
            reconstruction: 1e-9,
            normalization: 1e-10,
            trace_preserving: 1e-9,
            rank: 1e-8,
            max_dim: 4096,
        }
    }
}

impl Tolerances {
    /// Tighter profile used by `--tol-profile strict`.
    pub fn strict() -> Self {
        Tolerances {
            hermiticity: 1e-12,
            psd_floor: -1e-12,
            reconstruction: 1e-11,
            normalization: 1e-12,
            trace_preserving: 1e-11,
            ..Self::default()
        }
    }
}
