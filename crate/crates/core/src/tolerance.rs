//! Numerical tolerances shared across the crate.

use serde::{Deserialize, Serialize};

/// Maximum elementwise |ρ − ρ†| for a valid density matrix.
pub const HERMITICITY: f64 = 1e-12;

/// Maximum |tr ρ − 1| for a valid density matrix.
pub const TRACE: f64 = 1e-12;

/// Smallest admissible eigenvalue. Eigendecompositions of mixed states
/// accumulate rounding, so this is looser than the other checks.
pub const MIN_EIGENVALUE: f64 = -1e-9;

/// Maximum |‖ψ‖² − 1| for a pure state.
pub const NORMALIZATION: f64 = 1e-12;

/// Maximum imaginary part of a Pauli expectation value.
pub const PAULI_IMAGINARY: f64 = 1e-12;

/// Schmidt parameters off the unit sphere by more than this are rejected;
/// anything closer is renormalized.
pub const SCHMIDT_CONSTRAINT: f64 = 1e-9;

/// Negative radicands above this value are treated as rounding noise and
/// clamped to zero.
pub const RADICAND_CLAMP: f64 = -1e-12;

/// Validation thresholds for externally supplied states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub hermiticity: f64,
    pub trace: f64,
    pub min_eigenvalue: f64,
    pub normalization: f64,
}

impl Tolerances {
    /// The thresholds used by every in-crate constructor.
    pub const STRICT: Tolerances = Tolerances {
        hermiticity: HERMITICITY,
        trace: TRACE,
        min_eigenvalue: MIN_EIGENVALUE,
        normalization: NORMALIZATION,
    };

    /// For hand-written state files whose decimals were rounded to ~10 digits.
    pub const RELAXED: Tolerances = Tolerances {
        hermiticity: 1e-9,
        trace: 1e-9,
        min_eigenvalue: -1e-7,
        normalization: 1e-9,
    };

    pub fn profile(name: &str) -> Option<Tolerances> {
        match name {
            "strict" => Some(Self::STRICT),
            "relaxed" => Some(Self::RELAXED),
            _ => None,
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::STRICT
    }
}
