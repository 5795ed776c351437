//! Detection and quantification of EPR steering in three-qubit states.
//!
//! The crate builds local-orthogonal-observable (LOO) correlation matrices
//! from the Pauli decomposition of a state, compares their trace norm with a
//! purity bound for every one-vs-two cut and every qubit pair, and checks the
//! monogamy relation
//!
//! ```text
//! S(A→BC) ≥ H(A→B) + H(A→C) + H(B→C)
//! ```
//!
//! Modules:
//!
//! * [`state`]: pure and mixed states, the GHZ / W / Schmidt families,
//!   partial traces, qubit permutations and validation.
//! * [`pauli`]: the 4×4×4 Pauli tensor Θ and purity identities.
//! * [`steering`]: correlation matrices, H and S values, steering reports.
//! * [`randgen`]: seeded random pure and mixed three-qubit states.
//! * [`monogamy`]: numerical re-verification of the monogamy inequality on
//!   the Schmidt family (critical points, sign regions, dense sampling).
//! * [`format`]: the JSON state file format.

pub mod format;
pub mod monogamy;
pub mod pauli;
pub mod randgen;
pub mod state;
pub mod steering;
pub mod tolerance;

pub use nalgebra::Complex;

/// Complex double used for all amplitudes and matrix entries.
pub type C64 = Complex<f64>;

pub use pauli::{pauli_tensor, purity_from_theta, PairPauli, PauliTensor, PurityCut};
pub use state::{
    density_from_pure, ghz_state, partial_trace, permute_qubits, purity, schmidt_state,
    validate_state, w_state, DensityMatrix, Diagnostics, Permutation, PureState, Qubit,
    SchmidtParams, StateError,
};
pub use steering::{
    steering_report, steering_value, Classification, CorrelationMatrix, ReportOptions,
    SteeringError, SteeringReport,
};
pub use tolerance::Tolerances;
