//! Pure and mixed multi-qubit states.
//!
//! Basis convention: the leftmost ket label is the most significant bit, so
//! `|abc⟩` lives at index `4a + 2b + c`. Every other module relies on this.

use std::fmt;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tolerance::{self, Tolerances};
use crate::C64;

#[derive(Debug, Error)]
pub enum StateError {
    #[error("state vector length {0} is not 2, 4 or 8")]
    BadLength(usize),
    #[error("matrix is {rows}x{cols}; expected a square matrix of dimension 2, 4 or 8")]
    BadDimension { rows: usize, cols: usize },
    #[error("squared norm {0} differs from 1")]
    NotNormalized(f64),
    #[error("invalid density matrix: {0}")]
    Invalid(Diagnostics),
    #[error("invalid subsystem selection: {0}")]
    InvalidSubsystem(String),
    #[error("invalid qubit permutation: {0}")]
    InvalidPermutation(String),
    #[error("Schmidt parameters must be nonnegative, got {0:?}")]
    NegativeSchmidt([f64; 4]),
    #[error("Schmidt parameters violate x²+y²+z²+h² = 1 by {0:e}")]
    SchmidtConstraint(f64),
    #[error("operation requires a {expected}-qubit state, got {actual} qubit(s)")]
    QubitCount { expected: usize, actual: usize },
}

/// One of the three parties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Qubit {
    A,
    B,
    C,
}

impl Qubit {
    pub const ALL: [Qubit; 3] = [Qubit::A, Qubit::B, Qubit::C];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Qubit> {
        Qubit::ALL.get(i).copied()
    }

    pub fn from_char(c: char) -> Option<Qubit> {
        match c.to_ascii_uppercase() {
            'A' => Some(Qubit::A),
            'B' => Some(Qubit::B),
            'C' => Some(Qubit::C),
            _ => None,
        }
    }
}

impl fmt::Display for Qubit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Qubit::A => 'A',
            Qubit::B => 'B',
            Qubit::C => 'C',
        };
        write!(f, "{c}")
    }
}

fn qubits_for_dim(dim: usize) -> Option<usize> {
    match dim {
        2 => Some(1),
        4 => Some(2),
        8 => Some(3),
        _ => None,
    }
}

/// Bit position of qubit `q` inside a basis index of an `n`-qubit register.
#[inline]
fn bit_of(q: usize, n: usize) -> usize {
    n - 1 - q
}

/// Normalized state vector on one to three qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: DVector<C64>,
}

impl PureState {
    /// Wraps `amplitudes`, rejecting vectors whose squared norm is off by
    /// more than the strict normalization tolerance.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self, StateError> {
        Self::with_tolerance(amplitudes, tolerance::NORMALIZATION)
    }

    pub fn with_tolerance(amplitudes: Vec<C64>, tol: f64) -> Result<Self, StateError> {
        if qubits_for_dim(amplitudes.len()).is_none() {
            return Err(StateError::BadLength(amplitudes.len()));
        }
        let v = DVector::from_vec(amplitudes);
        let norm2 = v.norm_squared();
        if !norm2.is_finite() || (norm2 - 1.0).abs() > tol {
            return Err(StateError::NotNormalized(norm2));
        }
        Ok(PureState { amplitudes: v })
    }

    /// Real amplitudes, same checks as [`PureState::new`].
    pub fn from_real(amplitudes: &[f64]) -> Result<Self, StateError> {
        Self::new(amplitudes.iter().map(|&a| C64::new(a, 0.0)).collect())
    }

    /// Scales `amplitudes` to unit norm. Fails only on a zero vector or a bad
    /// length.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self, StateError> {
        if qubits_for_dim(amplitudes.len()).is_none() {
            return Err(StateError::BadLength(amplitudes.len()));
        }
        let mut v = DVector::from_vec(amplitudes);
        let norm = v.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(StateError::NotNormalized(norm * norm));
        }
        v.unscale_mut(norm);
        Ok(PureState { amplitudes: v })
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn qubits(&self) -> usize {
        qubits_for_dim(self.dim()).expect("length checked on construction")
    }
}

/// Hermitian, unit-trace, positive-semidefinite matrix of dimension 2, 4 or 8.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validates `matrix` with the strict tolerances.
    pub fn new(matrix: DMatrix<C64>) -> Result<Self, StateError> {
        Self::with_tolerances(matrix, &Tolerances::STRICT)
    }

    /// Validates `matrix` against `tol`. When the tolerances are looser than
    /// the strict profile the accepted matrix is replaced by its Hermitian
    /// part, so downstream consumers always see an exactly Hermitian input.
    pub fn with_tolerances(matrix: DMatrix<C64>, tol: &Tolerances) -> Result<Self, StateError> {
        if matrix.nrows() != matrix.ncols() || qubits_for_dim(matrix.nrows()).is_none() {
            return Err(StateError::BadDimension {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        let diag = validate_with(&matrix, tol);
        if !diag.passed() {
            return Err(StateError::Invalid(diag));
        }
        let matrix = if tol.hermiticity > tolerance::HERMITICITY {
            hermitian_part(&matrix)
        } else {
            matrix
        };
        Ok(DensityMatrix { matrix })
    }

    /// Skips validation. Only for constructions that are valid by design
    /// (outer products, spectral sums, permutations, partial traces).
    pub(crate) fn from_matrix_unchecked(matrix: DMatrix<C64>) -> Self {
        debug_assert!(matrix.is_square() && qubits_for_dim(matrix.nrows()).is_some());
        DensityMatrix { matrix }
    }

    /// Maximally mixed state on `qubits` qubits.
    pub fn maximally_mixed(qubits: usize) -> Result<Self, StateError> {
        let dim = 1usize << qubits;
        if qubits_for_dim(dim).is_none() {
            return Err(StateError::BadLength(dim));
        }
        let m = DMatrix::from_diagonal_element(dim, dim, C64::new(1.0 / dim as f64, 0.0));
        Ok(DensityMatrix { matrix: m })
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn qubits(&self) -> usize {
        qubits_for_dim(self.dim()).expect("dimension checked on construction")
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(hermitian_part(&self.matrix))
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    /// Conjugates by `unitary`: ρ ↦ U ρ U†.
    pub fn conjugate_by(&self, unitary: &DMatrix<C64>) -> Result<Self, StateError> {
        if unitary.shape() != self.matrix.shape() {
            return Err(StateError::BadDimension {
                rows: unitary.nrows(),
                cols: unitary.ncols(),
            });
        }
        let m = unitary * &self.matrix * unitary.adjoint();
        DensityMatrix::with_tolerances(
            m,
            &Tolerances {
                hermiticity: 1e-10,
                ..Tolerances::STRICT
            },
        )
        .map(|d| DensityMatrix {
            matrix: hermitian_part(&d.matrix),
        })
    }

    pub(crate) fn require_qubits(&self, n: usize) -> Result<(), StateError> {
        if self.qubits() != n {
            return Err(StateError::QubitCount {
                expected: n,
                actual: self.qubits(),
            });
        }
        Ok(())
    }
}

fn hermitian_part(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()).scale(0.5)
}

/// Coordinates of the φ = λ = 0 Schmidt family
/// `x|000⟩ + y|100⟩ + z|101⟩ + h|110⟩` on the nonnegative octant of the unit
/// 3-sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchmidtParams {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub h: f64,
}

impl SchmidtParams {
    /// Accepts points within 1e-9 of the sphere and renormalizes them.
    pub fn new(x: f64, y: f64, z: f64, h: f64) -> Result<Self, StateError> {
        let c = [x, y, z, h];
        if c.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(StateError::NegativeSchmidt(c));
        }
        let n2: f64 = c.iter().map(|v| v * v).sum();
        let residual = (n2 - 1.0).abs();
        if residual > tolerance::SCHMIDT_CONSTRAINT {
            return Err(StateError::SchmidtConstraint(residual));
        }
        let n = n2.sqrt();
        Ok(SchmidtParams {
            x: x / n,
            y: y / n,
            z: z / n,
            h: h / n,
        })
    }

    /// Projects an arbitrary nonzero 4-vector onto the octant sphere by
    /// taking absolute values and normalizing.
    pub fn project(c: [f64; 4]) -> Option<Self> {
        let a = c.map(f64::abs);
        let n = a.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(n > 0.0 && n.is_finite()) {
            return None;
        }
        Some(SchmidtParams {
            x: a[0] / n,
            y: a[1] / n,
            z: a[2] / n,
            h: a[3] / n,
        })
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.x, self.y, self.z, self.h]
    }

    pub fn constraint_residual(&self) -> f64 {
        (self.to_array().iter().map(|v| v * v).sum::<f64>() - 1.0).abs()
    }
}

/// Generalized GHZ state `sinθ|000⟩ + cosθ|111⟩`.
pub fn ghz_state(theta: f64) -> PureState {
    let mut a = vec![C64::new(0.0, 0.0); 8];
    a[0] = C64::new(theta.sin(), 0.0);
    a[7] = C64::new(theta.cos(), 0.0);
    PureState {
        amplitudes: DVector::from_vec(a),
    }
}

/// Generalized W state `sinθ sinα|100⟩ + sinα cosθ|010⟩ + cosα|001⟩`.
pub fn w_state(theta: f64, alpha: f64) -> PureState {
    let mut a = vec![C64::new(0.0, 0.0); 8];
    a[4] = C64::new(theta.sin() * alpha.sin(), 0.0);
    a[2] = C64::new(alpha.sin() * theta.cos(), 0.0);
    a[1] = C64::new(alpha.cos(), 0.0);
    PureState {
        amplitudes: DVector::from_vec(a),
    }
}

/// `x|000⟩ + y|100⟩ + z|101⟩ + h|110⟩`.
pub fn schmidt_state(p: &SchmidtParams) -> PureState {
    schmidt_amplitudes([p.x, p.y, p.z, p.h])
}

/// Same layout as [`schmidt_state`] for arbitrary real coefficients, which
/// are normalized. The monogamy search differentiates through this.
pub(crate) fn schmidt_amplitudes(c: [f64; 4]) -> PureState {
    let n = c.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut a = vec![C64::new(0.0, 0.0); 8];
    a[0] = C64::new(c[0] / n, 0.0);
    a[4] = C64::new(c[1] / n, 0.0);
    a[5] = C64::new(c[2] / n, 0.0);
    a[6] = C64::new(c[3] / n, 0.0);
    PureState {
        amplitudes: DVector::from_vec(a),
    }
}

/// ρ = |ψ⟩⟨ψ|.
pub fn density_from_pure(psi: &PureState) -> DensityMatrix {
    let v = &psi.amplitudes;
    DensityMatrix::from_matrix_unchecked(v * v.adjoint())
}

/// Parses a subsystem selection such as `"A"`, `"BC"` or `"a,c"`.
pub fn parse_subsystem(s: &str) -> Result<Vec<Qubit>, StateError> {
    s.chars()
        .filter(|c| !c.is_whitespace() && *c != ',' && *c != '{' && *c != '}')
        .map(|c| Qubit::from_char(c).ok_or_else(|| StateError::InvalidSubsystem(s.to_string())))
        .collect()
}

/// Reduced state on `keep`, listed in ascending qubit order in the output.
pub fn partial_trace(rho: &DensityMatrix, keep: &[Qubit]) -> Result<DensityMatrix, StateError> {
    let n = rho.qubits();
    let mut kept: Vec<usize> = keep.iter().map(|q| q.index()).collect();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len()
        || kept.is_empty()
        || kept.len() >= n
        || kept.iter().any(|&q| q >= n)
    {
        return Err(StateError::InvalidSubsystem(format!(
            "{keep:?} is not a nonempty proper subset of a {n}-qubit register"
        )));
    }
    let traced: Vec<usize> = (0..n).filter(|q| !kept.contains(q)).collect();
    let k = kept.len();
    let out_dim = 1usize << k;
    let embed = |sub: usize, env: usize| -> usize {
        let mut idx = 0usize;
        for (pos, &q) in kept.iter().enumerate() {
            if (sub >> bit_of(pos, k)) & 1 == 1 {
                idx |= 1 << bit_of(q, n);
            }
        }
        for (pos, &q) in traced.iter().enumerate() {
            if (env >> bit_of(pos, traced.len())) & 1 == 1 {
                idx |= 1 << bit_of(q, n);
            }
        }
        idx
    };
    let m = rho.matrix();
    let env_dim = 1usize << traced.len();
    let out = DMatrix::from_fn(out_dim, out_dim, |i, j| {
        (0..env_dim)
            .map(|e| m[(embed(i, e), embed(j, e))])
            .sum::<C64>()
    });
    Ok(DensityMatrix::from_matrix_unchecked(out))
}

/// tr ρ².
pub fn purity(rho: &DensityMatrix) -> f64 {
    // tr(ρ²) = Σ_ij |ρ_ij|² for Hermitian ρ
    rho.matrix().iter().map(|z| z.norm_sqr()).sum()
}

/// A reordering of the three qubits. `order[k]` is the input qubit that
/// becomes output qubit `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Permutation {
    order: [Qubit; 3],
}

impl Permutation {
    pub const IDENTITY: Permutation = Permutation {
        order: [Qubit::A, Qubit::B, Qubit::C],
    };
    /// ρ_abc ↦ ρ_bca.
    pub const BCA: Permutation = Permutation {
        order: [Qubit::B, Qubit::C, Qubit::A],
    };
    /// ρ_abc ↦ ρ_cab.
    pub const CAB: Permutation = Permutation {
        order: [Qubit::C, Qubit::A, Qubit::B],
    };
    /// Swaps B and C.
    pub const ACB: Permutation = Permutation {
        order: [Qubit::A, Qubit::C, Qubit::B],
    };

    pub fn new(order: [Qubit; 3]) -> Result<Self, StateError> {
        let mut seen = [false; 3];
        for q in order {
            if std::mem::replace(&mut seen[q.index()], true) {
                return Err(StateError::InvalidPermutation(format!(
                    "{order:?} repeats {q}"
                )));
            }
        }
        Ok(Permutation { order })
    }

    /// Parses strings such as `"BCA"`.
    pub fn parse(s: &str) -> Result<Self, StateError> {
        let qs = parse_subsystem(s).map_err(|_| StateError::InvalidPermutation(s.to_string()))?;
        let order: [Qubit; 3] = qs
            .try_into()
            .map_err(|_| StateError::InvalidPermutation(s.to_string()))?;
        Self::new(order)
    }

    pub fn order(&self) -> [Qubit; 3] {
        self.order
    }

    /// Input qubit placed at output position `k`.
    pub fn source(&self, k: usize) -> usize {
        self.order[k].index()
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = [Qubit::A; 3];
        for (k, q) in self.order.iter().enumerate() {
            inv[q.index()] = Qubit::from_index(k).expect("k < 3");
        }
        Permutation { order: inv }
    }

    /// Maps an output basis index to the input basis index it reads from.
    pub fn source_index(&self, out: usize) -> usize {
        let mut idx = 0usize;
        for k in 0..3 {
            if (out >> bit_of(k, 3)) & 1 == 1 {
                idx |= 1 << bit_of(self.source(k), 3);
            }
        }
        idx
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.order[0], self.order[1], self.order[2])
    }
}

/// Re-indexes a three-qubit state so that output qubit `k` is input qubit
/// `perm.source(k)`.
pub fn permute_qubits(
    rho: &DensityMatrix,
    perm: &Permutation,
) -> Result<DensityMatrix, StateError> {
    rho.require_qubits(3)?;
    let map: Vec<usize> = (0..8).map(|o| perm.source_index(o)).collect();
    let m = rho.matrix();
    let out = DMatrix::from_fn(8, 8, |i, j| m[(map[i], map[j])]);
    Ok(DensityMatrix::from_matrix_unchecked(out))
}

/// Same re-indexing for state vectors.
pub fn permute_pure(psi: &PureState, perm: &Permutation) -> Result<PureState, StateError> {
    if psi.qubits() != 3 {
        return Err(StateError::QubitCount {
            expected: 3,
            actual: psi.qubits(),
        });
    }
    let a = DVector::from_fn(8, |o, _| psi.amplitudes[perm.source_index(o)]);
    Ok(PureState { amplitudes: a })
}

/// Residuals of the density-matrix invariants together with the verdicts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub dim: usize,
    pub dimension_ok: bool,
    pub hermiticity_residual: f64,
    pub trace_residual: f64,
    pub min_eigenvalue: f64,
    pub hermitian: bool,
    pub unit_trace: bool,
    pub positive: bool,
}

impl Diagnostics {
    pub fn passed(&self) -> bool {
        self.dimension_ok && self.hermitian && self.unit_trace && self.positive
    }
}

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut failures = Vec::new();
        if !self.dimension_ok {
            failures.push(format!("dimension {} not in {{2,4,8}}", self.dim));
        }
        if !self.hermitian {
            failures.push(format!(
                "hermiticity residual {:e}",
                self.hermiticity_residual
            ));
        }
        if !self.unit_trace {
            failures.push(format!("trace residual {:e}", self.trace_residual));
        }
        if !self.positive {
            failures.push(format!("minimum eigenvalue {:e}", self.min_eigenvalue));
        }
        if failures.is_empty() {
            write!(f, "ok")
        } else {
            write!(f, "{}", failures.join(", "))
        }
    }
}

/// Checks Hermiticity, unit trace and positivity with the strict tolerances.
pub fn validate_state(m: &DMatrix<C64>) -> Diagnostics {
    validate_with(m, &Tolerances::STRICT)
}

pub fn validate_with(m: &DMatrix<C64>, tol: &Tolerances) -> Diagnostics {
    let dim = m.nrows();
    let dimension_ok = m.is_square() && qubits_for_dim(dim).is_some();
    if !m.is_square() || dim == 0 {
        return Diagnostics {
            dim,
            dimension_ok: false,
            hermiticity_residual: f64::NAN,
            trace_residual: f64::NAN,
            min_eigenvalue: f64::NAN,
            hermitian: false,
            unit_trace: false,
            positive: false,
        };
    }
    let mut herm = 0.0f64;
    for i in 0..dim {
        for j in i..dim {
            herm = herm.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    let trace = m.trace();
    let trace_residual = (trace - C64::new(1.0, 0.0)).norm();
    let finite = m.iter().all(|z| z.re.is_finite() && z.im.is_finite());
    let min_eigenvalue = if finite {
        SymmetricEigen::new(hermitian_part(m))
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    } else {
        f64::NAN
    };
    Diagnostics {
        dim,
        dimension_ok,
        hermiticity_residual: herm,
        trace_residual,
        min_eigenvalue,
        hermitian: finite && herm <= tol.hermiticity,
        unit_trace: trace_residual <= tol.trace,
        positive: min_eigenvalue >= tol.min_eigenvalue,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_3, FRAC_PI_4};

    fn amp(psi: &PureState, i: usize) -> f64 {
        let a = psi.amplitudes()[i];
        assert!(a.im.abs() < 1e-15);
        a.re
    }

    #[test]
    fn ghz_endpoints_and_midpoint() {
        let s = ghz_state(0.0);
        assert_eq!(amp(&s, 7), 1.0);
        assert_eq!(amp(&s, 0), 0.0);
        let s = ghz_state(FRAC_PI_2);
        assert!((amp(&s, 0) - 1.0).abs() < 1e-15);
        assert!(amp(&s, 7).abs() < 1e-15);
        let s = ghz_state(FRAC_PI_4);
        assert!((amp(&s, 0) - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((amp(&s, 7) - FRAC_1_SQRT_2).abs() < 1e-15);
        for i in 1..7 {
            assert_eq!(amp(&s, i), 0.0);
        }
    }

    #[test]
    fn w_state_examples() {
        let s = w_state(FRAC_PI_3, FRAC_PI_2);
        assert!((amp(&s, 4) - 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((amp(&s, 2) - 0.5).abs() < 1e-15);
        assert!(amp(&s, 1).abs() < 1e-15);

        let s = w_state(1.234, 0.0);
        assert_eq!(amp(&s, 1), 1.0);
        assert_eq!(amp(&s, 4), 0.0);
        assert_eq!(amp(&s, 2), 0.0);

        let s = w_state(FRAC_PI_3, FRAC_PI_4);
        let r = FRAC_1_SQRT_2;
        assert!((amp(&s, 4) - 3f64.sqrt() / 2.0 * r).abs() < 1e-15);
        assert!((amp(&s, 2) - 0.5 * r).abs() < 1e-15);
        assert!((amp(&s, 1) - r).abs() < 1e-15);
    }

    #[test]
    fn schmidt_examples() {
        let s = schmidt_state(&SchmidtParams::new(1.0, 0.0, 0.0, 0.0).unwrap());
        assert_eq!(amp(&s, 0), 1.0);
        let s = schmidt_state(&SchmidtParams::new(0.0, 1.0, 0.0, 0.0).unwrap());
        assert_eq!(amp(&s, 4), 1.0);
        let s = schmidt_state(&SchmidtParams::new(0.0, 0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2).unwrap());
        assert!((amp(&s, 5) - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((amp(&s, 6) - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn schmidt_rejects_bad_parameters() {
        assert!(matches!(
            SchmidtParams::new(1.0, 0.1, 0.0, 0.0),
            Err(StateError::SchmidtConstraint(_))
        ));
        assert!(matches!(
            SchmidtParams::new(-1.0, 0.0, 0.0, 0.0),
            Err(StateError::NegativeSchmidt(_))
        ));
        // within 1e-9: accepted and renormalized
        let p = SchmidtParams::new(1.0 + 1e-10, 0.0, 0.0, 0.0).unwrap();
        assert!(p.constraint_residual() < 1e-15);
    }

    #[test]
    fn density_from_pure_examples() {
        let rho =
            density_from_pure(&PureState::from_real(&[1.0, 0., 0., 0., 0., 0., 0., 0.]).unwrap());
        for i in 0..8 {
            for j in 0..8 {
                let want = if i == 0 && j == 0 { 1.0 } else { 0.0 };
                assert_eq!(rho.matrix()[(i, j)], C64::new(want, 0.0));
            }
        }
        let rho = density_from_pure(&ghz_state(FRAC_PI_4));
        for (i, j) in [(0, 0), (0, 7), (7, 0), (7, 7)] {
            assert!((rho.matrix()[(i, j)].re - 0.5).abs() < 1e-15);
        }
        assert!((rho.matrix().trace().re - 1.0).abs() < 1e-15);
        assert!((purity(&rho) - 1.0).abs() < 1e-12);
        assert!(validate_state(rho.matrix()).passed());
    }

    #[test]
    fn partial_trace_examples() {
        let ghz = density_from_pure(&ghz_state(FRAC_PI_4));
        let a = partial_trace(&ghz, &[Qubit::A]).unwrap();
        assert!((a.matrix()[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((a.matrix()[(1, 1)].re - 0.5).abs() < 1e-15);
        assert!(a.matrix()[(0, 1)].norm() < 1e-15);

        let zero =
            density_from_pure(&PureState::from_real(&[1.0, 0., 0., 0., 0., 0., 0., 0.]).unwrap());
        let bc = partial_trace(&zero, &[Qubit::B, Qubit::C]).unwrap();
        assert_eq!(bc.dim(), 4);
        assert_eq!(bc.matrix()[(0, 0)].re, 1.0);
        assert!((bc.matrix().map(|z| z.norm()).sum() - 1.0).abs() < 1e-15);

        // W(π/3, π/2) = (√3/2)|100⟩ + (1/2)|010⟩; brute-force contraction
        // over A gives diag(3/4, 0, 1/4, 0).
        let w = density_from_pure(&w_state(FRAC_PI_3, FRAC_PI_2));
        let bc = partial_trace(&w, &[Qubit::B, Qubit::C]).unwrap();
        let want = [0.75, 0.0, 0.25, 0.0];
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { want[i] } else { 0.0 };
                assert!(
                    (bc.matrix()[(i, j)] - C64::new(expect, 0.0)).norm() < 1e-15,
                    "({i},{j})"
                );
            }
        }
    }

    #[test]
    fn partial_trace_rejects_bad_sets() {
        let rho = DensityMatrix::maximally_mixed(3).unwrap();
        assert!(partial_trace(&rho, &[]).is_err());
        assert!(partial_trace(&rho, &[Qubit::A, Qubit::B, Qubit::C]).is_err());
        assert!(partial_trace(&rho, &[Qubit::A, Qubit::A]).is_err());
        let two = DensityMatrix::maximally_mixed(2).unwrap();
        assert!(partial_trace(&two, &[Qubit::C]).is_err());
        assert!(parse_subsystem("AD").is_err());
    }

    #[test]
    fn purity_examples() {
        let mixed = DensityMatrix::maximally_mixed(1).unwrap();
        assert!((purity(&mixed) - 0.5).abs() < 1e-15);
        let w = density_from_pure(&w_state(0.3, 1.1));
        assert!((purity(&w) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn w_marginal_purity_closed_form() {
        for k in 0..=64 {
            let alpha = std::f64::consts::PI * k as f64 / 64.0;
            let rho = density_from_pure(&w_state(FRAC_PI_3, alpha));
            let a = partial_trace(&rho, &[Qubit::A]).unwrap();
            let want = (43.0 + 12.0 * (2.0 * alpha).cos() + 9.0 * (4.0 * alpha).cos()) / 64.0;
            assert!((purity(&a) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn permutation_examples() {
        let ghz = density_from_pure(&ghz_state(FRAC_PI_4));
        for p in [Permutation::BCA, Permutation::CAB, Permutation::ACB] {
            assert_eq!(permute_qubits(&ghz, &p).unwrap(), ghz);
        }
        let one00 =
            density_from_pure(&PureState::from_real(&[0., 0., 0., 0., 1., 0., 0., 0.]).unwrap());
        let out = permute_qubits(&one00, &Permutation::BCA).unwrap();
        assert_eq!(out.matrix()[(1, 1)].re, 1.0);
        assert_eq!(Permutation::parse("BCA").unwrap(), Permutation::BCA);
        assert_eq!(Permutation::BCA.inverse(), Permutation::CAB);
        assert!(Permutation::parse("AAB").is_err());
        assert!(Permutation::parse("AB").is_err());
    }

    #[test]
    fn validation_diagnostics() {
        let ok = density_from_pure(&ghz_state(0.4));
        assert!(validate_state(ok.matrix()).passed());

        let mut bad = ok.matrix().clone();
        bad[(0, 7)] += C64::new(1e-3, 0.0);
        let d = validate_state(&bad);
        assert!(!d.hermitian);
        assert!((d.hermiticity_residual - 1e-3).abs() < 1e-12);

        let scaled = ok.matrix().scale(0.9);
        let d = validate_state(&scaled);
        assert!(!d.unit_trace);
        assert!((d.trace_residual - 0.1).abs() < 1e-12);

        let neg = DMatrix::from_diagonal(&DVector::from_vec(vec![
            C64::new(1.1, 0.0),
            C64::new(-0.1, 0.0),
        ]));
        let d = validate_state(&neg);
        assert!(!d.positive);
        assert!(d.unit_trace && d.hermitian);

        let d = validate_state(&DMatrix::<C64>::identity(3, 3));
        assert!(!d.dimension_ok);
        assert!(DensityMatrix::new(DMatrix::<C64>::zeros(2, 3)).is_err());
    }

    #[test]
    fn relaxed_profile_hermitizes() {
        let mut m = density_from_pure(&ghz_state(0.4)).into_matrix();
        m[(0, 7)] += C64::new(1e-10, 0.0);
        assert!(DensityMatrix::new(m.clone()).is_err());
        let rho = DensityMatrix::with_tolerances(m, &Tolerances::RELAXED).unwrap();
        assert!(validate_state(rho.matrix()).hermiticity_residual == 0.0);
    }
}
