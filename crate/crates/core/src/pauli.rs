//! Pauli-basis coefficients of two- and three-qubit states.
//!
//! `Θ_ijk = tr(ρ σ_i ⊗ σ_j ⊗ σ_k)` with σ_0 = 1, σ_1 = X, σ_2 = Y, σ_3 = Z.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::state::{DensityMatrix, Permutation};
use crate::tolerance;
use crate::C64;

#[derive(Debug, Error)]
pub enum PauliError {
    #[error("expected a {expected}x{expected} density matrix, got {actual}x{actual}")]
    Dimension { expected: usize, actual: usize },
    #[error("Pauli expectation for {label} has imaginary part {imag:e}; input is not Hermitian")]
    NotHermitian { label: String, imag: f64 },
}

const LABELS: [char; 4] = ['I', 'X', 'Y', 'Z'];

/// Single-qubit Pauli matrix `σ_i`.
pub fn sigma(i: usize) -> [[C64; 2]; 2] {
    let o = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let im = C64::new(0.0, 1.0);
    match i {
        0 => [[one, o], [o, one]],
        1 => [[o, one], [one, o]],
        2 => [[o, -im], [im, o]],
        3 => [[one, o], [o, -one]],
        _ => panic!("Pauli index {i} out of range"),
    }
}

/// Dense matrix of `σ_{labels[0]} ⊗ σ_{labels[1]} ⊗ …`.
pub fn pauli_string(labels: &[usize]) -> DMatrix<C64> {
    let mut m = DMatrix::from_element(1, 1, C64::new(1.0, 0.0));
    for &l in labels {
        let s = sigma(l);
        let d = m.nrows();
        m = DMatrix::from_fn(2 * d, 2 * d, |r, c| m[(r / 2, c / 2)] * s[r % 2][c % 2]);
    }
    m
}

/// `tr(ρ P)` for a Pauli string, using that P has one nonzero per column.
fn pauli_expectation(m: &DMatrix<C64>, labels: &[usize]) -> C64 {
    let n = labels.len();
    let dim = 1usize << n;
    let mut flip = 0usize;
    for (q, &l) in labels.iter().enumerate() {
        if l == 1 || l == 2 {
            flip |= 1 << (n - 1 - q);
        }
    }
    let mut acc = C64::new(0.0, 0.0);
    for col in 0..dim {
        let row = col ^ flip;
        // phase of P[row][col]
        let mut phase = C64::new(1.0, 0.0);
        for (q, &l) in labels.iter().enumerate() {
            let bit = (col >> (n - 1 - q)) & 1;
            match l {
                2 => {
                    phase *= if bit == 0 {
                        C64::new(0.0, 1.0)
                    } else {
                        C64::new(0.0, -1.0)
                    }
                }
                3 if bit == 1 => phase = -phase,
                _ => {}
            }
        }
        acc += m[(col, row)] * phase;
    }
    acc
}

fn label_string(labels: &[usize]) -> String {
    labels.iter().map(|&l| LABELS[l]).collect()
}

fn real_expectation(m: &DMatrix<C64>, labels: &[usize]) -> Result<f64, PauliError> {
    let e = pauli_expectation(m, labels);
    if e.im.abs() > tolerance::PAULI_IMAGINARY {
        return Err(PauliError::NotHermitian {
            label: label_string(labels),
            imag: e.im,
        });
    }
    Ok(e.re)
}

/// Dense 4×4×4 tensor of three-qubit Pauli coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTensor {
    coeffs: [f64; 64],
}

#[inline]
fn flat(i: usize, j: usize, k: usize) -> usize {
    16 * i + 4 * j + k
}

impl PauliTensor {
    pub fn from_coefficients(coeffs: [f64; 64]) -> Self {
        PauliTensor { coeffs }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.coeffs[flat(i, j, k)]
    }

    pub fn coefficients(&self) -> &[f64; 64] {
        &self.coeffs
    }

    /// Tensor of the qubit-permuted state: if output qubit `k` is input
    /// qubit `perm.source(k)`, the output slot `k` carries that input slot.
    pub fn permuted(&self, perm: &Permutation) -> PauliTensor {
        let mut out = [0.0; 64];
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    let out_idx = [i, j, k];
                    let mut src = [0usize; 3];
                    for (slot, &l) in out_idx.iter().enumerate() {
                        src[perm.source(slot)] = l;
                    }
                    out[flat(i, j, k)] = self.get(src[0], src[1], src[2]);
                }
            }
        }
        PauliTensor { coeffs: out }
    }

    /// Coefficients of the two-qubit marginal on the slots `(a, b)`.
    pub fn marginal(&self, a: usize, b: usize) -> PairPauli {
        assert!(
            a < 3 && b < 3 && a != b,
            "invalid marginal slots ({a}, {b})"
        );
        let mut t = [[0.0; 4]; 4];
        for (i, row) in t.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                let mut idx = [0usize; 3];
                idx[a] = i;
                idx[b] = j;
                *v = self.get(idx[0], idx[1], idx[2]);
            }
        }
        PairPauli { coeffs: t }
    }

    /// ρ = (1/8) Σ Θ_ijk σ_i⊗σ_j⊗σ_k.
    pub fn reconstruct(&self) -> DMatrix<C64> {
        let mut m = DMatrix::<C64>::zeros(8, 8);
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    let c = self.get(i, j, k);
                    if c != 0.0 {
                        m += pauli_string(&[i, j, k]).scale(c / 8.0);
                    }
                }
            }
        }
        m
    }
}

/// 4×4 Pauli coefficients `T_ij = tr(ρ σ_i ⊗ σ_j)` of a two-qubit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairPauli {
    coeffs: [[f64; 4]; 4],
}

impl PairPauli {
    pub fn from_coefficients(coeffs: [[f64; 4]; 4]) -> Self {
        PairPauli { coeffs }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.coeffs[i][j]
    }

    pub fn transposed(&self) -> PairPauli {
        let mut t = [[0.0; 4]; 4];
        for (i, row) in t.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.coeffs[j][i];
            }
        }
        PairPauli { coeffs: t }
    }

    /// tr ρ_first² = (1/2) Σ_i T_i0².
    pub fn first_purity(&self) -> f64 {
        0.5 * (0..4).map(|i| self.coeffs[i][0].powi(2)).sum::<f64>()
    }

    /// tr ρ_second² = (1/2) Σ_j T_0j².
    pub fn second_purity(&self) -> f64 {
        0.5 * (0..4).map(|j| self.coeffs[0][j].powi(2)).sum::<f64>()
    }
}

/// Pauli tensor of a three-qubit state. Coefficients are divided by the
/// trace, so Θ_000 = 1 exactly and marginals of pure inputs stay exactly
/// pure when their Bloch vectors are.
pub fn pauli_tensor(rho: &DensityMatrix) -> Result<PauliTensor, PauliError> {
    if rho.dim() != 8 {
        return Err(PauliError::Dimension {
            expected: 8,
            actual: rho.dim(),
        });
    }
    let m = rho.matrix();
    let mut coeffs = [0.0; 64];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                coeffs[flat(i, j, k)] = real_expectation(m, &[i, j, k])?;
            }
        }
    }
    let tr = coeffs[0];
    for c in coeffs.iter_mut() {
        *c /= tr;
    }
    Ok(PauliTensor { coeffs })
}

/// Pauli coefficients of a two-qubit state, normalized like [`pauli_tensor`].
pub fn pair_pauli(rho: &DensityMatrix) -> Result<PairPauli, PauliError> {
    if rho.dim() != 4 {
        return Err(PauliError::Dimension {
            expected: 4,
            actual: rho.dim(),
        });
    }
    let m = rho.matrix();
    let mut t = [[0.0; 4]; 4];
    for (i, row) in t.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = real_expectation(m, &[i, j])?;
        }
    }
    let tr = t[0][0];
    for row in t.iter_mut() {
        for v in row.iter_mut() {
            *v /= tr;
        }
    }
    Ok(PairPauli { coeffs: t })
}

/// Which purity [`purity_from_theta`] returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PurityCut {
    /// tr ρ_a² = (1/2) Σ_i Θ_i00²
    A,
    /// tr ρ_bc² = (1/4) Σ_jk Θ_0jk²
    BC,
    /// tr ρ² = (1/8) Σ_ijk Θ_ijk²
    Full,
}

pub fn purity_from_theta(theta: &PauliTensor, cut: PurityCut) -> f64 {
    match cut {
        PurityCut::A => 0.5 * (0..4).map(|i| theta.get(i, 0, 0).powi(2)).sum::<f64>(),
        PurityCut::BC => {
            let mut s = 0.0;
            for j in 0..4 {
                for k in 0..4 {
                    s += theta.get(0, j, k).powi(2);
                }
            }
            0.25 * s
        }
        PurityCut::Full => theta.coeffs.iter().map(|c| c * c).sum::<f64>() / 8.0,
    }
}
