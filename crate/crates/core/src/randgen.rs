//! Seeded random three-qubit states.
//!
//! A state is `ρ = Σ λ_n |Ψ_n⟩⟨Ψ_n|` where the weights come from a
//! multiplicative cascade of uniform draws and the `|Ψ_n⟩` are the
//! eigenvectors of a random Hermitian matrix `H = D + (Uᵀ + U) + i(Lᵀ − L)`
//! built from the diagonal, strictly upper and strictly lower parts of a
//! matrix `K` with entries uniform on [−1, 1].
//!
//! State `i` of a batch is drawn from its own ChaCha20 stream: the generator
//! is seeded with the batch seed via `seed_from_u64` and its stream id is set
//! to `i`. Batches are therefore reproducible independently of how many
//! worker threads produce them.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::state::{DensityMatrix, PureState};
use crate::C64;

const DIM: usize = 8;

/// Recorded in batch metadata.
pub const GENERATOR_NAME: &str = "ChaCha20Rng(seed_from_u64(seed), stream = state index)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateMode {
    /// `ρ = |Ψ_1⟩⟨Ψ_1|`, i.e. weights (1, 0, …, 0).
    Pure,
    Mixed,
}

impl std::str::FromStr for StateMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pure" => Ok(StateMode::Pure),
            "mixed" => Ok(StateMode::Mixed),
            _ => Err(format!("unknown state mode {s:?} (expected pure or mixed)")),
        }
    }
}

/// Where the seventh cascade factor restarts from.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Cascade {
    /// `N_7 = N_5·Γ`, as the recipe is written.
    #[default]
    Verbatim,
    /// `N_7 = N_6·Γ`, a strictly nonincreasing cascade.
    Sequential,
}

impl std::str::FromStr for Cascade {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "verbatim" => Ok(Cascade::Verbatim),
            "sequential" => Ok(Cascade::Sequential),
            _ => Err(format!(
                "unknown cascade {s:?} (expected verbatim or sequential)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomStateSpec {
    pub seed: u64,
    pub mode: StateMode,
    pub count: usize,
    #[serde(default)]
    pub cascade: Cascade,
}

impl RandomStateSpec {
    pub fn new(seed: u64, mode: StateMode, count: usize) -> Self {
        RandomStateSpec {
            seed,
            mode,
            count,
            cascade: Cascade::Verbatim,
        }
    }
}

/// Generator for state `index` of a batch seeded with `seed`.
pub fn rng_for(seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Eight normalized weights from the cascade `N_1 = Γ`, `N_{n+1} = N_n·Γ`
/// (with the seventh factor restarting from `N_5` in the verbatim variant).
pub fn random_eigenvalues<R: Rng + ?Sized>(rng: &mut R, cascade: Cascade) -> [f64; DIM] {
    let mut n = [0.0; DIM];
    n[0] = rng.gen::<f64>();
    for k in 1..DIM {
        let prev = if k == 6 && cascade == Cascade::Verbatim {
            n[4]
        } else {
            n[k - 1]
        };
        n[k] = prev * rng.gen::<f64>();
    }
    let total: f64 = n.iter().sum();
    if total == 0.0 {
        // only reachable if the first draw is exactly 0
        let mut pure = [0.0; DIM];
        pure[0] = 1.0;
        return pure;
    }
    n.map(|v| v / total)
}

/// The matrix `K` with entries uniform on [−1, 1].
pub fn random_k<R: Rng + ?Sized>(rng: &mut R) -> DMatrix<f64> {
    DMatrix::from_fn(DIM, DIM, |_, _| rng.gen_range(-1.0..=1.0))
}

/// `H = D + (Uᵀ + U) + i(Lᵀ − L)` from the parts of `k`.
pub fn hermitian_from_k(k: &DMatrix<f64>) -> DMatrix<C64> {
    let n = k.nrows();
    DMatrix::from_fn(n, n, |r, c| {
        if r == c {
            C64::new(k[(r, r)], 0.0)
        } else if r < c {
            // U_rc sits above the diagonal, L_cr below it
            C64::new(k[(r, c)], k[(c, r)])
        } else {
            C64::new(k[(c, r)], -k[(r, c)])
        }
    })
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R) -> DMatrix<C64> {
    hermitian_from_k(&random_k(rng))
}

/// Eigenvectors of a Hermitian matrix as columns, ordered by eigenvalue,
/// largest first.
fn sorted_eigenvectors(h: DMatrix<C64>) -> Vec<nalgebra::DVector<C64>> {
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    order
        .into_iter()
        .map(|i| eig.eigenvectors.column(i).into_owned())
        .collect()
}

/// `Σ λ_n |Ψ_n⟩⟨Ψ_n|` for the eigenvectors of `h`.
pub fn state_from_spectrum(weights: &[f64; DIM], h: DMatrix<C64>) -> DensityMatrix {
    let vecs = sorted_eigenvectors(h);
    let mut rho = DMatrix::<C64>::zeros(DIM, DIM);
    for (w, v) in weights.iter().zip(&vecs) {
        if *w != 0.0 {
            rho += (v * v.adjoint()).scale(*w);
        }
    }
    DensityMatrix::from_matrix_unchecked(rho)
}

/// State `index` of the batch described by `spec`.
pub fn random_state_at(spec: &RandomStateSpec, index: u64) -> DensityMatrix {
    let mut rng = rng_for(spec.seed, index);
    let weights = match spec.mode {
        StateMode::Mixed => random_eigenvalues(&mut rng, spec.cascade),
        StateMode::Pure => {
            let mut w = [0.0; DIM];
            w[0] = 1.0;
            w
        }
    };
    state_from_spectrum(&weights, random_hermitian(&mut rng))
}

/// State `index` of a pure-mode batch seeded with `seed`, as a state
/// vector: the top eigenvector `|Ψ_1⟩`. Its projector is exactly what
/// [`random_state_at`] returns in pure mode.
pub fn random_pure_at(seed: u64, index: u64) -> PureState {
    let mut rng = rng_for(seed, index);
    let top = sorted_eigenvectors(random_hermitian(&mut rng)).swap_remove(0);
    PureState::normalized(top.iter().copied().collect()).expect("eigenvectors are unit vectors")
}

/// The whole batch, in index order.
pub fn random_states(spec: &RandomStateSpec) -> Vec<DensityMatrix> {
    (0..spec.count as u64)
        .into_par_iter()
        .map(|i| random_state_at(spec, i))
        .collect()
}
