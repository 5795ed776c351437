//! LOO correlation matrices, trace-norm steering criteria and monogamy
//! reports.
//!
//! Observables: `G_m = σ_m/√2` on a single qubit and
//! `G_n = σ_{⌊n/4⌋} ⊗ σ_{n mod 4} / 2` on a qubit pair. With these
//! normalizations the correlation entries
//! `tr[(G_m ⊗ G_n)(ρ − ρ_a ⊗ ρ_bc)]` pick up a factor `1/(2√2)` relative to
//! the raw Pauli covariances (`1/2` for qubit pairs).
//!
//! A state is certified steerable in a given direction when
//! `H = ‖M‖_tr − √(Λ_steering · Λ_steered) > 0`, with
//! `Λ_steering = d − tr ρ_s²` (d = 2 or 4) and `Λ_steered = 1 − tr ρ_t²`.

use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pauli::{pair_pauli, pauli_tensor, PairPauli, PauliError, PauliTensor, PurityCut};
use crate::state::{
    density_from_pure, partial_trace, permute_qubits, DensityMatrix, Permutation, PureState, Qubit,
    StateError,
};

#[derive(Debug, Error)]
pub enum SteeringError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Pauli(#[from] PauliError),
}

/// 1/(2√2): normalization of the qubit-vs-pair LOO correlations.
const ONE_TO_TWO_SCALE: f64 = 0.353_553_390_593_273_8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationKind {
    /// 4×16, single qubit steering a pair.
    OneToTwo,
    /// 16×4, pair steering a single qubit.
    TwoToOne,
    /// 4×4, qubit steering qubit.
    Pair,
}

/// A real LOO correlation matrix. Rows index the steering party's
/// observables, columns the steered party's.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    entries: DMatrix<f64>,
    kind: CorrelationKind,
}

impl CorrelationMatrix {
    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn kind(&self) -> CorrelationKind {
        self.kind
    }

    pub fn trace_norm(&self) -> f64 {
        trace_norm(&self.entries)
    }
}

/// Sum of singular values.
pub fn trace_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    // the SVD is computed on the tall orientation
    let sv = if m.nrows() >= m.ncols() {
        m.clone().singular_values()
    } else {
        m.transpose().singular_values()
    };
    sv.iter().sum()
}

/// `M_mn = (Θ_m,j,k − Θ_m00 Θ_0jk) / (2√2)` with `j = ⌊n/4⌋`, `k = n mod 4`.
pub fn correlation_one_to_two(theta: &PauliTensor) -> CorrelationMatrix {
    let entries = DMatrix::from_fn(4, 16, |m, n| {
        let (j, k) = (n / 4, n % 4);
        (theta.get(m, j, k) - theta.get(m, 0, 0) * theta.get(0, j, k)) * ONE_TO_TWO_SCALE
    });
    CorrelationMatrix {
        entries,
        kind: CorrelationKind::OneToTwo,
    }
}

/// `M′_nm = (Θ_j,k,m − Θ_jk0 Θ_00m) / (2√2)` for a tensor whose first two
/// slots are the steering pair and whose last slot is the steered qubit
/// (e.g. the tensor of ρ_bca for the BC → A direction).
pub fn correlation_two_to_one(theta: &PauliTensor) -> CorrelationMatrix {
    let entries = DMatrix::from_fn(16, 4, |n, m| {
        let (j, k) = (n / 4, n % 4);
        (theta.get(j, k, m) - theta.get(j, k, 0) * theta.get(0, 0, m)) * ONE_TO_TWO_SCALE
    });
    CorrelationMatrix {
        entries,
        kind: CorrelationKind::TwoToOne,
    }
}

/// `c_ij = (T_ij − T_i0 T_0j) / 2` from two-qubit Pauli coefficients.
pub fn correlation_from_pair(t: &PairPauli) -> CorrelationMatrix {
    let entries = DMatrix::from_fn(4, 4, |i, j| 0.5 * (t.get(i, j) - t.get(i, 0) * t.get(0, j)));
    CorrelationMatrix {
        entries,
        kind: CorrelationKind::Pair,
    }
}

/// Correlation matrix of a two-qubit state, first qubit on the rows.
pub fn correlation_pair(rho2: &DensityMatrix) -> Result<CorrelationMatrix, SteeringError> {
    Ok(correlation_from_pair(&pair_pauli(rho2)?))
}

/// `max(H, 0)`.
pub fn steering_value(h: f64) -> f64 {
    h.max(0.0)
}

/// `√(a·b)` where the product may round a hair below zero.
fn bound(a: f64, b: f64) -> f64 {
    (a * b).max(0.0).sqrt()
}

/// Both sides of one steering inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub trace_norm: f64,
    pub bound: f64,
    pub h: f64,
}

impl Criterion {
    fn new(trace_norm: f64, bound: f64) -> Self {
        Criterion {
            trace_norm,
            bound,
            h: trace_norm - bound,
        }
    }

    pub fn s(&self) -> f64 {
        steering_value(self.h)
    }

    pub fn steerable(&self) -> bool {
        self.h > 0.0
    }
}

/// Slot-0 qubit steering slots 1–2:
/// `‖M‖_tr − √((2 − tr ρ_a²)(1 − tr ρ_bc²))`.
pub fn one_to_two_criterion(theta: &PauliTensor) -> Criterion {
    let pa = crate::pauli::purity_from_theta(theta, PurityCut::A);
    let pbc = crate::pauli::purity_from_theta(theta, PurityCut::BC);
    Criterion::new(
        correlation_one_to_two(theta).trace_norm(),
        bound(2.0 - pa, 1.0 - pbc),
    )
}

/// Slots 0–1 steering slot 2:
/// `‖M′‖_tr − √((4 − tr ρ_pair²)(1 − tr ρ_single²))`.
pub fn two_to_one_criterion(theta: &PauliTensor) -> Criterion {
    let mut ppair = 0.0;
    for j in 0..4 {
        for k in 0..4 {
            ppair += theta.get(j, k, 0).powi(2);
        }
    }
    ppair *= 0.25;
    let psingle = 0.5 * (0..4).map(|m| theta.get(0, 0, m).powi(2)).sum::<f64>();
    Criterion::new(
        correlation_two_to_one(theta).trace_norm(),
        bound(4.0 - ppair, 1.0 - psingle),
    )
}

/// Which qubit of a pair does the steering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairDirection {
    FirstToSecond,
    SecondToFirst,
}

pub fn pair_criterion(t: &PairPauli, direction: PairDirection) -> Criterion {
    let norm = correlation_from_pair(t).trace_norm();
    let (p1, p2) = (t.first_purity(), t.second_purity());
    let b = match direction {
        PairDirection::FirstToSecond => bound(2.0 - p1, 1.0 - p2),
        PairDirection::SecondToFirst => bound(2.0 - p2, 1.0 - p1),
    };
    Criterion::new(norm, b)
}

/// H(A → BC) of a three-qubit state.
pub fn h_one_to_two(rho: &DensityMatrix) -> Result<f64, SteeringError> {
    Ok(one_to_two_criterion(&pauli_tensor(rho)?).h)
}

/// H(BC → A) of a three-qubit state; evaluated on ρ_bca.
pub fn h_two_to_one(rho: &DensityMatrix) -> Result<f64, SteeringError> {
    let bca = permute_qubits(rho, &Permutation::BCA)?;
    Ok(two_to_one_criterion(&pauli_tensor(&bca)?).h)
}

/// H of a two-qubit state in the given direction.
pub fn h_pair(rho2: &DensityMatrix, direction: PairDirection) -> Result<f64, SteeringError> {
    Ok(pair_criterion(&pair_pauli(rho2)?, direction).h)
}

/// Which cuts and directions a report covers beyond the default
/// A → BC plus A → B, A → C, B → C.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportOptions {
    /// Also evaluate the B|CA and C|AB cuts.
    pub all_cuts: bool,
    /// Also evaluate the pair → qubit direction of every evaluated cut.
    pub two_to_one: bool,
    /// Also evaluate B → A, C → A and C → B.
    pub reverse_pairs: bool,
}

impl ReportOptions {
    pub fn everything() -> Self {
        ReportOptions {
            all_cuts: true,
            two_to_one: true,
            reverse_pairs: true,
        }
    }
}

/// Which corollary of the monogamy relation applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    /// All three pair H values are ≥ 0.
    Corollary1,
    /// All three pair H values are < 0.
    Corollary2,
    Mixed,
}

impl Classification {
    pub fn from_pairs(h: [f64; 3]) -> Self {
        if h.iter().all(|&v| v >= 0.0) {
            Classification::Corollary1
        } else if h.iter().all(|&v| v < 0.0) {
            Classification::Corollary2
        } else {
            Classification::Mixed
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::Corollary1 => "corollary1",
            Classification::Corollary2 => "corollary2",
            Classification::Mixed => "mixed",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One evaluated direction, e.g. `"A->BC"` or `"B->C"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionReport {
    pub direction: String,
    pub trace_norm: f64,
    pub bound: f64,
    pub h: f64,
    pub s: f64,
}

impl DirectionReport {
    fn new(direction: String, c: Criterion) -> Self {
        DirectionReport {
            direction,
            trace_norm: c.trace_norm,
            bound: c.bound,
            h: c.h,
            s: c.s(),
        }
    }
}

/// Both directions across one single-vs-pair cut.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutReport {
    pub cut: String,
    pub one_to_two: DirectionReport,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub two_to_one: Option<DirectionReport>,
}

/// Steering quantities of a three-qubit state and the monogamy margin
/// `S(A→BC) − (H(A→B) + H(A→C) + H(B→C))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteeringReport {
    pub h_a_bc: f64,
    pub s_a_bc: f64,
    pub h_ab: f64,
    pub h_ac: f64,
    pub h_bc: f64,
    pub s_ab: f64,
    pub s_ac: f64,
    pub s_bc: f64,
    pub h_tot: f64,
    pub s_tot: f64,
    pub margin: f64,
    pub classification: Classification,
    pub cuts: Vec<CutReport>,
    pub pairs: Vec<DirectionReport>,
}

impl SteeringReport {
    /// Margin of the stronger relation H(A→BC) ≥ H_tot that the pure-state
    /// proof actually establishes.
    pub fn h_margin(&self) -> f64 {
        self.h_a_bc - self.h_tot
    }
}

fn cut_report(
    rho: &DensityMatrix,
    order: [Qubit; 3],
    with_reverse: bool,
) -> Result<CutReport, SteeringError> {
    let [x, y, z] = order;
    let forward_rho = permute_qubits(rho, &Permutation::new([x, y, z])?)?;
    let forward = one_to_two_criterion(&pauli_tensor(&forward_rho)?);
    let two_to_one = if with_reverse {
        let rev_rho = permute_qubits(rho, &Permutation::new([y, z, x])?)?;
        let c = two_to_one_criterion(&pauli_tensor(&rev_rho)?);
        Some(DirectionReport::new(format!("{y}{z}->{x}"), c))
    } else {
        None
    };
    Ok(CutReport {
        cut: format!("{x}|{y}{z}"),
        one_to_two: DirectionReport::new(format!("{x}->{y}{z}"), forward),
        two_to_one,
    })
}

/// Full report for a three-qubit state. Pair quantities are computed on the
/// two-qubit partial traces.
pub fn steering_report(
    rho: &DensityMatrix,
    options: &ReportOptions,
) -> Result<SteeringReport, SteeringError> {
    rho.require_qubits(3)?;
    use Qubit::{A, B, C};

    let mut cuts = vec![cut_report(rho, [A, B, C], options.two_to_one)?];
    if options.all_cuts {
        cuts.push(cut_report(rho, [B, C, A], options.two_to_one)?);
        cuts.push(cut_report(rho, [C, A, B], options.two_to_one)?);
    }
    let a_bc = cuts[0].one_to_two.clone();

    let mut pairs = Vec::with_capacity(6);
    let mut forward_h = [0.0; 3];
    let mut forward_s = [0.0; 3];
    for (slot, (p, q)) in [(A, B), (A, C), (B, C)].into_iter().enumerate() {
        let t = pair_pauli(&partial_trace(rho, &[p, q])?)?;
        let fwd = pair_criterion(&t, PairDirection::FirstToSecond);
        forward_h[slot] = fwd.h;
        forward_s[slot] = fwd.s();
        pairs.push(DirectionReport::new(format!("{p}->{q}"), fwd));
        if options.reverse_pairs {
            let rev = pair_criterion(&t, PairDirection::SecondToFirst);
            pairs.push(DirectionReport::new(format!("{q}->{p}"), rev));
        }
    }

    let h_tot = forward_h.iter().sum::<f64>();
    let s_tot = forward_s.iter().sum::<f64>();
    Ok(SteeringReport {
        h_a_bc: a_bc.h,
        s_a_bc: a_bc.s,
        h_ab: forward_h[0],
        h_ac: forward_h[1],
        h_bc: forward_h[2],
        s_ab: forward_s[0],
        s_ac: forward_s[1],
        s_bc: forward_s[2],
        h_tot,
        s_tot,
        margin: a_bc.s - h_tot,
        classification: Classification::from_pairs(forward_h),
        cuts,
        pairs,
    })
}

/// The four H values entering the monogamy relation, straight from the
/// Pauli tensor. Same numbers as [`steering_report`] with default options,
/// minus the bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonogamyTerms {
    pub h_a_bc: f64,
    pub h_ab: f64,
    pub h_ac: f64,
    pub h_bc: f64,
}

impl MonogamyTerms {
    pub fn from_theta(theta: &PauliTensor) -> Self {
        let pair = |a, b| pair_criterion(&theta.marginal(a, b), PairDirection::FirstToSecond).h;
        MonogamyTerms {
            h_a_bc: one_to_two_criterion(theta).h,
            h_ab: pair(0, 1),
            h_ac: pair(0, 2),
            h_bc: pair(1, 2),
        }
    }

    /// Same quantities for a pure state, with every `1 − tr ρ²` taken from
    /// [`pure_mixedness`] instead of from the Pauli tensor. The trace norms
    /// still come from the tensor.
    pub fn from_pure(psi: &PureState) -> Result<Self, SteeringError> {
        if psi.qubits() != 3 {
            return Err(StateError::QubitCount {
                expected: 3,
                actual: psi.qubits(),
            }
            .into());
        }
        let theta = pauli_tensor(&density_from_pure(psi))?;
        let [ma, mb, mc] = pure_mixedness(psi);
        let pair = |a, b, ms: f64, mt: f64| {
            correlation_from_pair(&theta.marginal(a, b)).trace_norm() - bound(1.0 + ms, mt)
        };
        // for a pure state the two sides of any cut are equally mixed
        Ok(MonogamyTerms {
            h_a_bc: correlation_one_to_two(&theta).trace_norm() - bound(1.0 + ma, ma),
            h_ab: pair(0, 1, ma, mb),
            h_ac: pair(0, 2, ma, mc),
            h_bc: pair(1, 2, mb, mc),
        })
    }

    pub fn h_tot(&self) -> f64 {
        self.h_ab + self.h_ac + self.h_bc
    }
}

/// `1 − tr ρ_q²` for each qubit q of a pure three-qubit state.
///
/// With the amplitudes reshaped into a 2×4 matrix Ψ (qubit q against the
/// rest), `1 − tr ρ_q² = 2 det(ΨΨ†) = 2 Σ_{j<k} |Ψ_0j Ψ_1k − Ψ_0k Ψ_1j|²`
/// (Cauchy–Binet). This is a sum of nonnegative terms, so it stays accurate
/// near product states where `1 − purity` loses every significant digit;
/// the square root in the purity bound would otherwise turn that rounding
/// into errors of order 1e-8.
pub fn pure_mixedness(psi: &PureState) -> [f64; 3] {
    let a = psi.amplitudes();
    std::array::from_fn(|q| {
        let bit = 2 - q;
        let rest: Vec<usize> = (0..8).filter(|i| i >> bit & 1 == 0).collect();
        let mut det = 0.0;
        for j in 0..4 {
            for k in j + 1..4 {
                let (r0j, r0k) = (rest[j], rest[k]);
                let (r1j, r1k) = (r0j | 1 << bit, r0k | 1 << bit);
                det += (a[r0j] * a[r1k] - a[r0k] * a[r1j]).norm_sqr();
            }
        }
        2.0 * det
    })
}
