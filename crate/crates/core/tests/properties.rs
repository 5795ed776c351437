//! Structural properties of the pipeline on random states.

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;

use tristeer::monogamy::{closed_form_f, f_pipeline, OctantSampler};
use tristeer::pauli::{pair_pauli, PurityCut};
use tristeer::randgen::{
    random_pure_at, random_state_at, random_states, rng_for, RandomStateSpec, StateMode,
};
use tristeer::state::permute_pure;
use tristeer::steering::{
    correlation_from_pair, correlation_one_to_two, correlation_two_to_one, MonogamyTerms,
};
use tristeer::{
    density_from_pure, partial_trace, pauli_tensor, permute_qubits, purity, purity_from_theta,
    schmidt_state, steering_report, Classification, DensityMatrix, Permutation, PureState, Qubit,
    ReportOptions, SchmidtParams, SteeringReport, C64,
};

/// 100 mixed and 100 pure states.
fn sample_states() -> Vec<DensityMatrix> {
    let mut v = random_states(&RandomStateSpec::new(101, StateMode::Mixed, 100));
    v.extend(random_states(&RandomStateSpec::new(
        102,
        StateMode::Pure,
        100,
    )));
    v
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[test]
fn correlation_matrices_have_zero_borders() {
    for rho in sample_states() {
        let theta = pauli_tensor(&rho).unwrap();
        let pair = pair_pauli(&partial_trace(&rho, &[Qubit::A, Qubit::B]).unwrap()).unwrap();
        for c in [
            correlation_one_to_two(&theta),
            correlation_two_to_one(&theta),
            correlation_from_pair(&pair),
        ] {
            let m = c.entries();
            assert!(m.row(0).amax() <= 1e-12, "{:?}", c.kind());
            assert!(m.column(0).amax() <= 1e-12, "{:?}", c.kind());
        }
    }
}

#[test]
fn pauli_round_trip_and_parseval() {
    for rho in sample_states() {
        let theta = pauli_tensor(&rho).unwrap();
        assert!(max_abs(&(theta.reconstruct() - rho.matrix())) < 1e-10);
        let p = purity(&rho);
        assert!((purity_from_theta(&theta, PurityCut::Full) - p).abs() < 1e-10);
        let a = purity(&partial_trace(&rho, &[Qubit::A]).unwrap());
        let bc = purity(&partial_trace(&rho, &[Qubit::B, Qubit::C]).unwrap());
        assert!((purity_from_theta(&theta, PurityCut::A) - a).abs() < 1e-10);
        assert!((purity_from_theta(&theta, PurityCut::BC) - bc).abs() < 1e-10);
    }
}

/// Haar-ish single-qubit unitary from four angles.
fn unitary<R: Rng>(rng: &mut R) -> DMatrix<C64> {
    let tau = std::f64::consts::TAU;
    let (a, b, c, d): (f64, f64, f64, f64) = (
        rng.gen::<f64>() * tau,
        rng.gen::<f64>() * tau,
        rng.gen::<f64>() * tau,
        rng.gen::<f64>() * tau,
    );
    let g = C64::from_polar(1.0, d);
    DMatrix::from_row_slice(
        2,
        2,
        &[
            g * C64::from_polar(a.cos(), b),
            g * C64::from_polar(a.sin(), c),
            -g * C64::from_polar(a.sin(), -c),
            g * C64::from_polar(a.cos(), -b),
        ],
    )
}

fn all_h(r: &SteeringReport) -> Vec<f64> {
    let mut v = vec![r.h_a_bc, r.h_ab, r.h_ac, r.h_bc];
    for cut in &r.cuts {
        v.push(cut.one_to_two.h);
        v.extend(cut.two_to_one.as_ref().map(|d| d.h));
    }
    v.extend(r.pairs.iter().map(|p| p.h));
    v
}

#[test]
fn h_values_are_local_unitary_invariant() {
    let mut rng = rng_for(103, 0);
    let opts = ReportOptions::everything();
    for rho in sample_states().into_iter().step_by(2) {
        let u = unitary(&mut rng)
            .kronecker(&unitary(&mut rng))
            .kronecker(&unitary(&mut rng));
        assert!(max_abs(&(&u * u.adjoint() - DMatrix::identity(8, 8))) < 1e-12);
        let rotated = rho.conjugate_by(&u).unwrap();
        let before = all_h(&steering_report(&rho, &opts).unwrap());
        let after = all_h(&steering_report(&rotated, &opts).unwrap());
        assert_eq!(before.len(), 16);
        for (b, a) in before.iter().zip(&after) {
            assert!((b - a).abs() < 1e-9, "{b} vs {a}");
        }
    }
}

#[test]
fn partial_traces_compose() {
    use Qubit::{A, B, C};
    for rho in sample_states() {
        let ab = partial_trace(&rho, &[A, B]).unwrap();
        let ac = partial_trace(&rho, &[A, C]).unwrap();
        let bc = partial_trace(&rho, &[B, C]).unwrap();
        let a = partial_trace(&rho, &[A]).unwrap();
        let b = partial_trace(&rho, &[B]).unwrap();
        let c = partial_trace(&rho, &[C]).unwrap();
        // inside a two-qubit state the labels A and B name its first and
        // second qubit
        for (pair, first, second) in [(&ab, &a, &b), (&ac, &a, &c), (&bc, &b, &c)] {
            assert!(
                max_abs(&(partial_trace(pair, &[A]).unwrap().matrix() - first.matrix())) < 1e-14
            );
            assert!(
                max_abs(&(partial_trace(pair, &[B]).unwrap().matrix() - second.matrix())) < 1e-14
            );
        }
        assert!((a.matrix().trace().re - 1.0).abs() < 1e-12);
    }
}

#[test]
fn permutations_round_trip() {
    let perms = [
        Permutation::IDENTITY,
        Permutation::BCA,
        Permutation::CAB,
        Permutation::ACB,
        Permutation::parse("CBA").unwrap(),
        Permutation::parse("BAC").unwrap(),
    ];
    for (i, rho) in sample_states().into_iter().enumerate().step_by(5) {
        let theta = pauli_tensor(&rho).unwrap();
        for p in &perms {
            let there = permute_qubits(&rho, p).unwrap();
            let back = permute_qubits(&there, &p.inverse()).unwrap();
            assert_eq!(back, rho);
            // the Pauli tensor permutes along with the state
            let moved = pauli_tensor(&there).unwrap();
            let expected = theta.permuted(p);
            for (x, y) in moved.coefficients().iter().zip(expected.coefficients()) {
                assert!((x - y).abs() < 1e-12);
            }
            // a permuted qubit keeps its marginal
            for k in 0..3 {
                let src = Qubit::from_index(p.source(k)).unwrap();
                let dst = Qubit::from_index(k).unwrap();
                let d = partial_trace(&there, &[dst]).unwrap().into_matrix()
                    - partial_trace(&rho, &[src]).unwrap().into_matrix();
                assert!(max_abs(&d) < 1e-14);
            }
        }
        if i >= 100 {
            // pure half: vector and projector permute the same way
            let psi = random_pure_at(102, (i - 100) as u64);
            for p in &perms {
                let a = density_from_pure(&permute_pure(&psi, p).unwrap());
                let b = permute_qubits(&density_from_pure(&psi), p).unwrap();
                assert!(max_abs(&(a.matrix() - b.matrix())) < 1e-15);
            }
        }
    }
}

#[test]
fn random_states_are_deterministic_per_seed() {
    let spec = RandomStateSpec::new(104, StateMode::Mixed, 20);
    let a = random_states(&spec);
    assert_eq!(a, random_states(&spec));
    // a state does not depend on the size of its batch
    let longer = random_states(&RandomStateSpec { count: 40, ..spec });
    assert_eq!(a[..], longer[..20]);
    assert_eq!(random_state_at(&spec, 13), a[13]);
    let other = random_states(&RandomStateSpec { seed: 105, ..spec });
    assert!(a.iter().zip(&other).all(|(x, y)| x != y));
    // distinct streams within a batch give distinct states
    assert_ne!(a[0], a[1]);
}

#[test]
fn monogamy_and_corollaries_on_random_pure_states() {
    let spec = RandomStateSpec::new(106, StateMode::Pure, 10_000);
    let mut classes = [0usize; 3];
    for rho in random_states(&spec) {
        let r = steering_report(&rho, &ReportOptions::default()).unwrap();
        assert!(r.margin >= -1e-9, "margin {}", r.margin);
        assert!(r.h_margin() >= -1e-9, "H margin {}", r.h_margin());
        match r.classification {
            Classification::Corollary1 => {
                classes[0] += 1;
                assert!(r.s_a_bc >= r.s_tot - 1e-9);
            }
            Classification::Corollary2 => {
                classes[1] += 1;
                assert_eq!(r.s_tot, 0.0);
                assert!(r.s_a_bc >= r.s_tot);
            }
            Classification::Mixed => classes[2] += 1,
        }
    }
    // both corollaries are actually exercised
    assert!(classes[0] > 0 && classes[1] > 0, "{classes:?}");
}

#[test]
fn schmidt_family_two_code_paths_agree() {
    let sampler = OctantSampler::new(107);
    for i in 0..100 {
        let p = SchmidtParams::project(sampler.point(i)).unwrap();
        let direct = steering_report(
            &density_from_pure(&schmidt_state(&p)),
            &ReportOptions::default(),
        )
        .unwrap();
        let f_direct = direct.h_a_bc - direct.h_tot;
        assert!((f_pipeline(&p) - f_direct).abs() < 1e-10, "{p:?}");
        assert!((closed_form_f(&p) - f_direct).abs() < 1e-10, "{p:?}");
    }
}

fn amplitudes() -> impl Strategy<Value = PureState> {
    proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 8)
        .prop_filter("nonzero", |v| {
            v.iter().map(|(a, b)| a * a + b * b).sum::<f64>() > 1e-3
        })
        .prop_map(|v| {
            PureState::normalized(v.into_iter().map(|(a, b)| C64::new(a, b)).collect()).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn monogamy_holds_for_arbitrary_pure_states(psi in amplitudes()) {
        let r = steering_report(&density_from_pure(&psi), &ReportOptions::default()).unwrap();
        prop_assert!(r.margin >= -1e-9);
        // the minors-based purities agree with the Pauli-tensor ones
        let t = MonogamyTerms::from_pure(&psi).unwrap();
        prop_assert!((t.h_a_bc - r.h_a_bc).abs() < 1e-6);
        prop_assert!((t.h_tot() - r.h_tot).abs() < 1e-6);
    }

    #[test]
    fn f_is_even_in_every_coordinate(
        c in (0.01f64..1.0, 0.0f64..1.0, 0.01f64..1.0, 0.01f64..1.0),
        flip in 0usize..4,
    ) {
        let p = SchmidtParams::project([c.0, c.1, c.2, c.3]).unwrap();
        let mut q = p.to_array();
        q[flip] = -q[flip];
        let direct = |a: [f64; 4]| {
            let n = a.iter().map(|v| v * v).sum::<f64>().sqrt();
            let [x, y, z, h] = a.map(|v| v / n);
            let amps = [x, 0.0, 0.0, 0.0, y, z, h, 0.0];
            let psi = PureState::normalized(amps.iter().map(|&v| C64::new(v, 0.0)).collect()).unwrap();
            let r = steering_report(&density_from_pure(&psi), &ReportOptions::default()).unwrap();
            r.h_a_bc - r.h_tot
        };
        prop_assert!((direct(q) - f_pipeline(&p)).abs() < 1e-7);
    }

    #[test]
    fn report_is_permutation_covariant(psi in amplitudes()) {
        // swapping B and C exchanges H(A→B) with H(A→C) and leaves H(A→BC)
        let rho = density_from_pure(&psi);
        let swapped = permute_qubits(&rho, &Permutation::ACB).unwrap();
        let r = steering_report(&rho, &ReportOptions::default()).unwrap();
        let s = steering_report(&swapped, &ReportOptions::default()).unwrap();
        prop_assert!((r.h_a_bc - s.h_a_bc).abs() < 1e-12);
        prop_assert!((r.h_ab - s.h_ac).abs() < 1e-12);
        prop_assert!((r.h_ac - s.h_ab).abs() < 1e-12);
    }
}
