//! Acceptance checks, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines show up in plain
//! `cargo test` output. The process fails if any check fails, except for
//! checks listed as known discrepancies: those compare against formulas that
//! are misprinted in the source material, and are reported as FAIL together
//! with the corrected comparison, which must pass.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::Rng;

use tristeer::monogamy::{
    f_pipeline, match_fixtures, minimize_f, verify_monogamy, MinimizeConfig, OctantSampler,
    VerifyConfig,
};
use tristeer::pauli::{pair_pauli, PurityCut};
use tristeer::randgen::{random_state_at, random_states, rng_for, RandomStateSpec, StateMode};
use tristeer::steering::{
    correlation_from_pair, correlation_one_to_two, correlation_two_to_one, one_to_two_criterion,
};
use tristeer::{
    density_from_pure, ghz_state, partial_trace, pauli_tensor, permute_qubits, purity,
    purity_from_theta, schmidt_state, steering_report, w_state, Classification, DensityMatrix,
    Permutation, Qubit, ReportOptions, SchmidtParams, SteeringReport, C64,
};

/// Agreement required between the pipeline and a closed form.
const CLOSED_FORM: f64 = 1e-10;
/// Tolerance on the GHZ(π/4) point values.
const POINT: f64 = 1e-9;
/// The point values are quoted to seven decimals.
const QUOTED: f64 = 5e-8;
/// Slack on the monogamy margin.
const MONOGAMY: f64 = -1e-9;
/// Local-unitary invariance of H values.
const LU: f64 = 1e-9;

struct Outcome {
    pass: bool,
    detail: String,
    /// Set when a FAIL is the documented consequence of a misprint.
    known_discrepancy: bool,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Outcome {
            pass,
            detail,
            known_discrepancy: false,
        }
    }
}

/// Largest deviation over a grid and whether it is within `tol`.
#[derive(Default)]
struct Dev {
    max: f64,
    at: f64,
}

impl Dev {
    fn add(&mut self, param: f64, got: f64, want: f64) {
        let d = (got - want).abs();
        // a NaN deviation must register as a failure
        if d.is_nan() || d > self.max {
            self.max = d;
            self.at = param;
        }
    }

    fn ok(&self, tol: f64) -> bool {
        self.max <= tol
    }

    fn show(&self, name: &str) -> String {
        format!("{name} max dev {:.1e} (at {:.4})", self.max, self.at)
    }
}

fn grid(n: usize, start: f64, stop: f64) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| {
        let t = i as f64 / (n - 1) as f64;
        start * (1.0 - t) + stop * t
    })
}

fn report(rho: &DensityMatrix) -> SteeringReport {
    steering_report(rho, &ReportOptions::default()).expect("three-qubit state")
}

// ---------------------------------------------------------------------------

fn ghz_closed_forms() -> Outcome {
    let start = Instant::now();
    let (mut norm, mut lam_a, mut lam_bc, mut pairs) = (
        Dev::default(),
        Dev::default(),
        Dev::default(),
        Dev::default(),
    );
    for th in grid(1001, 0.0, FRAC_PI_2) {
        let rho = density_from_pure(&ghz_state(th));
        let theta = pauli_tensor(&rho).unwrap();
        let (s, c) = th.sin_cos();
        let c2s2 = c * c * s * s;
        norm.add(
            th,
            one_to_two_criterion(&theta).trace_norm,
            2.0 * (c * s).abs() + 2.0 * c2s2,
        );
        lam_a.add(
            th,
            2.0 - purity_from_theta(&theta, PurityCut::A),
            (5.0 - (4.0 * th).cos()) / 4.0,
        );
        lam_bc.add(
            th,
            1.0 - purity_from_theta(&theta, PurityCut::BC),
            2.0 * c2s2,
        );
        let p = c.powi(4) + s.powi(4);
        let h_pair = 2.0 * c2s2 - ((2.0 - p) * (1.0 - p)).sqrt();
        let r = report(&rho);
        for h in [r.h_ab, r.h_ac, r.h_bc] {
            pairs.add(th, h, h_pair);
        }
    }
    let elapsed = start.elapsed();
    let ok = [&norm, &lam_a, &lam_bc, &pairs]
        .iter()
        .all(|d| d.ok(CLOSED_FORM))
        && elapsed < Duration::from_secs(10);
    Outcome::new(
        ok,
        format!(
            "1001 angles on [0, π/2]: {}; {}; {}; {}; {:.2?} (< 10 s)",
            norm.show("‖M‖"),
            lam_a.show("2−trρa²"),
            lam_bc.show("1−trρbc²"),
            pairs.show("H pairs"),
            elapsed
        ),
    )
}

fn ghz_point() -> Outcome {
    let rho = density_from_pure(&ghz_state(FRAC_PI_4));
    let c = one_to_two_criterion(&pauli_tensor(&rho).unwrap());
    let exact = [1.5, 0.75f64.sqrt(), 1.5 - 0.75f64.sqrt()];
    let quoted = [1.5, 0.8660254, 0.6339746];
    let got = [c.trace_norm, c.bound, c.h];
    let ok = got.iter().zip(&exact).all(|(g, e)| (g - e).abs() <= POINT)
        && got
            .iter()
            .zip(&quoted)
            .all(|(g, q)| (g - q).abs() <= QUOTED)
        && report(&rho).classification == Classification::Corollary2;
    Outcome::new(
        ok,
        format!(
            "‖M‖ = {:.10}, bound = {:.10}, H(A→BC) = {:.10} (exact 3/2, √3/2, 3/2−√3/2 within {POINT:.0e}; quoted digits within {QUOTED:.0e})",
            got[0], got[1], got[2]
        ),
    )
}

fn w_closed_forms() -> Outcome {
    let th = FRAC_PI_3;
    let (mut printed_norm, mut corrected_norm) = (Dev::default(), Dev::default());
    let (mut lam_a, mut lam_bc, mut pa, mut pb, mut pc) = (
        Dev::default(),
        Dev::default(),
        Dev::default(),
        Dev::default(),
        Dev::default(),
    );
    for al in grid(1001, 0.0, PI) {
        let rho = density_from_pure(&w_state(th, al));
        let theta = pauli_tensor(&rho).unwrap();
        let g = (5.0 + 3.0 * (2.0 * al).cos()) * al.sin().powi(2);
        let norm = one_to_two_criterion(&theta).trace_norm;
        printed_norm.add(al, norm, (3.0 / 8.0 * g).sqrt() + (3.0 / 32.0 * g).abs());
        corrected_norm.add(al, norm, (3.0 / 8.0 * g).sqrt() + (3.0 / 16.0 * g).abs());
        let (c2, c4) = ((2.0 * al).cos(), (4.0 * al).cos());
        lam_a.add(
            al,
            2.0 - purity_from_theta(&theta, PurityCut::A),
            (85.0 - 12.0 * c2 - 9.0 * c4) / 64.0,
        );
        // the printed left-hand side reads 2 − tr ρ_bc²; the right-hand side
        // is 1 − tr ρ_bc²
        lam_bc.add(
            al,
            1.0 - purity_from_theta(&theta, PurityCut::BC),
            3.0 / 16.0 * g,
        );
        pa.add(
            al,
            purity(&partial_trace(&rho, &[Qubit::A]).unwrap()),
            (43.0 + 12.0 * c2 + 9.0 * c4) / 64.0,
        );
        pb.add(
            al,
            purity(&partial_trace(&rho, &[Qubit::B]).unwrap()),
            (51.0 + 12.0 * c2 + c4) / 64.0,
        );
        pc.add(
            al,
            purity(&partial_trace(&rho, &[Qubit::C]).unwrap()),
            al.cos().powi(4) + al.sin().powi(4),
        );
    }
    let rest_ok = [&lam_a, &lam_bc, &pa, &pb, &pc]
        .iter()
        .all(|d| d.ok(CLOSED_FORM));
    let detail = format!(
        "θ = π/3, 1001 angles on [0, π]: printed {}; with second term 3/16 instead of 3/32: {}; {}; {} (RHS, LHS read as 1−trρbc²); purities {}, {}, {}",
        printed_norm.show("‖M‖"),
        corrected_norm.show("‖M‖"),
        lam_a.show("2−trρa²"),
        lam_bc.show("1−trρbc²"),
        pa.show("trρa²"),
        pb.show("trρb²"),
        pc.show("trρc²"),
    );
    let pass = printed_norm.ok(CLOSED_FORM) && rest_ok;
    // the printed trace norm is off by a factor of two in its second term;
    // everything else, including the corrected trace norm, must agree
    let known = !pass && rest_ok && corrected_norm.ok(CLOSED_FORM);
    Outcome {
        pass,
        detail,
        known_discrepancy: known,
    }
}

fn appendix_fixtures() -> Outcome {
    let start = Instant::now();
    let result = minimize_f(&MinimizeConfig {
        starts: 2000,
        ..MinimizeConfig::default()
    });
    let matches = match_fixtures(&result.points);
    let verification = verify_monogamy(&VerifyConfig::default(), &result.points);
    let elapsed = start.elapsed();

    let edge =
        f_pipeline(&SchmidtParams::project([0.0, 0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap());
    let vertex = f_pipeline(&SchmidtParams::new(0.0, 1.0, 0.0, 0.0).unwrap());
    let interior = matches[0].matched.as_ref();
    let residual = result
        .points
        .iter()
        .map(|p| p.params.constraint_residual())
        .fold(0.0, f64::max);
    let ok = matches.iter().all(|m| m.pass)
        && (edge - 0.780239).abs() <= 1e-5
        && vertex.abs() <= 1e-9
        && verification.pass
        && residual < 1e-10
        && elapsed < Duration::from_secs(300);
    let interior_desc = interior.map_or("not found".to_string(), |p| {
        let [x, y, z, h] = p.coordinates();
        format!("f = {:.6} at ({x:.6}, {y:.6}, {z:.6}, {h:.6})", p.f_value)
    });
    Outcome::new(
        ok,
        format!(
            "2000 starts: interior {interior_desc}; f(0,0,1/√2,1/√2) = {edge:.6}; f(0,1,0,0) = {vertex:.1e}; fixtures matched {}/3; global min over {} samples {:.1e}; sphere residual {residual:.1e}; {:.2?} (< 5 min)",
            matches.iter().filter(|m| m.pass).count(),
            verification.samples,
            verification.min,
            elapsed
        ),
    )
}

fn monte_carlo() -> Outcome {
    let start = Instant::now();
    let spec = RandomStateSpec::new(2024, StateMode::Pure, 10_000);
    let reports: Vec<SteeringReport> = random_states(&spec).iter().map(report).collect();
    let elapsed = start.elapsed();
    let ok_count = reports.iter().filter(|r| r.margin >= MONOGAMY).count();
    let min = reports
        .iter()
        .map(|r| r.margin)
        .fold(f64::INFINITY, f64::min);
    let c1: Vec<_> = reports
        .iter()
        .filter(|r| r.classification == Classification::Corollary1)
        .collect();
    let c2: Vec<_> = reports
        .iter()
        .filter(|r| r.classification == Classification::Corollary2)
        .collect();
    let c1_ok = c1.iter().all(|r| r.s_a_bc >= r.s_tot + MONOGAMY);
    let c2_ok = c2.iter().all(|r| r.s_tot == 0.0);
    let ok = ok_count == reports.len() && c1_ok && c2_ok && elapsed < Duration::from_secs(300);
    Outcome::new(
        ok,
        format!(
            "10000 random pure states (seed 2024): S(A→BC) − H_tot ≥ −1e-9 for {ok_count}/10000, min {min:.4}; corollary-1 subset {} states, S(A→BC) ≥ S_tot: {c1_ok}; corollary-2 subset {} states, S_tot = 0: {c2_ok}; {:.2?} (< 5 min)",
            c1.len(),
            c2.len(),
            elapsed
        ),
    )
}

fn unitary<R: Rng>(rng: &mut R) -> DMatrix<C64> {
    let [a, b, c, d] = [(); 4].map(|_| rng.gen::<f64>() * std::f64::consts::TAU);
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

fn local_unitary<R: Rng>(rng: &mut R) -> DMatrix<C64> {
    unitary(rng)
        .kronecker(&unitary(rng))
        .kronecker(&unitary(rng))
}

fn all_h(rho: &DensityMatrix) -> Vec<f64> {
    let r = steering_report(rho, &ReportOptions::everything()).unwrap();
    let mut v = vec![r.h_a_bc, r.h_ab, r.h_ac, r.h_bc];
    for cut in &r.cuts {
        v.push(cut.one_to_two.h);
        v.extend(cut.two_to_one.as_ref().map(|d| d.h));
    }
    v.extend(r.pairs.iter().map(|p| p.h));
    v
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn property_suite() -> Outcome {
    let mut states = random_states(&RandomStateSpec::new(31, StateMode::Mixed, 100));
    states.extend(random_states(&RandomStateSpec::new(
        32,
        StateMode::Pure,
        100,
    )));

    let mut border = 0.0f64;
    let (mut roundtrip, mut parseval) = (0.0f64, 0.0f64);
    let (mut trace_comp, mut perm_ok) = (0.0f64, true);
    for rho in &states {
        let theta = pauli_tensor(rho).unwrap();
        let pair = pair_pauli(&partial_trace(rho, &[Qubit::B, Qubit::C]).unwrap()).unwrap();
        for c in [
            correlation_one_to_two(&theta),
            correlation_two_to_one(&theta),
            correlation_from_pair(&pair),
        ] {
            border = border
                .max(c.entries().row(0).amax())
                .max(c.entries().column(0).amax());
        }
        roundtrip = roundtrip.max(max_abs(&(theta.reconstruct() - rho.matrix())));
        parseval = parseval.max((purity_from_theta(&theta, PurityCut::Full) - purity(rho)).abs());

        let ab = partial_trace(rho, &[Qubit::A, Qubit::B]).unwrap();
        let direct = partial_trace(rho, &[Qubit::B]).unwrap();
        trace_comp = trace_comp.max(max_abs(
            &(partial_trace(&ab, &[Qubit::B]).unwrap().into_matrix() - direct.into_matrix()),
        ));

        for p in [Permutation::BCA, Permutation::CAB, Permutation::ACB] {
            let there = permute_qubits(rho, &p).unwrap();
            perm_ok &= permute_qubits(&there, &p.inverse()).unwrap() == *rho;
        }
    }

    let mut rng = rng_for(33, 0);
    let mut lu = 0.0f64;
    for rho in states.iter().step_by(2) {
        let rotated = rho.conjugate_by(&local_unitary(&mut rng)).unwrap();
        for (a, b) in all_h(rho).iter().zip(all_h(&rotated)) {
            lu = lu.max((a - b).abs());
        }
    }

    let spec = RandomStateSpec::new(34, StateMode::Mixed, 10);
    let batch = random_states(&spec);
    let deterministic = batch == random_states(&spec)
        && batch[7] == random_state_at(&spec, 7)
        && batch != random_states(&RandomStateSpec { seed: 35, ..spec });

    let ok = border <= 1e-12
        && roundtrip <= 1e-10
        && parseval <= 1e-10
        && lu <= LU
        && trace_comp <= 1e-14
        && perm_ok
        && deterministic;
    Outcome::new(
        ok,
        format!(
            "200 random states: zero borders {border:.1e}; Θ round-trip {roundtrip:.1e}; Parseval {parseval:.1e}; local-unitary invariance (100 states, 16 H values) {lu:.1e}; partial-trace composition {trace_comp:.1e}; permutation round-trips {perm_ok}; per-seed determinism {deterministic}"
        ),
    )
}

fn oracle_equivalence() -> Outcome {
    let sampler = OctantSampler::new(41);
    let mut rng = rng_for(42, 0);
    let (mut direct_dev, mut rotated_dev) = (0.0f64, 0.0f64);
    for i in 0..100 {
        let p = SchmidtParams::project(sampler.point(i)).unwrap();
        let f = f_pipeline(&p);
        let rho = density_from_pure(&schmidt_state(&p));
        let r = report(&rho);
        direct_dev = direct_dev.max((f - (r.h_a_bc - r.h_tot)).abs());
        // the same state hidden behind random local unitaries: a generic
        // pure state whose canonical form is known
        let rotated = report(&rho.conjugate_by(&local_unitary(&mut rng)).unwrap());
        rotated_dev = rotated_dev.max((f - (rotated.h_a_bc - rotated.h_tot)).abs());
    }
    let ok = direct_dev <= CLOSED_FORM && rotated_dev <= CLOSED_FORM;
    Outcome::new(
        ok,
        format!(
            "100 Schmidt-family states: f via Schmidt construction vs direct 8×8 report, max dev {direct_dev:.1e}; same states under random local unitaries {rotated_dev:.1e}"
        ),
    )
}

fn main() {
    type Check = fn() -> Outcome;
    let checks: [(&str, Check); 7] = [
        ("GHZ closed forms", ghz_closed_forms),
        ("GHZ(π/4) point values", ghz_point),
        ("W closed forms", w_closed_forms),
        ("Schmidt-family critical points", appendix_fixtures),
        ("monogamy Monte Carlo", monte_carlo),
        ("property suite", property_suite),
        ("oracle equivalence", oracle_equivalence),
    ];
    let mut failed = Vec::new();
    let mut known = Vec::new();
    for (i, (name, check)) in checks.iter().enumerate() {
        let n = i + 1;
        let o = check();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        let note = if o.known_discrepancy {
            " [known misprint; corrected form passes]"
        } else {
            ""
        };
        println!("criterion {n}: {verdict} — {name}{note}: {}", o.detail);
        if !o.pass {
            if o.known_discrepancy {
                known.push(n);
            } else {
                failed.push(n);
            }
        }
    }
    println!(
        "acceptance: {}/7 PASS; known misprints {:?}; unexpected failures {:?}",
        7 - failed.len() - known.len(),
        known,
        failed
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
