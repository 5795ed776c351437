//! The subcommands.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use tristeer::format::{read_state, write_batch, write_state, BatchHeader, StateFile};
use tristeer::monogamy::{
    match_fixtures, minimize_f, verify_monogamy, CriticalPoint, FixtureMatch, MinimizeConfig,
    Restriction, Stratum, VerificationReport, VerifyConfig,
};
use tristeer::randgen::{
    random_pure_at, random_state_at, Cascade, RandomStateSpec, StateMode, GENERATOR_NAME,
};
use tristeer::{
    density_from_pure, ghz_state, steering_report, w_state, Classification, ReportOptions,
    SteeringReport, Tolerances,
};

use crate::output::{fmt_f64, print_json, sink, write_json};
use crate::Failure;

/// Slack for the monogamy and corollary checks.
const VIOLATION: f64 = -1e-9;

fn mode_name(mode: StateMode) -> &'static str {
    match mode {
        StateMode::Pure => "pure",
        StateMode::Mixed => "mixed",
    }
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

pub fn analyze(path: &Path, all: bool, tol: &Tolerances) -> Result<(), Failure> {
    let state = read_state(path, tol)?;
    let options = if all {
        ReportOptions::everything()
    } else {
        ReportOptions::default()
    };
    let report = steering_report(&state.to_density(), &options)
        .map_err(|e| Failure::invalid_state(e.to_string()))?;
    print_json(&report)
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// sin θ|000⟩ + cos θ|111⟩, swept over θ.
    Ghz,
    /// sin θ sin α|100⟩ + sin α cos θ|010⟩ + cos α|001⟩, swept over α.
    W,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub family: Family,
    /// Fixed θ of the W family; unused for GHZ.
    pub theta: f64,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl SweepConfig {
    pub fn new(
        family: Family,
        theta: f64,
        start: Option<f64>,
        stop: Option<f64>,
        points: usize,
    ) -> Result<Self, Failure> {
        let default_stop = match family {
            Family::Ghz => std::f64::consts::FRAC_PI_2,
            Family::W => std::f64::consts::PI,
        };
        let config = SweepConfig {
            family,
            theta,
            start: start.unwrap_or(0.0),
            stop: stop.unwrap_or(default_stop),
            points,
        };
        if points < 2 {
            return Err(Failure::usage("--points must be at least 2"));
        }
        if ![config.theta, config.start, config.stop]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(Failure::usage("sweep bounds must be finite"));
        }
        Ok(config)
    }

    /// Grid value `i`; the end points are hit exactly.
    pub fn param(&self, i: usize) -> f64 {
        let t = i as f64 / (self.points - 1) as f64;
        self.start * (1.0 - t) + self.stop * t
    }

    fn report_at(&self, param: f64) -> SteeringReport {
        let psi = match self.family {
            Family::Ghz => ghz_state(param),
            Family::W => w_state(self.theta, param),
        };
        steering_report(&density_from_pure(&psi), &ReportOptions::default())
            .expect("family states have three qubits")
    }

    fn file_name(&self) -> &'static str {
        match self.family {
            Family::Ghz => "sweep-ghz.csv",
            Family::W => "sweep-w.csv",
        }
    }
}

pub fn sweep(config: &SweepConfig, out: Option<&Path>) -> Result<(), Failure> {
    let rows: Vec<(f64, SteeringReport)> = (0..config.points)
        .into_par_iter()
        .map(|i| {
            let p = config.param(i);
            (p, config.report_at(p))
        })
        .collect();
    let mut w = csv::Writer::from_writer(sink(out, config.file_name())?);
    w.write_record(["param", "h_a_bc", "s_a_bc", "h_ab", "h_ac", "h_bc", "h_tot"])?;
    for (p, r) in &rows {
        w.write_record([*p, r.h_a_bc, r.s_a_bc, r.h_ab, r.h_ac, r.h_bc, r.h_tot].map(fmt_f64))?;
    }
    w.flush()?;
    if let Some(dir) = out {
        print_json(&json!({ "file": dir.join(config.file_name()), "rows": rows.len() }))?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// montecarlo
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Filter {
    All,
    Corollary1,
    Corollary2,
}

impl Filter {
    fn keeps(self, c: Classification) -> bool {
        match self {
            Filter::All => true,
            Filter::Corollary1 => c == Classification::Corollary1,
            Filter::Corollary2 => c == Classification::Corollary2,
        }
    }
}

#[derive(Debug, Default, Serialize)]
pub struct ClassCounts {
    pub corollary1: usize,
    pub corollary2: usize,
    pub mixed: usize,
}

#[derive(Debug, Serialize)]
pub struct MonteCarloSummary {
    pub seed: u64,
    pub mode: StateMode,
    pub cascade: Cascade,
    pub generator: &'static str,
    pub count: usize,
    pub filter: Filter,
    pub rows: usize,
    pub counts: ClassCounts,
    pub min_margin: f64,
    pub min_margin_index: usize,
    /// States with S(A→BC) − H_tot below −1e-9.
    pub violations: usize,
    /// Corollary-1 states with S(A→BC) < S_tot − 1e-9.
    pub corollary1_violations: usize,
    /// Corollary-2 states with S_tot ≠ 0.
    pub corollary2_violations: usize,
    pub csv: Option<PathBuf>,
}

pub fn montecarlo(
    seed: u64,
    count: usize,
    mode: StateMode,
    cascade: Cascade,
    filter: Filter,
    out: Option<&Path>,
) -> Result<(), Failure> {
    if count == 0 {
        return Err(Failure::usage("--count must be at least 1"));
    }
    let spec = RandomStateSpec {
        seed,
        mode,
        count,
        cascade,
    };
    let reports: Vec<SteeringReport> = (0..count as u64)
        .into_par_iter()
        .map(|i| {
            steering_report(&random_state_at(&spec, i), &ReportOptions::default())
                .expect("three-qubit state")
        })
        .collect();

    let base = format!("montecarlo-{}-seed{seed}", mode_name(mode));
    let csv_name = format!("{base}.csv");
    let mut w = csv::Writer::from_writer(sink(out, &csv_name)?);
    w.write_record([
        "index",
        "h_a_bc",
        "s_a_bc",
        "h_ab",
        "h_ac",
        "h_bc",
        "s_ab",
        "s_ac",
        "s_bc",
        "h_tot",
        "s_tot",
        "classification",
        "margin",
    ])?;

    let mut counts = ClassCounts::default();
    let (mut min_margin, mut min_margin_index) = (f64::INFINITY, 0);
    let (mut violations, mut c1_violations, mut c2_violations, mut rows) = (0, 0, 0, 0);
    for (i, r) in reports.iter().enumerate() {
        match r.classification {
            Classification::Corollary1 => {
                counts.corollary1 += 1;
                if r.s_a_bc - r.s_tot < VIOLATION {
                    c1_violations += 1;
                }
            }
            Classification::Corollary2 => {
                counts.corollary2 += 1;
                if r.s_tot != 0.0 {
                    c2_violations += 1;
                }
            }
            Classification::Mixed => counts.mixed += 1,
        }
        if r.margin < min_margin {
            (min_margin, min_margin_index) = (r.margin, i);
        }
        if r.margin < VIOLATION {
            violations += 1;
        }
        if filter.keeps(r.classification) {
            rows += 1;
            let mut record = vec![i.to_string()];
            record.extend(
                [
                    r.h_a_bc, r.s_a_bc, r.h_ab, r.h_ac, r.h_bc, r.s_ab, r.s_ac, r.s_bc, r.h_tot,
                    r.s_tot,
                ]
                .map(fmt_f64),
            );
            record.push(r.classification.to_string());
            record.push(fmt_f64(r.margin));
            w.write_record(&record)?;
        }
    }
    w.flush()?;
    drop(w);

    let summary = MonteCarloSummary {
        seed,
        mode,
        cascade,
        generator: GENERATOR_NAME,
        count,
        filter,
        rows,
        counts,
        min_margin,
        min_margin_index,
        violations,
        corollary1_violations: c1_violations,
        corollary2_violations: c2_violations,
        csv: out.map(|d| d.join(&csv_name)),
    };
    match out {
        Some(dir) => {
            write_json(&dir.join(format!("{base}-summary.json")), &summary)?;
            print_json(&summary)?;
        }
        None => eprintln!("{}", serde_json::to_string_pretty(&summary)?),
    }

    // the relation is only guaranteed for pure states
    if mode == StateMode::Pure && violations + c1_violations + c2_violations > 0 {
        return Err(Failure::check_failed(format!(
            "monogamy violated: {violations} margin, {c1_violations} corollary-1, {c2_violations} corollary-2"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// verify-appendix
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
pub struct AppendixReport {
    pub seed: u64,
    pub starts: usize,
    pub searches: usize,
    pub dropped: usize,
    pub flat_strata: Vec<Stratum>,
    pub critical_points: Vec<CriticalPoint>,
    pub max_constraint_residual: f64,
    pub fixtures: Vec<FixtureMatch>,
    pub verification: VerificationReport,
    pub pass: bool,
}

fn print_table(report: &AppendixReport) {
    eprintln!(
        "critical points ({} searches, {} dropped)",
        report.searches, report.dropped
    );
    eprintln!(
        "{:>16}  {:>10} {:>10} {:>10} {:>10}  {:<18} {:<10} kind",
        "f", "x", "y", "z", "h", "location", "region"
    );
    for p in &report.critical_points {
        let [x, y, z, h] = p.coordinates();
        let location = serde_json::to_value(p.location)
            .ok()
            .and_then(|v| v.as_str().map(String::from));
        let region = serde_json::to_value(p.region)
            .ok()
            .and_then(|v| v.as_str().map(String::from));
        let flat = p.flat.map(|s| format!(" (flat {s})")).unwrap_or_default();
        eprintln!(
            "{:>16.12}  {x:>10.7} {y:>10.7} {z:>10.7} {h:>10.7}  {:<18} {:<10} {:?}{flat}",
            p.f_value,
            location.unwrap_or_default(),
            region.unwrap_or_default(),
            p.kind,
        );
    }
    for m in &report.fixtures {
        let found = m.matched.as_ref().map_or("not found".to_string(), |p| {
            format!("found f = {:.9}", p.f_value)
        });
        eprintln!(
            "fixture {:<18} f = {:.6} ± {:e}: {found}; f at quoted point = {:.9} -> {}",
            m.fixture.name,
            m.fixture.f,
            m.fixture.f_tol,
            m.value_at_fixture,
            if m.pass { "PASS" } else { "FAIL" }
        );
    }
    let v = &report.verification;
    eprintln!(
        "global minimum over {} samples + {} critical points: {:.3e} -> {}",
        v.samples,
        v.critical_points,
        v.min,
        if v.pass { "PASS" } else { "FAIL" }
    );
}

pub fn verify_appendix(
    seed: u64,
    starts: usize,
    samples: usize,
    out: Option<&Path>,
) -> Result<(), Failure> {
    if starts == 0 || samples == 0 {
        return Err(Failure::usage("--starts and --samples must be at least 1"));
    }
    let config = MinimizeConfig {
        starts,
        seed,
        ..MinimizeConfig::default()
    };
    let result = minimize_f(&config);
    let fixtures = match_fixtures(&result.points);
    let verification = verify_monogamy(
        &VerifyConfig {
            samples,
            seed,
            restriction: Restriction::None,
        },
        &result.points,
    );
    let max_constraint_residual = result
        .points
        .iter()
        .map(|p| p.params.constraint_residual())
        .fold(0.0, f64::max);
    let pass = verification.pass && fixtures.iter().all(|m| m.pass);
    let report = AppendixReport {
        seed,
        starts,
        searches: result.searches,
        dropped: result.dropped,
        flat_strata: result.flat,
        critical_points: result.points,
        max_constraint_residual,
        fixtures,
        verification,
        pass,
    };
    print_table(&report);
    if let Some(dir) = out {
        write_json(&dir.join("verify-appendix.json"), &report)?;
    }
    print_json(&report)?;
    if !pass {
        let missed: Vec<&str> = report
            .fixtures
            .iter()
            .filter(|m| !m.pass)
            .map(|m| m.fixture.name)
            .collect();
        return Err(Failure::check_failed(if missed.is_empty() {
            format!(
                "monogamy margin minimum {:e} below tolerance",
                report.verification.min
            )
        } else {
            format!("fixtures not matched: {}", missed.join(", "))
        }));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// random
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Layout {
    /// Header line plus one state per line.
    Jsonl,
    /// `state-00000.json`, `state-00001.json`, … in the output directory.
    Files,
}

pub fn random(
    seed: u64,
    mode: StateMode,
    count: usize,
    cascade: Cascade,
    layout: Layout,
    out: Option<&Path>,
) -> Result<(), Failure> {
    if count == 0 {
        return Err(Failure::usage("--count must be at least 1"));
    }
    let spec = RandomStateSpec {
        seed,
        mode,
        count,
        cascade,
    };
    let files: Vec<StateFile> = (0..count as u64)
        .into_par_iter()
        .map(|i| match mode {
            StateMode::Pure => StateFile::from_pure(&random_pure_at(seed, i)),
            StateMode::Mixed => StateFile::from_density(&random_state_at(&spec, i)),
        })
        .collect();
    let header = BatchHeader::for_spec(&spec);
    match layout {
        Layout::Jsonl => {
            let name = format!("random-{}-seed{seed}.jsonl", mode_name(mode));
            let mut w = sink(out, &name)?;
            write_batch(&mut w, &header, files)?;
            w.flush()?;
            if let Some(dir) = out {
                print_json(&json!({ "batch": header, "file": dir.join(name) }))?;
            }
        }
        Layout::Files => {
            let dir = out
                .ok_or_else(|| Failure::usage("--layout files needs --out or TRISTEER_OUT_DIR"))?;
            let mut written = Vec::with_capacity(count);
            for (i, file) in files.into_iter().enumerate() {
                let path = dir.join(format!("state-{i:05}.json"));
                let meta = json!({ "batch": header, "index": i });
                write_state(&path, &file.with_metadata(meta))?;
                written.push(path);
            }
            print_json(&json!({ "batch": header, "files": written }))?;
        }
    }
    Ok(())
}
