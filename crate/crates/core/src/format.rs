//! The JSON state file format.
//!
//! A pure state is written as
//!
//! ```json
//! {"qubits": 3, "kind": "pure", "amplitudes": [[0.7071, 0], [0, 0], ...]}
//! ```
//!
//! and a mixed state as
//!
//! ```json
//! {"qubits": 3, "kind": "mixed", "matrix": [[[0.5, 0], ...], ...]}
//! ```
//!
//! with each complex number given as `[re, im]`, the matrix row-major and
//! basis state `|abc⟩` at index `4a + 2b + c`. `qubits` and `kind` may be
//! omitted when they can be inferred; an optional `metadata` object is carried
//! through untouched.
//!
//! A batch is a JSON-lines stream: a header line `{"batch": {...}}` recording
//! how the states were generated, followed by one state object per line.

use std::io::{BufRead, Write};
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::randgen::{Cascade, RandomStateSpec, StateMode, GENERATOR_NAME};
use crate::state::{density_from_pure, DensityMatrix, PureState, StateError};
use crate::tolerance::Tolerances;
use crate::C64;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    /// Valid JSON that does not describe a state of the right shape.
    #[error("malformed state file: {0}")]
    Malformed(String),
    /// Well-formed file whose contents are not a physical state.
    #[error("invalid state: {0}")]
    InvalidState(#[from] StateError),
}

impl FormatError {
    /// True when the file was readable and well-formed but the state failed
    /// validation.
    pub fn is_invalid_state(&self) -> bool {
        matches!(self, FormatError::InvalidState(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Pure,
    Mixed,
}

/// On-disk representation, before validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubits: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<StateKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Value>,
}

/// A validated state read from a file.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadedState {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl LoadedState {
    pub fn qubits(&self) -> usize {
        match self {
            LoadedState::Pure(p) => p.qubits(),
            LoadedState::Mixed(m) => m.qubits(),
        }
    }

    pub fn to_density(&self) -> DensityMatrix {
        match self {
            LoadedState::Pure(p) => density_from_pure(p),
            LoadedState::Mixed(m) => m.clone(),
        }
    }
}

fn complex(v: [f64; 2]) -> C64 {
    C64::new(v[0], v[1])
}

fn pair(c: C64) -> [f64; 2] {
    [c.re, c.im]
}

fn dimension_for(qubits: usize) -> Result<usize, FormatError> {
    match qubits {
        1..=3 => Ok(1 << qubits),
        _ => Err(FormatError::Malformed(format!(
            "\"qubits\" must be 1, 2 or 3, got {qubits}"
        ))),
    }
}

fn check_finite<'a>(values: impl IntoIterator<Item = &'a [f64; 2]>) -> Result<(), FormatError> {
    if values.into_iter().flatten().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(FormatError::Malformed("non-finite number".into()))
    }
}

impl StateFile {
    pub fn from_pure(psi: &PureState) -> Self {
        StateFile {
            qubits: Some(psi.qubits()),
            kind: Some(StateKind::Pure),
            amplitudes: Some(psi.amplitudes().iter().copied().map(pair).collect()),
            matrix: None,
            metadata: None,
        }
    }

    pub fn from_density(rho: &DensityMatrix) -> Self {
        let m = rho.matrix();
        let rows = (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| pair(m[(r, c)])).collect());
        StateFile {
            qubits: Some(rho.qubits()),
            kind: Some(StateKind::Mixed),
            amplitudes: None,
            matrix: Some(rows.collect()),
            metadata: None,
        }
    }

    pub fn with_metadata(mut self, metadata: Value) -> Self {
        self.metadata = Some(metadata);
        self
    }

    /// Checks the shape and then validates the state against `tol`. Pure
    /// states accepted only under a loose normalization tolerance are
    /// rescaled to unit norm; anything else is kept bit-for-bit.
    pub fn load(&self, tol: &Tolerances) -> Result<LoadedState, FormatError> {
        let kind = match (self.kind, &self.amplitudes, &self.matrix) {
            (_, Some(_), Some(_)) => {
                return Err(FormatError::Malformed(
                    "give either \"amplitudes\" or \"matrix\", not both".into(),
                ))
            }
            (None, None, None) | (Some(_), None, None) => {
                return Err(FormatError::Malformed(
                    "missing \"amplitudes\" or \"matrix\"".into(),
                ))
            }
            (Some(StateKind::Pure), None, Some(_)) => {
                return Err(FormatError::Malformed(
                    "pure state needs \"amplitudes\"".into(),
                ))
            }
            (Some(StateKind::Mixed), Some(_), None) => {
                return Err(FormatError::Malformed(
                    "mixed state needs \"matrix\"".into(),
                ))
            }
            (_, Some(_), None) => StateKind::Pure,
            (_, None, Some(_)) => StateKind::Mixed,
        };
        let expected = self.qubits.map(dimension_for).transpose()?;
        match kind {
            StateKind::Pure => {
                let amps = self.amplitudes.as_ref().expect("checked above");
                let dim = expected.unwrap_or(amps.len());
                if amps.len() != dim || dimension_for_len(dim).is_none() {
                    return Err(FormatError::Malformed(format!(
                        "{} amplitudes; expected {}",
                        amps.len(),
                        expected.map_or("2, 4 or 8".to_string(), |d| d.to_string())
                    )));
                }
                check_finite(amps)?;
                let amps: Vec<C64> = amps.iter().copied().map(complex).collect();
                let psi = PureState::with_tolerance(amps, tol.normalization)?;
                if (psi.amplitudes().norm_squared() - 1.0).abs() <= crate::tolerance::NORMALIZATION
                {
                    return Ok(LoadedState::Pure(psi));
                }
                Ok(LoadedState::Pure(PureState::normalized(
                    psi.amplitudes().as_slice().to_vec(),
                )?))
            }
            StateKind::Mixed => {
                let rows = self.matrix.as_ref().expect("checked above");
                let dim = expected.unwrap_or(rows.len());
                if rows.len() != dim || dimension_for_len(dim).is_none() {
                    return Err(FormatError::Malformed(format!(
                        "matrix has {} rows; expected {}",
                        rows.len(),
                        expected.map_or("2, 4 or 8".to_string(), |d| d.to_string())
                    )));
                }
                if let Some((r, row)) = rows.iter().enumerate().find(|(_, row)| row.len() != dim) {
                    return Err(FormatError::Malformed(format!(
                        "matrix row {r} has {} entries; expected {dim}",
                        row.len()
                    )));
                }
                rows.iter().try_for_each(check_finite)?;
                let m = DMatrix::from_fn(dim, dim, |r, c| complex(rows[r][c]));
                Ok(LoadedState::Mixed(DensityMatrix::with_tolerances(m, tol)?))
            }
        }
    }
}

fn dimension_for_len(len: usize) -> Option<usize> {
    matches!(len, 2 | 4 | 8).then_some(len)
}

/// Parses and validates a state from JSON text.
pub fn parse_state(json: &str, tol: &Tolerances) -> Result<LoadedState, FormatError> {
    let file: StateFile = serde_json::from_str(json)?;
    file.load(tol)
}

pub fn read_state(path: &Path, tol: &Tolerances) -> Result<LoadedState, FormatError> {
    parse_state(&std::fs::read_to_string(path)?, tol)
}

pub fn write_state(path: &Path, file: &StateFile) -> Result<(), FormatError> {
    let mut text = serde_json::to_string_pretty(file)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// First line of a batch stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchHeader {
    pub seed: u64,
    pub mode: StateMode,
    pub count: usize,
    pub cascade: Cascade,
    pub generator: String,
}

impl BatchHeader {
    pub fn for_spec(spec: &RandomStateSpec) -> Self {
        BatchHeader {
            seed: spec.seed,
            mode: spec.mode,
            count: spec.count,
            cascade: spec.cascade,
            generator: GENERATOR_NAME.to_string(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct HeaderLine {
    batch: BatchHeader,
}

/// Writes the header line followed by one compact state object per line.
/// Each state gets `{"index": i}` merged into its metadata.
pub fn write_batch<W: Write>(
    mut out: W,
    header: &BatchHeader,
    states: impl IntoIterator<Item = StateFile>,
) -> Result<(), FormatError> {
    serde_json::to_writer(
        &mut out,
        &HeaderLine {
            batch: header.clone(),
        },
    )?;
    out.write_all(b"\n")?;
    for (i, mut file) in states.into_iter().enumerate() {
        let mut meta = match file.metadata.take() {
            Some(Value::Object(m)) => m,
            Some(other) => {
                let mut m = serde_json::Map::new();
                m.insert("value".into(), other);
                m
            }
            None => serde_json::Map::new(),
        };
        meta.insert("index".into(), Value::from(i));
        file.metadata = Some(Value::Object(meta));
        serde_json::to_writer(&mut out, &file)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a stream written by [`write_batch`]. Blank lines are ignored.
pub fn read_batch<R: BufRead>(
    input: R,
    tol: &Tolerances,
) -> Result<(BatchHeader, Vec<LoadedState>), FormatError> {
    let mut lines = input
        .lines()
        .filter(|l| l.as_ref().map_or(true, |s| !s.trim().is_empty()));
    let header: HeaderLine = match lines.next() {
        Some(line) => serde_json::from_str(&line?)?,
        None => return Err(FormatError::Malformed("empty batch stream".into())),
    };
    let states = lines
        .map(|line| parse_state(&line?, tol))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((header.batch, states))
}
