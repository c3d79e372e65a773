//! JSON file formats for states, witnesses, decompositions and symmetric coefficients.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::decompose::SettingDecomposition;
use crate::error::{Error, Result};
use crate::linalg::{c, Mat};
use crate::states::{self, NamedState, PureState};
use crate::symmetric::PsmqCoefficients;
use crate::witness::{Provenance, Witness, WitnessParams};

/// `{"n": 3, "amplitudes": [[re, im], ...]}` or `{"family": "ghz", "params": {"n": 3}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateFile {
    Amplitudes { n: usize, amplitudes: Vec<[f64; 2]> },
    Named(NamedState),
}

impl StateFile {
    pub fn from_state(state: &PureState) -> Self {
        Self::Amplitudes {
            n: state.n_qubits(),
            amplitudes: state.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn to_state(&self) -> Result<PureState> {
        match self {
            Self::Amplitudes { n, amplitudes } => {
                PureState::new(*n, amplitudes.iter().map(|z| c(z[0], z[1])).collect())
            }
            Self::Named(named) => states::make_named(named),
        }
    }
}

/// `{n, matrix: row-major [[re, im], ...], provenance, params}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessFile {
    pub n: usize,
    pub matrix: Vec<[f64; 2]>,
    pub provenance: Provenance,
    #[serde(default)]
    pub params: WitnessParams,
}

impl WitnessFile {
    pub fn from_witness(w: &Witness) -> Self {
        let m = w.matrix();
        let dim = m.nrows();
        let matrix = (0..dim * dim).map(|k| m[(k / dim, k % dim)]).map(|z| [z.re, z.im]).collect();
        Self { n: w.n_qubits(), matrix, provenance: w.provenance(), params: w.params().clone() }
    }

    pub fn to_witness(&self) -> Result<Witness> {
        if self.n == 0 || self.n > 12 {
            return Err(Error::Parameter(format!("unsupported witness size {}", self.n)));
        }
        let dim = 1usize << self.n;
        if self.matrix.len() != dim * dim {
            return Err(Error::Dimension { expected: dim * dim, actual: self.matrix.len() });
        }
        let m = Mat::from_fn(dim, dim, |r, col| {
            let z = self.matrix[r * dim + col];
            c(z[0], z[1])
        });
        Witness::new(self.n, m, self.provenance, self.params.clone())
    }
}

/// `{"n": int, "dicke_coeffs": [[re, im] x (N+1)]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsmqFile {
    pub n: usize,
    pub dicke_coeffs: Vec<[f64; 2]>,
}

impl PsmqFile {
    pub fn from_coefficients(coeffs: &PsmqCoefficients) -> Self {
        Self { n: coeffs.n_qubits(), dicke_coeffs: coeffs.coeffs().iter().map(|z| [z.re, z.im]).collect() }
    }

    pub fn to_coefficients(&self) -> Result<PsmqCoefficients> {
        PsmqCoefficients::new(self.n, self.dicke_coeffs.iter().map(|z| c(z[0], z[1])).collect())
    }
}

pub type DecompositionFile = SettingDecomposition;

/// Parses JSON text, reporting syntax and shape errors with line and column.
pub fn parse_json<T: DeserializeOwned>(text: &str, origin: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        path: origin.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse_json(&text, &path.display().to_string())
}

pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Internal(e.to_string()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = to_json_string(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })
}

pub fn read_state(path: &Path) -> Result<PureState> {
    read_json::<StateFile>(path)?.to_state()
}

pub fn read_witness(path: &Path) -> Result<Witness> {
    read_json::<WitnessFile>(path)?.to_witness()
}

pub fn read_psmq(path: &Path) -> Result<PsmqCoefficients> {
    read_json::<PsmqFile>(path)?.to_coefficients()
}
