//! State files.
//!
//! ```json
//! {"kind": "pure", "dim": 2, "data": [[[0.7071, 0], [0, 0]], [[0, 0], [0.7071, 0]]]}
//! ```
//!
//! `data` is a row-major matrix of `[re, im]` pairs: the `N×N` coefficient
//! matrix for `"pure"`, the `N²×N²` matrix for `"density"`.

use std::fmt;
use std::path::Path;

use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::Error;
use crate::linalg::{c64, CMatrix};
use crate::mixed::DensityMatrix;
use crate::purestate::PureState;

/// Validation tolerance for file inputs (normalization, trace, Hermiticity).
pub const FILE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateKind {
    Pure,
    Density,
}

impl StateKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            StateKind::Pure => "pure",
            StateKind::Density => "density",
        }
    }
}

/// A parsed but not yet validated state file.
#[derive(Debug, Clone, PartialEq)]
pub struct StateFile {
    pub kind: StateKind,
    pub dim: usize,
    pub data: CMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LoadedState {
    Pure(PureState),
    Density(DensityMatrix),
}

impl LoadedState {
    /// Pure inputs become `|ψ⟩⟨ψ|`.
    pub fn into_density(self) -> DensityMatrix {
        match self {
            LoadedState::Pure(p) => DensityMatrix::from_pure(&p),
            LoadedState::Density(d) => d,
        }
    }

    pub fn kind(&self) -> StateKind {
        match self {
            LoadedState::Pure(_) => StateKind::Pure,
            LoadedState::Density(_) => StateKind::Density,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LoadError {
    Io(String),
    Parse(String),
    Validation(Error),
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoadError::Io(m) => write!(f, "cannot read input: {m}"),
            LoadError::Parse(m) => write!(f, "parse error: {m}"),
            LoadError::Validation(e) => write!(f, "validation error: {e}"),
        }
    }
}

impl std::error::Error for LoadError {}

fn parse_err(m: impl Into<String>) -> LoadError {
    LoadError::Parse(m.into())
}

fn parse_entry(v: &Value, r: usize, c: usize) -> Result<f64, LoadError> {
    v.as_f64()
        .ok_or_else(|| parse_err(format!("entry ({r},{c}) must hold numbers")))
}

pub fn parse_state_file(text: &str) -> Result<StateFile, LoadError> {
    let root: Value = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
    let obj = root.as_object().ok_or_else(|| parse_err("top level must be an object"))?;
    let kind = match obj.get("kind").and_then(Value::as_str) {
        Some("pure") => StateKind::Pure,
        Some("density") => StateKind::Density,
        Some(other) => return Err(parse_err(format!("unknown kind {other:?}"))),
        None => return Err(parse_err("missing string field \"kind\"")),
    };
    let dim = obj
        .get("dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| parse_err("missing integer field \"dim\""))? as usize;
    if dim < 2 {
        return Err(parse_err("dim must be at least 2"));
    }
    let size = match kind {
        StateKind::Pure => dim,
        StateKind::Density => dim * dim,
    };
    let rows = obj
        .get("data")
        .and_then(Value::as_array)
        .ok_or_else(|| parse_err("missing array field \"data\""))?;
    if rows.len() != size {
        return Err(parse_err(format!("expected {size} rows, found {}", rows.len())));
    }
    let mut data = CMatrix::zeros(size, size);
    for (r, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| parse_err(format!("row {r} must be an array")))?;
        if row.len() != size {
            return Err(parse_err(format!("row {r}: expected {size} entries, found {}", row.len())));
        }
        for (c, entry) in row.iter().enumerate() {
            let pair = entry
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| parse_err(format!("entry ({r},{c}) must be [re, im]")))?;
            data[(r, c)] = c64(parse_entry(&pair[0], r, c)?, parse_entry(&pair[1], r, c)?);
        }
    }
    Ok(StateFile { kind, dim, data })
}

impl StateFile {
    pub fn validate(self) -> Result<LoadedState, LoadError> {
        match self.kind {
            StateKind::Pure => PureState::from_coefficients(self.data, FILE_TOL, true)
                .map(LoadedState::Pure)
                .map_err(LoadError::Validation),
            StateKind::Density => DensityMatrix::new(self.dim, self.data, FILE_TOL)
                .map(LoadedState::Density)
                .map_err(LoadError::Validation),
        }
    }

    /// Inverse of `parse_state_file`.
    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .data
            .row_iter()
            .map(|row| Value::Array(row.iter().map(|z| serde_json::json!([z.re, z.im])).collect()))
            .collect();
        let v = serde_json::json!({"kind": self.kind.as_str(), "dim": self.dim, "data": rows});
        serde_json::to_string(&v).expect("serializable") + "\n"
    }
}

/// A validated state and the SHA-256 of the file bytes.
pub struct Loaded {
    pub state: LoadedState,
    pub digest: String,
}

pub fn load_state(path: &Path, expected: Option<StateKind>) -> Result<Loaded, LoadError> {
    let bytes = std::fs::read(path).map_err(|e| LoadError::Io(format!("{}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes).map_err(|e| parse_err(e.to_string()))?;
    let file = parse_state_file(text)?;
    if let Some(kind) = expected {
        if file.kind != kind {
            return Err(parse_err(format!(
                "expected a {} state, file holds {}",
                kind.as_str(),
                file.kind.as_str()
            )));
        }
    }
    let digest = format!("sha256:{:x}", Sha256::digest(&bytes));
    Ok(Loaded {
        state: file.validate()?,
        digest,
    })
}
