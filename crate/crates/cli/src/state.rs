//! Versioned JSON state files.
//!
//! ```json
//! {"schema_version": 1, "kind": "probability-triple", "payload": {"p1": 0.5, "p2": 0.5, "p3": 1.0}}
//! ```
//!
//! Matrix payloads (`density2`, `amplitude2`) are `{"re": [[..],[..]], "im": [[..],[..]]}`.

use std::fs;
use std::path::Path;

use coinrep_core::cmat::{CMat2, C64};
use coinrep_core::mat4prob::ProbTable15;
use coinrep_core::qubit::{self, DensityMatrix2, ProbabilityTriple};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexMatrix2 {
    pub re: [[f64; 2]; 2],
    pub im: [[f64; 2]; 2],
}

impl ComplexMatrix2 {
    pub fn to_cmat(self) -> Result<CMat2, CliError> {
        let m = CMat2::from_rows(std::array::from_fn(|i| {
            std::array::from_fn(|j| C64::new(self.re[i][j], self.im[i][j]))
        }));
        if !m.is_finite() {
            return Err(CliError::Schema("matrix entries must be finite".into()));
        }
        Ok(m)
    }

    pub fn from_cmat(m: &CMat2) -> Self {
        ComplexMatrix2 {
            re: std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)].re)),
            im: std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)].im)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload")]
pub enum State {
    #[serde(rename = "probability-triple")]
    ProbabilityTriple(ProbabilityTriple),
    #[serde(rename = "density2")]
    Density2(ComplexMatrix2),
    #[serde(rename = "prob-table-15")]
    ProbTable15(ProbTable15),
    #[serde(rename = "amplitude2")]
    Amplitude2(ComplexMatrix2),
}

impl State {
    pub fn kind(&self) -> &'static str {
        match self {
            State::ProbabilityTriple(_) => "probability-triple",
            State::Density2(_) => "density2",
            State::ProbTable15(_) => "prob-table-15",
            State::Amplitude2(_) => "amplitude2",
        }
    }

    /// Qubit states as probability triples. A density matrix must be a valid
    /// density matrix; a triple is only range-checked.
    pub fn triple(&self) -> Result<ProbabilityTriple, CliError> {
        match self {
            State::ProbabilityTriple(p) => Ok(*p),
            State::Density2(m) => {
                let rho = DensityMatrix2::new(m.to_cmat()?).map_err(CliError::domain)?;
                Ok(qubit::from_density(&rho))
            }
            other => Err(CliError::Schema(format!(
                "expected a probability-triple or density2 state, got {}",
                other.kind()
            ))),
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a> {
    schema_version: u64,
    #[serde(flatten)]
    state: &'a State,
}

/// Parses and validates a state document.
pub fn parse(text: &str) -> Result<State, CliError> {
    let mut doc: Value = serde_json::from_str(text).map_err(|e| CliError::Schema(e.to_string()))?;
    let obj = doc
        .as_object_mut()
        .ok_or_else(|| CliError::Schema("state file must be a JSON object".into()))?;
    match obj.remove("schema_version") {
        Some(Value::Number(n)) if n.as_u64() == Some(SCHEMA_VERSION) => {}
        Some(v) => {
            return Err(CliError::Schema(format!(
                "unsupported schema_version {v} (this build reads {SCHEMA_VERSION})"
            )))
        }
        None => return Err(CliError::Schema("missing schema_version".into())),
    }
    if let Some(extra) = obj.keys().find(|k| *k != "kind" && *k != "payload") {
        return Err(CliError::Schema(format!("unknown field `{extra}`")));
    }
    serde_json::from_value(doc).map_err(|e| CliError::Schema(e.to_string()))
}

pub fn load(path: &Path) -> Result<State, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse(&text).map_err(|e| e.in_file(path))
}

pub fn to_json(state: &State) -> String {
    let env = Envelope {
        schema_version: SCHEMA_VERSION,
        state,
    };
    serde_json::to_string_pretty(&env).expect("state serialization cannot fail") + "\n"
}

pub fn save(path: &Path, state: &State) -> Result<(), CliError> {
    fs::write(path, to_json(state)).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triple_round_trip() {
        let s = State::ProbabilityTriple(ProbabilityTriple::new(0.6, 0.7, 0.8).unwrap());
        assert_eq!(parse(&to_json(&s)).unwrap(), s);
    }

    #[test]
    fn awkward_floats_survive() {
        let p = ProbabilityTriple::new(0.1 + 0.2, 1.0 / 3.0, 2f64.sqrt() / 2.0).unwrap();
        let s = State::ProbabilityTriple(p);
        assert_eq!(parse(&to_json(&s)).unwrap(), s);
    }

    #[test]
    fn rejects_other_versions() {
        let text = r#"{"schema_version": 2, "kind": "probability-triple", "payload": {"p1": 0.5, "p2": 0.5, "p3": 0.5}}"#;
        assert!(matches!(parse(text), Err(CliError::Schema(m)) if m.contains("schema_version 2")));
        let text = r#"{"kind": "probability-triple", "payload": {"p1": 0.5, "p2": 0.5, "p3": 0.5}}"#;
        assert!(parse(text).is_err());
    }

    #[test]
    fn rejects_out_of_range() {
        let text = r#"{"schema_version": 1, "kind": "probability-triple", "payload": {"p1": 1.5, "p2": 0.5, "p3": 0.5}}"#;
        assert!(parse(text).is_err());
    }

    #[test]
    fn rejects_unknown_kind_and_fields() {
        let text = r#"{"schema_version": 1, "kind": "qutrit", "payload": {}}"#;
        assert!(parse(text).is_err());
        let text = r#"{"schema_version": 1, "kind": "probability-triple", "payload": {"p1": 0.5, "p2": 0.5, "p3": 0.5}, "note": 1}"#;
        assert!(parse(text).is_err());
    }

    #[test]
    fn density_becomes_triple() {
        let text = r#"{"schema_version": 1, "kind": "density2",
            "payload": {"re": [[1.0, 0.0], [0.0, 0.0]], "im": [[0.0, 0.0], [0.0, 0.0]]}}"#;
        let p = parse(text).unwrap().triple().unwrap();
        assert_eq!(p.as_array(), [0.5, 0.5, 1.0]);
    }
}
