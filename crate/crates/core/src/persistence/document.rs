use std::sync::OnceLock;

use jsonschema::error::ValidationErrorKind;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::model::{Choreography, SCHEMA_VERSION};
use crate::validate::{pointer_segment, validate};

use super::PersistError;

/// JSON Schema (draft 2020-12) every choreography document must satisfy.
pub const CHOREOGRAPHY_SCHEMA: &str = include_str!("../../schema/choreography.schema.json");

/// A single problem found while loading, located by JSON pointer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Issue {
    pub code: String,
    pub location: String,
    pub message: String,
}

fn validator() -> &'static jsonschema::Validator {
    static VALIDATOR: OnceLock<jsonschema::Validator> = OnceLock::new();
    VALIDATOR.get_or_init(|| jsonschema::validator_for(&schema()).expect("bundled schema compiles"))
}

pub fn schema() -> Value {
    serde_json::from_str(CHOREOGRAPHY_SCHEMA).expect("bundled schema is JSON")
}

fn parse_version(v: &str) -> Option<(u64, u64, u64)> {
    let mut parts = v.split('.').map(|p| p.parse::<u64>().ok());
    let version = (parts.next()??, parts.next()??, parts.next()??);
    parts.next().is_none().then_some(version)
}

/// Same major version and no newer minor than this build writes.
fn version_supported(v: &str) -> bool {
    let current = parse_version(SCHEMA_VERSION).expect("SCHEMA_VERSION is semver");
    parse_version(v).is_some_and(|(major, minor, _)| major == current.0 && minor <= current.1)
}

/// Serializes a valid choreography. Output is deterministic: fixed key
/// order and shortest round-trip float formatting.
pub fn save(choreography: &Choreography) -> Result<Vec<u8>, PersistError> {
    let violations = validate(choreography);
    if !violations.is_empty() {
        return Err(PersistError::InvalidModel(violations));
    }
    if !version_supported(&choreography.schema_version) {
        return Err(PersistError::SchemaVersionUnsupported(
            choreography.schema_version.clone(),
        ));
    }
    let mut bytes = serde_json::to_vec_pretty(choreography)
        .map_err(|e| PersistError::Parse(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Parses, checks the schema version, validates against the schema and
/// then against the model rules.
pub fn load(bytes: &[u8]) -> Result<Choreography, PersistError> {
    let value: Value = serde_json::from_slice(bytes).map_err(|e| PersistError::Parse(e.to_string()))?;

    match value.get("schema_version") {
        Some(Value::String(v)) if !version_supported(v) => {
            return Err(PersistError::SchemaVersionUnsupported(v.clone()))
        }
        _ => {}
    }

    let issues: Vec<Issue> = validator()
        .iter_errors(&value)
        .map(|err| {
            let mut location = err.instance_path().as_str().to_owned();
            if let ValidationErrorKind::Required { property } = err.kind() {
                location.push('/');
                location.push_str(&pointer_segment(property.as_str().unwrap_or_default()));
            }
            Issue {
                code: "SCHEMA_VIOLATION".into(),
                location,
                message: err.to_string(),
            }
        })
        .collect();
    if !issues.is_empty() {
        return Err(PersistError::ValidationFailed(issues));
    }

    let choreography: Choreography = serde_json::from_value(value).map_err(|e| {
        PersistError::ValidationFailed(vec![Issue {
            code: "SCHEMA_VIOLATION".into(),
            location: String::new(),
            message: e.to_string(),
        }])
    })?;

    let violations = validate(&choreography);
    if !violations.is_empty() {
        return Err(PersistError::ValidationFailed(
            violations
                .into_iter()
                .map(|v| Issue {
                    code: v.code.to_string(),
                    location: v.location,
                    message: v.message,
                })
                .collect(),
        ));
    }
    Ok(choreography)
}
