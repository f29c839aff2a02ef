//! Byte-in/byte-out serialization: choreography documents and assessment
//! reports. Callers own file and network I/O.

mod document;
mod report;

pub use document::{load, save, schema, Issue, CHOREOGRAPHY_SCHEMA};
pub use report::{
    export_report, read_report_csv, AssessmentReport, CsvRow, ReportFormat, ReportMetadata,
};

use thiserror::Error;

use crate::validate::Violation;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PersistError {
    #[error("document is not valid JSON: {0}")]
    Parse(String),
    #[error("schema version {0:?} is not supported")]
    SchemaVersionUnsupported(String),
    #[error("validation failed at {}: {}", .0[0].location, .0[0].message)]
    ValidationFailed(Vec<Issue>),
    #[error("choreography is invalid: {}", .0[0])]
    InvalidModel(Vec<Violation>),
    #[error("report has no samples")]
    EmptyReport,
    #[error("unknown report format {0:?}")]
    UnknownFormat(String),
    #[error("csv: {0}")]
    Csv(String),
}

impl PersistError {
    pub fn code(&self) -> &'static str {
        match self {
            PersistError::Parse(_) => "PARSE_ERROR",
            PersistError::SchemaVersionUnsupported(_) => "SCHEMA_VERSION_UNSUPPORTED",
            PersistError::ValidationFailed(_) => "VALIDATION_FAILED",
            PersistError::InvalidModel(_) => "INVALID_MODEL",
            PersistError::EmptyReport => "EMPTY_REPORT",
            PersistError::UnknownFormat(_) => "UNKNOWN_FORMAT",
            PersistError::Csv(_) => "CSV_ERROR",
        }
    }
}
