use std::io;
use std::path::PathBuf;

use axum::http::StatusCode;
use formation_core::analysis::AnalysisError;
use formation_core::assessment::AssessmentError;
use formation_core::edit::EditError;
use formation_core::persistence::{Issue, PersistError};
use formation_core::SCHEMA_VERSION;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Persist(#[from] PersistError),
    #[error(transparent)]
    Assessment(#[from] AssessmentError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Edit(#[from] EditError),
    #[error("{message}")]
    BadRequest {
        code: &'static str,
        message: String,
        location: Option<String>,
    },
    #[error("{kind} {id:?} not found")]
    NotFound { kind: &'static str, id: String },
    #[error("revision conflict: request is based on revision {requested}, stored revision is {current}")]
    Conflict { requested: u64, current: u64 },
    #[error("storage failure: {0}")]
    Storage(String),
}

pub type ServiceResult<T> = Result<T, ServiceError>;

impl ServiceError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        ServiceError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn bad_request(code: &'static str, message: impl Into<String>) -> Self {
        ServiceError::BadRequest {
            code,
            message: message.into(),
            location: None,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::Io { .. } => "IO_ERROR",
            ServiceError::Persist(e) => e.code(),
            ServiceError::Assessment(e) => e.code(),
            ServiceError::Analysis(e) => e.code(),
            ServiceError::Edit(e) => e.code(),
            ServiceError::BadRequest { code, .. } => code,
            ServiceError::NotFound { .. } => "NOT_FOUND",
            ServiceError::Conflict { .. } => "REVISION_CONFLICT",
            ServiceError::Storage(_) => "STORAGE_ERROR",
        }
    }

    /// Process exit status used by the command-line tools.
    ///
    /// 2: file access, 3: unparsable or invalid input, 4: unusable
    /// correspondences, 5: choreography without video timestamps, 1: other.
    pub fn exit_code(&self) -> i32 {
        match self {
            ServiceError::Io { .. } => 2,
            ServiceError::Persist(PersistError::EmptyReport) => 1,
            ServiceError::Persist(_) | ServiceError::BadRequest { .. } => 3,
            ServiceError::Assessment(e) if e.is_degenerate_homography() => 4,
            ServiceError::Assessment(AssessmentError::NoTimestamps | AssessmentError::InvalidTimestamps) => 5,
            ServiceError::Assessment(
                AssessmentError::MalformedDocument(_)
                | AssessmentError::NonMonotoneFrames(_)
                | AssessmentError::InvalidBox
                | AssessmentError::UnknownEntity(_)
                | AssessmentError::InvalidFps
                | AssessmentError::InvalidStride,
            ) => 3,
            _ => 1,
        }
    }

    pub fn status(&self) -> StatusCode {
        match self {
            ServiceError::Io { .. } | ServiceError::Storage(_) => StatusCode::INTERNAL_SERVER_ERROR,
            ServiceError::NotFound { .. } => StatusCode::NOT_FOUND,
            ServiceError::Conflict { .. } => StatusCode::CONFLICT,
            ServiceError::Assessment(e)
                if e.is_degenerate_homography()
                    || matches!(e, AssessmentError::NoTimestamps | AssessmentError::InvalidTimestamps) =>
            {
                StatusCode::UNPROCESSABLE_ENTITY
            }
            _ => StatusCode::BAD_REQUEST,
        }
    }

    /// Individual problems behind a validation failure.
    pub fn issues(&self) -> Vec<Issue> {
        match self {
            ServiceError::Persist(PersistError::ValidationFailed(issues)) => issues.clone(),
            ServiceError::Persist(PersistError::InvalidModel(violations)) => violations
                .iter()
                .map(|v| Issue {
                    code: v.code.to_string(),
                    location: v.location.clone(),
                    message: v.message.clone(),
                })
                .collect(),
            _ => Vec::new(),
        }
    }

    /// JSON pointer to the offending part of the request document, if any.
    pub fn location(&self) -> Option<String> {
        match self {
            ServiceError::BadRequest { location, .. } => location.clone(),
            _ => self.issues().first().map(|i| i.location.clone()),
        }
    }

    pub fn to_json(&self) -> Value {
        #[derive(Serialize)]
        struct Body<'a> {
            code: &'a str,
            message: String,
            #[serde(skip_serializing_if = "Option::is_none")]
            location: Option<String>,
            #[serde(skip_serializing_if = "Vec::is_empty")]
            issues: Vec<Issue>,
        }
        json!({
            "schema_version": SCHEMA_VERSION,
            "error": Body {
                code: self.code(),
                message: self.to_string(),
                location: self.location(),
                issues: self.issues(),
            }
        })
    }
}
