//! File-system storage: one JSON document per choreography and one per
//! assessment under a data directory.
//!
//! Choreography writes are serialized per id and land through an atomic
//! rename, so readers only ever see a complete accepted document.

use std::collections::HashMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use formation_core::persistence::{load, save, AssessmentReport};
use formation_core::{Choreography, SCHEMA_VERSION};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::analysis::to_json_bytes;
use crate::error::{ServiceError, ServiceResult};

const MAX_ID_LEN: usize = 64;

/// Ids double as file names: ASCII letters, digits, `-` and `_` only.
pub fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && id.len() <= MAX_ID_LEN
        && id.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-' || b == b'_')
}

fn check_id(id: &str) -> ServiceResult<()> {
    if valid_id(id) {
        Ok(())
    } else {
        Err(ServiceError::bad_request(
            "INVALID_ID",
            format!("id {id:?} must be 1-{MAX_ID_LEN} characters of [A-Za-z0-9_-]"),
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChoreographySummary {
    pub id: String,
    pub title: String,
    pub revision: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssessmentRecord {
    pub schema_version: String,
    pub id: String,
    pub choreography_id: String,
    pub status: String,
    pub report: AssessmentReport,
}

#[derive(Debug)]
pub struct Store {
    root: PathBuf,
    locks: Mutex<HashMap<String, Arc<Mutex<()>>>>,
}

impl Store {
    pub fn open(root: impl Into<PathBuf>) -> ServiceResult<Self> {
        let root = root.into();
        for dir in ["choreographies", "assessments"] {
            let path = root.join(dir);
            fs::create_dir_all(&path).map_err(|e| ServiceError::io(&path, e))?;
        }
        Ok(Self {
            root,
            locks: Mutex::new(HashMap::new()),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn choreography_path(&self, id: &str) -> PathBuf {
        self.root.join("choreographies").join(format!("{id}.json"))
    }

    fn assessment_path(&self, id: &str) -> PathBuf {
        self.root.join("assessments").join(format!("{id}.json"))
    }

    fn lock_for(&self, id: &str) -> Arc<Mutex<()>> {
        let mut locks = self.locks.lock().unwrap_or_else(|e| e.into_inner());
        locks.entry(id.to_owned()).or_default().clone()
    }

    fn write_atomic(path: &Path, bytes: &[u8]) -> ServiceResult<()> {
        let dir = path.parent().expect("store paths have a parent");
        let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| ServiceError::io(dir, e))?;
        tmp.write_all(bytes).map_err(|e| ServiceError::io(tmp.path(), e))?;
        tmp.as_file().sync_all().map_err(|e| ServiceError::io(tmp.path(), e))?;
        tmp.persist(path).map_err(|e| ServiceError::io(path, e.error))?;
        Ok(())
    }

    fn read(&self, path: &Path, kind: &'static str, id: &str) -> ServiceResult<Vec<u8>> {
        fs::read(path).map_err(|e| match e.kind() {
            io::ErrorKind::NotFound => ServiceError::NotFound {
                kind,
                id: id.to_owned(),
            },
            _ => ServiceError::io(path, e),
        })
    }

    pub fn list_choreographies(&self) -> ServiceResult<Vec<ChoreographySummary>> {
        let dir = self.root.join("choreographies");
        let mut out = Vec::new();
        for entry in fs::read_dir(&dir).map_err(|e| ServiceError::io(&dir, e))? {
            let path = entry.map_err(|e| ServiceError::io(&dir, e))?.path();
            let Some(id) = path
                .file_name()
                .and_then(|n| n.to_str())
                .and_then(|n| n.strip_suffix(".json"))
                .filter(|id| valid_id(id))
            else {
                continue;
            };
            let c = self.get_choreography(id)?;
            out.push(ChoreographySummary {
                id: id.to_owned(),
                title: c.title,
                revision: c.revision,
            });
        }
        out.sort_by(|a, b| a.id.cmp(&b.id));
        Ok(out)
    }

    /// Stored document bytes, exactly as written.
    pub fn get_choreography_bytes(&self, id: &str) -> ServiceResult<Vec<u8>> {
        check_id(id)?;
        self.read(&self.choreography_path(id), "choreography", id)
    }

    pub fn get_choreography(&self, id: &str) -> ServiceResult<Choreography> {
        let bytes = self.get_choreography_bytes(id)?;
        load(&bytes).map_err(|e| ServiceError::Storage(format!("stored choreography {id} is unreadable: {e}")))
    }

    fn current_revision(&self, id: &str) -> ServiceResult<u64> {
        match self.get_choreography(id) {
            Ok(c) => Ok(c.revision),
            Err(ServiceError::NotFound { .. }) => Ok(0),
            Err(e) => Err(e),
        }
    }

    /// Replaces the document when `base_revision` equals the stored revision
    /// (0 for a new id). The stored revision becomes `base_revision + 1`,
    /// whatever the submitted document says.
    pub fn put_choreography(&self, id: &str, base_revision: u64, mut document: Value) -> ServiceResult<Choreography> {
        check_id(id)?;
        let Some(fields) = document.as_object_mut() else {
            return Err(ServiceError::BadRequest {
                code: "VALIDATION_FAILED",
                message: "document must be a JSON object".into(),
                location: Some(String::new()),
            });
        };
        fields.insert("revision".into(), Value::from(base_revision + 1));
        let bytes = serde_json::to_vec(&document).expect("JSON values serialize");
        let choreography = load(&bytes)?;

        let lock = self.lock_for(id);
        let _guard = lock.lock().unwrap_or_else(|e| e.into_inner());
        let current = self.current_revision(id)?;
        if current != base_revision {
            return Err(ServiceError::Conflict {
                requested: base_revision,
                current,
            });
        }
        Self::write_atomic(&self.choreography_path(id), &save(&choreography)?)?;
        Ok(choreography)
    }

    /// Applies `edit` to the stored document under the same revision check
    /// as [`Store::put_choreography`]. Edits bump the revision themselves.
    pub fn edit_choreography<T>(
        &self,
        id: &str,
        base_revision: u64,
        edit: impl FnOnce(&mut Choreography) -> ServiceResult<T>,
    ) -> ServiceResult<(Choreography, T)> {
        check_id(id)?;
        let lock = self.lock_for(id);
        let _guard = lock.lock().unwrap_or_else(|e| e.into_inner());
        let mut c = self.get_choreography(id)?;
        if c.revision != base_revision {
            return Err(ServiceError::Conflict {
                requested: base_revision,
                current: c.revision,
            });
        }
        let result = edit(&mut c)?;
        c.revision = base_revision + 1;
        Self::write_atomic(&self.choreography_path(id), &save(&c)?)?;
        Ok((c, result))
    }

    pub fn create_assessment(&self, choreography_id: &str, report: AssessmentReport) -> ServiceResult<AssessmentRecord> {
        let record = AssessmentRecord {
            schema_version: SCHEMA_VERSION.to_owned(),
            id: uuid::Uuid::new_v4().simple().to_string(),
            choreography_id: choreography_id.to_owned(),
            status: "complete".into(),
            report,
        };
        Self::write_atomic(&self.assessment_path(&record.id), &to_json_bytes(&record))?;
        Ok(record)
    }

    pub fn get_assessment(&self, id: &str) -> ServiceResult<AssessmentRecord> {
        check_id(id)?;
        let bytes = self.read(&self.assessment_path(id), "assessment", id)?;
        serde_json::from_slice(&bytes)
            .map_err(|e| ServiceError::Storage(format!("stored assessment {id} is unreadable: {e}")))
    }
}
