use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::assessment::{DeviationSample, FormationMarker, Homography, VideoMeta};
use crate::model::{EntityId, SCHEMA_VERSION};

use super::PersistError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = PersistError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(PersistError::UnknownFormat(s.to_owned())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub title: String,
    pub choreography_revision: u64,
    pub video: VideoMeta,
    pub stride: u32,
    /// Entities the aggregate RMSD is computed over.
    pub selection: Vec<EntityId>,
    pub homography: Homography,
    pub homography_rms_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssessmentReport {
    pub schema_version: String,
    pub metadata: ReportMetadata,
    pub samples: Vec<DeviationSample>,
    pub markers: Vec<FormationMarker>,
}

impl AssessmentReport {
    pub fn new(
        metadata: ReportMetadata,
        samples: Vec<DeviationSample>,
        markers: Vec<FormationMarker>,
    ) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_owned(),
            metadata,
            samples,
            markers,
        }
    }
}

/// One CSV line: a single entity at a single frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub frame: i64,
    pub time: f64,
    pub entity: EntityId,
    pub actual_x: f64,
    pub actual_y: f64,
    pub planned_x: f64,
    pub planned_y: f64,
    pub deviation: f64,
}

fn csv_rows(samples: &[DeviationSample]) -> Vec<CsvRow> {
    let mut rows: Vec<CsvRow> = samples
        .iter()
        .flat_map(|s| {
            s.per_entity.iter().map(move |(entity, d)| CsvRow {
                frame: s.frame,
                time: s.time,
                entity: entity.clone(),
                actual_x: d.actual.x,
                actual_y: d.actual.y,
                planned_x: d.planned.x,
                planned_y: d.planned.y,
                deviation: d.deviation,
            })
        })
        .collect();
    rows.sort_by(|a, b| (a.frame, &a.entity).cmp(&(b.frame, &b.entity)));
    rows
}

pub fn export_report(report: &AssessmentReport, format: ReportFormat) -> Result<Vec<u8>, PersistError> {
    if report.samples.is_empty() {
        return Err(PersistError::EmptyReport);
    }
    match format {
        ReportFormat::Json => {
            let mut bytes =
                serde_json::to_vec_pretty(report).map_err(|e| PersistError::Parse(e.to_string()))?;
            bytes.push(b'\n');
            Ok(bytes)
        }
        ReportFormat::Csv => {
            let mut writer = csv::Writer::from_writer(Vec::new());
            for row in csv_rows(&report.samples) {
                writer.serialize(row).map_err(|e| PersistError::Csv(e.to_string()))?;
            }
            writer.into_inner().map_err(|e| PersistError::Csv(e.to_string()))
        }
    }
}

pub fn read_report_csv(bytes: &[u8]) -> Result<Vec<CsvRow>, PersistError> {
    csv::Reader::from_reader(bytes)
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(|e| PersistError::Csv(e.to_string()))
}
