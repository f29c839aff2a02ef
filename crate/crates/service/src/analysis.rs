//! Analysis reports shared by `formation analyze` and the HTTP analysis
//! endpoints, so both emit the same bytes for the same input.

use formation_core::analysis::{
    detect_collisions, distance_report, heatmap, CollisionEvent, DistanceReport, HeatmapGrid,
    DEFAULT_COLLISION_THRESHOLD,
};
use formation_core::{Choreography, FormationId, SCHEMA_VERSION};
use serde::{Deserialize, Serialize};

use crate::error::ServiceResult;

pub const DEFAULT_HEATMAP_CELL: f64 = 1.0;

/// Which sections to compute. `None` leaves a section out.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AnalysisRequest {
    pub distances: bool,
    pub collisions: Option<f64>,
    pub heatmap: Option<f64>,
}

impl AnalysisRequest {
    pub fn everything() -> Self {
        Self {
            distances: true,
            collisions: Some(DEFAULT_COLLISION_THRESHOLD),
            heatmap: Some(DEFAULT_HEATMAP_CELL),
        }
    }

    pub fn is_empty(&self) -> bool {
        !self.distances && self.collisions.is_none() && self.heatmap.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionCollisions {
    pub from_formation_id: FormationId,
    pub to_formation_id: FormationId,
    pub events: Vec<CollisionEvent>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionSection {
    pub threshold: f64,
    pub transitions: Vec<TransitionCollisions>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisDocument {
    pub schema_version: String,
    pub title: String,
    pub revision: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distances: Option<DistanceReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collisions: Option<CollisionSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heatmap: Option<HeatmapGrid>,
}

pub fn analyze(c: &Choreography, request: &AnalysisRequest) -> ServiceResult<AnalysisDocument> {
    let distances = request.distances.then(|| distance_report(c)).transpose()?;
    let collisions = request
        .collisions
        .map(|threshold| {
            let transitions = c
                .transitions
                .iter()
                .map(|t| {
                    Ok(TransitionCollisions {
                        from_formation_id: t.from_formation_id.clone(),
                        to_formation_id: t.to_formation_id.clone(),
                        events: detect_collisions(c, t, threshold)?,
                    })
                })
                .collect::<ServiceResult<Vec<_>>>()?;
            Ok::<_, crate::error::ServiceError>(CollisionSection {
                threshold,
                transitions,
            })
        })
        .transpose()?;
    let heatmap = request.heatmap.map(|cell| heatmap(c, cell)).transpose()?;
    Ok(AnalysisDocument {
        schema_version: SCHEMA_VERSION.to_owned(),
        title: c.title.clone(),
        revision: c.revision,
        distances,
        collisions,
        heatmap,
    })
}

/// Pretty JSON with a trailing newline; the one serialization used for every
/// payload this crate writes.
pub fn to_json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("payloads serialize");
    bytes.push(b'\n');
    bytes
}
