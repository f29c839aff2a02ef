//! Geometry and analytics over a choreography: transition paths, movement
//! distances, collisions, convex hulls and floor-utilization heatmaps.
//!
//! Time in this module is musical: a continuous beat index, see
//! [`beat_index`].

mod collision;
mod distance;
mod heatmap;
mod hull;
pub(crate) mod path;
mod timeline;

pub use collision::{closest_approach, detect_collisions, CollisionEvent, DEFAULT_COLLISION_THRESHOLD};
pub use distance::{distance_report, DistanceReport, TransitionDistances};
pub use heatmap::{heatmap, HeatmapGrid};
pub use hull::convex_hull;
pub use path::{
    path_length, position_at, transition_path, transition_paths, transition_progress,
    TimedPolyline, TimedVertex,
};
pub use timeline::beat_index;

use thiserror::Error;

use crate::model::{EntityId, FormationId, TimelinePosition};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("timeline position {0} is outside the dances")]
    PositionOutOfBounds(TimelinePosition),
    #[error("entity {0} is placed in neither formation of the transition")]
    NotPlaced(EntityId),
    #[error("no transition leaves formation {0}")]
    UnknownTransition(FormationId),
    #[error("a timed polyline needs at least two vertices with strictly increasing, finite times")]
    InvalidPolyline,
    #[error("convex hull needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("threshold must be positive and finite")]
    InvalidThreshold,
    #[error("cell size must be positive and finite")]
    InvalidCellSize,
}

impl AnalysisError {
    pub fn code(&self) -> &'static str {
        match self {
            AnalysisError::PositionOutOfBounds(_) => "POSITION_OUT_OF_BOUNDS",
            AnalysisError::NotPlaced(_) => "NOT_PLACED",
            AnalysisError::UnknownTransition(_) => "UNKNOWN_TRANSITION",
            AnalysisError::InvalidPolyline => "INVALID_POLYLINE",
            AnalysisError::TooFewPoints(_) => "TOO_FEW_POINTS",
            AnalysisError::InvalidThreshold => "INVALID_THRESHOLD",
            AnalysisError::InvalidCellSize => "INVALID_CELL_SIZE",
        }
    }
}

pub type AnalysisResult<T> = Result<T, AnalysisError>;
