//! Performance assessment: project video bounding-box tracks into floor
//! space and measure how far each dancer is from the planned position.
//!
//! Pipeline: [`parse_tracks`] reads the annotation file,
//! [`estimate_homography`] fits the video-to-floor mapping from
//! correspondences, [`Baseline`] interpolates the planned positions in video
//! time, and [`assess`] compares the two frame by frame.

mod assess;
mod baseline;
mod homography;
mod tracks;

pub use assess::{
    assess, formation_markers, frame_to_time, rmsd, rmsd_series, DeviationSample,
    EntityDeviation, FormationMarker, RmsdPoint, VideoMeta,
};
pub use baseline::{baseline_position, Baseline};
pub use homography::{
    estimate_homography, estimate_homography_with, parse_correspondences, Correspondence,
    Homography, HomographyEstimate, DEFAULT_MAX_RESIDUAL,
};
pub use tracks::{bbox_anchor, parse_tracks, write_tracks, BoundingBox, Keyframe, Track, TrackDocument};

use thiserror::Error;

use crate::analysis::AnalysisError;
use crate::model::EntityId;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AssessmentError {
    #[error("malformed document: {0}")]
    MalformedDocument(String),
    #[error("unknown entity {0:?}")]
    UnknownEntity(String),
    #[error("frames of track {0} are not strictly increasing")]
    NonMonotoneFrames(String),
    #[error("bounding box needs positive finite width and height")]
    InvalidBox,
    #[error("need at least 4 correspondences, got {0}")]
    TooFewPoints(usize),
    #[error("degenerate correspondence configuration: {0}")]
    DegenerateConfiguration(String),
    #[error("homography fit is ill-conditioned: reprojection residual {residual} m exceeds {tolerance} m")]
    IllConditioned { residual: f64, tolerance: f64 },
    #[error("point maps to infinity")]
    PointAtInfinity,
    #[error("no formation carries a video time")]
    NoTimestamps,
    #[error("formation video times must strictly increase along the timeline")]
    InvalidTimestamps,
    #[error("entity {0} is not placed in any formation")]
    NotPlaced(EntityId),
    #[error("video fps must be positive and finite")]
    InvalidFps,
    #[error("frame stride must be at least 1")]
    InvalidStride,
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

impl AssessmentError {
    pub fn code(&self) -> &'static str {
        match self {
            AssessmentError::MalformedDocument(_) => "MALFORMED_DOCUMENT",
            AssessmentError::UnknownEntity(_) => "UNKNOWN_ENTITY",
            AssessmentError::NonMonotoneFrames(_) => "NON_MONOTONE_FRAMES",
            AssessmentError::InvalidBox => "INVALID_BOX",
            AssessmentError::TooFewPoints(_) => "TOO_FEW_POINTS",
            AssessmentError::DegenerateConfiguration(_) => "DEGENERATE_CONFIGURATION",
            AssessmentError::IllConditioned { .. } => "ILL_CONDITIONED",
            AssessmentError::PointAtInfinity => "POINT_AT_INFINITY",
            AssessmentError::NoTimestamps => "NO_TIMESTAMPS",
            AssessmentError::InvalidTimestamps => "INVALID_TIMESTAMPS",
            AssessmentError::NotPlaced(_) => "NOT_PLACED",
            AssessmentError::InvalidFps => "INVALID_FPS",
            AssessmentError::InvalidStride => "INVALID_STRIDE",
            AssessmentError::Analysis(e) => e.code(),
        }
    }

    /// Whether the error comes from an unusable correspondence set.
    pub fn is_degenerate_homography(&self) -> bool {
        matches!(
            self,
            AssessmentError::TooFewPoints(_)
                | AssessmentError::DegenerateConfiguration(_)
                | AssessmentError::IllConditioned { .. }
        )
    }
}

pub type AssessmentResult<T> = Result<T, AssessmentError>;
