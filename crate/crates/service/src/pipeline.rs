//! The assessment pipeline behind `formation assess` and
//! `POST /choreographies/{id}/assessments`.

use std::collections::BTreeSet;

use formation_core::assessment::{
    assess, estimate_homography, formation_markers, parse_tracks, Correspondence,
};
use formation_core::persistence::{AssessmentReport, ReportMetadata};
use formation_core::{Choreography, EntityId};

use crate::error::{ServiceError, ServiceResult};

/// Splits a comma-separated `--select` / `?select=` value.
pub fn parse_select(raw: &str) -> Vec<String> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_owned)
        .collect()
}

/// Resolves entity ids or labels.
pub fn resolve_selection(c: &Choreography, refs: &[String]) -> ServiceResult<BTreeSet<EntityId>> {
    refs.iter()
        .map(|r| {
            c.resolve_entity(r).cloned().ok_or_else(|| ServiceError::BadRequest {
                code: "UNKNOWN_ENTITY",
                message: format!("no entity with id or label {r:?}"),
                location: None,
            })
        })
        .collect()
}

pub struct AssessmentInput<'a> {
    pub tracks_xml: &'a str,
    pub correspondences: &'a [Correspondence],
    pub stride: u32,
    /// Entity ids or labels; `None` aggregates over every tracked entity.
    pub select: Option<&'a [String]>,
}

pub fn run_assessment(c: &Choreography, input: &AssessmentInput<'_>) -> ServiceResult<AssessmentReport> {
    let tracks = parse_tracks(input.tracks_xml, c)?;
    let estimate = estimate_homography(input.correspondences)?;
    let selection = input
        .select
        .map(|refs| resolve_selection(c, refs))
        .transpose()?;
    let samples = assess(
        c,
        &tracks.tracks,
        &estimate.homography,
        &tracks.meta,
        selection.as_ref(),
        input.stride,
    )?;
    let markers = formation_markers(c, &tracks.meta)?;
    let selection = selection
        .unwrap_or_else(|| tracks.tracks.iter().map(|t| t.entity.clone()).collect())
        .into_iter()
        .collect();
    Ok(AssessmentReport::new(
        ReportMetadata {
            title: c.title.clone(),
            choreography_revision: c.revision,
            video: tracks.meta,
            stride: input.stride,
            selection,
            homography: estimate.homography,
            homography_rms_residual: estimate.rms_residual,
        },
        samples,
        markers,
    ))
}
