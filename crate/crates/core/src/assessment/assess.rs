use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::Point;
use crate::model::{Choreography, EntityId, FormationId};

use super::{AssessmentError, AssessmentResult, Baseline, Homography, Track};

/// Frame/time relation of the performance video.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VideoMeta {
    pub fps: f64,
    /// Frame index at choreography time zero.
    pub frame_offset: f64,
}

impl VideoMeta {
    pub fn new(fps: f64, frame_offset: f64) -> AssessmentResult<Self> {
        if !(fps.is_finite() && fps > 0.0) {
            return Err(AssessmentError::InvalidFps);
        }
        if !frame_offset.is_finite() {
            return Err(AssessmentError::MalformedDocument(
                "frame_offset must be finite".into(),
            ));
        }
        Ok(Self { fps, frame_offset })
    }
}

/// Seconds of choreography time at `frame`; negative before the offset.
pub fn frame_to_time(meta: &VideoMeta, frame: i64) -> f64 {
    (frame as f64 - meta.frame_offset) / meta.fps
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntityDeviation {
    pub actual: Point,
    pub planned: Point,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationSample {
    pub frame: i64,
    pub time: f64,
    /// Every tracked entity whose annotation covers this frame.
    pub per_entity: BTreeMap<EntityId, EntityDeviation>,
    /// Selected entities without track coverage at this frame; they are
    /// left out of the aggregate.
    pub missing: Vec<EntityId>,
    /// Root-mean-square deviation over the covered selected entities, or
    /// `None` when none is covered.
    pub aggregate_rmsd: Option<f64>,
}

/// Root-mean-square of the given deviations.
pub fn rmsd<I: IntoIterator<Item = f64>>(deviations: I) -> Option<f64> {
    let (n, sum) = deviations
        .into_iter()
        .fold((0usize, 0.0), |(n, s), d| (n + 1, s + d * d));
    (n > 0).then(|| (sum / n as f64).sqrt())
}

fn aggregate(
    per_entity: &BTreeMap<EntityId, EntityDeviation>,
    selection: &BTreeSet<EntityId>,
) -> (Vec<EntityId>, Option<f64>) {
    let missing = selection
        .iter()
        .filter(|e| !per_entity.contains_key(*e))
        .cloned()
        .collect();
    let value = rmsd(
        selection
            .iter()
            .filter_map(|e| per_entity.get(e))
            .map(|d| d.deviation),
    );
    (missing, value)
}

/// Compares tracked positions with the plan for every `stride`-th frame of
/// the annotated range.
///
/// `selection` restricts the aggregate (default: every tracked entity).
/// Samples come back ordered by frame.
pub fn assess(
    choreography: &Choreography,
    tracks: &[Track],
    homography: &Homography,
    meta: &VideoMeta,
    selection: Option<&BTreeSet<EntityId>>,
    stride: u32,
) -> AssessmentResult<Vec<DeviationSample>> {
    if stride == 0 {
        return Err(AssessmentError::InvalidStride);
    }
    let baseline = Baseline::new(choreography)?;
    for track in tracks {
        if choreography.entity(&track.entity).is_none() {
            return Err(AssessmentError::UnknownEntity(track.entity.to_string()));
        }
        if !baseline.is_placed(&track.entity) {
            return Err(AssessmentError::NotPlaced(track.entity.clone()));
        }
    }
    let selection: BTreeSet<EntityId> = match selection {
        Some(s) => {
            if let Some(unknown) = s.iter().find(|e| choreography.entity(e).is_none()) {
                return Err(AssessmentError::UnknownEntity(unknown.to_string()));
            }
            s.clone()
        }
        None => tracks.iter().map(|t| t.entity.clone()).collect(),
    };

    let (Some(first), Some(last)) = (
        tracks.iter().map(Track::first_frame).min(),
        tracks.iter().map(Track::last_frame).max(),
    ) else {
        return Ok(Vec::new());
    };
    let frames: Vec<i64> = (first..=last).step_by(stride as usize).collect();

    frames
        .par_iter()
        .map(|&frame| {
            let time = super::frame_to_time(meta, frame);
            let mut per_entity = BTreeMap::new();
            for track in tracks.iter().filter(|t| t.covers(frame)) {
                let actual = homography.project(track.position(frame))?;
                let planned = baseline.position(&track.entity, time)?;
                per_entity.insert(
                    track.entity.clone(),
                    EntityDeviation {
                        actual,
                        planned,
                        deviation: actual.distance(planned),
                    },
                );
            }
            let (missing, aggregate_rmsd) = aggregate(&per_entity, &selection);
            Ok(DeviationSample {
                frame,
                time,
                per_entity,
                missing,
                aggregate_rmsd,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RmsdPoint {
    pub frame: i64,
    pub time: f64,
    pub rmsd: Option<f64>,
}

/// Re-aggregates stored samples over a different selection.
pub fn rmsd_series(samples: &[DeviationSample], selection: &BTreeSet<EntityId>) -> Vec<RmsdPoint> {
    samples
        .iter()
        .map(|s| RmsdPoint {
            frame: s.frame,
            time: s.time,
            rmsd: aggregate(&s.per_entity, selection).1,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormationMarker {
    pub formation_id: FormationId,
    pub frame: i64,
}

/// Video frame of every timestamped formation.
pub fn formation_markers(
    choreography: &Choreography,
    meta: &VideoMeta,
) -> AssessmentResult<Vec<FormationMarker>> {
    let markers: Vec<_> = choreography
        .formations
        .iter()
        .filter_map(|f| {
            f.video_time.map(|t| FormationMarker {
                formation_id: f.id.clone(),
                frame: (t * meta.fps + meta.frame_offset).round() as i64,
            })
        })
        .collect();
    if markers.is_empty() {
        return Err(AssessmentError::NoTimestamps);
    }
    Ok(markers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assessment::{BoundingBox, Keyframe};
    use crate::fixtures::two_formations;

    fn timed() -> Choreography {
        let mut c = two_formations();
        c.formations[0].video_time = Some(0.0);
        c.formations[1].video_time = Some(4.0);
        c
    }

    fn meta() -> VideoMeta {
        VideoMeta::new(25.0, 0.0).unwrap()
    }

    /// A track whose anchors sit exactly on `offset` + planned position under
    /// the identity homography, one keyframe per frame.
    fn track_for(c: &Choreography, id: &str, frames: std::ops::RangeInclusive<i64>, offset: Point) -> Track {
        let baseline = Baseline::new(c).unwrap();
        let entity = EntityId::from(id);
        let keys = frames
            .map(|frame| {
                let p = baseline.position(&entity, frame_to_time(&meta(), frame)).unwrap() + offset;
                Keyframe {
                    frame,
                    bbox: BoundingBox::new(p.x - 0.25, p.y - 1.0, 0.5, 1.0).unwrap(),
                }
            })
            .collect();
        Track::new(entity, keys).unwrap()
    }

    #[test]
    fn frame_time_mapping() {
        assert_eq!(frame_to_time(&VideoMeta::new(25.0, 10.0).unwrap(), 10), 0.0);
        assert_eq!(frame_to_time(&meta(), 50), 2.0);
        assert!(frame_to_time(&VideoMeta::new(25.0, 10.0).unwrap(), 5) < 0.0);
        assert_eq!(VideoMeta::new(0.0, 0.0), Err(AssessmentError::InvalidFps));
    }

    #[test]
    fn markers() {
        let mut c = timed();
        c.formations[1].video_time = Some(2.0);
        let m = formation_markers(&c, &meta()).unwrap();
        assert_eq!(m[0].frame, 0);
        assert_eq!(m[1].frame, 50);
        let m = formation_markers(&c, &VideoMeta::new(25.0, 7.0).unwrap()).unwrap();
        assert_eq!(m[0].frame, 7);
        c.formations[1].video_time = None;
        assert_eq!(formation_markers(&c, &meta()).unwrap().len(), 1);
        c.formations[0].video_time = None;
        assert_eq!(formation_markers(&c, &meta()), Err(AssessmentError::NoTimestamps));
    }

    #[test]
    fn zero_deviation_when_on_plan() {
        let c = timed();
        let tracks = vec![track_for(&c, "A", 0..=100, Point::ORIGIN), track_for(&c, "B", 0..=100, Point::ORIGIN)];
        let samples = assess(&c, &tracks, &Homography::identity(), &meta(), None, 1).unwrap();
        assert_eq!(samples.len(), 101);
        for s in &samples {
            assert!(s.aggregate_rmsd.unwrap() < 1e-9);
            assert!(s.missing.is_empty());
        }
    }

    #[test]
    fn uniform_offset_gives_that_rmsd() {
        let c = timed();
        let off = Point::new(0.3 * 0.6, 0.3 * 0.8);
        let tracks = vec![track_for(&c, "A", 0..=100, off), track_for(&c, "B", 0..=100, off)];
        let samples = assess(&c, &tracks, &Homography::identity(), &meta(), None, 7).unwrap();
        // ceil(101 / 7)
        assert_eq!(samples.len(), 15);
        assert!(samples.windows(2).all(|w| w[0].frame < w[1].frame));
        for s in &samples {
            assert!((s.aggregate_rmsd.unwrap() - 0.3).abs() < 1e-9);
        }
    }

    #[test]
    fn selection_and_missing_tracks() {
        let c = timed();
        let tracks = vec![
            track_for(&c, "A", 0..=50, Point::new(1.0, 0.0)),
            track_for(&c, "B", 25..=100, Point::ORIGIN),
        ];
        let only_a: BTreeSet<EntityId> = [EntityId::from("A")].into();
        let samples = assess(&c, &tracks, &Homography::identity(), &meta(), Some(&only_a), 1).unwrap();
        assert!((samples[30].aggregate_rmsd.unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(samples[30].per_entity.len(), 2);
        assert_eq!(samples[80].missing, vec![EntityId::from("A")]);
        assert_eq!(samples[80].aggregate_rmsd, None);

        let all = assess(&c, &tracks, &Homography::identity(), &meta(), None, 1).unwrap();
        // frame 10: only A covered, B flagged
        assert_eq!(all[10].missing, vec![EntityId::from("B")]);
        let series = rmsd_series(&all, &only_a);
        assert_eq!(series[30].rmsd, samples[30].aggregate_rmsd);
    }

    #[test]
    fn stride_zero_rejected() {
        let c = timed();
        assert_eq!(
            assess(&c, &[], &Homography::identity(), &meta(), None, 0),
            Err(AssessmentError::InvalidStride)
        );
        assert_eq!(assess(&c, &[], &Homography::identity(), &meta(), None, 1), Ok(vec![]));
    }

    #[test]
    fn rmsd_helper() {
        assert_eq!(rmsd([3.0, 4.0]), Some((12.5f64).sqrt()));
        assert_eq!(rmsd(std::iter::empty()), None);
    }
}
