use std::collections::BTreeMap;

use crate::analysis::{beat_index, path::interpolate, path::TimedVertex, transition_path};
use crate::geometry::Point;
use crate::model::{Choreography, EntityId};

use super::{AssessmentError, AssessmentResult};

/// Planned positions in video time.
///
/// Each entity's transition paths are chained into one beat-time polyline.
/// Formations with a `video_time` anchor beat time to seconds; in between,
/// beats map affinely onto the bracketing seconds interval. Before the first
/// and after the last anchor the position is held.
#[derive(Debug, Clone)]
pub struct Baseline {
    /// `(beat, seconds)`, strictly increasing in both.
    anchors: Vec<(f64, f64)>,
    paths: BTreeMap<EntityId, Vec<TimedVertex>>,
}

impl Baseline {
    pub fn new(choreography: &Choreography) -> AssessmentResult<Self> {
        let mut anchors = Vec::new();
        for f in &choreography.formations {
            if let Some(seconds) = f.video_time {
                anchors.push((beat_index(choreography, f.timeline_position)?, seconds));
            }
        }
        if anchors.is_empty() {
            return Err(AssessmentError::NoTimestamps);
        }
        let ordered = anchors
            .windows(2)
            .all(|w| w[0].0 < w[1].0 && w[0].1 < w[1].1);
        if !ordered || anchors.iter().any(|a| !a.1.is_finite()) {
            return Err(AssessmentError::InvalidTimestamps);
        }

        let mut paths: BTreeMap<EntityId, Vec<TimedVertex>> = BTreeMap::new();
        for transition in &choreography.transitions {
            let from = choreography.formation(&transition.from_formation_id);
            let to = choreography.formation(&transition.to_formation_id);
            let (Some(from), Some(to)) = (from, to) else {
                continue;
            };
            let entities = from.placements.keys().chain(to.placements.keys());
            for entity in entities {
                let path = transition_path(choreography, entity, transition)?;
                let chain = paths.entry(entity.clone()).or_default();
                for v in path.vertices() {
                    // at a shared formation time the earlier transition wins
                    if chain.last().is_none_or(|last| last.t < v.t) {
                        chain.push(*v);
                    }
                }
            }
        }
        // entities only seen in a formation without neighbours
        for f in &choreography.formations {
            let t = beat_index(choreography, f.timeline_position)?;
            for (entity, p) in &f.placements {
                paths.entry(entity.clone()).or_insert_with(|| {
                    vec![TimedVertex {
                        t,
                        position: p.position,
                    }]
                });
            }
        }
        Ok(Self { anchors, paths })
    }

    /// Beat time shown at `seconds` of video, clamped to the anchored range.
    pub fn beat_at(&self, seconds: f64) -> f64 {
        let first = self.anchors[0];
        let last = self.anchors[self.anchors.len() - 1];
        if seconds <= first.1 {
            return first.0;
        }
        if seconds >= last.1 {
            return last.0;
        }
        let i = self.anchors.partition_point(|a| a.1 <= seconds);
        let ((b0, s0), (b1, s1)) = (self.anchors[i - 1], self.anchors[i]);
        let f = (seconds - s0) / (s1 - s0);
        (1.0 - f) * b0 + f * b1
    }

    pub fn position(&self, entity: &EntityId, seconds: f64) -> AssessmentResult<Point> {
        let path = self
            .paths
            .get(entity)
            .ok_or_else(|| AssessmentError::NotPlaced(entity.clone()))?;
        Ok(interpolate(path, self.beat_at(seconds)))
    }

    pub fn is_placed(&self, entity: &EntityId) -> bool {
        self.paths.contains_key(entity)
    }
}

/// Planned position of `entity` at `seconds` into the video.
pub fn baseline_position(
    choreography: &Choreography,
    entity: &EntityId,
    seconds: f64,
) -> AssessmentResult<Point> {
    Baseline::new(choreography)?.position(entity, seconds)
}
