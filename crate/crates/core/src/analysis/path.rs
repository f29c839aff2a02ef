use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::geometry::Point;
use crate::model::{Choreography, EntityId, Formation, Transition};

use super::{beat_index, AnalysisError, AnalysisResult};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimedVertex {
    pub t: f64,
    pub position: Point,
}

/// Piecewise-linear motion: constant speed between consecutive vertices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimedPolyline {
    vertices: Vec<TimedVertex>,
}

impl TimedPolyline {
    pub fn new(vertices: Vec<TimedVertex>) -> AnalysisResult<Self> {
        let times_ok = vertices.iter().all(|v| v.t.is_finite() && v.position.is_finite())
            && vertices.windows(2).all(|w| w[0].t < w[1].t);
        if vertices.len() < 2 || !times_ok {
            return Err(AnalysisError::InvalidPolyline);
        }
        Ok(Self { vertices })
    }

    pub fn from_pairs(pairs: &[(f64, Point)]) -> AnalysisResult<Self> {
        Self::new(
            pairs
                .iter()
                .map(|&(t, position)| TimedVertex { t, position })
                .collect(),
        )
    }

    pub fn vertices(&self) -> &[TimedVertex] {
        &self.vertices
    }

    pub fn start_time(&self) -> f64 {
        self.vertices[0].t
    }

    pub fn end_time(&self) -> f64 {
        self.vertices[self.vertices.len() - 1].t
    }

    /// Sorted union of the vertex times of two paths.
    pub(crate) fn merged_times(&self, other: &TimedPolyline) -> Vec<f64> {
        let mut times: Vec<f64> = self
            .vertices
            .iter()
            .chain(&other.vertices)
            .map(|v| v.t)
            .collect();
        times.sort_by(f64::total_cmp);
        times.dedup();
        times
    }
}

/// Interpolates over time-sorted vertices, holding the end positions
/// outside their range. Exact at every vertex time.
pub(crate) fn interpolate(vertices: &[TimedVertex], t: f64) -> Point {
    let first = vertices[0];
    let last = vertices[vertices.len() - 1];
    if t <= first.t {
        return first.position;
    }
    if t >= last.t {
        return last.position;
    }
    // first index whose time is > t; 1 <= i < len
    let i = vertices.partition_point(|v| v.t <= t);
    let (a, b) = (vertices[i - 1], vertices[i]);
    if t == a.t {
        return a.position;
    }
    a.position.lerp(b.position, (t - a.t) / (b.t - a.t))
}

pub fn position_at(path: &TimedPolyline, t: f64) -> Point {
    interpolate(&path.vertices, t)
}

pub fn path_length(path: &TimedPolyline) -> f64 {
    path.vertices
        .windows(2)
        .map(|w| w[0].position.distance(w[1].position))
        .sum()
}

/// Fraction of the path's duration elapsed at `t`, clamped to `[0, 1]`.
pub fn transition_progress(path: &TimedPolyline, t: f64) -> f64 {
    let (start, end) = (path.start_time(), path.end_time());
    let span = end - start;
    if span <= 0.0 {
        return 0.0;
    }
    ((t - start) / span).clamp(0.0, 1.0)
}

fn transition_formations<'a>(
    choreography: &'a Choreography,
    transition: &Transition,
) -> AnalysisResult<(&'a Formation, &'a Formation)> {
    let unknown = || AnalysisError::UnknownTransition(transition.from_formation_id.clone());
    let from = choreography
        .formation(&transition.from_formation_id)
        .ok_or_else(unknown)?;
    let to = choreography
        .formation(&transition.to_formation_id)
        .ok_or_else(unknown)?;
    Ok((from, to))
}

/// The path an entity takes during a transition: from-placement, waypoints,
/// to-placement. An entity placed on only one side holds that position for
/// the whole transition.
pub fn transition_path(
    choreography: &Choreography,
    entity: &EntityId,
    transition: &Transition,
) -> AnalysisResult<TimedPolyline> {
    let (from, to) = transition_formations(choreography, transition)?;
    let t0 = beat_index(choreography, from.timeline_position)?;
    let t1 = beat_index(choreography, to.timeline_position)?;

    let start = from.placements.get(entity).map(|p| p.position);
    let end = to.placements.get(entity).map(|p| p.position);
    let vertices = match (start, end) {
        (Some(a), Some(b)) => {
            let mut v = vec![TimedVertex { t: t0, position: a }];
            for w in transition.waypoints_for(entity) {
                v.push(TimedVertex {
                    t: beat_index(choreography, w.time)?,
                    position: w.position,
                });
            }
            v.push(TimedVertex { t: t1, position: b });
            v
        }
        (Some(p), None) | (None, Some(p)) => vec![
            TimedVertex { t: t0, position: p },
            TimedVertex { t: t1, position: p },
        ],
        (None, None) => return Err(AnalysisError::NotPlaced(entity.clone())),
    };
    TimedPolyline::new(vertices)
}

/// Paths of every entity placed on at least one side of the transition.
pub fn transition_paths(
    choreography: &Choreography,
    transition: &Transition,
) -> AnalysisResult<BTreeMap<EntityId, TimedPolyline>> {
    let (from, to) = transition_formations(choreography, transition)?;
    let mut entities: Vec<&EntityId> = from.placements.keys().chain(to.placements.keys()).collect();
    entities.sort();
    entities.dedup();
    entities
        .into_iter()
        .map(|e| Ok((e.clone(), transition_path(choreography, e, transition)?)))
        .collect()
}
