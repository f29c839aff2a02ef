use serde::{Deserialize, Serialize};

use crate::geometry::Point;
use crate::model::{Choreography, EntityId, Transition};

use super::{path::interpolate, transition_paths, AnalysisError, AnalysisResult, TimedPolyline};

pub const DEFAULT_COLLISION_THRESHOLD: f64 = 0.5;

/// Closest approach of two entities during a transition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionEvent {
    pub entity_a: EntityId,
    pub entity_b: EntityId,
    /// Continuous beat index of the closest approach.
    pub t_closest: f64,
    pub min_distance: f64,
    pub position_a: Point,
    pub position_b: Point,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Approach {
    pub t: f64,
    pub distance: f64,
    pub position_a: Point,
    pub position_b: Point,
}

/// Global minimum over time of the distance between two moving points.
///
/// Between consecutive breakpoints of either path both points move
/// linearly, so the squared separation is a quadratic in `t` whose minimum
/// on the piece has a closed form. Ties resolve to the earliest time.
pub fn closest_approach(a: &TimedPolyline, b: &TimedPolyline) -> Approach {
    let times = a.merged_times(b);
    let at = |t: f64| {
        let pa = interpolate(a.vertices(), t);
        let pb = interpolate(b.vertices(), t);
        Approach {
            t,
            distance: pa.distance(pb),
            position_a: pa,
            position_b: pb,
        }
    };

    let mut best = at(times[0]);
    for w in times.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let start = at(t0);
        let end = at(t1);
        let d0 = start.position_a - start.position_b;
        let dv = (end.position_a - end.position_b) - d0;
        let vv = dv.norm_squared();
        let candidate = if vv > 0.0 {
            let s = (-d0.dot(dv) / vv).clamp(0.0, 1.0);
            if s == 0.0 {
                start
            } else if s == 1.0 {
                end
            } else {
                let pa = start.position_a.lerp(end.position_a, s);
                let pb = start.position_b.lerp(end.position_b, s);
                Approach {
                    t: t0 + s * (t1 - t0),
                    distance: pa.distance(pb),
                    position_a: pa,
                    position_b: pb,
                }
            }
        } else {
            start
        };
        if candidate.distance < best.distance {
            best = candidate;
        }
    }
    best
}

/// Every unordered pair whose closest approach during the transition is
/// below `threshold` metres, sorted by time of closest approach.
pub fn detect_collisions(
    choreography: &Choreography,
    transition: &Transition,
    threshold: f64,
) -> AnalysisResult<Vec<CollisionEvent>> {
    if !(threshold.is_finite() && threshold > 0.0) {
        return Err(AnalysisError::InvalidThreshold);
    }
    let paths: Vec<_> = transition_paths(choreography, transition)?.into_iter().collect();
    let mut events = Vec::new();
    for (i, (id_a, path_a)) in paths.iter().enumerate() {
        for (id_b, path_b) in &paths[i + 1..] {
            let approach = closest_approach(path_a, path_b);
            if approach.distance < threshold {
                events.push(CollisionEvent {
                    entity_a: id_a.clone(),
                    entity_b: id_b.clone(),
                    t_closest: approach.t,
                    min_distance: approach.distance,
                    position_a: approach.position_a,
                    position_b: approach.position_b,
                });
            }
        }
    }
    events.sort_by(|x, y| {
        x.t_closest
            .total_cmp(&y.t_closest)
            .then_with(|| (&x.entity_a, &x.entity_b).cmp(&(&y.entity_a, &y.entity_b)))
    });
    Ok(events)
}
