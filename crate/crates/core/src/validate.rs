//! Well-formedness checks for a [`Choreography`].
//!
//! Violations are data: [`validate`] reports every problem it finds, each
//! with a machine-readable code and a JSON-pointer location into the
//! serialized document.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{
    Choreography, EntityKind, Formation, PointDefinition, TeamLimits, Transition,
    SKELETON_JOINTS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ViolationCode {
    InvalidFloor,
    InvalidDance,
    DuplicateEntityId,
    InvalidEntity,
    InvalidCouple,
    TeamTooLarge,
    DuplicatePoseId,
    InvalidPose,
    DuplicateFormationId,
    TimelineOutOfBounds,
    DuplicateTimelinePosition,
    FormationOrder,
    InvalidVideoTime,
    VideoTimeOrder,
    UnknownEntity,
    OutOfBounds,
    InvalidOrientation,
    MissingPointDancer,
    InvalidPointDancer,
    InvalidPointDefinition,
    UnknownPose,
    InvalidShape,
    ShapeEntityNotPlaced,
    TransitionMismatch,
    WaypointNotPlaced,
    WaypointTimeOutOfRange,
    WaypointOrder,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        use ViolationCode::*;
        match self {
            InvalidFloor => "INVALID_FLOOR",
            InvalidDance => "INVALID_DANCE",
            DuplicateEntityId => "DUPLICATE_ENTITY_ID",
            InvalidEntity => "INVALID_ENTITY",
            InvalidCouple => "INVALID_COUPLE",
            TeamTooLarge => "TEAM_TOO_LARGE",
            DuplicatePoseId => "DUPLICATE_POSE_ID",
            InvalidPose => "INVALID_POSE",
            DuplicateFormationId => "DUPLICATE_FORMATION_ID",
            TimelineOutOfBounds => "TIMELINE_OUT_OF_BOUNDS",
            DuplicateTimelinePosition => "DUPLICATE_TIMELINE_POSITION",
            FormationOrder => "FORMATION_ORDER",
            InvalidVideoTime => "INVALID_VIDEO_TIME",
            VideoTimeOrder => "VIDEO_TIME_ORDER",
            UnknownEntity => "UNKNOWN_ENTITY",
            OutOfBounds => "OUT_OF_BOUNDS",
            InvalidOrientation => "INVALID_ORIENTATION",
            MissingPointDancer => "MISSING_POINT_DANCER",
            InvalidPointDancer => "INVALID_POINT_DANCER",
            InvalidPointDefinition => "INVALID_POINT_DEFINITION",
            UnknownPose => "UNKNOWN_POSE",
            InvalidShape => "INVALID_SHAPE",
            ShapeEntityNotPlaced => "SHAPE_ENTITY_NOT_PLACED",
            TransitionMismatch => "TRANSITION_MISMATCH",
            WaypointNotPlaced => "WAYPOINT_NOT_PLACED",
            WaypointTimeOutOfRange => "WAYPOINT_TIME_OUT_OF_RANGE",
            WaypointOrder => "WAYPOINT_ORDER",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub message: String,
    /// JSON pointer into the serialized choreography.
    pub location: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}: {}", self.code, self.location, self.message)
    }
}

/// Escapes a map key for use as a JSON pointer segment.
pub(crate) fn pointer_segment(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

struct Collector(Vec<Violation>);

impl Collector {
    fn push(&mut self, code: ViolationCode, location: impl Into<String>, message: impl Into<String>) {
        self.0.push(Violation {
            code,
            message: message.into(),
            location: location.into(),
        });
    }
}

pub fn validate(choreography: &Choreography) -> Vec<Violation> {
    validate_with(choreography, &TeamLimits::default())
}

pub fn validate_with(c: &Choreography, limits: &TeamLimits) -> Vec<Violation> {
    use ViolationCode::*;
    let mut out = Collector(Vec::new());

    let floor = &c.floor;
    if !(floor.width.is_finite() && floor.width > 0.0) {
        out.push(InvalidFloor, "/floor/width", "floor width must be positive");
    }
    if !(floor.depth.is_finite() && floor.depth > 0.0) {
        out.push(InvalidFloor, "/floor/depth", "floor depth must be positive");
    }
    if !(floor.margin.is_finite() && floor.margin >= 0.0) {
        out.push(InvalidFloor, "/floor/margin", "floor margin must be non-negative");
    }

    if c.dances.is_empty() {
        out.push(InvalidDance, "/dances", "a choreography needs at least one dance");
    }
    for (i, d) in c.dances.iter().enumerate() {
        if d.bar_count == 0 {
            out.push(InvalidDance, format!("/dances/{i}/bar_count"), "bar_count must be at least 1");
        }
        if d.beats_per_bar == 0 {
            out.push(InvalidDance, format!("/dances/{i}/beats_per_bar"), "beats_per_bar must be at least 1");
        }
    }

    check_entities(c, limits, &mut out);
    check_poses(c, &mut out);

    let mut formation_ids = HashSet::new();
    for (i, f) in c.formations.iter().enumerate() {
        if !formation_ids.insert(&f.id) {
            out.push(DuplicateFormationId, format!("/formations/{i}/id"), format!("formation id {} is used twice", f.id));
        }
        if !c.timeline_contains(f.timeline_position) {
            out.push(
                TimelineOutOfBounds,
                format!("/formations/{i}/timeline_position"),
                format!("{} is outside the dances", f.timeline_position),
            );
        }
        if i > 0 {
            let prev = c.formations[i - 1].timeline_position;
            let here = f.timeline_position;
            if here == prev {
                out.push(
                    DuplicateTimelinePosition,
                    format!("/formations/{i}/timeline_position"),
                    format!("{here} is already used by formation {}", c.formations[i - 1].id),
                );
            } else if here < prev {
                out.push(
                    FormationOrder,
                    format!("/formations/{i}/timeline_position"),
                    "formations must be listed in timeline order",
                );
            }
        }
        if let Some(t) = f.video_time {
            if !t.is_finite() {
                out.push(InvalidVideoTime, format!("/formations/{i}/video_time"), "video_time must be finite");
            }
        }
        check_formation(c, i, f, &mut out);
    }

    let mut last_video: Option<f64> = None;
    for (i, f) in c.formations.iter().enumerate() {
        if let Some(t) = f.video_time.filter(|t| t.is_finite()) {
            if last_video.is_some_and(|prev| t <= prev) {
                out.push(
                    VideoTimeOrder,
                    format!("/formations/{i}/video_time"),
                    "video times must strictly increase along the timeline",
                );
            }
            last_video = Some(t);
        }
    }

    check_transitions(c, &mut out);
    out.0
}

fn check_entities(c: &Choreography, limits: &TeamLimits, out: &mut Collector) {
    use ViolationCode::*;
    let mut seen = HashSet::new();
    let (mut dancers, mut couples) = (0usize, 0usize);
    for (i, e) in c.entities.iter().enumerate() {
        if !seen.insert(&e.id) {
            out.push(DuplicateEntityId, format!("/entities/{i}/id"), format!("entity id {} is used twice", e.id));
        }
        match e.kind {
            EntityKind::Dancer => {
                dancers += 1;
                if !e.member_ids.is_empty() {
                    out.push(InvalidEntity, format!("/entities/{i}/member_ids"), "only couples have members");
                }
            }
            EntityKind::Couple => {
                couples += 1;
                if e.member_ids.len() != 2 || e.member_ids[0] == e.member_ids[1] {
                    out.push(InvalidCouple, format!("/entities/{i}/member_ids"), "a couple has exactly two distinct members");
                }
                for (j, m) in e.member_ids.iter().enumerate() {
                    if !c.entity(m).is_some_and(|d| d.kind == EntityKind::Dancer) {
                        out.push(
                            InvalidCouple,
                            format!("/entities/{i}/member_ids/{j}"),
                            format!("member {m} is not a dancer of this choreography"),
                        );
                    }
                }
            }
        }
    }
    if dancers > limits.max_dancers || couples > limits.max_couples {
        out.push(
            TeamTooLarge,
            "/entities",
            format!(
                "{dancers} dancers / {couples} couples exceed the limit of {} / {}",
                limits.max_dancers, limits.max_couples
            ),
        );
    }
}

fn check_poses(c: &Choreography, out: &mut Collector) {
    use ViolationCode::*;
    let mut seen = HashSet::new();
    for (i, p) in c.poses.iter().enumerate() {
        if !seen.insert(&p.id) {
            out.push(DuplicatePoseId, format!("/poses/{i}/id"), format!("pose id {} is used twice", p.id));
        }
        for (joint, angles) in &p.joint_rotations {
            let loc = format!("/poses/{i}/joint_rotations/{}", pointer_segment(joint));
            if !SKELETON_JOINTS.contains(&joint.as_str()) {
                out.push(InvalidPose, loc, format!("unknown joint {joint}"));
            } else if !angles.iter().all(|a| a.is_finite()) {
                out.push(InvalidPose, loc, "joint angles must be finite");
            }
        }
    }
}

fn orientation_ok(deg: f64) -> bool {
    deg.is_finite() && (0.0..360.0).contains(&deg)
}

fn check_formation(c: &Choreography, i: usize, f: &Formation, out: &mut Collector) {
    use ViolationCode::*;
    for (id, p) in &f.placements {
        let base = format!("/formations/{i}/placements/{}", pointer_segment(id.as_str()));
        let Some(entity) = c.entity(id) else {
            out.push(UnknownEntity, base, format!("entity {id} does not exist"));
            continue;
        };
        if !c.floor.allows(p.position) {
            out.push(OutOfBounds, format!("{base}/position"), "position lies outside the floor and margin");
        }
        if !orientation_ok(p.body_orientation) {
            out.push(InvalidOrientation, format!("{base}/body_orientation"), "orientation must lie in [0, 360)");
        }
        if !orientation_ok(p.head_orientation) {
            out.push(InvalidOrientation, format!("{base}/head_orientation"), "orientation must lie in [0, 360)");
        }
        match entity.kind {
            EntityKind::Couple => match (&p.point_definition, &p.point_dancer) {
                (PointDefinition::CoupleCenter, _) => {}
                (_, None) => out.push(
                    MissingPointDancer,
                    format!("{base}/point_dancer"),
                    format!("couple {id} needs a point_dancer for this point definition"),
                ),
                (_, Some(d)) if !entity.member_ids.contains(d) => out.push(
                    InvalidPointDancer,
                    format!("{base}/point_dancer"),
                    format!("{d} is not a member of couple {id}"),
                ),
                _ => {}
            },
            EntityKind::Dancer => {
                if p.point_definition == PointDefinition::CoupleCenter {
                    out.push(InvalidPointDefinition, format!("{base}/point_definition"), "a single dancer has no couple centre");
                }
                if p.point_dancer.is_some() {
                    out.push(InvalidPointDancer, format!("{base}/point_dancer"), "point_dancer applies to couples only");
                }
            }
        }
        if let Some(pose) = &p.pose_id {
            if c.pose(pose).is_none() {
                out.push(UnknownPose, format!("{base}/pose_id"), format!("pose {pose} does not exist"));
            }
        }
    }
    for (s, shape) in f.shapes.iter().enumerate() {
        let distinct: BTreeSet<_> = shape.entity_ids.iter().collect();
        if shape.entity_ids.len() < 2 || distinct.len() != shape.entity_ids.len() {
            out.push(
                InvalidShape,
                format!("/formations/{i}/shapes/{s}/entity_ids"),
                "a shape needs at least two distinct entities",
            );
        }
        for (k, e) in shape.entity_ids.iter().enumerate() {
            if !f.placements.contains_key(e) {
                out.push(
                    ShapeEntityNotPlaced,
                    format!("/formations/{i}/shapes/{s}/entity_ids/{k}"),
                    format!("{e} is not placed in formation {}", f.id),
                );
            }
        }
    }
}

fn check_transitions(c: &Choreography, out: &mut Collector) {
    use ViolationCode::*;
    let expected = c.formations.len().saturating_sub(1);
    if c.transitions.len() != expected {
        out.push(
            TransitionMismatch,
            "/transitions",
            format!("expected {expected} transitions, found {}", c.transitions.len()),
        );
    }
    for (i, t) in c.transitions.iter().enumerate() {
        let pair = c.formations.get(i).zip(c.formations.get(i + 1));
        match pair {
            Some((a, b)) if a.id == t.from_formation_id && b.id == t.to_formation_id => {
                check_waypoints(c, i, t, a, b, out);
            }
            _ => out.push(
                TransitionMismatch,
                format!("/transitions/{i}"),
                format!(
                    "transition {} -> {} does not connect consecutive formations",
                    t.from_formation_id, t.to_formation_id
                ),
            ),
        }
    }
}

fn check_waypoints(
    c: &Choreography,
    i: usize,
    t: &Transition,
    from: &Formation,
    to: &Formation,
    out: &mut Collector,
) {
    use ViolationCode::*;
    for (entity, list) in &t.waypoints {
        let base = format!("/transitions/{i}/waypoints/{}", pointer_segment(entity.as_str()));
        if c.entity(entity).is_none() {
            out.push(UnknownEntity, base, format!("entity {entity} does not exist"));
            continue;
        }
        if !list.is_empty()
            && !(from.placements.contains_key(entity) && to.placements.contains_key(entity))
        {
            out.push(
                WaypointNotPlaced,
                base.clone(),
                format!("{entity} must be placed in both {} and {}", from.id, to.id),
            );
        }
        for (k, w) in list.iter().enumerate() {
            if !c.timeline_contains(w.time) {
                out.push(TimelineOutOfBounds, format!("{base}/{k}/time"), format!("{} is outside the dances", w.time));
            }
            if !(w.time > from.timeline_position && w.time < to.timeline_position) {
                out.push(
                    WaypointTimeOutOfRange,
                    format!("{base}/{k}/time"),
                    "waypoint time must lie strictly between the two formations",
                );
            }
            if k > 0 && w.time <= list[k - 1].time {
                out.push(WaypointOrder, format!("{base}/{k}/time"), "waypoint times must strictly increase");
            }
            if !c.floor.allows(w.position) {
                out.push(OutOfBounds, format!("{base}/{k}/position"), "waypoint lies outside the floor and margin");
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{place, two_formations};
    use crate::geometry::Point;
    use crate::model::{Entity, Placement, PointDefinition, Role, TimelinePosition, Waypoint};

    fn codes(c: &Choreography) -> Vec<ViolationCode> {
        validate(c).into_iter().map(|v| v.code).collect()
    }

    #[test]
    fn fixture_is_well_formed() {
        assert_eq!(validate(&two_formations()), vec![]);
    }

    #[test]
    fn duplicate_timeline_position() {
        let mut c = two_formations();
        c.formations[0].timeline_position = TimelinePosition::new(0, 4, 1);
        c.formations[1].timeline_position = TimelinePosition::new(0, 4, 1);
        assert_eq!(codes(&c), vec![ViolationCode::DuplicateTimelinePosition]);
        assert_eq!(validate(&c)[0].location, "/formations/1/timeline_position");
    }

    #[test]
    fn couple_needs_point_dancer() {
        let mut c = two_formations();
        c.entities.push(Entity::dancer("L", Role::Lady, "Lady 2"));
        c.entities.push(Entity::dancer("G", Role::Gentleman, "Gentleman 2"));
        c.entities.push(Entity::couple("LG", "Couple 2", "L", "G"));
        let mut p = Placement::couple_at(Point::new(1.0, 1.0));
        p.point_definition = PointDefinition::LeftFoot;
        c.formations[0].placements.insert("LG".into(), p.clone());
        assert_eq!(codes(&c), vec![ViolationCode::MissingPointDancer]);

        p.point_dancer = Some("A".into());
        c.formations[0].placements.insert("LG".into(), p.clone());
        assert_eq!(codes(&c), vec![ViolationCode::InvalidPointDancer]);

        p.point_dancer = Some("L".into());
        c.formations[0].placements.insert("LG".into(), p);
        assert_eq!(codes(&c), vec![]);
    }

    #[test]
    fn entity_problems() {
        let mut c = two_formations();
        c.entities.push(Entity::dancer("A", Role::Lady, "again"));
        c.entities.push(Entity::couple("X", "bad couple", "A", "nobody"));
        let got = codes(&c);
        assert!(got.contains(&ViolationCode::DuplicateEntityId));
        assert!(got.contains(&ViolationCode::InvalidCouple));

        let mut c = two_formations();
        for i in 0..14 {
            c.entities.push(Entity::dancer(format!("extra{i}"), Role::None, "x"));
        }
        assert_eq!(codes(&c), vec![ViolationCode::TeamTooLarge]);
        let roomy = TeamLimits { max_couples: 8, max_dancers: 20 };
        assert!(validate_with(&c, &roomy).is_empty());
    }

    #[test]
    fn placement_problems() {
        let mut c = two_formations();
        place(&mut c.formations[0], "ghost", 0.0, 0.0);
        c.formations[1].placements.get_mut(&"A".into()).unwrap().position = Point::new(30.0, 0.0);
        c.formations[1].placements.get_mut(&"B".into()).unwrap().body_orientation = 360.0;
        let v = validate(&c);
        assert_eq!(v[0].code, ViolationCode::UnknownEntity);
        assert_eq!(v[0].location, "/formations/0/placements/ghost");
        assert_eq!(v[1].code, ViolationCode::OutOfBounds);
        assert_eq!(v[2].code, ViolationCode::InvalidOrientation);
    }

    #[test]
    fn ordering_and_video_time() {
        let mut c = two_formations();
        c.formations.swap(0, 1);
        c.sync_transitions();
        assert_eq!(codes(&c), vec![ViolationCode::FormationOrder]);

        let mut c = two_formations();
        c.formations[0].video_time = Some(5.0);
        c.formations[1].video_time = Some(5.0);
        assert_eq!(codes(&c), vec![ViolationCode::VideoTimeOrder]);
    }

    #[test]
    fn transition_records() {
        let mut c = two_formations();
        c.transitions.clear();
        assert_eq!(codes(&c), vec![ViolationCode::TransitionMismatch]);

        let mut c = two_formations();
        c.transitions[0].waypoints.insert(
            "A".into(),
            vec![
                Waypoint { time: TimelinePosition::new(0, 3, 0), position: Point::ORIGIN },
                Waypoint { time: TimelinePosition::new(0, 2, 0), position: Point::ORIGIN },
                Waypoint { time: TimelinePosition::new(0, 4, 0), position: Point::ORIGIN },
            ],
        );
        assert_eq!(
            codes(&c),
            vec![ViolationCode::WaypointOrder, ViolationCode::WaypointTimeOutOfRange]
        );
    }

    #[test]
    fn shapes_reference_placed_entities() {
        let mut c = two_formations();
        c.formations[0].shapes.push(crate::model::Shape {
            entity_ids: vec!["A".into(), "B".into(), "Z".into()],
            label: "tri".into(),
        });
        assert_eq!(codes(&c), vec![ViolationCode::ShapeEntityNotPlaced]);
    }
}
