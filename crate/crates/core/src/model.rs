//! The choreography data model.
//!
//! A [`Choreography`] is a plain value: every field is public and the editing
//! operations in [`crate::edit`] take care of keeping it well-formed. Use
//! [`crate::validate::validate`] to check a value built by hand or loaded
//! from disk.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::geometry::Point;

/// Version written into every choreography document and report.
pub const SCHEMA_VERSION: &str = "1.0.0";

/// Joints a [`Pose`] may rotate.
pub const SKELETON_JOINTS: &[&str] = &[
    "pelvis",
    "spine",
    "chest",
    "neck",
    "head",
    "left_shoulder",
    "left_elbow",
    "left_wrist",
    "right_shoulder",
    "right_elbow",
    "right_wrist",
    "left_hip",
    "left_knee",
    "left_ankle",
    "right_hip",
    "right_knee",
    "right_ankle",
];

macro_rules! string_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_owned())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                Self(s)
            }
        }
    };
}

string_id!(
    /// Identifier of a dancer or couple.
    EntityId
);
string_id!(FormationId);
string_id!(PoseId);

/// Which side of the floor the audience is on. Only `+y` is supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum FrontDirection {
    #[default]
    #[serde(rename = "+y")]
    PositiveY,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FloorSpec {
    pub width: f64,
    pub depth: f64,
    #[serde(default)]
    pub front_direction: FrontDirection,
    /// Band around the floor where positions are still allowed (entries).
    pub margin: f64,
}

impl Default for FloorSpec {
    fn default() -> Self {
        Self {
            width: 16.0,
            depth: 16.0,
            front_direction: FrontDirection::PositiveY,
            margin: 2.0,
        }
    }
}

impl FloorSpec {
    pub fn new(width: f64, depth: f64, margin: f64) -> Self {
        Self {
            width,
            depth,
            front_direction: FrontDirection::PositiveY,
            margin,
        }
    }

    /// Whether `p` lies on the floor extended by the margin (inclusive).
    pub fn allows(&self, p: Point) -> bool {
        let hx = self.width / 2.0 + self.margin;
        let hy = self.depth / 2.0 + self.margin;
        p.is_finite() && p.x.abs() <= hx && p.y.abs() <= hy
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntityKind {
    Dancer,
    Couple,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Lady,
    Gentleman,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entity {
    pub id: EntityId,
    pub kind: EntityKind,
    pub role: Role,
    pub label: String,
    /// Exactly two dancer ids for a couple, empty for a dancer.
    #[serde(default)]
    pub member_ids: Vec<EntityId>,
}

impl Entity {
    pub fn dancer(id: impl Into<EntityId>, role: Role, label: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            kind: EntityKind::Dancer,
            role,
            label: label.into(),
            member_ids: Vec::new(),
        }
    }

    pub fn couple(
        id: impl Into<EntityId>,
        label: impl Into<String>,
        lady: impl Into<EntityId>,
        gentleman: impl Into<EntityId>,
    ) -> Self {
        Self {
            id: id.into(),
            kind: EntityKind::Couple,
            role: Role::None,
            label: label.into(),
            member_ids: vec![lady.into(), gentleman.into()],
        }
    }
}

/// Team size bounds checked by validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TeamLimits {
    pub max_couples: usize,
    pub max_dancers: usize,
}

impl Default for TeamLimits {
    fn default() -> Self {
        Self {
            max_couples: 8,
            max_dancers: 16,
        }
    }
}

fn default_beats_per_bar() -> u32 {
    8
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dance {
    pub name: String,
    pub bar_count: u32,
    #[serde(default = "default_beats_per_bar")]
    pub beats_per_bar: u32,
}

impl Dance {
    pub fn new(name: impl Into<String>, bar_count: u32) -> Self {
        Self {
            name: name.into(),
            bar_count,
            beats_per_bar: default_beats_per_bar(),
        }
    }

    pub fn total_beats(&self) -> u64 {
        u64::from(self.bar_count) * u64::from(self.beats_per_bar)
    }
}

/// A point on the musical timeline. All indices are 0-based; the derived
/// ordering is lexicographic over `(dance, bar, beat)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TimelinePosition {
    pub dance: u32,
    pub bar: u32,
    pub beat: u32,
}

impl TimelinePosition {
    pub const fn new(dance: u32, bar: u32, beat: u32) -> Self {
        Self { dance, bar, beat }
    }
}

impl fmt::Display for TimelinePosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "dance {} bar {} beat {}", self.dance, self.bar, self.beat)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointDefinition {
    CoupleCenter,
    BodyCenter,
    LeftFoot,
    RightFoot,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub position: Point,
    /// Degrees in `[0, 360)`, clockwise from facing front.
    pub body_orientation: f64,
    /// Absolute floor-space angle, same convention as the body.
    pub head_orientation: f64,
    pub point_definition: PointDefinition,
    /// Member of a couple standing on the point; required for couples unless
    /// the point is the couple centre.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point_dancer: Option<EntityId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pose_id: Option<PoseId>,
}

impl Placement {
    /// Facing front, body-centre point definition.
    pub fn at(position: Point) -> Self {
        Self {
            position,
            body_orientation: 0.0,
            head_orientation: 0.0,
            point_definition: PointDefinition::BodyCenter,
            point_dancer: None,
            pose_id: None,
        }
    }

    /// Facing front, couple-centre point definition.
    pub fn couple_at(position: Point) -> Self {
        Self {
            point_definition: PointDefinition::CoupleCenter,
            ..Self::at(position)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Shape {
    pub entity_ids: Vec<EntityId>,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Formation {
    pub id: FormationId,
    pub name: String,
    pub timeline_position: TimelinePosition,
    /// Seconds into the performance video at which the formation is reached.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub video_time: Option<f64>,
    pub placements: BTreeMap<EntityId, Placement>,
    #[serde(default)]
    pub shapes: Vec<Shape>,
}

impl Formation {
    pub fn new(
        id: impl Into<FormationId>,
        name: impl Into<String>,
        timeline_position: TimelinePosition,
    ) -> Self {
        Self {
            id: id.into(),
            name: name.into(),
            timeline_position,
            video_time: None,
            placements: BTreeMap::new(),
            shapes: Vec::new(),
        }
    }
}

/// Joint rotations in degrees, `(rx, ry, rz)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub id: PoseId,
    pub joint_rotations: BTreeMap<String, [f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Waypoint {
    pub time: TimelinePosition,
    pub position: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub from_formation_id: FormationId,
    pub to_formation_id: FormationId,
    /// Per-entity waypoints in ascending time order.
    #[serde(default)]
    pub waypoints: BTreeMap<EntityId, Vec<Waypoint>>,
}

impl Transition {
    pub fn between(from: &FormationId, to: &FormationId) -> Self {
        Self {
            from_formation_id: from.clone(),
            to_formation_id: to.clone(),
            waypoints: BTreeMap::new(),
        }
    }

    pub fn waypoints_for(&self, entity: &EntityId) -> &[Waypoint] {
        self.waypoints.get(entity).map_or(&[], Vec::as_slice)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Choreography {
    pub schema_version: String,
    pub title: String,
    pub floor: FloorSpec,
    pub dances: Vec<Dance>,
    pub entities: Vec<Entity>,
    #[serde(default)]
    pub poses: Vec<Pose>,
    /// Ordered by timeline position.
    pub formations: Vec<Formation>,
    /// One record per consecutive formation pair, in formation order.
    pub transitions: Vec<Transition>,
    pub revision: u64,
}

impl Choreography {
    pub fn new(title: impl Into<String>, floor: FloorSpec, dances: Vec<Dance>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_owned(),
            title: title.into(),
            floor,
            dances,
            entities: Vec::new(),
            poses: Vec::new(),
            formations: Vec::new(),
            transitions: Vec::new(),
            revision: 0,
        }
    }

    pub fn entity(&self, id: &EntityId) -> Option<&Entity> {
        self.entities.iter().find(|e| &e.id == id)
    }

    /// Resolves a user-facing reference (id first, then display label).
    pub fn resolve_entity(&self, reference: &str) -> Option<&EntityId> {
        self.entities
            .iter()
            .find(|e| e.id.as_str() == reference)
            .or_else(|| self.entities.iter().find(|e| e.label == reference))
            .map(|e| &e.id)
    }

    pub fn formation(&self, id: &FormationId) -> Option<&Formation> {
        self.formations.iter().find(|f| &f.id == id)
    }

    pub fn formation_index(&self, id: &FormationId) -> Option<usize> {
        self.formations.iter().position(|f| &f.id == id)
    }

    /// Index of the transition leaving formation `from`.
    pub fn transition_index(&self, from: &FormationId) -> Option<usize> {
        self.transitions
            .iter()
            .position(|t| &t.from_formation_id == from)
    }

    pub fn pose(&self, id: &PoseId) -> Option<&Pose> {
        self.poses.iter().find(|p| &p.id == id)
    }

    /// Whether the position addresses an existing dance, bar and beat.
    pub fn timeline_contains(&self, pos: TimelinePosition) -> bool {
        self.dances
            .get(pos.dance as usize)
            .is_some_and(|d| pos.bar < d.bar_count && pos.beat < d.beats_per_bar)
    }

    /// Rebuilds the transition list so there is exactly one record per
    /// consecutive formation pair, keeping existing waypoints where the pair
    /// is unchanged.
    pub fn sync_transitions(&mut self) {
        let mut old: Vec<Transition> = std::mem::take(&mut self.transitions);
        self.transitions = self
            .formations
            .windows(2)
            .map(|pair| {
                let (a, b) = (&pair[0].id, &pair[1].id);
                match old
                    .iter()
                    .position(|t| &t.from_formation_id == a && &t.to_formation_id == b)
                {
                    Some(i) => old.swap_remove(i),
                    None => Transition::between(a, b),
                }
            })
            .collect();
    }
}
