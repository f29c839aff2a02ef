//! Formation templates.
//!
//! Templates are JSON data files describing where slots go; the built-in
//! catalog lives in `crates/core/templates/` and teams can load their own
//! with [`Template::from_json`]. Entities of the template's kind are assigned
//! to slots in declaration order.
//!
//! Spacing rules:
//!
//! * `rows`: a row of `n` slots divides the floor width `W` into `n` equal
//!   cells and puts slot `j` at the cell centre, `x = -W/2 + (j + 0.5) * W/n`,
//!   at the row's `y`. Everyone faces front.
//! * `circle`: slot `j` of `n` sits at angle `360 * j / n` (clockwise from
//!   front) on a circle of the given radius around the floor centre, facing
//!   the centre.

use serde::{Deserialize, Serialize};

use crate::geometry::{normalize_degrees, Point};
use crate::model::{EntityKind, FloorSpec, Placement, PointDefinition};

const BUILTIN_SOURCES: &[&str] = &[
    include_str!("../templates/two_lines_of_8.json"),
    include_str!("../templates/four_lines_of_4.json"),
    include_str!("../templates/line_of_8_couples.json"),
    include_str!("../templates/circle_of_8_couples.json"),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub count: usize,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Layout {
    Rows { rows: Vec<Row> },
    Circle { count: usize, radius: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Template {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub entity_kind: EntityKind,
    pub layout: Layout,
}

/// A slot produced by a template: where to stand and which way to face.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slot {
    pub position: Point,
    pub orientation: f64,
}

impl Template {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn slot_count(&self) -> usize {
        match &self.layout {
            Layout::Rows { rows } => rows.iter().map(|r| r.count).sum(),
            Layout::Circle { count, .. } => *count,
        }
    }

    pub fn slots(&self, floor: &FloorSpec) -> Vec<Slot> {
        match &self.layout {
            Layout::Rows { rows } => rows
                .iter()
                .flat_map(|row| {
                    let cell = floor.width / row.count as f64;
                    (0..row.count).map(move |j| Slot {
                        position: Point::new(-floor.width / 2.0 + (j as f64 + 0.5) * cell, row.y),
                        orientation: 0.0,
                    })
                })
                .collect(),
            Layout::Circle { count, radius } => (0..*count)
                .map(|j| {
                    let angle = 360.0 * j as f64 / *count as f64;
                    let (s, c) = angle.to_radians().sin_cos();
                    Slot {
                        position: Point::new(radius * s, radius * c),
                        orientation: normalize_degrees(angle + 180.0),
                    }
                })
                .collect(),
        }
    }

    /// Placement for a slot, with the point definition that fits the
    /// template's entity kind.
    pub(crate) fn placement(&self, slot: Slot) -> Placement {
        let point_definition = match self.entity_kind {
            EntityKind::Couple => PointDefinition::CoupleCenter,
            EntityKind::Dancer => PointDefinition::BodyCenter,
        };
        Placement {
            position: slot.position,
            body_orientation: slot.orientation,
            head_orientation: slot.orientation,
            point_definition,
            point_dancer: None,
            pose_id: None,
        }
    }
}

pub fn builtin_templates() -> Vec<Template> {
    BUILTIN_SOURCES
        .iter()
        .map(|src| Template::from_json(src).expect("built-in template is valid JSON"))
        .collect()
}

pub fn builtin_template(name: &str) -> Option<Template> {
    builtin_templates().into_iter().find(|t| t.name == name)
}
