//! Editing operations as JSON requests, for clients that edit through the
//! service instead of replacing whole documents.

use std::collections::BTreeSet;

use formation_core::edit::FormationSource;
use formation_core::{Choreography, EntityId, FormationId, Point, TimelinePosition};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{ServiceError, ServiceResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum EditRequest {
    /// Blank unless `duplicate_of` or `template` is given (not both).
    CreateFormation {
        timeline_position: TimelinePosition,
        #[serde(default)]
        duplicate_of: Option<FormationId>,
        #[serde(default)]
        template: Option<String>,
    },
    MoveEntity {
        formation_id: FormationId,
        entity_id: EntityId,
        position: Point,
    },
    RotateSelection {
        formation_id: FormationId,
        entity_ids: BTreeSet<EntityId>,
        angle: f64,
    },
    SetOrientation {
        formation_id: FormationId,
        entity_ids: BTreeSet<EntityId>,
        #[serde(default)]
        body: Option<f64>,
        #[serde(default)]
        head: Option<f64>,
    },
    RepositionOnTimeline {
        formation_id: FormationId,
        timeline_position: TimelinePosition,
    },
    SetWaypoint {
        from_formation_id: FormationId,
        entity_id: EntityId,
        time: TimelinePosition,
        position: Point,
    },
    RemoveWaypoint {
        from_formation_id: FormationId,
        entity_id: EntityId,
        time: TimelinePosition,
    },
}

fn value<T: Serialize>(v: T) -> Value {
    serde_json::to_value(v).expect("edit results serialize")
}

/// Applies the edit and returns its result as JSON.
pub fn apply_edit(c: &mut Choreography, edit: EditRequest) -> ServiceResult<Value> {
    Ok(match edit {
        EditRequest::CreateFormation {
            timeline_position,
            duplicate_of,
            template,
        } => {
            let source = match (duplicate_of, template) {
                (None, None) => FormationSource::Blank,
                (Some(id), None) => FormationSource::DuplicateOf(id),
                (None, Some(name)) => FormationSource::Template(name),
                (Some(_), Some(_)) => {
                    return Err(ServiceError::bad_request(
                        "INVALID_EDIT",
                        "give either duplicate_of or template, not both",
                    ))
                }
            };
            value(c.create_formation(timeline_position, source)?)
        }
        EditRequest::MoveEntity {
            formation_id,
            entity_id,
            position,
        } => value(c.move_entity(&formation_id, &entity_id, position)?),
        EditRequest::RotateSelection {
            formation_id,
            entity_ids,
            angle,
        } => value(c.rotate_selection(&formation_id, &entity_ids, angle)?),
        EditRequest::SetOrientation {
            formation_id,
            entity_ids,
            body,
            head,
        } => value(c.set_orientation(&formation_id, &entity_ids, body, head)?),
        EditRequest::RepositionOnTimeline {
            formation_id,
            timeline_position,
        } => value(c.reposition_on_timeline(&formation_id, timeline_position)?),
        EditRequest::SetWaypoint {
            from_formation_id,
            entity_id,
            time,
            position,
        } => value(c.set_waypoint(&from_formation_id, &entity_id, time, position)?),
        EditRequest::RemoveWaypoint {
            from_formation_id,
            entity_id,
            time,
        } => value(c.remove_waypoint(&from_formation_id, &entity_id, time)?),
    })
}
