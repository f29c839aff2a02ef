//! Editing operations on a [`Choreography`].
//!
//! Every operation is atomic: on error the choreography is left untouched.
//! Each accepted edit bumps `revision` by one.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::geometry::{centroid, normalize_degrees, Point, Rect};
use crate::model::{
    Choreography, EntityId, Formation, FormationId, Placement, TimelinePosition, Waypoint,
};
use crate::templates::{builtin_template, Template};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EditError {
    #[error("timeline position {0} is already occupied")]
    PositionOccupied(TimelinePosition),
    #[error("timeline position {0} is outside the dances")]
    PositionOutOfBounds(TimelinePosition),
    #[error("moving the formation to {0} would pass a neighbouring formation")]
    OrderViolation(TimelinePosition),
    #[error("waypoint of {entity} at {time} conflicts with the new formation time")]
    WaypointConflict { entity: EntityId, time: TimelinePosition },
    #[error("waypoint time {0} does not lie strictly between the two formations")]
    TimeOutOfRange(TimelinePosition),
    #[error("position ({}, {}) is outside the floor and margin", .0.x, .0.y)]
    OutOfBounds(Point),
    #[error("entity {0} is not placed in this formation")]
    NotPlaced(EntityId),
    #[error("unknown entity {0}")]
    UnknownEntity(EntityId),
    #[error("unknown formation {0}")]
    UnknownFormation(FormationId),
    #[error("no transition leaves formation {0}")]
    UnknownTransition(FormationId),
    #[error("unknown template {0}")]
    UnknownTemplate(String),
    #[error("template {template} has {slots} slots but the team has {entities} matching entities")]
    TemplateMismatch {
        template: String,
        slots: usize,
        entities: usize,
    },
    #[error("selection is empty")]
    EmptySelection,
    #[error("no waypoint of {entity} at {time}")]
    WaypointNotFound { entity: EntityId, time: TimelinePosition },
    #[error("angle must be finite")]
    NonFiniteAngle,
}

impl EditError {
    pub fn code(&self) -> &'static str {
        match self {
            EditError::PositionOccupied(_) => "POSITION_OCCUPIED",
            EditError::PositionOutOfBounds(_) => "POSITION_OUT_OF_BOUNDS",
            EditError::OrderViolation(_) => "ORDER_VIOLATION",
            EditError::WaypointConflict { .. } => "WAYPOINT_CONFLICT",
            EditError::TimeOutOfRange(_) => "TIME_OUT_OF_RANGE",
            EditError::OutOfBounds(_) => "OUT_OF_BOUNDS",
            EditError::NotPlaced(_) => "NOT_PLACED",
            EditError::UnknownEntity(_) => "UNKNOWN_ENTITY",
            EditError::UnknownFormation(_) => "UNKNOWN_FORMATION",
            EditError::UnknownTransition(_) => "UNKNOWN_TRANSITION",
            EditError::UnknownTemplate(_) => "UNKNOWN_TEMPLATE",
            EditError::TemplateMismatch { .. } => "TEMPLATE_MISMATCH",
            EditError::EmptySelection => "EMPTY_SELECTION",
            EditError::WaypointNotFound { .. } => "WAYPOINT_NOT_FOUND",
            EditError::NonFiniteAngle => "NON_FINITE_ANGLE",
        }
    }
}

pub type EditResult<T> = Result<T, EditError>;

/// Where the placements of a new formation come from.
#[derive(Debug, Clone, PartialEq)]
pub enum FormationSource {
    Blank,
    DuplicateOf(FormationId),
    /// Name of a built-in template.
    Template(String),
    Custom(Template),
}

impl Formation {
    /// Entities whose position lies inside or on the boundary of `rect`.
    pub fn select_brush(&self, rect: &Rect) -> BTreeSet<EntityId> {
        self.placements
            .iter()
            .filter(|(_, p)| rect.contains(p.position))
            .map(|(id, _)| id.clone())
            .collect()
    }
}

impl Choreography {
    fn formation_idx(&self, id: &FormationId) -> EditResult<usize> {
        self.formation_index(id)
            .ok_or_else(|| EditError::UnknownFormation(id.clone()))
    }

    fn next_formation_id(&self) -> FormationId {
        let mut n = self.formations.len() + 1;
        loop {
            let id = FormationId(format!("F{n}"));
            if self.formation(&id).is_none() {
                return id;
            }
            n += 1;
        }
    }

    /// Inserts a new formation at `position`, keeping timeline order.
    ///
    /// The transition that previously spanned the insertion point is replaced
    /// by two new transitions without waypoints.
    pub fn create_formation(
        &mut self,
        position: TimelinePosition,
        source: FormationSource,
    ) -> EditResult<FormationId> {
        if !self.timeline_contains(position) {
            return Err(EditError::PositionOutOfBounds(position));
        }
        if self
            .formations
            .iter()
            .any(|f| f.timeline_position == position)
        {
            return Err(EditError::PositionOccupied(position));
        }

        let id = self.next_formation_id();
        let mut formation = Formation::new(
            id.clone(),
            format!("Formation {}", self.formations.len() + 1),
            position,
        );
        match source {
            FormationSource::Blank => {}
            FormationSource::DuplicateOf(src) => {
                let original = &self.formations[self.formation_idx(&src)?];
                formation.name = format!("{} (copy)", original.name);
                formation.placements = original.placements.clone();
                formation.shapes = original.shapes.clone();
            }
            FormationSource::Template(name) => {
                let template =
                    builtin_template(&name).ok_or(EditError::UnknownTemplate(name))?;
                self.apply_template(&template, &mut formation)?;
            }
            FormationSource::Custom(template) => self.apply_template(&template, &mut formation)?,
        }

        let index = self
            .formations
            .iter()
            .take_while(|f| f.timeline_position < position)
            .count();
        self.formations.insert(index, formation);
        self.sync_transitions();
        self.revision += 1;
        Ok(id)
    }

    fn apply_template(&self, template: &Template, formation: &mut Formation) -> EditResult<()> {
        let members: Vec<&EntityId> = self
            .entities
            .iter()
            .filter(|e| e.kind == template.entity_kind)
            .map(|e| &e.id)
            .collect();
        let slots = template.slots(&self.floor);
        if slots.len() != members.len() {
            return Err(EditError::TemplateMismatch {
                template: template.name.clone(),
                slots: slots.len(),
                entities: members.len(),
            });
        }
        if let Some(bad) = slots.iter().find(|s| !self.floor.allows(s.position)) {
            return Err(EditError::OutOfBounds(bad.position));
        }
        formation.name = template.name.clone();
        formation.placements = members
            .into_iter()
            .zip(slots)
            .map(|(id, slot)| (id.clone(), template.placement(slot)))
            .collect();
        Ok(())
    }

    pub fn move_entity(
        &mut self,
        formation: &FormationId,
        entity: &EntityId,
        to: Point,
    ) -> EditResult<Placement> {
        let fi = self.formation_idx(formation)?;
        if !self.floor.allows(to) {
            return Err(EditError::OutOfBounds(to));
        }
        let placement = self.formations[fi]
            .placements
            .get_mut(entity)
            .ok_or_else(|| EditError::NotPlaced(entity.clone()))?;
        placement.position = to;
        let updated = placement.clone();
        self.revision += 1;
        Ok(updated)
    }

    /// Brush selection within a formation of this choreography.
    pub fn select_brush(
        &self,
        formation: &FormationId,
        rect: &Rect,
    ) -> EditResult<BTreeSet<EntityId>> {
        Ok(self.formations[self.formation_idx(formation)?].select_brush(rect))
    }

    /// Rotates the selected positions about their centroid and adds `angle`
    /// to body and head orientations. Positive angles turn clockwise, the
    /// same sense as orientations.
    pub fn rotate_selection(
        &mut self,
        formation: &FormationId,
        selection: &BTreeSet<EntityId>,
        angle: f64,
    ) -> EditResult<BTreeMap<EntityId, Placement>> {
        if !angle.is_finite() {
            return Err(EditError::NonFiniteAngle);
        }
        let fi = self.formation_idx(formation)?;
        let current = self.selected_placements(fi, selection)?;
        let positions: Vec<Point> = current.values().map(|p| p.position).collect();
        let pivot = centroid(&positions).ok_or(EditError::EmptySelection)?;

        let mut updated = current;
        for p in updated.values_mut() {
            p.position = p.position.rotated_about(pivot, angle);
            if !self.floor.allows(p.position) {
                return Err(EditError::OutOfBounds(p.position));
            }
            p.body_orientation = normalize_degrees(p.body_orientation + angle);
            p.head_orientation = normalize_degrees(p.head_orientation + angle);
        }
        self.commit_placements(fi, &updated);
        Ok(updated)
    }

    /// Overwrites the given orientation components for every selected entity.
    pub fn set_orientation(
        &mut self,
        formation: &FormationId,
        selection: &BTreeSet<EntityId>,
        body: Option<f64>,
        head: Option<f64>,
    ) -> EditResult<BTreeMap<EntityId, Placement>> {
        if body.is_some_and(|a| !a.is_finite()) || head.is_some_and(|a| !a.is_finite()) {
            return Err(EditError::NonFiniteAngle);
        }
        let fi = self.formation_idx(formation)?;
        let mut updated = self.selected_placements(fi, selection)?;
        for p in updated.values_mut() {
            if let Some(b) = body {
                p.body_orientation = normalize_degrees(b);
            }
            if let Some(h) = head {
                p.head_orientation = normalize_degrees(h);
            }
        }
        self.commit_placements(fi, &updated);
        Ok(updated)
    }

    fn selected_placements(
        &self,
        fi: usize,
        selection: &BTreeSet<EntityId>,
    ) -> EditResult<BTreeMap<EntityId, Placement>> {
        if selection.is_empty() {
            return Err(EditError::EmptySelection);
        }
        let formation = &self.formations[fi];
        selection
            .iter()
            .map(|id| {
                if self.entity(id).is_none() {
                    return Err(EditError::UnknownEntity(id.clone()));
                }
                formation
                    .placements
                    .get(id)
                    .map(|p| (id.clone(), p.clone()))
                    .ok_or_else(|| EditError::NotPlaced(id.clone()))
            })
            .collect()
    }

    fn commit_placements(&mut self, fi: usize, updated: &BTreeMap<EntityId, Placement>) {
        let placements = &mut self.formations[fi].placements;
        for (id, p) in updated {
            placements.insert(id.clone(), p.clone());
        }
        self.revision += 1;
    }

    /// Moves a formation along the timeline without passing its neighbours.
    pub fn reposition_on_timeline(
        &mut self,
        formation: &FormationId,
        position: TimelinePosition,
    ) -> EditResult<()> {
        let fi = self.formation_idx(formation)?;
        if !self.timeline_contains(position) {
            return Err(EditError::PositionOutOfBounds(position));
        }
        if self
            .formations
            .iter()
            .enumerate()
            .any(|(i, f)| i != fi && f.timeline_position == position)
        {
            return Err(EditError::PositionOccupied(position));
        }
        let after_prev = fi == 0 || self.formations[fi - 1].timeline_position < position;
        let before_next = self
            .formations
            .get(fi + 1)
            .is_none_or(|f| position < f.timeline_position);
        if !(after_prev && before_next) {
            return Err(EditError::OrderViolation(position));
        }

        let conflict = |t: &crate::model::Transition, incoming: bool| {
            t.waypoints.iter().find_map(|(entity, list)| {
                list.iter()
                    .find(|w| if incoming { w.time >= position } else { w.time <= position })
                    .map(|w| EditError::WaypointConflict {
                        entity: entity.clone(),
                        time: w.time,
                    })
            })
        };
        if fi > 0 {
            if let Some(err) = conflict(&self.transitions[fi - 1], true) {
                return Err(err);
            }
        }
        if let Some(t) = self.transitions.get(fi) {
            if let Some(err) = conflict(t, false) {
                return Err(err);
            }
        }

        self.formations[fi].timeline_position = position;
        self.revision += 1;
        Ok(())
    }

    fn transition_idx(&self, from: &FormationId) -> EditResult<usize> {
        self.transition_index(from)
            .ok_or_else(|| EditError::UnknownTransition(from.clone()))
    }

    /// Adds a waypoint to the transition leaving `from`, or moves the
    /// existing waypoint at the same time.
    pub fn set_waypoint(
        &mut self,
        from: &FormationId,
        entity: &EntityId,
        time: TimelinePosition,
        position: Point,
    ) -> EditResult<()> {
        let ti = self.transition_idx(from)?;
        if self.entity(entity).is_none() {
            return Err(EditError::UnknownEntity(entity.clone()));
        }
        let (a, b) = (&self.formations[ti], &self.formations[ti + 1]);
        if !(a.placements.contains_key(entity) && b.placements.contains_key(entity)) {
            return Err(EditError::NotPlaced(entity.clone()));
        }
        if !(self.timeline_contains(time)
            && a.timeline_position < time
            && time < b.timeline_position)
        {
            return Err(EditError::TimeOutOfRange(time));
        }
        if !self.floor.allows(position) {
            return Err(EditError::OutOfBounds(position));
        }

        let list = self.transitions[ti]
            .waypoints
            .entry(entity.clone())
            .or_default();
        match list.binary_search_by(|w| w.time.cmp(&time)) {
            Ok(i) => list[i].position = position,
            Err(i) => list.insert(i, Waypoint { time, position }),
        }
        self.revision += 1;
        Ok(())
    }

    pub fn remove_waypoint(
        &mut self,
        from: &FormationId,
        entity: &EntityId,
        time: TimelinePosition,
    ) -> EditResult<Waypoint> {
        let ti = self.transition_idx(from)?;
        let not_found = || EditError::WaypointNotFound {
            entity: entity.clone(),
            time,
        };
        let waypoints = &mut self.transitions[ti].waypoints;
        let list = waypoints.get_mut(entity).ok_or_else(not_found)?;
        let i = list.iter().position(|w| w.time == time).ok_or_else(not_found)?;
        let removed = list.remove(i);
        if list.is_empty() {
            waypoints.remove(entity);
        }
        self.revision += 1;
        Ok(removed)
    }
}
