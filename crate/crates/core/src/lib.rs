//! Formation planning and performance assessment for group dance.
//!
//! The crate is organized around a [`model::Choreography`] value:
//!
//! * [`edit`] and [`validate`](mod@validate) keep it well-formed,
//! * [`analysis`] derives transition paths, distances, collisions, hulls
//!   and heatmaps in musical (beat) time,
//! * [`assessment`] projects video bounding-box tracks onto the floor and
//!   measures deviations from the plan,
//! * [`persistence`] reads and writes the versioned JSON documents and
//!   exports assessment reports.

pub mod analysis;
pub mod assessment;
pub mod edit;
pub mod geometry;
pub mod model;
pub mod persistence;
pub mod templates;
pub mod validate;

#[cfg(test)]
mod fixtures;

pub use geometry::{Point, Rect};
pub use model::{Choreography, EntityId, FormationId, TimelinePosition, SCHEMA_VERSION};
pub use validate::{validate, Violation, ViolationCode};
