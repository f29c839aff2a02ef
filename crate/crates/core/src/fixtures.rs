//! Small hand-built choreographies shared by unit tests.

use crate::geometry::Point;
use crate::model::{Choreography, Dance, Entity, FloorSpec, Formation, Placement, Role, TimelinePosition};

pub fn place(f: &mut Formation, id: &str, x: f64, y: f64) {
    f.placements.insert(id.into(), Placement::at(Point::new(x, y)));
}

/// Three dancers, F1 at bar 0 and F2 at bar 4 of a 16-bar dance.
///
/// A moves (0,0) -> (3,4), B moves (2,0) -> (2,2), C moves (-3,-3) -> (-3,3).
pub fn two_formations() -> Choreography {
    let mut c = Choreography::new("Fixture", FloorSpec::default(), vec![Dance::new("Tango", 16)]);
    c.entities = vec![
        Entity::dancer("A", Role::Lady, "Lady 1"),
        Entity::dancer("B", Role::Gentleman, "Gentleman 1"),
        Entity::dancer("C", Role::None, "Solo"),
    ];
    let mut f1 = Formation::new("F1", "Opening", TimelinePosition::new(0, 0, 0));
    place(&mut f1, "A", 0.0, 0.0);
    place(&mut f1, "B", 2.0, 0.0);
    place(&mut f1, "C", -3.0, -3.0);
    let mut f2 = Formation::new("F2", "Second", TimelinePosition::new(0, 4, 0));
    place(&mut f2, "A", 3.0, 4.0);
    place(&mut f2, "B", 2.0, 2.0);
    place(&mut f2, "C", -3.0, 3.0);
    c.formations = vec![f1, f2];
    c.sync_transitions();
    c
}
