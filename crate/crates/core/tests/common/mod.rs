//! Seeded generators of valid choreographies shared by the integration and
//! acceptance tests.

#![allow(dead_code)]

use std::collections::BTreeMap;

use formation_core::model::{
    Dance, Entity, EntityKind, FloorSpec, Formation, Placement, PointDefinition, Pose, PoseId,
    Role, Shape, Waypoint, SKELETON_JOINTS,
};
use formation_core::{Choreography, EntityId, Point, TimelinePosition};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A point on the floor proper (margin excluded).
pub fn point_on_floor(rng: &mut TestRng, floor: &FloorSpec) -> Point {
    Point::new(
        rng.random_range(-floor.width / 2.0..=floor.width / 2.0),
        rng.random_range(-floor.depth / 2.0..=floor.depth / 2.0),
    )
}

/// Every timeline position of the choreography in order.
pub fn all_positions(c: &Choreography) -> Vec<TimelinePosition> {
    let mut out = Vec::new();
    for (d, dance) in c.dances.iter().enumerate() {
        for bar in 0..dance.bar_count {
            for beat in 0..dance.beats_per_bar {
                out.push(TimelinePosition::new(d as u32, bar, beat));
            }
        }
    }
    out
}

/// `n` dancers `D01`, `D02`, ... alternating lady and gentleman.
pub fn dancers(n: usize) -> Vec<Entity> {
    (0..n)
        .map(|i| {
            let role = if i % 2 == 0 { Role::Lady } else { Role::Gentleman };
            let label = match role {
                Role::Lady => format!("Lady {}", i / 2 + 1),
                _ => format!("Gentleman {}", i / 2 + 1),
            };
            Entity::dancer(format!("D{:02}", i + 1), role, label)
        })
        .collect()
}

fn sorted_sample(rng: &mut TestRng, len: usize, amount: usize) -> Vec<usize> {
    let mut picked = sample(rng, len, amount.min(len)).into_vec();
    picked.sort_unstable();
    picked
}

fn random_placement(rng: &mut TestRng, c: &Choreography, entity: &Entity) -> Placement {
    let mut p = Placement::at(point_on_floor(rng, &c.floor));
    p.body_orientation = rng.random_range(0.0..360.0);
    p.head_orientation = if rng.random_bool(0.5) {
        p.body_orientation
    } else {
        rng.random_range(0.0..360.0)
    };
    if entity.kind == EntityKind::Couple {
        p.point_definition = match rng.random_range(0..4) {
            0 => PointDefinition::CoupleCenter,
            1 => PointDefinition::BodyCenter,
            2 => PointDefinition::LeftFoot,
            _ => PointDefinition::RightFoot,
        };
        if p.point_definition != PointDefinition::CoupleCenter {
            p.point_dancer = Some(entity.member_ids[rng.random_range(0..2)].clone());
        }
    } else if rng.random_bool(0.3) {
        p.point_definition = if rng.random_bool(0.5) {
            PointDefinition::LeftFoot
        } else {
            PointDefinition::RightFoot
        };
    }
    if !c.poses.is_empty() && rng.random_bool(0.3) {
        p.pose_id = Some(c.poses[rng.random_range(0..c.poses.len())].id.clone());
    }
    p
}

/// Random waypoints for every entity placed on both ends of each transition.
pub fn add_waypoints(rng: &mut TestRng, c: &mut Choreography, max_per_entity: usize) {
    let positions = all_positions(c);
    for i in 0..c.transitions.len() {
        let (from, to) = (&c.formations[i], &c.formations[i + 1]);
        let lo = positions.binary_search(&from.timeline_position).unwrap();
        let hi = positions.binary_search(&to.timeline_position).unwrap();
        let inner = &positions[lo + 1..hi];
        let shared: Vec<EntityId> = from
            .placements
            .keys()
            .filter(|e| to.placements.contains_key(*e))
            .cloned()
            .collect();
        let mut waypoints = BTreeMap::new();
        for entity in shared {
            let n = rng.random_range(0..=max_per_entity);
            let list: Vec<Waypoint> = sorted_sample(rng, inner.len(), n)
                .into_iter()
                .map(|k| Waypoint {
                    time: inner[k],
                    position: point_on_floor(rng, &c.floor),
                })
                .collect();
            if !list.is_empty() {
                waypoints.insert(entity, list);
            }
        }
        c.transitions[i].waypoints = waypoints;
    }
}

/// A random choreography that passes validation, exercising every optional
/// field of the document format.
pub fn random_choreography(rng: &mut TestRng) -> Choreography {
    let floor = FloorSpec::new(
        rng.random_range(6.0..24.0),
        rng.random_range(6.0..24.0),
        rng.random_range(0.0..3.0),
    );
    let dances = (0..rng.random_range(1..=3))
        .map(|d| {
            let mut dance = Dance::new(format!("Dance {d}"), rng.random_range(1..=24));
            dance.beats_per_bar = rng.random_range(1..=8);
            dance
        })
        .collect();
    let mut c = Choreography::new(format!("Show {}", rng.random::<u16>()), floor, dances);

    let team = rng.random_range(1..=16);
    c.entities = dancers(team);
    for k in 0..rng.random_range(0..=team / 2) {
        let (lady, gent) = (c.entities[2 * k].id.clone(), c.entities[2 * k + 1].id.clone());
        c.entities.push(Entity::couple(format!("C{:02}", k + 1), format!("Couple {}", k + 1), lady, gent));
    }
    for k in 0..rng.random_range(0..=2) {
        let mut joint_rotations = BTreeMap::new();
        for _ in 0..rng.random_range(0..4) {
            let joint = SKELETON_JOINTS[rng.random_range(0..SKELETON_JOINTS.len())];
            let angles = [
                rng.random_range(-180.0..180.0),
                rng.random_range(-180.0..180.0),
                rng.random_range(-180.0..180.0),
            ];
            joint_rotations.insert(joint.to_string(), angles);
        }
        c.poses.push(Pose {
            id: PoseId::new(format!("pose{k}")),
            joint_rotations,
        });
    }

    let positions = all_positions(&c);
    let count = rng.random_range(1..=8);
    let mut video_time = rng.random_range(-5.0..5.0);
    let mut formations = Vec::new();
    for (n, k) in sorted_sample(rng, positions.len(), count).into_iter().enumerate() {
        let mut f = Formation::new(format!("F{}", n + 1), format!("Formation {}", n + 1), positions[k]);
        for entity in &c.entities {
            if rng.random_bool(0.8) {
                let placement = random_placement(rng, &c, entity);
                f.placements.insert(entity.id.clone(), placement);
            }
        }
        if rng.random_bool(0.5) {
            video_time += rng.random_range(0.5..20.0);
            f.video_time = Some(video_time);
        }
        let placed: Vec<EntityId> = f.placements.keys().cloned().collect();
        if placed.len() >= 2 && rng.random_bool(0.3) {
            let size = rng.random_range(2..=placed.len());
            let ids = sorted_sample(rng, placed.len(), size)
                .into_iter()
                .map(|i| placed[i].clone())
                .collect();
            f.shapes.push(Shape {
                entity_ids: ids,
                label: "shape".into(),
            });
        }
        formations.push(f);
    }
    c.formations = formations;
    c.sync_transitions();
    add_waypoints(rng, &mut c, 3);
    c.revision = rng.random_range(0..1_000_000);
    c
}

/// Two formations of `team` dancers on a default floor, with up to
/// `max_waypoints` waypoints per dancer.
pub fn random_transition(rng: &mut TestRng, team: usize, max_waypoints: usize) -> Choreography {
    let mut c = Choreography::new("Transition", FloorSpec::default(), vec![Dance::new("Waltz", 16)]);
    c.entities = dancers(team);
    let end = rng.random_range(2..16);
    let mut f1 = Formation::new("F1", "From", TimelinePosition::new(0, 0, 0));
    let mut f2 = Formation::new("F2", "To", TimelinePosition::new(0, end, 0));
    for e in &c.entities {
        f1.placements.insert(e.id.clone(), Placement::at(point_on_floor(rng, &c.floor)));
        f2.placements.insert(e.id.clone(), Placement::at(point_on_floor(rng, &c.floor)));
    }
    c.formations = vec![f1, f2];
    c.sync_transitions();
    add_waypoints(rng, &mut c, max_waypoints);
    c
}

/// Sixteen dancers placed in each of 57 formations spread over three dances.
pub fn fifty_seven_formations(rng: &mut TestRng) -> Choreography {
    let mut c = Choreography::new(
        "Formation team final",
        FloorSpec::default(),
        vec![Dance::new("Waltz", 20), Dance::new("Tango", 20), Dance::new("Quickstep", 20)],
    );
    c.entities = dancers(16);
    for n in 0..57u32 {
        let pos = TimelinePosition::new(n / 19, n % 19, rng.random_range(0..8));
        let mut f = Formation::new(format!("F{}", n + 1), format!("Formation {}", n + 1), pos);
        for e in &c.entities {
            let mut p = Placement::at(point_on_floor(rng, &c.floor));
            p.body_orientation = rng.random_range(0.0..360.0);
            p.head_orientation = p.body_orientation;
            f.placements.insert(e.id.clone(), p);
        }
        c.formations.push(f);
    }
    c.sync_transitions();
    add_waypoints(rng, &mut c, 2);
    c
}

/// Convex hull by checking every ordered pair as a candidate edge: `(i, j)`
/// is a counter-clockwise hull edge when every other point lies strictly to
/// its left or strictly inside the segment.
pub fn brute_force_hull(points: &[Point]) -> Vec<Point> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 2 {
        return pts;
    }
    let is_edge = |i: usize, j: usize| {
        let d = pts[j] - pts[i];
        pts.iter().enumerate().all(|(k, &q)| {
            if k == i || k == j {
                return true;
            }
            let v = q - pts[i];
            let side = d.cross(v);
            side > 0.0 || (side == 0.0 && v.dot(d) > 0.0 && v.dot(d) < d.dot(d))
        })
    };
    let mut next = vec![None; pts.len()];
    for i in 0..pts.len() {
        for j in 0..pts.len() {
            if i != j && is_edge(i, j) {
                next[i] = Some(j);
            }
        }
    }
    let mut hull = vec![pts[0]];
    let mut at = next[0].expect("lowest point is on the hull");
    while at != 0 {
        hull.push(pts[at]);
        at = next[at].expect("hull edges form a cycle");
    }
    hull
}

/// Minimum distance between two timed paths by sampling their common time
/// span every `step` beats (endpoints included).
pub fn sampled_min_distance(
    a: &formation_core::analysis::TimedPolyline,
    b: &formation_core::analysis::TimedPolyline,
    step: f64,
) -> f64 {
    use formation_core::analysis::position_at;
    let t0 = a.start_time().max(b.start_time());
    let t1 = a.end_time().min(b.end_time());
    let n = ((t1 - t0) / step).ceil().max(0.0) as usize;
    (0..=n)
        .map(|k| (t0 + k as f64 * step).min(t1))
        .map(|t| position_at(a, t).distance(position_at(b, t)))
        .fold(f64::INFINITY, f64::min)
}

/// Floor-to-pixel homography of a pinhole camera standing in the audience
/// and looking at the floor centre from a random vantage point.
pub fn random_camera(rng: &mut TestRng) -> nalgebra::Matrix3<f64> {
    use nalgebra::{Matrix3, Vector3};
    let eye = Vector3::new(
        rng.random_range(-6.0..6.0),
        rng.random_range(12.0..25.0),
        rng.random_range(3.0..12.0),
    );
    let target = Vector3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), 0.0);
    let forward = (target - eye).normalize();
    let right = forward.cross(&Vector3::z()).normalize();
    let down = forward.cross(&right);
    let r = Matrix3::from_rows(&[right.transpose(), down.transpose(), forward.transpose()]);
    let focal = rng.random_range(800.0..1600.0);
    let k = Matrix3::new(focal, 0.0, 960.0, 0.0, focal, 540.0, 0.0, 0.0, 1.0);
    let t = -(r * eye);
    k * Matrix3::from_columns(&[r.column(0).into_owned(), r.column(1).into_owned(), t])
}

pub fn apply(h: &nalgebra::Matrix3<f64>, p: Point) -> Point {
    let v = h * nalgebra::Vector3::new(p.x, p.y, 1.0);
    Point::new(v.x / v.z, v.y / v.z)
}

/// `n` floor points, the first four jittered around the floor corners.
pub fn calibration_points(rng: &mut TestRng, floor: &FloorSpec, n: usize) -> Vec<Point> {
    let (hx, hy) = (floor.width / 2.0, floor.depth / 2.0);
    let corners = [(-hx, -hy), (hx, -hy), (hx, hy), (-hx, hy)];
    (0..n)
        .map(|i| match corners.get(i) {
            Some(&(x, y)) => Point::new(
                x * rng.random_range(0.6..1.0),
                y * rng.random_range(0.6..1.0),
            ),
            None => point_on_floor(rng, floor),
        })
        .collect()
}

pub const BOX_WIDTH: f64 = 40.0;
pub const BOX_HEIGHT: f64 = 120.0;

/// Bounding box whose bottom-centre anchor is `pixel`.
pub fn box_at_anchor(pixel: Point) -> formation_core::assessment::BoundingBox {
    formation_core::assessment::BoundingBox::new(
        pixel.x - BOX_WIDTH / 2.0,
        pixel.y - BOX_HEIGHT,
        BOX_WIDTH,
        BOX_HEIGHT,
    )
    .unwrap()
}

/// Formations of eight dancers, timestamped 4 s apart, with waypoints.
pub fn timed_show(rng: &mut TestRng, formations: usize) -> Choreography {
    timed_show_with(rng, formations, 8)
}

/// Formations four bars apart and timestamped 4 s apart, with waypoints.
pub fn timed_show_with(rng: &mut TestRng, formations: usize, team: usize) -> Choreography {
    let mut c = Choreography::new("Synthetic", FloorSpec::default(), vec![Dance::new("Samba", 64)]);
    c.entities = dancers(team);
    for n in 0..formations {
        let pos = TimelinePosition::new(0, (n * 4) as u32, 0);
        let mut f = Formation::new(format!("F{}", n + 1), format!("Formation {}", n + 1), pos);
        for e in &c.entities {
            f.placements.insert(e.id.clone(), Placement::at(point_on_floor(rng, &c.floor)));
        }
        f.video_time = Some(1.0 + 4.0 * n as f64);
        c.formations.push(f);
    }
    c.sync_transitions();
    add_waypoints(rng, &mut c, 2);
    c
}

/// Every pointer into `doc` that names an existing value, objects and
/// arrays included.
pub fn pointers(doc: &Value, at: String, out: &mut Vec<String>) {
    match doc {
        Value::Object(map) => {
            for (k, v) in map {
                pointers(v, format!("{at}/{}", k.replace('~', "~0").replace('/', "~1")), out);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                pointers(v, format!("{at}/{i}"), out);
            }
        }
        _ => {}
    }
    out.push(at);
}

/// A location resolves when it names a value, or when it names a missing
/// member of an object that does exist.
pub fn resolves(doc: &Value, location: &str) -> bool {
    if doc.pointer(location).is_some() {
        return true;
    }
    match location.rsplit_once('/') {
        Some((parent, _)) => doc.pointer(parent).is_some_and(Value::is_object),
        None => false,
    }
}

pub fn mutate(rng: &mut TestRng, doc: &mut Value) {
    let mut all = Vec::new();
    pointers(doc, String::new(), &mut all);
    all.retain(|p| !p.is_empty() && p != "/schema_version");
    let target = all[rng.random_range(0..all.len())].clone();
    let (parent, key) = target.rsplit_once('/').unwrap();
    let replacement = match rng.random_range(0..6) {
        0 => None,
        1 => Some(Value::from("x")),
        2 => Some(Value::from(-1)),
        3 => Some(Value::from(1e6)),
        4 => Some(Value::Null),
        _ => Some(Value::from(true)),
    };
    match (doc.pointer_mut(parent).unwrap(), replacement) {
        (Value::Object(map), None) => {
            map.remove(&key.replace("~1", "/").replace("~0", "~"));
        }
        (Value::Array(items), None) => {
            items.remove(key.parse::<usize>().unwrap());
        }
        (_, Some(v)) => *doc.pointer_mut(&target).unwrap() = v,
        _ => unreachable!(),
    }
}
