mod common;

use std::collections::BTreeSet;

use formation_core::analysis::{
    closest_approach, convex_hull, heatmap, path_length, position_at, TimedPolyline,
};
use formation_core::edit::FormationSource;
use formation_core::geometry::{polygon_area, Rect};
use formation_core::model::FloorSpec;
use formation_core::{EntityId, FormationId, Point, TimelinePosition};
use proptest::prelude::*;

fn coord() -> impl Strategy<Value = f64> {
    -8.0..8.0f64
}

fn point() -> impl Strategy<Value = Point> {
    (coord(), coord()).prop_map(|(x, y)| Point::new(x, y))
}

fn grid_point() -> impl Strategy<Value = Point> {
    (-4i32..=4, -4i32..=4).prop_map(|(x, y)| Point::new(x as f64, y as f64))
}

fn polyline() -> impl Strategy<Value = TimedPolyline> {
    (prop::collection::vec((0.01..3.0f64, point()), 2..8), -5.0..5.0f64).prop_map(|(steps, t0)| {
        let mut t = t0;
        let pairs: Vec<(f64, Point)> = steps
            .into_iter()
            .map(|(dt, p)| {
                t += dt;
                (t, p)
            })
            .collect();
        TimedPolyline::from_pairs(&pairs).unwrap()
    })
}

proptest! {
    #[test]
    fn rotation_round_trip(seed in any::<u64>(), angle in -720.0..720.0f64) {
        let mut rng = common::rng(seed);
        let mut c = common::random_choreography(&mut rng);
        c.floor = FloorSpec::new(c.floor.width, c.floor.depth, 100.0);
        let f = c.formations[0].id.clone();
        let all: BTreeSet<EntityId> = c.formations[0].placements.keys().cloned().collect();
        prop_assume!(!all.is_empty());
        let before = c.formations[0].placements.clone();
        c.rotate_selection(&f, &all, angle).unwrap();
        c.rotate_selection(&f, &all, -angle).unwrap();
        for (id, p) in &c.formations[0].placements {
            let q = &before[id];
            prop_assert!(p.position.distance(q.position) < 1e-9);
            let turn = (p.body_orientation - q.body_orientation).rem_euclid(360.0);
            prop_assert!(turn.min(360.0 - turn) < 1e-9);
        }
    }

    #[test]
    fn rotation_preserves_pairwise_distances(seed in any::<u64>(), angle in -360.0..360.0f64) {
        let mut rng = common::rng(seed);
        let mut c = common::random_choreography(&mut rng);
        c.floor = FloorSpec::new(c.floor.width, c.floor.depth, 100.0);
        let f = c.formations[0].id.clone();
        let all: BTreeSet<EntityId> = c.formations[0].placements.keys().cloned().collect();
        prop_assume!(!all.is_empty());
        let before = c.formations[0].placements.clone();
        let after = c.rotate_selection(&f, &all, angle).unwrap();
        for a in &all {
            for b in &all {
                let d0 = before[a].position.distance(before[b].position);
                let d1 = after[a].position.distance(after[b].position);
                prop_assert!((d0 - d1).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn duplicate_has_equal_placements(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let mut c = common::random_choreography(&mut rng);
        let used: BTreeSet<TimelinePosition> =
            c.formations.iter().map(|f| f.timeline_position).collect();
        let free = common::all_positions(&c).into_iter().find(|p| !used.contains(p));
        prop_assume!(free.is_some());
        let src = c.formations[0].id.clone();
        let id = c.create_formation(free.unwrap(), FormationSource::DuplicateOf(src.clone())).unwrap();
        prop_assert_eq!(&c.formation(&id).unwrap().placements, &c.formation(&src).unwrap().placements);
        prop_assert_eq!(formation_core::validate(&c), vec![]);
    }

    #[test]
    fn brush_equals_brute_force(seed in any::<u64>(), a in point(), b in point()) {
        let mut rng = common::rng(seed);
        let c = common::random_choreography(&mut rng);
        let f: FormationId = c.formations[0].id.clone();
        let rect = Rect::from_corners(a, b);
        let (lo_x, hi_x) = (a.x.min(b.x), a.x.max(b.x));
        let (lo_y, hi_y) = (a.y.min(b.y), a.y.max(b.y));
        let expected: BTreeSet<EntityId> = c.formations[0]
            .placements
            .iter()
            .filter(|(_, p)| (lo_x..=hi_x).contains(&p.position.x) && (lo_y..=hi_y).contains(&p.position.y))
            .map(|(id, _)| id.clone())
            .collect();
        prop_assert_eq!(c.select_brush(&f, &rect).unwrap(), expected);
    }

    #[test]
    fn hull_matches_brute_force(points in prop::collection::vec(point(), 2..20)) {
        let hull = convex_hull(&points).unwrap();
        prop_assert_eq!(&hull, &common::brute_force_hull(&points));
        if hull.len() >= 3 {
            prop_assert!(polygon_area(&hull) > 0.0);
            for i in 0..hull.len() {
                let (o, a, b) = (hull[i], hull[(i + 1) % hull.len()], hull[(i + 2) % hull.len()]);
                prop_assert!((a - o).cross(b - o) > 0.0);
            }
        }
    }

    #[test]
    fn hull_matches_brute_force_on_grid(points in prop::collection::vec(grid_point(), 2..20)) {
        prop_assert_eq!(convex_hull(&points).unwrap(), common::brute_force_hull(&points));
    }

    #[test]
    fn heatmap_conserves_placements(seed in any::<u64>(), cell in 0.1..3.0f64) {
        let mut rng = common::rng(seed);
        let c = common::random_choreography(&mut rng);
        let placed: usize = c.formations.iter().map(|f| f.placements.len()).sum();
        prop_assert_eq!(heatmap(&c, cell).unwrap().total(), placed as u64);
    }

    #[test]
    fn path_length_triangle_inequality(path in polyline()) {
        let v = path.vertices();
        let total = path_length(&path);
        prop_assert!(total + 1e-12 >= v[0].position.distance(v[v.len() - 1].position));
        let mut sum = 0.0;
        for w in v.windows(2) {
            sum += w[0].position.distance(w[1].position);
            prop_assert!(sum <= total + 1e-9);
        }
    }

    #[test]
    fn position_exact_at_vertices(path in polyline()) {
        for v in path.vertices() {
            prop_assert_eq!(position_at(&path, v.t), v.position);
        }
        prop_assert_eq!(position_at(&path, path.start_time() - 10.0), path.vertices()[0].position);
    }

    #[test]
    fn closest_approach_is_symmetric(a in polyline(), b in polyline()) {
        let ab = closest_approach(&a, &b);
        let ba = closest_approach(&b, &a);
        prop_assert!((ab.distance - ba.distance).abs() < 1e-12);
        prop_assert_eq!(ab.t, ba.t);
        prop_assert!(ab.distance <= common::sampled_min_distance(&a, &b, 1e-2) + 1e-12);
    }
}
