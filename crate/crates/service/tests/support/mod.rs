//! Fixtures for the service tests: choreographies on disk and synthetic
//! video annotations generated from the plan through a known camera.

#![allow(dead_code)]

#[path = "../../../core/tests/common/mod.rs"]
pub mod common;

use std::path::{Path, PathBuf};

use formation_core::assessment::{frame_to_time, write_tracks, Baseline, Keyframe, Track, TrackDocument, VideoMeta};
use formation_core::model::{Dance, Entity, FloorSpec, Formation, Placement, Role};
use formation_core::persistence::save;
use formation_core::{Choreography, Point, TimelinePosition};
use rand_distr::{Distribution, Normal};
use serde_json::{json, Value};

pub fn write(dir: &Path, name: &str, bytes: &[u8]) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, bytes).unwrap();
    path
}

/// A and B swap places through the floor centre; C stays far away.
pub fn crossing() -> Choreography {
    let mut c = Choreography::new("Crossing", FloorSpec::default(), vec![Dance::new("Tango", 8)]);
    c.entities = vec![
        Entity::dancer("A", Role::Lady, "Lady 1"),
        Entity::dancer("B", Role::Gentleman, "Gentleman 1"),
        Entity::dancer("C", Role::Lady, "Lady 2"),
    ];
    let mut f1 = Formation::new("F1", "Start", TimelinePosition::new(0, 0, 0));
    let mut f2 = Formation::new("F2", "Swap", TimelinePosition::new(0, 4, 0));
    for (f, sign) in [(&mut f1, 1.0), (&mut f2, -1.0)] {
        f.placements.insert("A".into(), Placement::at(Point::new(-2.0 * sign, 0.0)));
        f.placements.insert("B".into(), Placement::at(Point::new(2.0 * sign, 0.0)));
        f.placements.insert("C".into(), Placement::at(Point::new(0.0, -6.0)));
    }
    c.formations = vec![f1, f2];
    c.sync_transitions();
    c
}

pub struct Synthetic {
    pub choreography: Choreography,
    pub camera: nalgebra::Matrix3<f64>,
    pub meta: VideoMeta,
    pub tracks_xml: String,
    pub correspondences: Value,
}

/// Tracks for frames `0..=last_frame` of every dancer in `c`, with
/// Gaussian floor noise `sigma`, seen through a random camera.
pub fn synthetic(seed: u64, c: Choreography, last_frame: i64, sigma: f64) -> Synthetic {
    let mut rng = common::rng(seed);
    let camera = common::random_camera(&mut rng);
    let meta = VideoMeta::new(25.0, 12.0).unwrap();
    let baseline = Baseline::new(&c).unwrap();
    let noise = Normal::new(0.0, sigma.max(f64::MIN_POSITIVE)).unwrap();
    let tracks = c
        .entities
        .iter()
        .map(|e| {
            let keys = (0..=last_frame)
                .map(|frame| {
                    let mut p = baseline.position(&e.id, frame_to_time(&meta, frame)).unwrap();
                    if sigma > 0.0 {
                        p = p + Point::new(noise.sample(&mut rng), noise.sample(&mut rng));
                    }
                    Keyframe {
                        frame,
                        bbox: common::box_at_anchor(common::apply(&camera, p)),
                    }
                })
                .collect();
            Track::new(e.id.clone(), keys).unwrap()
        })
        .collect();
    let tracks_xml = write_tracks(&TrackDocument { meta, tracks });
    let correspondences = Value::Array(
        common::calibration_points(&mut rng, &c.floor, 4)
            .into_iter()
            .map(|p| {
                let v = common::apply(&camera, p);
                json!({ "video": [v.x, v.y], "floor": [p.x, p.y] })
            })
            .collect(),
    );
    Synthetic {
        choreography: c,
        camera,
        meta,
        tracks_xml,
        correspondences,
    }
}

/// Saved bytes of a valid choreography.
pub fn saved(c: &Choreography) -> Vec<u8> {
    save(c).unwrap()
}
