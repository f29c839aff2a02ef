//! Bounding-box track files.
//!
//! ```xml
//! <tracks video_fps="25" frame_offset="0">
//!   <track entity="Lady 6">
//!     <key frame="0" x="100" y="50" w="40" h="80"/>
//!   </track>
//! </tracks>
//! ```
//!
//! `entity` may be an entity id or its display label. Keyframe frames must
//! strictly increase within a track.

use std::collections::BTreeSet;
use std::fmt::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::geometry::Point;
use crate::model::{Choreography, EntityId};

use super::{AssessmentError, AssessmentResult, VideoMeta};

/// Pixel-space box, `(x, y)` is the top-left corner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl BoundingBox {
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> AssessmentResult<Self> {
        let finite = [x, y, w, h].iter().all(|v| v.is_finite());
        if !finite || w <= 0.0 || h <= 0.0 {
            return Err(AssessmentError::InvalidBox);
        }
        Ok(Self { x, y, w, h })
    }
}

/// Bottom-centre of the box: where the dancer touches the floor.
pub fn bbox_anchor(b: &BoundingBox) -> Point {
    Point::new(b.x + b.w / 2.0, b.y + b.h)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Keyframe {
    pub frame: i64,
    pub bbox: BoundingBox,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Track {
    pub entity: EntityId,
    keyframes: Vec<Keyframe>,
}

impl Track {
    pub fn new(entity: EntityId, keyframes: Vec<Keyframe>) -> AssessmentResult<Self> {
        if keyframes.is_empty() {
            return Err(AssessmentError::MalformedDocument(format!(
                "track {entity} has no keyframes"
            )));
        }
        if keyframes.windows(2).any(|w| w[0].frame >= w[1].frame) {
            return Err(AssessmentError::NonMonotoneFrames(entity.to_string()));
        }
        Ok(Self { entity, keyframes })
    }

    pub fn keyframes(&self) -> &[Keyframe] {
        &self.keyframes
    }

    pub fn first_frame(&self) -> i64 {
        self.keyframes[0].frame
    }

    pub fn last_frame(&self) -> i64 {
        self.keyframes[self.keyframes.len() - 1].frame
    }

    pub fn covers(&self, frame: i64) -> bool {
        (self.first_frame()..=self.last_frame()).contains(&frame)
    }

    /// Box at `frame`, linearly interpolated between the bracketing keyframes
    /// and clamped outside the annotated range.
    pub fn box_at(&self, frame: i64) -> BoundingBox {
        let keys = &self.keyframes;
        if frame <= keys[0].frame {
            return keys[0].bbox;
        }
        if frame >= keys[keys.len() - 1].frame {
            return keys[keys.len() - 1].bbox;
        }
        let i = keys.partition_point(|k| k.frame <= frame);
        let (a, b) = (&keys[i - 1], &keys[i]);
        if a.frame == frame {
            return a.bbox;
        }
        let f = (frame - a.frame) as f64 / (b.frame - a.frame) as f64;
        let mix = |p: f64, q: f64| (1.0 - f) * p + f * q;
        BoundingBox {
            x: mix(a.bbox.x, b.bbox.x),
            y: mix(a.bbox.y, b.bbox.y),
            w: mix(a.bbox.w, b.bbox.w),
            h: mix(a.bbox.h, b.bbox.h),
        }
    }

    /// Anchor point of the interpolated box at `frame`.
    pub fn position(&self, frame: i64) -> Point {
        bbox_anchor(&self.box_at(frame))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackDocument {
    pub meta: VideoMeta,
    pub tracks: Vec<Track>,
}

fn malformed(msg: impl Into<String>) -> AssessmentError {
    AssessmentError::MalformedDocument(msg.into())
}

fn attr<T: FromStr>(node: roxmltree::Node<'_, '_>, name: &str) -> AssessmentResult<T> {
    let raw = node.attribute(name).ok_or_else(|| {
        malformed(format!(
            "<{}> is missing attribute {name:?}",
            node.tag_name().name()
        ))
    })?;
    raw.trim().parse().map_err(|_| {
        malformed(format!(
            "attribute {name:?} of <{}> has invalid value {raw:?}",
            node.tag_name().name()
        ))
    })
}

fn element_children<'a, 'i>(
    node: roxmltree::Node<'a, 'i>,
    expected: &'static str,
) -> AssessmentResult<Vec<roxmltree::Node<'a, 'i>>> {
    let mut out = Vec::new();
    for child in node.children() {
        if child.is_element() {
            if child.tag_name().name() != expected {
                return Err(malformed(format!(
                    "unexpected element <{}> inside <{}>",
                    child.tag_name().name(),
                    node.tag_name().name()
                )));
            }
            out.push(child);
        } else if child.is_text() && !child.text().unwrap_or("").trim().is_empty() {
            return Err(malformed("unexpected text content"));
        }
    }
    Ok(out)
}

/// Parses a track file, resolving `entity` attributes against the
/// choreography.
pub fn parse_tracks(document: &str, choreography: &Choreography) -> AssessmentResult<TrackDocument> {
    let doc = roxmltree::Document::parse(document).map_err(|e| malformed(e.to_string()))?;
    let root = doc.root_element();
    if root.tag_name().name() != "tracks" {
        return Err(malformed(format!(
            "root element must be <tracks>, found <{}>",
            root.tag_name().name()
        )));
    }
    let fps: f64 = attr(root, "video_fps")?;
    let frame_offset: f64 = attr(root, "frame_offset")?;
    let meta = VideoMeta::new(fps, frame_offset)?;

    let mut seen = BTreeSet::new();
    let mut tracks = Vec::new();
    for track in element_children(root, "track")? {
        let label: String = attr(track, "entity")?;
        let entity = choreography
            .resolve_entity(&label)
            .cloned()
            .ok_or(AssessmentError::UnknownEntity(label))?;
        if !seen.insert(entity.clone()) {
            return Err(malformed(format!("entity {entity} has more than one track")));
        }
        let keyframes = element_children(track, "key")?
            .into_iter()
            .map(|key| {
                Ok(Keyframe {
                    frame: attr(key, "frame")?,
                    bbox: BoundingBox::new(attr(key, "x")?, attr(key, "y")?, attr(key, "w")?, attr(key, "h")?)
                        .map_err(|_| malformed(format!("invalid box in track {entity}")))?,
                })
            })
            .collect::<AssessmentResult<Vec<_>>>()?;
        tracks.push(Track::new(entity, keyframes)?);
    }
    Ok(TrackDocument { meta, tracks })
}

fn escape_attr(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Writes a track file. Numbers use the shortest representation that
/// parses back to the same value.
pub fn write_tracks(doc: &TrackDocument) -> String {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<tracks video_fps=\"{}\" frame_offset=\"{}\">",
        doc.meta.fps, doc.meta.frame_offset
    );
    for track in &doc.tracks {
        let _ = writeln!(out, "  <track entity=\"{}\">", escape_attr(track.entity.as_str()));
        for k in track.keyframes() {
            let b = &k.bbox;
            let _ = writeln!(
                out,
                "    <key frame=\"{}\" x=\"{}\" y=\"{}\" w=\"{}\" h=\"{}\"/>",
                k.frame, b.x, b.y, b.w, b.h
            );
        }
        out.push_str("  </track>\n");
    }
    out.push_str("</tracks>\n");
    out
}
