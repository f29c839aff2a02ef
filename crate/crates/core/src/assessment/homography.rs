//! Video-to-floor homography from point correspondences.
//!
//! Normalized direct linear transform: both point sets are translated to
//! their centroid and scaled to a mean distance of √2, the stacked `2n × 9`
//! system is solved for its smallest singular direction, and the result is
//! denormalized and scaled so its largest-magnitude entry is 1.

use nalgebra::{DMatrix, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::geometry::Point;

use super::{AssessmentError, AssessmentResult};

/// Default bound on the RMS reprojection residual, in metres.
pub const DEFAULT_MAX_RESIDUAL: f64 = 0.25;

/// Smallest-to-largest singular value ratio below which a matrix counts as singular.
const MIN_SINGULAR_RATIO: f64 = 1e-12;
const MIN_W: f64 = 1e-12;
/// Twice the triangle area below which three normalized points count as
/// collinear.
const COLLINEAR_TOL: f64 = 1e-8;
/// Relative size of the second-smallest singular value below which the
/// solution is not unique.
const RANK_TOL: f64 = 1e-10;

/// A video pixel and the floor point (metres) it shows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correspondence {
    pub video: Point,
    pub floor: Point,
}

impl Correspondence {
    pub fn new(video: Point, floor: Point) -> Self {
        Self { video, floor }
    }
}

/// Parses a correspondence file: `[{"video": [u, v], "floor": [x, y]}, ...]`.
pub fn parse_correspondences(bytes: &[u8]) -> AssessmentResult<Vec<Correspondence>> {
    let list: Vec<Correspondence> = serde_json::from_slice(bytes)
        .map_err(|e| AssessmentError::MalformedDocument(e.to_string()))?;
    if list.iter().any(|c| !(c.video.is_finite() && c.floor.is_finite())) {
        return Err(AssessmentError::MalformedDocument(
            "correspondence coordinates must be finite".into(),
        ));
    }
    if list.len() < 4 {
        return Err(AssessmentError::TooFewPoints(list.len()));
    }
    Ok(list)
}

/// Projective map from video pixels to floor metres, scaled so the
/// largest-magnitude entry is exactly 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[[f64; 3]; 3]", into = "[[f64; 3]; 3]")]
pub struct Homography {
    matrix: Matrix3<f64>,
}

impl Homography {
    pub fn identity() -> Self {
        Self {
            matrix: Matrix3::identity(),
        }
    }

    /// Normalizes `m` and checks it is invertible.
    pub fn from_matrix(m: Matrix3<f64>) -> AssessmentResult<Self> {
        if !m.iter().all(|v| v.is_finite()) {
            return Err(AssessmentError::DegenerateConfiguration(
                "matrix has non-finite entries".into(),
            ));
        }
        let pivot = m
            .iter()
            .copied()
            .max_by(|a, b| a.abs().total_cmp(&b.abs()))
            .unwrap_or(0.0);
        if pivot == 0.0 {
            return Err(AssessmentError::DegenerateConfiguration("zero matrix".into()));
        }
        let matrix = m / pivot;
        let sv = matrix.singular_values();
        if !(sv.min() > MIN_SINGULAR_RATIO * sv.max()) {
            return Err(AssessmentError::DegenerateConfiguration(
                "homography is singular".into(),
            ));
        }
        Ok(Self { matrix })
    }

    pub fn from_rows(rows: [[f64; 3]; 3]) -> AssessmentResult<Self> {
        Self::from_matrix(Matrix3::from_fn(|r, c| rows[r][c]))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.matrix
    }

    pub fn rows(&self) -> [[f64; 3]; 3] {
        std::array::from_fn(|r| std::array::from_fn(|c| self.matrix[(r, c)]))
    }

    pub fn inverse(&self) -> AssessmentResult<Self> {
        let inv = self
            .matrix
            .try_inverse()
            .ok_or_else(|| AssessmentError::DegenerateConfiguration("not invertible".into()))?;
        Self::from_matrix(inv)
    }

    /// Homogeneous multiply, then divide by the third component.
    pub fn project(&self, p: Point) -> AssessmentResult<Point> {
        let v = self.matrix * Vector3::new(p.x, p.y, 1.0);
        if v.z.abs() < MIN_W {
            return Err(AssessmentError::PointAtInfinity);
        }
        Ok(Point::new(v.x / v.z, v.y / v.z))
    }
}

impl TryFrom<[[f64; 3]; 3]> for Homography {
    type Error = AssessmentError;
    fn try_from(rows: [[f64; 3]; 3]) -> AssessmentResult<Self> {
        Self::from_rows(rows)
    }
}

impl From<Homography> for [[f64; 3]; 3] {
    fn from(h: Homography) -> Self {
        h.rows()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomographyEstimate {
    pub homography: Homography,
    /// RMS reprojection error over the correspondences, metres.
    pub rms_residual: f64,
    pub max_residual: f64,
}

/// Similarity transform taking the points to centroid 0 and mean distance √2.
fn normalization(points: &[Point]) -> Option<(Matrix3<f64>, Vec<Point>)> {
    let n = points.len() as f64;
    let c = points.iter().fold(Point::ORIGIN, |acc, &p| acc + p) * (1.0 / n);
    let mean_dist = points.iter().map(|&p| p.distance(c)).sum::<f64>() / n;
    if !(mean_dist.is_finite() && mean_dist > 0.0) {
        return None;
    }
    let s = std::f64::consts::SQRT_2 / mean_dist;
    let t = Matrix3::new(s, 0.0, -s * c.x, 0.0, s, -s * c.y, 0.0, 0.0, 1.0);
    let normalized = points.iter().map(|&p| (p - c) * s).collect();
    Some((t, normalized))
}

fn collinear(a: Point, b: Point, c: Point) -> bool {
    (b - a).cross(c - a).abs() < COLLINEAR_TOL
}

fn general_position(pts: &[Point], idx: [usize; 4]) -> bool {
    let [a, b, c, d] = idx.map(|i| pts[i]);
    !(collinear(a, b, c) || collinear(a, b, d) || collinear(a, c, d) || collinear(b, c, d))
}

/// Whether some 4 correspondences have no collinear triple on either side.
fn has_general_quadruple(video: &[Point], floor: &[Point]) -> bool {
    let n = video.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if collinear(video[i], video[j], video[k]) || collinear(floor[i], floor[j], floor[k]) {
                    continue;
                }
                for l in k + 1..n {
                    let q = [i, j, k, l];
                    if general_position(video, q) && general_position(floor, q) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

pub fn estimate_homography(correspondences: &[Correspondence]) -> AssessmentResult<HomographyEstimate> {
    estimate_homography_with(correspondences, DEFAULT_MAX_RESIDUAL)
}

/// Estimates the video-to-floor homography, failing with `ILL_CONDITIONED`
/// when the RMS reprojection residual exceeds `max_residual` metres.
pub fn estimate_homography_with(
    correspondences: &[Correspondence],
    max_residual: f64,
) -> AssessmentResult<HomographyEstimate> {
    let n = correspondences.len();
    if n < 4 {
        return Err(AssessmentError::TooFewPoints(n));
    }
    let video: Vec<Point> = correspondences.iter().map(|c| c.video).collect();
    let floor: Vec<Point> = correspondences.iter().map(|c| c.floor).collect();
    if !video.iter().chain(&floor).all(|p| p.is_finite()) {
        return Err(AssessmentError::MalformedDocument(
            "correspondence coordinates must be finite".into(),
        ));
    }
    let degenerate = |why: &str| AssessmentError::DegenerateConfiguration(why.into());
    let (t_video, video_n) = normalization(&video).ok_or_else(|| degenerate("video points coincide"))?;
    let (t_floor, floor_n) = normalization(&floor).ok_or_else(|| degenerate("floor points coincide"))?;
    if !has_general_quadruple(&video_n, &floor_n) {
        return Err(degenerate(
            "no four correspondences without three collinear points",
        ));
    }

    // Rows for floor ~ H * video; padded to at least 9 rows so the SVD
    // yields a full right-singular basis.
    let rows = (2 * n).max(9);
    let mut a = DMatrix::<f64>::zeros(rows, 9);
    for (i, (v, f)) in video_n.iter().zip(&floor_n).enumerate() {
        let (u, w, x, y) = (v.x, v.y, f.x, f.y);
        let r = 2 * i;
        a.row_mut(r)
            .copy_from_slice(&[-u, -w, -1.0, 0.0, 0.0, 0.0, x * u, x * w, x]);
        a.row_mut(r + 1)
            .copy_from_slice(&[0.0, 0.0, 0.0, -u, -w, -1.0, y * u, y * w, y]);
    }
    let svd = a.svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| degenerate("singular value decomposition failed"))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    let largest = svd.singular_values[order[order.len() - 1]];
    if svd.singular_values[order[1]] <= RANK_TOL * largest {
        return Err(degenerate("correspondences do not determine a unique homography"));
    }
    let h = v_t.row(order[0]);
    let h_norm = Matrix3::from_fn(|r, c| h[3 * r + c]);

    let t_floor_inv = t_floor
        .try_inverse()
        .ok_or_else(|| degenerate("floor normalization is singular"))?;
    let homography = Homography::from_matrix(t_floor_inv * h_norm * t_video)?;

    let mut sum_sq = 0.0;
    let mut max_residual_seen: f64 = 0.0;
    for c in correspondences {
        let p = homography
            .project(c.video)
            .map_err(|_| degenerate("a correspondence maps to infinity"))?;
        let r = p.distance(c.floor);
        sum_sq += r * r;
        max_residual_seen = max_residual_seen.max(r);
    }
    let rms_residual = (sum_sq / n as f64).sqrt();
    if !(rms_residual <= max_residual) {
        return Err(AssessmentError::IllConditioned {
            residual: rms_residual,
            tolerance: max_residual,
        });
    }
    Ok(HomographyEstimate {
        homography,
        rms_residual,
        max_residual: max_residual_seen,
    })
}
