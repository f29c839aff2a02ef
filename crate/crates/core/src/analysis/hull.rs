use crate::geometry::Point;

use super::{AnalysisError, AnalysisResult};

/// Convex hull by Andrew's monotone chain.
///
/// Vertices come out counter-clockwise starting at the lowest-x (then
/// lowest-y) point. Points on hull edges are dropped, so collinear input
/// yields its two extremes and identical input a single point.
pub fn convex_hull(points: &[Point]) -> AnalysisResult<Vec<Point>> {
    if points.len() < 2 {
        return Err(AnalysisError::TooFewPoints(points.len()));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return Ok(pts);
    }

    let turn = |o: Point, a: Point, b: Point| (a - o).cross(b - o);
    let mut hull: Vec<Point> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    // last point repeats the first
    hull.pop();
    Ok(hull)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::polygon_area;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn square_with_centre() {
        let hull = convex_hull(&[p(0.0, 0.0), p(1.0, 1.0), p(0.5, 0.5), p(1.0, 0.0), p(0.0, 1.0)]).unwrap();
        assert_eq!(hull, vec![p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)]);
        assert_eq!(polygon_area(&hull), 1.0);
    }

    #[test]
    fn collinear_returns_extremes() {
        let hull = convex_hull(&[p(2.0, 2.0), p(0.0, 0.0), p(3.0, 3.0), p(1.0, 1.0)]).unwrap();
        assert_eq!(hull, vec![p(0.0, 0.0), p(3.0, 3.0)]);
    }

    #[test]
    fn edge_points_excluded() {
        let hull = convex_hull(&[p(0.0, 0.0), p(2.0, 0.0), p(1.0, 0.0), p(1.0, 2.0)]).unwrap();
        assert_eq!(hull.len(), 3);
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(convex_hull(&[p(0.0, 0.0)]), Err(AnalysisError::TooFewPoints(1)));
        assert_eq!(convex_hull(&[p(1.0, 1.0), p(1.0, 1.0)]).unwrap(), vec![p(1.0, 1.0)]);
    }
}
