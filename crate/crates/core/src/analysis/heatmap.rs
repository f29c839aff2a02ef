use serde::{Deserialize, Serialize};

use crate::geometry::Point;
use crate::model::Choreography;

use super::{AnalysisError, AnalysisResult};

/// Counts of formation placements per floor cell.
///
/// The grid covers the floor extended by its margin. `counts[row][col]`
/// covers `[origin.x + col * cell, origin.x + (col + 1) * cell)` and the
/// matching half-open `y` interval; points on the upper edge of the grid
/// fall into the last cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatmapGrid {
    pub cell_size: f64,
    pub origin: Point,
    pub columns: usize,
    pub rows: usize,
    pub counts: Vec<Vec<u32>>,
}

impl HeatmapGrid {
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().map(|&c| u64::from(c)).sum()
    }

    pub fn cell_of(&self, p: Point) -> (usize, usize) {
        let index = |v: f64, origin: f64, n: usize| {
            let i = ((v - origin) / self.cell_size).floor();
            if i.is_nan() || i < 0.0 {
                0
            } else {
                (i as usize).min(n - 1)
            }
        };
        (
            index(p.y, self.origin.y, self.rows),
            index(p.x, self.origin.x, self.columns),
        )
    }
}

/// Floor utilization over all formations. Positions during transitions are
/// not counted.
pub fn heatmap(choreography: &Choreography, cell_size: f64) -> AnalysisResult<HeatmapGrid> {
    if !(cell_size.is_finite() && cell_size > 0.0) {
        return Err(AnalysisError::InvalidCellSize);
    }
    let floor = &choreography.floor;
    let extent_x = floor.width + 2.0 * floor.margin;
    let extent_y = floor.depth + 2.0 * floor.margin;
    let cells = |extent: f64| ((extent / cell_size).ceil() as usize).max(1);
    let (columns, rows) = (cells(extent_x), cells(extent_y));

    let mut grid = HeatmapGrid {
        cell_size,
        origin: Point::new(-extent_x / 2.0, -extent_y / 2.0),
        columns,
        rows,
        counts: vec![vec![0; columns]; rows],
    };
    for placement in choreography
        .formations
        .iter()
        .flat_map(|f| f.placements.values())
    {
        let (r, c) = grid.cell_of(placement.position);
        grid.counts[r][c] += 1;
    }
    Ok(grid)
}
