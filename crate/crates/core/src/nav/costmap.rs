//! Inflated costmap derived from the occupancy grid.
//!
//! Cells at or above the occupancy threshold are lethal. Every other cell
//! carries an inflation cost in `[0, 252]` that decays linearly with the
//! distance to the nearest lethal cell, reaching zero at the inflation
//! radius; traversal cost is `neutral_cost + cost_factor * inflation`.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::math;
use crate::nav::grid::OccupancyGrid;

pub const INFLATION_MAX: f64 = 252.0;

/// Distance field horizon, m. Values up to the horizon are exact; beyond it
/// they are only lower-bounded. Must cover the local planner's clearance cap
/// plus the footprint radius, or the clearance score sees a false cliff.
pub const CLEARANCE_HORIZON: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlannerParams {
    pub cost_factor: f64,
    pub neutral_cost: f64,
    pub inflation_radius: f64,
    pub occupied_threshold: f64,
}

impl Default for PlannerParams {
    fn default() -> Self {
        Self {
            cost_factor: 0.8,
            neutral_cost: 50.0,
            inflation_radius: 0.35,
            occupied_threshold: 0.65,
        }
    }
}

/// Min-heap entry ordered by cost, ties broken by cell index so expansion
/// order is deterministic.
#[derive(Clone, Copy, Debug)]
pub(crate) struct HeapEntry {
    pub cost: f64,
    pub idx: usize,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cost.total_cmp(&other.cost).is_eq() && self.idx == other.idx
    }
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        // Reversed: BinaryHeap is a max-heap, we want the cheapest first.
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.idx.cmp(&self.idx))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug)]
pub struct Costmap {
    width: usize,
    height: usize,
    resolution: f64,
    origin: (f64, f64),
    lethal: Vec<bool>,
    /// Meters from each cell center to the nearest lethal cell (chamfer
    /// metric over 8-neighbors); infinity when the map holds no lethal cell.
    dist: Vec<f64>,
    cost: Vec<f64>,
    neutral: f64,
}

impl Costmap {
    pub fn build(grid: &OccupancyGrid, params: &PlannerParams) -> Self {
        let width = grid.width();
        let height = grid.height();
        let res = grid.resolution();
        let n = width * height;

        let mut lethal = vec![false; n];
        let mut dist = vec![f64::INFINITY; n];
        let mut heap = BinaryHeap::new();
        for iy in 0..height {
            for ix in 0..width {
                if grid.occupied(ix, iy, params.occupied_threshold) {
                    let i = iy * width + ix;
                    lethal[i] = true;
                    dist[i] = 0.0;
                    heap.push(HeapEntry { cost: 0.0, idx: i });
                }
            }
        }

        // Multi-source Dijkstra over 8-neighbors for the distance field.
        let horizon = params.inflation_radius.max(CLEARANCE_HORIZON);
        let diag = res * math::sqrt(2.0);
        while let Some(HeapEntry { cost, idx }) = heap.pop() {
            if cost > dist[idx] {
                continue;
            }
            if cost > horizon {
                continue; // beyond both decay region and clearance horizon
            }
            let ix = (idx % width) as i64;
            let iy = (idx / width) as i64;
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    if dx == 0 && dy == 0 {
                        continue;
                    }
                    let nx = ix + dx;
                    let ny = iy + dy;
                    if nx < 0 || ny < 0 || nx >= width as i64 || ny >= height as i64 {
                        continue;
                    }
                    let ni = ny as usize * width + nx as usize;
                    let step = if dx != 0 && dy != 0 { diag } else { res };
                    let cand = cost + step;
                    if cand < dist[ni] {
                        dist[ni] = cand;
                        heap.push(HeapEntry { cost: cand, idx: ni });
                    }
                }
            }
        }

        let mut cost = vec![0.0; n];
        for i in 0..n {
            let inflation = if lethal[i] {
                INFLATION_MAX
            } else if dist[i] <= params.inflation_radius {
                math::round(INFLATION_MAX * (1.0 - dist[i] / params.inflation_radius))
            } else {
                0.0
            };
            cost[i] = params.neutral_cost + params.cost_factor * inflation;
        }

        Self {
            width,
            height,
            resolution: res,
            origin: grid.origin(),
            lethal,
            dist,
            cost,
            neutral: params.neutral_cost,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn neutral_cost(&self) -> f64 {
        self.neutral
    }

    pub fn is_lethal(&self, ix: usize, iy: usize) -> bool {
        self.lethal[iy * self.width + ix]
    }

    /// Traversal cost of a cell; lethal cells still carry a value but must
    /// not be entered.
    pub fn cell_cost(&self, ix: usize, iy: usize) -> f64 {
        self.cost[iy * self.width + ix]
    }

    /// Distance in meters to the nearest lethal cell center. Beyond
    /// [`CLEARANCE_HORIZON`] the field is cut off and reads as infinity.
    pub fn clearance(&self, ix: usize, iy: usize) -> f64 {
        self.dist[iy * self.width + ix]
    }

    pub fn world_to_cell(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        let ix = math::floor((x - self.origin.0) / self.resolution);
        let iy = math::floor((y - self.origin.1) / self.resolution);
        if ix < 0.0 || iy < 0.0 || ix >= self.width as f64 || iy >= self.height as f64 {
            None
        } else {
            Some((ix as usize, iy as usize))
        }
    }

    pub fn cell_center(&self, ix: usize, iy: usize) -> (f64, f64) {
        (
            self.origin.0 + (ix as f64 + 0.5) * self.resolution,
            self.origin.1 + (iy as f64 + 0.5) * self.resolution,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Rect;

    fn grid_with_block() -> OccupancyGrid {
        // 2x2 m room at 0.1 m resolution with a lethal block in the middle.
        OccupancyGrid::rasterize((2.0, 2.0), &[Rect::new(0.9, 0.9, 1.1, 1.1)], 0.1)
    }

    #[test]
    fn lethal_cells_match_threshold() {
        let grid = grid_with_block();
        let cm = Costmap::build(&grid, &PlannerParams::default());
        assert!(cm.is_lethal(10, 10));
        assert!(cm.is_lethal(0, 0)); // wall ring
        assert!(!cm.is_lethal(5, 5));
    }

    #[test]
    fn inflation_decays_linearly_to_zero() {
        let grid = grid_with_block();
        let p = PlannerParams::default();
        let cm = Costmap::build(&grid, &p);
        // Cell (10, 12) sits one cell (0.1 m) above the lethal block.
        let near = cm.cell_cost(10, 12);
        let expected = p.neutral_cost + p.cost_factor * math::round(INFLATION_MAX * (1.0 - 0.1 / 0.35));
        assert_eq!(near, expected);
        // Far side of free space: beyond the radius, pure neutral cost.
        assert_eq!(cm.cell_cost(5, 5), p.neutral_cost);
        // Cost never below neutral.
        for iy in 0..cm.height() {
            for ix in 0..cm.width() {
                assert!(cm.cell_cost(ix, iy) >= p.neutral_cost);
            }
        }
    }

    #[test]
    fn clearance_is_zero_only_on_lethal() {
        let grid = grid_with_block();
        let cm = Costmap::build(&grid, &PlannerParams::default());
        assert_eq!(cm.clearance(10, 10), 0.0);
        assert!(cm.clearance(10, 12) > 0.0);
    }

    #[test]
    fn empty_grid_has_uniform_neutral_cost() {
        let grid = OccupancyGrid::new(1.0, 1.0, 0.1);
        let p = PlannerParams::default();
        let cm = Costmap::build(&grid, &p);
        for iy in 0..cm.height() {
            for ix in 0..cm.width() {
                assert_eq!(cm.cell_cost(ix, iy), p.neutral_cost);
                assert!(cm.clearance(ix, iy).is_infinite());
            }
        }
    }
}
