//! 8-connected A* over the inflated costmap.
//!
//! Edge weight is move length (1 or sqrt 2, in cell units) times the mean of
//! the two endpoint cell costs. The heuristic is Euclidean cell distance
//! times the neutral cost — the minimum possible cell cost — scaled down by
//! one part in 1e12 so that float rounding can never push it above the true
//! remaining cost; with lazy reopening this makes the returned path cost
//! exactly the minimum over all float path sums, which is what an
//! independent Dijkstra computes as well.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::math;
use crate::nav::costmap::{Costmap, HeapEntry};
use crate::world::Pose2D;

#[derive(Clone, Copy, Debug, Error, PartialEq, Eq)]
pub enum PlanError {
    #[error("goal unreachable from start")]
    NoPath,
    #[error("start pose lies in a lethal cell or outside the map")]
    InvalidStart,
    #[error("goal pose lies in a lethal cell or outside the map")]
    InvalidGoal,
}

const SQRT_2: f64 = core::f64::consts::SQRT_2;
const HEURISTIC_SLACK: f64 = 1.0 - 1e-12;

/// Plan a path of cell-center waypoints from `start` to `goal`.
pub fn plan_global(costmap: &Costmap, start: &Pose2D, goal: &Pose2D) -> Result<Vec<Pose2D>, PlanError> {
    let (sx, sy) = costmap
        .world_to_cell(start.x, start.y)
        .ok_or(PlanError::InvalidStart)?;
    let (gx, gy) = costmap
        .world_to_cell(goal.x, goal.y)
        .ok_or(PlanError::InvalidGoal)?;
    if costmap.is_lethal(sx, sy) {
        return Err(PlanError::InvalidStart);
    }
    if costmap.is_lethal(gx, gy) {
        return Err(PlanError::InvalidGoal);
    }

    let width = costmap.width();
    let height = costmap.height();
    let start_idx = sy * width + sx;
    let goal_idx = gy * width + gx;
    if start_idx == goal_idx {
        let c = costmap.cell_center(sx, sy);
        return Ok(vec![Pose2D::new(c.0, c.1, start.theta)]);
    }

    let h = |idx: usize| -> f64 {
        let ix = (idx % width) as f64;
        let iy = (idx / width) as f64;
        math::hypot(ix - gx as f64, iy - gy as f64) * costmap.neutral_cost() * HEURISTIC_SLACK
    };

    let n = width * height;
    let mut g = vec![f64::INFINITY; n];
    let mut parent = vec![usize::MAX; n];
    let mut heap = BinaryHeap::new();
    g[start_idx] = 0.0;
    heap.push(HeapEntry {
        cost: h(start_idx),
        idx: start_idx,
    });

    while let Some(HeapEntry { cost, idx }) = heap.pop() {
        if idx == goal_idx {
            return Ok(reconstruct(costmap, &parent, start_idx, goal_idx, goal));
        }
        // Lazy deletion: stale entries carry an f above the current best.
        if cost > g[idx] + h(idx) {
            continue;
        }
        let ix = (idx % width) as i64;
        let iy = (idx / width) as i64;
        let here = costmap.cell_cost(idx % width, idx / width);
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
                let (nxu, nyu) = (nx as usize, ny as usize);
                if costmap.is_lethal(nxu, nyu) {
                    continue;
                }
                let ni = nyu * width + nxu;
                let len = if dx != 0 && dy != 0 { SQRT_2 } else { 1.0 };
                let w = len * (here + costmap.cell_cost(nxu, nyu)) / 2.0;
                let cand = g[idx] + w;
                if cand < g[ni] {
                    g[ni] = cand;
                    parent[ni] = idx;
                    heap.push(HeapEntry {
                        cost: cand + h(ni),
                        idx: ni,
                    });
                }
            }
        }
    }
    Err(PlanError::NoPath)
}

/// Sum of edge weights along a returned path, using the same weight formula
/// as the search. Useful for comparing planners.
pub fn path_cost(costmap: &Costmap, path: &[Pose2D]) -> f64 {
    let mut total = 0.0;
    for pair in path.windows(2) {
        let a = costmap
            .world_to_cell(pair[0].x, pair[0].y)
            .expect("waypoint on map");
        let b = costmap
            .world_to_cell(pair[1].x, pair[1].y)
            .expect("waypoint on map");
        let dx = (b.0 as i64 - a.0 as i64).abs();
        let dy = (b.1 as i64 - a.1 as i64).abs();
        debug_assert!(dx <= 1 && dy <= 1);
        let len = if dx == 1 && dy == 1 { SQRT_2 } else { 1.0 };
        total += len * (costmap.cell_cost(a.0, a.1) + costmap.cell_cost(b.0, b.1)) / 2.0;
    }
    total
}

fn reconstruct(
    costmap: &Costmap,
    parent: &[usize],
    start_idx: usize,
    goal_idx: usize,
    goal: &Pose2D,
) -> Vec<Pose2D> {
    let width = costmap.width();
    let mut cells = vec![goal_idx];
    let mut cur = goal_idx;
    while cur != start_idx {
        cur = parent[cur];
        cells.push(cur);
    }
    cells.reverse();

    let mut path: Vec<Pose2D> = Vec::with_capacity(cells.len());
    for (i, &idx) in cells.iter().enumerate() {
        let c = costmap.cell_center(idx % width, idx / width);
        let theta = if i + 1 < cells.len() {
            let nxt = costmap.cell_center(cells[i + 1] % width, cells[i + 1] / width);
            math::atan2(nxt.1 - c.1, nxt.0 - c.0)
        } else if let Some(prev) = path.last() {
            prev.theta
        } else {
            goal.theta
        };
        path.push(Pose2D::new(c.0, c.1, theta));
    }
    path
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Rect;
    use crate::nav::costmap::PlannerParams;
    use crate::nav::grid::OccupancyGrid;

    fn open_costmap(cells: usize) -> Costmap {
        let grid = OccupancyGrid::with_cells(cells, cells, 0.05, (0.0, 0.0));
        Costmap::build(&grid, &PlannerParams::default())
    }

    #[test]
    fn start_equals_goal_yields_single_point() {
        let cm = open_costmap(20);
        let p = Pose2D::new(0.33, 0.33, 0.7);
        let path = plan_global(&cm, &p, &p).unwrap();
        assert_eq!(path.len(), 1);
        assert_eq!(path[0].position(), cm.cell_center(6, 6));
    }

    #[test]
    fn empty_grid_corner_to_corner_is_diagonal() {
        let cm = open_costmap(20);
        let start = Pose2D::new(0.025, 0.025, 0.0);
        let goal = Pose2D::new(0.975, 0.975, 0.0);
        let path = plan_global(&cm, &start, &goal).unwrap();
        assert_eq!(path.len(), 20);
        let cost = path_cost(&cm, &path);
        let expected = 19.0 * SQRT_2 * 50.0;
        assert!((cost - expected).abs() < 1e-9, "cost {cost}");
    }

    #[test]
    fn enclosed_goal_is_no_path() {
        // A solid ring of occupied cells around the goal region.
        let grid = OccupancyGrid::rasterize(
            (2.0, 2.0),
            &[
                Rect::new(1.2, 1.2, 1.8, 1.25),
                Rect::new(1.2, 1.75, 1.8, 1.8),
                Rect::new(1.2, 1.2, 1.25, 1.8),
                Rect::new(1.75, 1.2, 1.8, 1.8),
            ],
            0.05,
        );
        let cm = Costmap::build(&grid, &PlannerParams::default());
        let start = Pose2D::new(0.5, 0.5, 0.0);
        let goal = Pose2D::new(1.5, 1.5, 0.0);
        assert_eq!(plan_global(&cm, &start, &goal), Err(PlanError::NoPath));
    }

    #[test]
    fn lethal_endpoints_are_rejected() {
        let grid = OccupancyGrid::rasterize((2.0, 2.0), &[Rect::new(0.9, 0.9, 1.1, 1.1)], 0.05);
        let cm = Costmap::build(&grid, &PlannerParams::default());
        let free = Pose2D::new(0.5, 0.5, 0.0);
        let inside = Pose2D::new(1.0, 1.0, 0.0);
        let outside = Pose2D::new(-1.0, 0.5, 0.0);
        assert_eq!(plan_global(&cm, &inside, &free), Err(PlanError::InvalidStart));
        assert_eq!(plan_global(&cm, &free, &inside), Err(PlanError::InvalidGoal));
        assert_eq!(plan_global(&cm, &outside, &free), Err(PlanError::InvalidStart));
    }

    #[test]
    fn waypoints_avoid_lethal_cells_and_connect() {
        let grid = OccupancyGrid::rasterize((3.0, 2.0), &[Rect::new(1.3, 0.0, 1.6, 1.5)], 0.05);
        let cm = Costmap::build(&grid, &PlannerParams::default());
        let start = Pose2D::new(0.5, 0.8, 0.0);
        let goal = Pose2D::new(2.5, 0.8, 0.0);
        let path = plan_global(&cm, &start, &goal).unwrap();
        for pair in path.windows(2) {
            let a = cm.world_to_cell(pair[0].x, pair[0].y).unwrap();
            let b = cm.world_to_cell(pair[1].x, pair[1].y).unwrap();
            assert!(!cm.is_lethal(a.0, a.1));
            assert!(!cm.is_lethal(b.0, b.1));
            assert!((a.0 as i64 - b.0 as i64).abs() <= 1);
            assert!((a.1 as i64 - b.1 as i64).abs() <= 1);
        }
        // The detour must route around the barrier's open end.
        assert!(path.iter().any(|p| p.y > 1.5));
    }
}
