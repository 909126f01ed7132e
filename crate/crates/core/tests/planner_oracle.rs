//! A* optimality against an independent Dijkstra oracle on seeded random
//! grids. The oracle shares only the costmap (the input); the search is a
//! from-scratch reimplementation.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use screenbot_core::nav::astar::{path_cost, plan_global, PlanError};
use screenbot_core::nav::costmap::{Costmap, PlannerParams};
use screenbot_core::nav::grid::{OccupancyGrid, LOG_ODDS_CLAMP};
use screenbot_core::rng::SimRng;
use screenbot_core::world::Pose2D;

struct Entry {
    cost: f64,
    idx: usize,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cost == other.cost && self.idx == other.idx
    }
}
impl Eq for Entry {}
impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.idx.cmp(&self.idx))
    }
}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Plain Dijkstra over the 8-connected costmap graph; returns the minimal
/// path cost from start to goal, or None when unreachable.
fn dijkstra_cost(cm: &Costmap, start: (usize, usize), goal: (usize, usize)) -> Option<f64> {
    let w = cm.width();
    let h = cm.height();
    let start_idx = start.1 * w + start.0;
    let goal_idx = goal.1 * w + goal.0;
    let mut dist = vec![f64::INFINITY; w * h];
    let mut heap = BinaryHeap::new();
    dist[start_idx] = 0.0;
    heap.push(Entry {
        cost: 0.0,
        idx: start_idx,
    });
    while let Some(Entry { cost, idx }) = heap.pop() {
        if cost > dist[idx] {
            continue;
        }
        if idx == goal_idx {
            return Some(cost);
        }
        let ix = (idx % w) as i64;
        let iy = (idx / w) as i64;
        for dy in -1i64..=1 {
            for dx in -1i64..=1 {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let nx = ix + dx;
                let ny = iy + dy;
                if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                    continue;
                }
                let (nxu, nyu) = (nx as usize, ny as usize);
                if cm.is_lethal(nxu, nyu) {
                    continue;
                }
                let len = if dx != 0 && dy != 0 {
                    std::f64::consts::SQRT_2
                } else {
                    1.0
                };
                let weight = len
                    * (cm.cell_cost(idx % w, idx / w) + cm.cell_cost(nxu, nyu))
                    / 2.0;
                let cand = cost + weight;
                let ni = nyu * w + nxu;
                if cand < dist[ni] {
                    dist[ni] = cand;
                    heap.push(Entry {
                        cost: cand,
                        idx: ni,
                    });
                }
            }
        }
    }
    None
}

fn random_grid(seed: u64, size: usize, density: f64) -> (OccupancyGrid, SimRng) {
    let mut rng = SimRng::new(seed);
    let mut grid = OccupancyGrid::with_cells(size, size, 0.05, (0.0, 0.0));
    for iy in 0..size {
        for ix in 0..size {
            let occ = rng.next_f64() < density;
            grid.set_log_odds(ix, iy, if occ { LOG_ODDS_CLAMP } else { -LOG_ODDS_CLAMP });
        }
    }
    (grid, rng)
}

fn random_free_cell(rng: &mut SimRng, cm: &Costmap) -> (usize, usize) {
    loop {
        let ix = rng.index(cm.width());
        let iy = rng.index(cm.height());
        if !cm.is_lethal(ix, iy) {
            return (ix, iy);
        }
    }
}

#[test]
fn astar_matches_dijkstra_on_100_random_grids() {
    let params = PlannerParams::default();
    let mut planned = 0;
    let mut unreachable = 0;
    for seed in 1..=100u64 {
        let (grid, mut rng) = random_grid(seed, 30, 0.25);
        let cm = Costmap::build(&grid, &params);
        let start = random_free_cell(&mut rng, &cm);
        let goal = random_free_cell(&mut rng, &cm);
        let sp = cm.cell_center(start.0, start.1);
        let gp = cm.cell_center(goal.0, goal.1);
        let plan = plan_global(&cm, &Pose2D::new(sp.0, sp.1, 0.0), &Pose2D::new(gp.0, gp.1, 0.0));
        let oracle = dijkstra_cost(&cm, start, goal);
        match (plan, oracle) {
            (Ok(path), Some(best)) => {
                planned += 1;
                let cost = path_cost(&cm, &path);
                assert_eq!(
                    cost.to_bits(),
                    best.to_bits(),
                    "seed {seed}: A* cost {cost} != Dijkstra {best}"
                );
                for wp in &path {
                    let (ix, iy) = cm.world_to_cell(wp.x, wp.y).expect("waypoint on map");
                    assert!(!cm.is_lethal(ix, iy), "seed {seed}: waypoint in lethal cell");
                }
            }
            (Err(PlanError::NoPath), None) => {
                unreachable += 1;
            }
            (plan, oracle) => panic!(
                "seed {seed}: A* {:?} disagrees with oracle {:?}",
                plan.map(|p| p.len()),
                oracle
            ),
        }
    }
    // The sweep must actually exercise both outcomes.
    assert!(planned >= 50, "only {planned} solvable grids");
    assert!(unreachable >= 1, "no unreachable case seen");
}
