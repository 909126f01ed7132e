//! Log-odds occupancy grid with known-pose scan integration.

use alloc::vec;
use alloc::vec::Vec;

use crate::geom::Rect;
use crate::math;
use crate::world::{LidarScan, Pose2D};

/// Evidence added to the cell a beam ends in.
pub const LOG_ODDS_HIT: f64 = 0.85;
/// Evidence added to every cell a beam passes through.
pub const LOG_ODDS_MISS: f64 = -0.4;
/// Symmetric clamp bound on accumulated cell evidence.
pub const LOG_ODDS_CLAMP: f64 = 3.5;

/// World belief over a fixed rectangular area. Unobserved cells stay at
/// exactly 0.0 log-odds (probability 0.5).
#[derive(Clone, Debug, PartialEq)]
pub struct OccupancyGrid {
    resolution: f64,
    width: usize,
    height: usize,
    origin: (f64, f64),
    log_odds: Vec<f64>,
    observed: Vec<bool>,
}

impl OccupancyGrid {
    /// Grid covering `[0, width_m] x [0, height_m]` with origin at (0, 0).
    pub fn new(width_m: f64, height_m: f64, resolution: f64) -> Self {
        debug_assert!(resolution > 0.0);
        let width = math::ceil(width_m / resolution) as usize;
        let height = math::ceil(height_m / resolution) as usize;
        Self::with_cells(width.max(1), height.max(1), resolution, (0.0, 0.0))
    }

    pub fn with_cells(width: usize, height: usize, resolution: f64, origin: (f64, f64)) -> Self {
        Self {
            resolution,
            width,
            height,
            origin,
            log_odds: vec![0.0; width * height],
            observed: vec![false; width * height],
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

    pub fn origin(&self) -> (f64, f64) {
        self.origin
    }

    #[inline]
    fn index(&self, ix: usize, iy: usize) -> usize {
        debug_assert!(ix < self.width && iy < self.height);
        iy * self.width + ix
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

    pub fn log_odds_at(&self, ix: usize, iy: usize) -> f64 {
        self.log_odds[self.index(ix, iy)]
    }

    pub fn probability(&self, ix: usize, iy: usize) -> f64 {
        1.0 / (1.0 + math::exp(-self.log_odds_at(ix, iy)))
    }

    /// Occupied test at a probability threshold, evaluated in log-odds.
    pub fn occupied(&self, ix: usize, iy: usize, p_threshold: f64) -> bool {
        self.log_odds_at(ix, iy) >= math::ln(p_threshold / (1.0 - p_threshold))
    }

    pub fn is_observed(&self, ix: usize, iy: usize) -> bool {
        self.observed[self.index(ix, iy)]
    }

    pub fn observed_count(&self) -> usize {
        self.observed.iter().filter(|&&o| o).count()
    }

    fn add_evidence(&mut self, ix: usize, iy: usize, delta: f64) {
        let i = self.index(ix, iy);
        self.log_odds[i] = math::clamp(self.log_odds[i] + delta, -LOG_ODDS_CLAMP, LOG_ODDS_CLAMP);
        self.observed[i] = true;
    }

    /// Overwrite a cell's evidence directly (clamped); marks it observed.
    pub fn set_log_odds(&mut self, ix: usize, iy: usize, value: f64) {
        let i = self.index(ix, iy);
        self.log_odds[i] = math::clamp(value, -LOG_ODDS_CLAMP, LOG_ODDS_CLAMP);
        self.observed[i] = true;
    }

    /// Integrate one scan taken from a known pose: every finite beam marks
    /// the traversed cells free and its endpoint cell occupied; no-return
    /// beams update nothing.
    pub fn apply_scan(&mut self, pose: &Pose2D, scan: &LidarScan) {
        let Some(start) = self.world_to_cell(pose.x, pose.y) else {
            return;
        };
        let start = (start.0 as i64, start.1 as i64);
        for (k, range) in scan.ranges.iter().enumerate() {
            let Some(r) = range else { continue };
            let ang = pose.theta + LidarScan::beam_angle(k);
            let ex = pose.x + r * math::cos(ang);
            let ey = pose.y + r * math::sin(ang);
            let end = (
                math::floor((ex - self.origin.0) / self.resolution) as i64,
                math::floor((ey - self.origin.1) / self.resolution) as i64,
            );
            for (cx, cy) in bresenham(start, end) {
                if self.cell_in_bounds(cx, cy) {
                    self.add_evidence(cx as usize, cy as usize, LOG_ODDS_MISS);
                }
            }
            if self.cell_in_bounds(end.0, end.1) {
                self.add_evidence(end.0 as usize, end.1 as usize, LOG_ODDS_HIT);
            }
        }
    }

    fn cell_in_bounds(&self, ix: i64, iy: i64) -> bool {
        ix >= 0 && iy >= 0 && (ix as usize) < self.width && (iy as usize) < self.height
    }

    /// Ground-truth grid for a scenario: cells whose closed extent touches
    /// an obstacle or the boundary walls saturate occupied, everything else
    /// saturates free. Used for one-shot planning and as the mapping oracle.
    pub fn rasterize(bounds: (f64, f64), obstacles: &[Rect], resolution: f64) -> Self {
        let mut grid = Self::new(bounds.0, bounds.1, resolution);
        for iy in 0..grid.height {
            for ix in 0..grid.width {
                let x0 = ix as f64 * resolution;
                let y0 = iy as f64 * resolution;
                let cell = Rect::new(x0, y0, x0 + resolution, y0 + resolution);
                let on_wall = ix == 0 || iy == 0 || ix == grid.width - 1 || iy == grid.height - 1;
                let hit = on_wall || obstacles.iter().any(|o| o.intersects(&cell));
                let i = iy * grid.width + ix;
                grid.log_odds[i] = if hit { LOG_ODDS_CLAMP } else { -LOG_ODDS_CLAMP };
                grid.observed[i] = true;
            }
        }
        grid
    }
}

/// Integer line traversal from `a` to `b`, yielding `a` but not `b`.
pub fn bresenham(a: (i64, i64), b: (i64, i64)) -> Vec<(i64, i64)> {
    let mut cells = Vec::new();
    let (mut x, mut y) = a;
    let dx = (b.0 - a.0).abs();
    let dy = -(b.1 - a.1).abs();
    let sx = if a.0 < b.0 { 1 } else { -1 };
    let sy = if a.1 < b.1 { 1 } else { -1 };
    let mut err = dx + dy;
    loop {
        if (x, y) == b {
            break;
        }
        cells.push((x, y));
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
    cells
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::World;
    use proptest::prelude::*;

    #[test]
    fn empty_scan_changes_nothing() {
        let mut g = OccupancyGrid::new(5.0, 5.0, 0.05);
        let before = g.clone();
        g.apply_scan(
            &Pose2D::new(2.5, 2.5, 0.0),
            &LidarScan {
                ranges: vec![None; crate::world::LIDAR_BEAMS],
            },
        );
        assert_eq!(g, before);
    }

    #[test]
    fn single_beam_hand_walk() {
        // Robot cell (10, 10), endpoint one meter ahead in cell (30, 10).
        let mut g = OccupancyGrid::new(5.0, 5.0, 0.05);
        let mut ranges = vec![None; crate::world::LIDAR_BEAMS];
        ranges[0] = Some(1.0);
        g.apply_scan(&Pose2D::new(0.525, 0.525, 0.0), &LidarScan { ranges });

        assert_eq!(g.log_odds_at(30, 10), LOG_ODDS_HIT);
        for ix in 10..30 {
            assert_eq!(g.log_odds_at(ix, 10), LOG_ODDS_MISS, "cell {ix}");
        }
        assert_eq!(g.log_odds_at(31, 10), 0.0);
        assert!(!g.is_observed(31, 10));
    }

    #[test]
    fn repeated_hits_clamp() {
        let mut g = OccupancyGrid::new(5.0, 5.0, 0.05);
        let mut ranges = vec![None; crate::world::LIDAR_BEAMS];
        ranges[0] = Some(1.0);
        let scan = LidarScan { ranges };
        let pose = Pose2D::new(0.525, 0.525, 0.0);
        for _ in 0..10 {
            g.apply_scan(&pose, &scan);
        }
        assert_eq!(g.log_odds_at(30, 10), LOG_ODDS_CLAMP);
        assert_eq!(g.log_odds_at(15, 10), -LOG_ODDS_CLAMP);
    }

    #[test]
    fn unobserved_cells_stay_at_prior() {
        let g = OccupancyGrid::new(2.0, 2.0, 0.1);
        for iy in 0..g.height() {
            for ix in 0..g.width() {
                assert_eq!(g.log_odds_at(ix, iy), 0.0);
                assert!((g.probability(ix, iy) - 0.5).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn rasterized_room_marks_walls_and_obstacles() {
        let obstacles = [Rect::new(1.0, 1.0, 1.5, 1.5)];
        let g = OccupancyGrid::rasterize((3.0, 3.0), &obstacles, 0.1);
        assert!(g.occupied(0, 0, 0.65));
        assert!(g.occupied(g.width() - 1, 5, 0.65));
        assert!(g.occupied(12, 12, 0.65));
        assert!(!g.occupied(5, 5, 0.65));
    }

    #[test]
    fn room_sweep_agrees_with_ground_truth() {
        // Noise-free scans from a lawnmower sweep must reproduce the room.
        let mut world = World::new(6.0, 4.0, 9);
        world.obstacles.push(Rect::new(2.0, 1.0, 2.6, 1.8));
        world.obstacles.push(Rect::new(4.0, 2.4, 4.8, 3.2));
        let truth = OccupancyGrid::rasterize(world.bounds, &world.obstacles, 0.05);
        let mut grid = OccupancyGrid::new(6.0, 4.0, 0.05);

        let mut x = 0.6;
        while x < 5.5 {
            let mut y = 0.6;
            while y < 3.5 {
                if !world.colliding((x, y)) {
                    for theta in [0.0, 1.0, 2.0] {
                        world.robot.pose = Pose2D::new(x, y, theta);
                        let scan = world.simulate_lidar();
                        grid.apply_scan(&world.robot.pose, &scan);
                    }
                }
                y += 0.5;
            }
            x += 0.5;
        }

        let mut observed = 0usize;
        let mut agree = 0usize;
        for iy in 0..grid.height() {
            for ix in 0..grid.width() {
                if grid.is_observed(ix, iy) {
                    observed += 1;
                    if grid.occupied(ix, iy, 0.65) == truth.occupied(ix, iy, 0.65) {
                        agree += 1;
                    }
                }
            }
        }
        assert!(observed > 1000, "sweep observed only {observed} cells");
        let ratio = agree as f64 / observed as f64;
        assert!(ratio >= 0.95, "agreement {ratio:.4}");
    }

    #[test]
    fn bresenham_excludes_endpoint() {
        let cells = bresenham((0, 0), (3, 0));
        assert_eq!(cells, vec![(0, 0), (1, 0), (2, 0)]);
        let cells = bresenham((2, 2), (2, 2));
        assert!(cells.is_empty());
    }

    proptest! {
        #[test]
        fn log_odds_always_clamped(
            seed in 0u64..1000,
            n_scans in 1usize..5,
        ) {
            let mut world = World::new(4.0, 4.0, seed);
            world.noise.sigma_lidar = 0.05;
            world.robot.pose = Pose2D::new(2.0, 2.0, 0.0);
            let mut grid = OccupancyGrid::new(4.0, 4.0, 0.1);
            for _ in 0..n_scans {
                let scan = world.simulate_lidar();
                grid.apply_scan(&world.robot.pose, &scan);
            }
            for iy in 0..grid.height() {
                for ix in 0..grid.width() {
                    let l = grid.log_odds_at(ix, iy);
                    prop_assert!((-LOG_ODDS_CLAMP..=LOG_ODDS_CLAMP).contains(&l));
                }
            }
        }

        #[test]
        fn bresenham_is_connected(ax in -20i64..20, ay in -20i64..20, bx in -20i64..20, by in -20i64..20) {
            let cells = bresenham((ax, ay), (bx, by));
            let mut prev = None;
            for c in &cells {
                if let Some((px, py)) = prev {
                    let dx: i64 = c.0 - px;
                    let dy: i64 = c.1 - py;
                    prop_assert!(dx.abs() <= 1 && dy.abs() <= 1);
                }
                prev = Some(*c);
            }
            if let Some(first) = cells.first() {
                prop_assert_eq!(*first, (ax, ay));
            }
        }
    }
}
