//! Deterministic world model: differential-drive robot, scripted people,
//! obstacles and the three simulated sensors (lidar, detection camera,
//! thermal camera).
//!
//! RNG call order, per sensing pass, is fixed and must not be reordered:
//!
//! 1. `World::with_noise` draws the per-run thermal bias (one uniform).
//! 2. `simulate_lidar` draws one normal per returned beam when
//!    `sigma_lidar > 0`, in beam order.
//! 3. `simulate_detections` draws one uniform per frustum candidate, in
//!    stored people order, whether or not the candidate is dropped.
//! 4. `simulate_thermal_frame` draws background normals in row-major pixel
//!    order (when `sigma_thermal > 0`), then per visible person (stored
//!    order) one normal per covered pixel, then the spike uniforms.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::geom::{self, Rect};
use crate::math;
use crate::rng::SimRng;

/// Hardware speed limit of the mobile base, m/s.
pub const V_MAX: f64 = 0.274;

pub const LIDAR_BEAMS: usize = 720;
pub const LIDAR_MIN_RANGE: f64 = 0.12;
pub const LIDAR_MAX_RANGE: f64 = 10.0;

pub const IMAGE_W: f64 = 640.0;
pub const IMAGE_H: f64 = 480.0;

pub const THERMAL_W: usize = 160;
pub const THERMAL_H: usize = 120;

/// Planar pose; `theta` is kept normalized to `(-pi, pi]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pose2D {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Pose2D {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self {
            x,
            y,
            theta: math::normalize_angle(theta),
        }
    }

    pub fn position(&self) -> (f64, f64) {
        (self.x, self.y)
    }

    pub fn distance_to(&self, other: &Pose2D) -> f64 {
        math::hypot(other.x - self.x, other.y - self.y)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct VelocityCommand {
    pub v: f64,
    pub w: f64,
}

impl VelocityCommand {
    pub fn new(v: f64, w: f64) -> Self {
        Self { v, w }
    }

    pub fn zero() -> Self {
        Self { v: 0.0, w: 0.0 }
    }
}

/// Velocity/acceleration envelope of the base plus its footprint radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobotLimits {
    pub v_max: f64,
    pub w_max: f64,
    pub a_max: f64,
    pub alpha_max: f64,
    pub radius: f64,
}

impl Default for RobotLimits {
    fn default() -> Self {
        Self {
            v_max: V_MAX,
            w_max: 1.0,
            a_max: 0.25,
            alpha_max: 1.5,
            radius: 0.25,
        }
    }
}

/// Mobile base plus pan-tilt joint state.
///
/// `pan` is positive when the camera turns toward the robot's right
/// (clockwise in the world frame), `tilt` is positive upward. The two pitch
/// joints always carry `tilt_split[0] + tilt_split[1] == tilt` exactly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RobotState {
    pub pose: Pose2D,
    pub v: f64,
    pub w: f64,
    pub pan: f64,
    pub tilt: f64,
    pub tilt_split: [f64; 2],
}

impl RobotState {
    pub fn at(pose: Pose2D) -> Self {
        Self {
            pose,
            v: 0.0,
            w: 0.0,
            pan: 0.0,
            tilt: 0.0,
            tilt_split: [0.0, 0.0],
        }
    }

    /// World-frame heading of the camera's horizontal optical axis.
    pub fn camera_heading(&self) -> f64 {
        math::normalize_angle(self.pose.theta - self.pan)
    }
}

/// Scripted pedestrian. Position follows the waypoints by piecewise-linear
/// interpolation; the skin temperature recovers exponentially from the
/// cold-entry dip.
#[derive(Clone, Debug, PartialEq)]
pub struct Person {
    pub id: u32,
    /// `(time_s, x, y)` with strictly increasing times.
    pub waypoints: Vec<(f64, f64, f64)>,
    pub height: f64,
    pub core_temp: f64,
    pub entry_time: f64,
    pub cold_offset: f64,
    pub cold_tau: f64,
}

impl Person {
    pub fn standing(id: u32, x: f64, y: f64, core_temp: f64) -> Self {
        Self {
            id,
            waypoints: vec![(0.0, x, y)],
            height: 1.7,
            core_temp,
            entry_time: 0.0,
            cold_offset: 0.0,
            cold_tau: 60.0,
        }
    }

    pub fn position(&self, t: f64) -> (f64, f64) {
        let wps = &self.waypoints;
        debug_assert!(!wps.is_empty());
        if t <= wps[0].0 {
            return (wps[0].1, wps[0].2);
        }
        for pair in wps.windows(2) {
            let (t0, x0, y0) = pair[0];
            let (t1, x1, y1) = pair[1];
            if t <= t1 {
                let f = (t - t0) / (t1 - t0);
                return (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
            }
        }
        let last = wps[wps.len() - 1];
        (last.1, last.2)
    }

    /// Skin temperature at time `t`, never above `core_temp`.
    pub fn surface_temp(&self, t: f64) -> f64 {
        let dt = (t - self.entry_time).max(0.0);
        let s = self.core_temp - self.cold_offset * math::exp(-dt / self.cold_tau);
        s.min(self.core_temp)
    }
}

/// Pinhole detection camera riding the pan-tilt unit. Horizontal and
/// vertical axes project independently with their own focal lengths, both
/// spanning a 60 degree field of view.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CameraModel {
    pub focal_h: f64,
    pub focal_v: f64,
    pub half_hfov: f64,
    pub range: f64,
    pub height: f64,
    pub person_half_width: f64,
}

impl Default for CameraModel {
    fn default() -> Self {
        let t = math::tan(math::FRAC_PI_6);
        Self {
            focal_h: (IMAGE_W / 2.0) / t,
            focal_v: (IMAGE_H / 2.0) / t,
            half_hfov: math::FRAC_PI_6,
            range: 8.0,
            height: 0.85,
            person_half_width: 0.25,
        }
    }
}

/// Sensor noise configuration; all zero means fully noise-free sensing.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub sigma_lidar: f64,
    pub sigma_thermal: f64,
    pub p_spike: f64,
    pub bias_bound: f64,
    pub k_vib: f64,
}

/// One 360 degree sweep: 720 beams at 0.5 degree spacing, robot-frame.
/// `None` is a no-return: the hit was outside `[0.12, 10.0]` m.
#[derive(Clone, Debug, PartialEq)]
pub struct LidarScan {
    pub ranges: Vec<Option<f64>>,
}

impl LidarScan {
    /// Robot-frame angle of beam `i`.
    pub fn beam_angle(i: usize) -> f64 {
        i as f64 * (math::TAU / LIDAR_BEAMS as f64)
    }
}

/// Bounding box in 640x480 detection-image pixels, top-left origin.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BBox {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl BBox {
    pub fn center(&self) -> (f64, f64) {
        ((self.x_min + self.x_max) / 2.0, (self.y_min + self.y_max) / 2.0)
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Detection {
    pub person_id: u32,
    pub bbox: BBox,
}

/// 160x120 temperature raster, degrees Celsius, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ThermalFrame {
    pub temps: Vec<f64>,
}

impl ThermalFrame {
    pub fn constant(value: f64) -> Self {
        Self {
            temps: vec![value; THERMAL_W * THERMAL_H],
        }
    }

    pub fn at(&self, u: usize, v: usize) -> f64 {
        debug_assert!(u < THERMAL_W && v < THERMAL_H);
        self.temps[v * THERMAL_W + u]
    }

    pub fn set(&mut self, u: usize, v: usize, value: f64) {
        self.temps[v * THERMAL_W + u] = value;
    }
}

/// Complete simulation state. People are iterated in storage order wherever
/// the RNG is consumed; the scenario loader stores them sorted by id.
#[derive(Clone, Debug)]
pub struct World {
    pub bounds: (f64, f64),
    pub obstacles: Vec<Rect>,
    pub people: Vec<Person>,
    pub robot: RobotState,
    pub limits: RobotLimits,
    pub camera: CameraModel,
    pub noise: NoiseParams,
    pub ambient_temp: f64,
    /// Per-run absolute-accuracy bias of the thermal camera, drawn once.
    pub thermal_bias: f64,
    /// Lidar cross-section radius of a person, m.
    pub person_radius: f64,
    pub clock: f64,
    pub rng: SimRng,
}

impl World {
    /// Noise-free world with the robot parked at the center.
    pub fn new(width: f64, height: f64, seed: u64) -> Self {
        Self::with_noise(width, height, NoiseParams::default(), seed)
    }

    /// The thermal bias is drawn here, as the first draw of the run.
    pub fn with_noise(width: f64, height: f64, noise: NoiseParams, seed: u64) -> Self {
        let mut rng = SimRng::new(seed);
        let thermal_bias = rng.uniform(-noise.bias_bound, noise.bias_bound);
        Self {
            bounds: (width, height),
            obstacles: Vec::new(),
            people: Vec::new(),
            robot: RobotState::at(Pose2D::new(width / 2.0, height / 2.0, 0.0)),
            limits: RobotLimits::default(),
            camera: CameraModel::default(),
            noise,
            ambient_temp: 20.0,
            thermal_bias,
            person_radius: 0.25,
            clock: 0.0,
            rng,
        }
    }

    fn bounds_rect(&self) -> Rect {
        Rect::new(0.0, 0.0, self.bounds.0, self.bounds.1)
    }

    /// Disc-footprint collision test against walls and obstacles.
    pub fn colliding(&self, p: (f64, f64)) -> bool {
        let r = self.limits.radius;
        if p.0 - r < 0.0 || p.1 - r < 0.0 || p.0 + r > self.bounds.0 || p.1 + r > self.bounds.1 {
            return true;
        }
        self.obstacles.iter().any(|o| o.distance_to(p) < r)
    }

    /// Advance the world by `dt` under a velocity command.
    ///
    /// The command is clamped to the speed envelope and then rate-limited by
    /// the acceleration envelope relative to the current velocities. Motion
    /// integrates the exact unicycle arc; if the footprint would contact a
    /// wall or obstacle the motion is truncated at the last free sample and
    /// the linear speed zeroed.
    pub fn step(&mut self, dt: f64, cmd: VelocityCommand) {
        debug_assert!(dt > 0.0);
        let lim = self.limits;
        let v_cmd = math::clamp(cmd.v, 0.0, lim.v_max);
        let w_cmd = math::clamp(cmd.w, -lim.w_max, lim.w_max);
        let v = math::clamp(v_cmd, self.robot.v - lim.a_max * dt, self.robot.v + lim.a_max * dt);
        let w = math::clamp(
            w_cmd,
            self.robot.w - lim.alpha_max * dt,
            self.robot.w + lim.alpha_max * dt,
        );

        const SUBSTEPS: usize = 16;
        let start = self.robot.pose;
        let mut placed = start;
        let mut contact = false;
        for k in 1..=SUBSTEPS {
            let cand = arc_step(&start, v, w, dt * k as f64 / SUBSTEPS as f64);
            if self.colliding(cand.position()) {
                contact = true;
                break;
            }
            placed = cand;
        }

        self.robot.pose = placed;
        self.robot.v = if contact { 0.0 } else { v };
        self.robot.w = w;
        self.clock += dt;
    }

    /// Geometric visibility of a person for the cameras: within range, inside
    /// the pan-relative horizontal frustum and not occluded by an obstacle.
    pub fn person_visible(&self, person: &Person) -> bool {
        self.project_person(person).is_some()
    }

    /// Pinhole projection of a person into the 640x480 detection image.
    pub fn project_person(&self, person: &Person) -> Option<BBox> {
        let cam = &self.camera;
        let rx = self.robot.pose.x;
        let ry = self.robot.pose.y;
        let (px, py) = person.position(self.clock);
        let dx = px - rx;
        let dy = py - ry;
        let dist = math::hypot(dx, dy);
        if dist > cam.range || dist < 1e-9 {
            return None;
        }
        let axis = self.robot.camera_heading();
        let bearing = math::angle_diff(math::atan2(dy, dx), axis);
        if math::abs(bearing) > cam.half_hfov {
            return None;
        }
        let blocked = self
            .obstacles
            .iter()
            .any(|o| geom::segment_hits_rect((rx, ry), (px, py), o));
        if blocked {
            return None;
        }

        // Horizontal edges from the body half-width, perpendicular to the
        // line of sight. CCW-positive bearings land left of image center.
        let perp = (-dy / dist, dx / dist);
        let hw = cam.person_half_width;
        let mut u = [0.0f64; 2];
        for (i, s) in [-1.0f64, 1.0].iter().enumerate() {
            let ex = px + s * hw * perp.0 - rx;
            let ey = py + s * hw * perp.1 - ry;
            let b = math::angle_diff(math::atan2(ey, ex), axis);
            u[i] = IMAGE_W / 2.0 - cam.focal_h * math::tan(b);
        }
        let (u_lo, u_hi) = if u[0] <= u[1] { (u[0], u[1]) } else { (u[1], u[0]) };

        // Vertical extent from ground to head height, tilt-relative.
        let elev_top = math::atan2(person.height - cam.height, dist);
        let elev_bot = math::atan2(-cam.height, dist);
        let y_top = IMAGE_H / 2.0 - cam.focal_v * math::tan(elev_top - self.robot.tilt);
        let y_bot = IMAGE_H / 2.0 - cam.focal_v * math::tan(elev_bot - self.robot.tilt);
        let (y_lo, y_hi) = if y_top <= y_bot { (y_top, y_bot) } else { (y_bot, y_top) };

        let bbox = BBox {
            x_min: math::clamp(u_lo, 0.0, IMAGE_W),
            y_min: math::clamp(y_lo, 0.0, IMAGE_H),
            x_max: math::clamp(u_hi, 0.0, IMAGE_W),
            y_max: math::clamp(y_hi, 0.0, IMAGE_H),
        };
        if bbox.x_min < bbox.x_max && bbox.y_min < bbox.y_max {
            Some(bbox)
        } else {
            None
        }
    }

    /// One full lidar sweep from the current pose. Beams hit walls,
    /// obstacles and people; hits outside the range window become `None`.
    pub fn simulate_lidar(&mut self) -> LidarScan {
        let origin = self.robot.pose.position();
        let bounds = self.bounds_rect();
        let t = self.clock;
        let mut ranges = Vec::with_capacity(LIDAR_BEAMS);
        for k in 0..LIDAR_BEAMS {
            let ang = self.robot.pose.theta + LidarScan::beam_angle(k);
            let dir = (math::cos(ang), math::sin(ang));
            let mut best = f64::INFINITY;
            if let Some(d) = geom::ray_rect(origin, dir, &bounds) {
                best = best.min(d);
            }
            for o in &self.obstacles {
                if let Some(d) = geom::ray_rect(origin, dir, o) {
                    best = best.min(d);
                }
            }
            for p in &self.people {
                if let Some(d) = geom::ray_circle(origin, dir, p.position(t), self.person_radius) {
                    best = best.min(d);
                }
            }
            if !best.is_finite() {
                ranges.push(None);
                continue;
            }
            let mut r = best;
            if self.noise.sigma_lidar > 0.0 {
                r += self.rng.normal(self.noise.sigma_lidar);
            }
            if (LIDAR_MIN_RANGE..=LIDAR_MAX_RANGE).contains(&r) {
                ranges.push(Some(r));
            } else {
                ranges.push(None);
            }
        }
        LidarScan { ranges }
    }

    /// Project every visible person and drop candidates with probability
    /// `min(1, k_vib * v)`, modelling vibration-degraded detection while the
    /// base moves. One uniform is always drawn per candidate so streams stay
    /// aligned across runs that differ only in speed.
    pub fn simulate_detections(&mut self) -> Vec<Detection> {
        let p_miss = (self.noise.k_vib * self.robot.v).min(1.0);
        let mut out = Vec::new();
        let people = core::mem::take(&mut self.people);
        for person in &people {
            if let Some(bbox) = self.project_person(person) {
                let u = self.rng.next_f64();
                if u >= p_miss {
                    out.push(Detection {
                        person_id: person.id,
                        bbox,
                    });
                }
            }
        }
        self.people = people;
        out
    }

    /// Render the thermal camera frame: ambient background, visible people
    /// at skin temperature plus the per-run bias, and an optional hot spike
    /// on one random pixel.
    pub fn simulate_thermal_frame(&mut self) -> ThermalFrame {
        let n = THERMAL_W * THERMAL_H;
        let sigma = self.noise.sigma_thermal;
        let mut frame = ThermalFrame::constant(self.ambient_temp);
        if sigma > 0.0 {
            for i in 0..n {
                frame.temps[i] = self.ambient_temp + self.rng.normal(sigma);
            }
        }

        let t = self.clock;
        let people = core::mem::take(&mut self.people);
        for person in &people {
            if let Some(bbox) = self.project_person(person) {
                let temp = person.surface_temp(t) + self.thermal_bias;
                let u0 = thermal_index(bbox.x_min, THERMAL_W, IMAGE_W);
                let u1 = thermal_index(bbox.x_max, THERMAL_W, IMAGE_W);
                let v0 = thermal_index(bbox.y_min, THERMAL_H, IMAGE_H);
                let v1 = thermal_index(bbox.y_max, THERMAL_H, IMAGE_H);
                for v in v0..=v1 {
                    for u in u0..=u1 {
                        let value = if sigma > 0.0 {
                            temp + self.rng.normal(sigma)
                        } else {
                            temp
                        };
                        frame.set(u, v, value);
                    }
                }
            }
        }
        self.people = people;

        if self.noise.p_spike > 0.0 && self.rng.next_f64() < self.noise.p_spike {
            let idx = self.rng.index(n);
            let mag = self.rng.uniform(45.0, 60.0);
            frame.temps[idx] = mag;
        }
        frame
    }
}

/// Number of detections; any value above zero signals presence.
pub fn person_present_count(detections: &[Detection]) -> usize {
    detections.len()
}

/// Quarter-scale mapping of one detection-image coordinate onto the thermal
/// grid, clamped into bounds.
fn thermal_index(coord: f64, size: usize, image_extent: f64) -> usize {
    let scaled = math::floor(coord * size as f64 / image_extent);
    math::clamp(scaled, 0.0, (size - 1) as f64) as usize
}

/// Exact unicycle arc for constant `(v, w)` over `dt`.
fn arc_step(pose: &Pose2D, v: f64, w: f64, dt: f64) -> Pose2D {
    if math::abs(w) < 1e-9 {
        Pose2D::new(
            pose.x + v * math::cos(pose.theta) * dt,
            pose.y + v * math::sin(pose.theta) * dt,
            pose.theta + w * dt,
        )
    } else {
        let th1 = pose.theta + w * dt;
        Pose2D::new(
            pose.x + v / w * (math::sin(th1) - math::sin(pose.theta)),
            pose.y - v / w * (math::cos(th1) - math::cos(pose.theta)),
            th1,
        )
    }
}
