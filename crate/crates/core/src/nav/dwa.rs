//! Dynamic Window Approach local planner.
//!
//! Samples velocity pairs reachable within one control interval, rolls each
//! pair out for `sim_time`, discards rollouts whose footprint touches a
//! lethal cell, and scores the survivors on heading alignment to the path
//! target, speed, and clearance. When every rollout collides the planner
//! falls back to braking hard and rotating toward the target, still inside
//! the dynamic window.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::math;
use crate::nav::costmap::Costmap;
use crate::world::{Pose2D, RobotState, VelocityCommand, V_MAX};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DwaParams {
    /// Rollout horizon, s.
    pub sim_time: f64,
    /// Rollout integration step; doubles as the control interval that sizes
    /// the dynamic window.
    pub sim_dt: f64,
    pub v_samples: usize,
    pub w_samples: usize,
    pub a_max: f64,
    pub alpha_max: f64,
    pub v_max: f64,
    pub w_max: f64,
    pub w_goal: f64,
    pub w_vel: f64,
    pub w_clear: f64,
    /// Path target selection distance, m.
    pub lookahead: f64,
    pub robot_radius: f64,
    /// Clearance above this distance scores fully, m.
    pub clearance_cap: f64,
}

impl Default for DwaParams {
    fn default() -> Self {
        Self {
            sim_time: 1.5,
            sim_dt: 0.1,
            v_samples: 11,
            w_samples: 21,
            a_max: 0.25,
            alpha_max: 1.5,
            v_max: V_MAX,
            w_max: 1.0,
            w_goal: 1.0,
            w_vel: 0.3,
            // Kept low: the clearance gradient near inflated regions must
            // never outweigh the velocity reward, or the base parks there.
            w_clear: 0.1,
            lookahead: 0.4,
            robot_radius: 0.25,
            clearance_cap: 1.0,
        }
    }
}

/// Velocity bounds reachable within one control interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DynamicWindow {
    pub v_lo: f64,
    pub v_hi: f64,
    pub w_lo: f64,
    pub w_hi: f64,
}

impl DynamicWindow {
    pub fn around(state: &RobotState, params: &DwaParams) -> Self {
        let dv = params.a_max * params.sim_dt;
        let dw = params.alpha_max * params.sim_dt;
        Self {
            v_lo: (state.v - dv).max(0.0),
            v_hi: (state.v + dv).min(params.v_max),
            w_lo: (state.w - dw).max(-params.w_max),
            w_hi: (state.w + dw).min(params.w_max),
        }
    }

    pub fn contains(&self, cmd: &VelocityCommand) -> bool {
        (self.v_lo..=self.v_hi).contains(&cmd.v) && (self.w_lo..=self.w_hi).contains(&cmd.w)
    }
}

/// Pick the first waypoint farther than the lookahead distance, falling
/// back to the final waypoint near the path end.
pub fn path_target(pose: &Pose2D, path: &[Pose2D], lookahead: f64) -> Pose2D {
    for wp in path {
        if pose.distance_to(wp) > lookahead {
            return *wp;
        }
    }
    *path.last().expect("non-empty path")
}

/// Constant-velocity rollout at `sim_dt` resolution over `sim_time`,
/// excluding the initial pose.
pub fn rollout(pose: &Pose2D, v: f64, w: f64, params: &DwaParams) -> Vec<Pose2D> {
    let steps = (math::round(params.sim_time / params.sim_dt) as usize).max(1);
    let mut out = Vec::with_capacity(steps);
    let mut cur = *pose;
    for _ in 0..steps {
        cur = unicycle(&cur, v, w, params.sim_dt);
        out.push(cur);
    }
    out
}

fn unicycle(pose: &Pose2D, v: f64, w: f64, dt: f64) -> Pose2D {
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

/// Footprint clearance of a trajectory: minimum distance-to-lethal over the
/// rollout minus the robot radius. Points at or below `floor` are a
/// collision, as is leaving the map. `floor` is normally zero; when the
/// robot already sits inside the margin (map evidence shifted under it) the
/// caller lowers it so motion that does not go deeper stays admissible.
fn trajectory_clearance(traj: &[Pose2D], costmap: &Costmap, radius: f64, floor: f64) -> Option<f64> {
    let mut min_clear = f64::INFINITY;
    for p in traj {
        let (ix, iy) = costmap.world_to_cell(p.x, p.y)?;
        let c = costmap.clearance(ix, iy) - radius;
        if c <= floor {
            return None;
        }
        min_clear = min_clear.min(c);
    }
    Some(min_clear)
}

/// Collision floor for this step: zero while the current footprint is
/// clear, else just below the current margin so escape moves survive.
fn collision_floor(pose: &Pose2D, costmap: &Costmap, radius: f64) -> f64 {
    let margin = costmap
        .world_to_cell(pose.x, pose.y)
        .map(|(ix, iy)| costmap.clearance(ix, iy) - radius)
        .unwrap_or(f64::INFINITY);
    if margin <= 0.0 {
        margin - 1e-9
    } else {
        0.0
    }
}

fn score(end: &Pose2D, target: &Pose2D, v: f64, clearance: f64, params: &DwaParams) -> f64 {
    let heading = {
        let dx = target.x - end.x;
        let dy = target.y - end.y;
        if math::hypot(dx, dy) < 1e-9 {
            1.0
        } else {
            let err = math::angle_diff(math::atan2(dy, dx), end.theta);
            1.0 - math::abs(err) / math::PI
        }
    };
    let vel = v / params.v_max;
    let clear = math::clamp(clearance, 0.0, params.clearance_cap) / params.clearance_cap;
    params.w_goal * heading + params.w_vel * vel + params.w_clear * clear
}

/// One local-planning step: the best collision-free command in the dynamic
/// window, or the braking/rotation recovery when none survives. Ties break
/// toward lower `|w|`, then lower `v`, then lower `w`.
pub fn dwa_step(
    state: &RobotState,
    path: &[Pose2D],
    costmap: &Costmap,
    params: &DwaParams,
) -> VelocityCommand {
    if path.is_empty() {
        return VelocityCommand::zero();
    }
    let target = path_target(&state.pose, path, params.lookahead);
    let window = DynamicWindow::around(state, params);
    let floor = collision_floor(&state.pose, costmap, params.robot_radius);

    let nv = params.v_samples.max(2);
    let nw = params.w_samples.max(2);
    let mut best: Option<(VelocityCommand, f64)> = None;
    for i in 0..nv {
        // Exact endpoints; the interpolated interior can overshoot by an ulp.
        let v = if i == nv - 1 {
            window.v_hi
        } else {
            window.v_lo + (window.v_hi - window.v_lo) * i as f64 / (nv - 1) as f64
        };
        for j in 0..nw {
            let w = if j == nw - 1 {
                window.w_hi
            } else {
                window.w_lo + (window.w_hi - window.w_lo) * j as f64 / (nw - 1) as f64
            };
            let traj = rollout(&state.pose, v, w, params);
            let Some(clearance) = trajectory_clearance(&traj, costmap, params.robot_radius, floor)
            else {
                continue;
            };
            let end = traj.last().expect("rollout non-empty");
            let s = score(end, &target, v, clearance, params);
            let cand = VelocityCommand::new(v, w);
            let replace = match &best {
                None => true,
                Some((b, bs)) => {
                    s > *bs
                        || (s == *bs
                            && (math::abs(w) < math::abs(b.w)
                                || (math::abs(w) == math::abs(b.w)
                                    && (v < b.v || (v == b.v && w < b.w)))))
                }
            };
            if replace {
                best = Some((cand, s));
            }
        }
    }

    match best {
        Some((cmd, _)) => cmd,
        None => recovery(state, &target, &window),
    }
}

/// All rollouts collide: brake as hard as the window allows and rotate
/// toward the target.
fn recovery(state: &RobotState, target: &Pose2D, window: &DynamicWindow) -> VelocityCommand {
    let bearing = math::atan2(target.y - state.pose.y, target.x - state.pose.x);
    let err = math::angle_diff(bearing, state.pose.theta);
    let w_want = if err >= 0.0 { window.w_hi } else { window.w_lo };
    VelocityCommand::new(window.v_lo, w_want)
}
