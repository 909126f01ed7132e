//! Scenario description: world geometry, people, robot, noise, planner and
//! runtime parameters, with validation and defaults. The std companion
//! crate parses scenario files into this structure.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::Rect;
use crate::nav::dwa::DwaParams;
use crate::nav::goal::{split_goals, GoalSpec};
use crate::nav::costmap::PlannerParams;
use crate::world::{CameraModel, NoiseParams, Person, Pose2D, RobotState, World, V_MAX};

pub const SCENARIO_SCHEMA: &str = "scenario/1";

#[derive(Debug, Error, PartialEq)]
pub enum ScenarioError {
    #[error("unsupported schema `{0}`, expected `{SCENARIO_SCHEMA}`")]
    Schema(String),
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: String, reason: String },
}

fn invalid(field: impl Into<String>, reason: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid {
        field: field.into(),
        reason: reason.into(),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default = "default_schema")]
    pub schema: String,
    pub world: WorldSection,
    pub robot: RobotSection,
    #[serde(default)]
    pub goals: Vec<GoalSpec>,
    #[serde(default)]
    pub people: Vec<PersonSpec>,
    #[serde(default)]
    pub noise: NoiseSection,
    #[serde(default)]
    pub thermal: ThermalSection,
    #[serde(default)]
    pub planner: PlannerSection,
    #[serde(default)]
    pub dwa: DwaSection,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub chat: ChatSection,
}

fn default_schema() -> String {
    SCENARIO_SCHEMA.to_string()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorldSection {
    /// Rectangular arena `[0, w] x [0, h]`, m. The boundary acts as walls.
    pub bounds: (f64, f64),
    #[serde(default)]
    pub obstacles: Vec<Rect>,
    #[serde(default = "default_ambient")]
    pub ambient_temp: f64,
}

fn default_ambient() -> f64 {
    20.0
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobotSection {
    /// Start pose `[x, y, theta]`.
    pub start: (f64, f64, f64),
    #[serde(default = "default_radius")]
    pub radius: f64,
    #[serde(default = "default_v_max")]
    pub v_max: f64,
    #[serde(default = "default_w_max")]
    pub w_max: f64,
    #[serde(default = "default_a_max")]
    pub a_max: f64,
    #[serde(default = "default_alpha_max")]
    pub alpha_max: f64,
    #[serde(default = "default_cam_height")]
    pub cam_height: f64,
    #[serde(default = "default_detection_range")]
    pub detection_range: f64,
}

fn default_radius() -> f64 {
    0.25
}
fn default_v_max() -> f64 {
    V_MAX
}
fn default_w_max() -> f64 {
    1.0
}
fn default_a_max() -> f64 {
    0.25
}
fn default_alpha_max() -> f64 {
    1.5
}
fn default_cam_height() -> f64 {
    0.85
}
fn default_detection_range() -> f64 {
    8.0
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PersonSpec {
    pub id: u32,
    /// `[[t, x, y], ...]` with strictly increasing `t`.
    pub waypoints: Vec<(f64, f64, f64)>,
    #[serde(default = "default_height")]
    pub height: f64,
    #[serde(default = "default_core_temp")]
    pub core_temp: f64,
    #[serde(default)]
    pub entry_time: f64,
    #[serde(default)]
    pub cold_offset: f64,
    #[serde(default = "default_cold_tau")]
    pub cold_tau: f64,
    /// Utterances fed to an active chat session, one per tick. Defaults to
    /// the cooperative happy-path script.
    #[serde(default)]
    pub chat_script: Option<Vec<String>>,
}

fn default_height() -> f64 {
    1.7
}
fn default_core_temp() -> f64 {
    36.5
}
fn default_cold_tau() -> f64 {
    60.0
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSection {
    pub sigma_lidar: f64,
    pub sigma_thermal: f64,
    pub p_spike: f64,
    pub bias_bound: f64,
    pub k_vib: f64,
}

impl Default for NoiseSection {
    fn default() -> Self {
        Self {
            sigma_lidar: 0.01,
            sigma_thermal: 0.2,
            p_spike: 0.01,
            bias_bound: 0.5,
            k_vib: 1.5,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThermalSection {
    pub fever_threshold: f64,
    pub debounce_count: u32,
}

impl Default for ThermalSection {
    fn default() -> Self {
        Self {
            fever_threshold: 38.0,
            debounce_count: 3,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerSection {
    pub cost_factor: f64,
    pub neutral_cost: f64,
    pub inflation_radius: f64,
    pub occupied_threshold: f64,
    pub resolution: f64,
    pub replan_interval_ticks: u64,
    /// When set, goal lists are subdivided so consecutive goals are at most
    /// this far apart.
    pub goal_spacing: Option<f64>,
}

impl Default for PlannerSection {
    fn default() -> Self {
        let p = PlannerParams::default();
        Self {
            cost_factor: p.cost_factor,
            neutral_cost: p.neutral_cost,
            inflation_radius: p.inflation_radius,
            occupied_threshold: p.occupied_threshold,
            resolution: 0.05,
            replan_interval_ticks: 10,
            goal_spacing: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DwaSection {
    pub sim_time: f64,
    pub sim_dt: f64,
    pub v_samples: usize,
    pub w_samples: usize,
    pub w_goal: f64,
    pub w_vel: f64,
    pub w_clear: f64,
    pub lookahead: f64,
    pub clearance_cap: f64,
}

impl Default for DwaSection {
    fn default() -> Self {
        let d = DwaParams::default();
        Self {
            sim_time: d.sim_time,
            sim_dt: d.sim_dt,
            v_samples: d.v_samples,
            w_samples: d.w_samples,
            w_goal: d.w_goal,
            w_vel: d.w_vel,
            w_clear: d.w_clear,
            lookahead: d.lookahead,
            clearance_cap: d.clearance_cap,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub dt: f64,
    pub max_ticks: u64,
    pub announce_period: f64,
    pub announce_message: String,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            dt: 0.1,
            max_ticks: 2000,
            announce_period: 10.0,
            announce_message: "mobile temperature screening in progress".to_string(),
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChatSection {
    /// Intent configuration file; the built-in set is used when absent.
    pub intents_path: Option<String>,
}

impl Scenario {
    /// Smallest valid scenario: arena bounds plus a robot start pose.
    pub fn minimal(bounds: (f64, f64), start: (f64, f64, f64)) -> Self {
        Self {
            schema: default_schema(),
            world: WorldSection {
                bounds,
                obstacles: Vec::new(),
                ambient_temp: default_ambient(),
            },
            robot: RobotSection {
                start,
                radius: default_radius(),
                v_max: default_v_max(),
                w_max: default_w_max(),
                a_max: default_a_max(),
                alpha_max: default_alpha_max(),
                cam_height: default_cam_height(),
                detection_range: default_detection_range(),
            },
            goals: Vec::new(),
            people: Vec::new(),
            noise: NoiseSection::default(),
            thermal: ThermalSection::default(),
            planner: PlannerSection::default(),
            dwa: DwaSection::default(),
            run: RunSection::default(),
            chat: ChatSection::default(),
        }
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.schema != SCENARIO_SCHEMA {
            return Err(ScenarioError::Schema(self.schema.clone()));
        }
        let (bw, bh) = self.world.bounds;
        if !(bw > 0.0 && bh > 0.0 && bw.is_finite() && bh.is_finite()) {
            return Err(invalid("world.bounds", "must be positive and finite"));
        }
        for (i, o) in self.world.obstacles.iter().enumerate() {
            if !(o.min.0 < o.max.0 && o.min.1 < o.max.1) {
                return Err(invalid(
                    format!("world.obstacles[{i}]"),
                    "min must be strictly below max on both axes",
                ));
            }
        }

        let r = &self.robot;
        if r.radius <= 0.0 {
            return Err(invalid("robot.radius", "must be positive"));
        }
        if !(r.v_max > 0.0 && r.v_max <= V_MAX) {
            return Err(invalid(
                "robot.v_max",
                format!("must be in (0, {V_MAX}] m/s"),
            ));
        }
        if r.w_max <= 0.0 || r.a_max <= 0.0 || r.alpha_max <= 0.0 {
            return Err(invalid("robot", "w_max, a_max and alpha_max must be positive"));
        }
        if r.cam_height < 0.0 {
            return Err(invalid("robot.cam_height", "must be non-negative"));
        }
        if r.detection_range <= 0.0 {
            return Err(invalid("robot.detection_range", "must be positive"));
        }
        let (sx, sy, _) = r.start;
        if !inside(bw, bh, sx, sy) {
            return Err(invalid("robot.start", "outside world bounds"));
        }
        if self.world.obstacles.iter().any(|o| o.distance_to((sx, sy)) < r.radius) {
            return Err(invalid("robot.start", "footprint overlaps an obstacle"));
        }

        for (i, g) in self.goals.iter().enumerate() {
            if !inside(bw, bh, g.x, g.y) {
                return Err(invalid(format!("goals[{i}]"), "outside world bounds"));
            }
        }

        let mut ids = alloc::collections::BTreeSet::new();
        for (i, p) in self.people.iter().enumerate() {
            if !ids.insert(p.id) {
                return Err(invalid(format!("people[{i}].id"), "duplicate person id"));
            }
            if p.waypoints.is_empty() {
                return Err(invalid(format!("people[{i}].waypoints"), "must not be empty"));
            }
            for (j, wp) in p.waypoints.iter().enumerate() {
                if !inside(bw, bh, wp.1, wp.2) {
                    return Err(invalid(
                        format!("people[{i}].waypoints[{j}]"),
                        "outside world bounds",
                    ));
                }
                if j > 0 && wp.0 <= p.waypoints[j - 1].0 {
                    return Err(invalid(
                        format!("people[{i}].waypoints[{j}]"),
                        "times must be strictly increasing",
                    ));
                }
            }
            if p.height <= 0.0 {
                return Err(invalid(format!("people[{i}].height"), "must be positive"));
            }
            if p.cold_offset < 0.0 {
                return Err(invalid(format!("people[{i}].cold_offset"), "must be non-negative"));
            }
            if p.cold_tau <= 0.0 {
                return Err(invalid(format!("people[{i}].cold_tau"), "must be positive"));
            }
        }

        let n = &self.noise;
        if n.sigma_lidar < 0.0 || n.sigma_thermal < 0.0 || n.bias_bound < 0.0 || n.k_vib < 0.0 {
            return Err(invalid("noise", "sigmas, bias_bound and k_vib must be non-negative"));
        }
        if !(0.0..=1.0).contains(&n.p_spike) {
            return Err(invalid("noise.p_spike", "must be a probability in [0, 1]"));
        }

        if !self.thermal.fever_threshold.is_finite() {
            return Err(invalid("thermal.fever_threshold", "must be finite"));
        }
        if self.thermal.debounce_count < 1 {
            return Err(invalid("thermal.debounce_count", "must be at least 1"));
        }

        let pl = &self.planner;
        if pl.resolution <= 0.0 {
            return Err(invalid("planner.resolution", "must be positive"));
        }
        if pl.neutral_cost <= 0.0 {
            return Err(invalid("planner.neutral_cost", "must be positive"));
        }
        if pl.cost_factor < 0.0 {
            return Err(invalid("planner.cost_factor", "must be non-negative"));
        }
        if pl.inflation_radius < 0.0 {
            return Err(invalid("planner.inflation_radius", "must be non-negative"));
        }
        if !(pl.occupied_threshold > 0.5 && pl.occupied_threshold < 1.0) {
            return Err(invalid("planner.occupied_threshold", "must lie in (0.5, 1.0)"));
        }
        if pl.replan_interval_ticks < 1 {
            return Err(invalid("planner.replan_interval_ticks", "must be at least 1"));
        }
        if let Some(s) = pl.goal_spacing {
            if s <= 0.0 {
                return Err(invalid("planner.goal_spacing", "must be positive"));
            }
        }

        let d = &self.dwa;
        if !(d.sim_time > d.sim_dt && d.sim_dt > 0.0) {
            return Err(invalid("dwa", "need sim_time > sim_dt > 0"));
        }
        if d.v_samples < 2 || d.w_samples < 2 {
            return Err(invalid("dwa", "sample counts must be at least 2"));
        }
        if d.w_goal < 0.0 || d.w_vel < 0.0 || d.w_clear < 0.0 {
            return Err(invalid("dwa", "weights must be non-negative"));
        }
        if d.lookahead <= 0.0 || d.clearance_cap <= 0.0 {
            return Err(invalid("dwa", "lookahead and clearance_cap must be positive"));
        }

        if self.run.dt <= 0.0 {
            return Err(invalid("run.dt", "must be positive"));
        }
        if self.run.max_ticks < 1 {
            return Err(invalid("run.max_ticks", "must be at least 1"));
        }
        if self.run.announce_period <= 0.0 {
            return Err(invalid("run.announce_period", "must be positive"));
        }
        Ok(())
    }

    /// Build the simulation world; people are stored sorted by id so the
    /// documented RNG draw order is independent of file order.
    pub fn build_world(&self, seed: u64) -> World {
        let noise = NoiseParams {
            sigma_lidar: self.noise.sigma_lidar,
            sigma_thermal: self.noise.sigma_thermal,
            p_spike: self.noise.p_spike,
            bias_bound: self.noise.bias_bound,
            k_vib: self.noise.k_vib,
        };
        let mut world = World::with_noise(self.world.bounds.0, self.world.bounds.1, noise, seed);
        world.obstacles = self.world.obstacles.clone();
        world.ambient_temp = self.world.ambient_temp;

        let mut people: Vec<Person> = self
            .people
            .iter()
            .map(|p| Person {
                id: p.id,
                waypoints: p.waypoints.clone(),
                height: p.height,
                core_temp: p.core_temp,
                entry_time: p.entry_time,
                cold_offset: p.cold_offset,
                cold_tau: p.cold_tau,
            })
            .collect();
        people.sort_by_key(|p| p.id);
        world.people = people;

        let r = &self.robot;
        world.robot = RobotState::at(Pose2D::new(r.start.0, r.start.1, r.start.2));
        world.limits.v_max = r.v_max;
        world.limits.w_max = r.w_max;
        world.limits.a_max = r.a_max;
        world.limits.alpha_max = r.alpha_max;
        world.limits.radius = r.radius;
        world.camera = CameraModel {
            height: r.cam_height,
            range: r.detection_range,
            ..CameraModel::default()
        };
        world
    }

    pub fn planner_params(&self) -> PlannerParams {
        PlannerParams {
            cost_factor: self.planner.cost_factor,
            neutral_cost: self.planner.neutral_cost,
            inflation_radius: self.planner.inflation_radius,
            occupied_threshold: self.planner.occupied_threshold,
        }
    }

    /// DWA parameters with the robot's physical envelope folded in.
    pub fn dwa_params(&self) -> DwaParams {
        DwaParams {
            sim_time: self.dwa.sim_time,
            sim_dt: self.dwa.sim_dt,
            v_samples: self.dwa.v_samples,
            w_samples: self.dwa.w_samples,
            a_max: self.robot.a_max,
            alpha_max: self.robot.alpha_max,
            v_max: self.robot.v_max,
            w_max: self.robot.w_max,
            w_goal: self.dwa.w_goal,
            w_vel: self.dwa.w_vel,
            w_clear: self.dwa.w_clear,
            lookahead: self.dwa.lookahead,
            robot_radius: self.robot.radius,
            clearance_cap: self.dwa.clearance_cap,
        }
    }

    /// Goal list with the optional waypoint splitting applied.
    pub fn goal_list(&self) -> Vec<GoalSpec> {
        match self.planner.goal_spacing {
            Some(spacing) => split_goals(&self.goals, spacing),
            None => self.goals.clone(),
        }
    }
}

fn inside(bw: f64, bh: f64, x: f64, y: f64) -> bool {
    x >= 0.0 && y >= 0.0 && x <= bw && y <= bh
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn minimal_scenario_gets_all_defaults() {
        let s = Scenario::minimal((8.0, 6.0), (1.0, 1.0, 0.0));
        s.validate().unwrap();
        assert_eq!(s.thermal.fever_threshold, 38.0);
        assert_eq!(s.thermal.debounce_count, 3);
        assert_eq!(s.run.dt, 0.1);
        assert_eq!(s.planner.resolution, 0.05);
        assert_eq!(s.noise.sigma_lidar, 0.01);
        assert_eq!(s.dwa.v_samples, 11);
    }

    #[test]
    fn waypoint_outside_bounds_names_the_field() {
        let mut s = Scenario::minimal((8.0, 6.0), (1.0, 1.0, 0.0));
        s.people.push(PersonSpec {
            id: 1,
            waypoints: vec![(0.0, 4.0, 1.0), (5.0, 9.5, 1.0)],
            height: default_height(),
            core_temp: default_core_temp(),
            entry_time: 0.0,
            cold_offset: 0.0,
            cold_tau: default_cold_tau(),
            chat_script: None,
        });
        let err = s.validate().unwrap_err();
        assert_eq!(
            err,
            ScenarioError::Invalid {
                field: "people[0].waypoints[1]".to_string(),
                reason: "outside world bounds".to_string()
            }
        );
    }

    #[test]
    fn waypoint_times_must_increase() {
        let mut s = Scenario::minimal((8.0, 6.0), (1.0, 1.0, 0.0));
        s.people.push(PersonSpec {
            id: 1,
            waypoints: vec![(5.0, 4.0, 1.0), (5.0, 4.5, 1.0)],
            height: default_height(),
            core_temp: default_core_temp(),
            entry_time: 0.0,
            cold_offset: 0.0,
            cold_tau: default_cold_tau(),
            chat_script: None,
        });
        assert!(matches!(s.validate(), Err(ScenarioError::Invalid { .. })));
    }

    #[test]
    fn overspeed_cap_is_rejected() {
        let mut s = Scenario::minimal((8.0, 6.0), (1.0, 1.0, 0.0));
        s.robot.v_max = 0.3;
        assert!(matches!(s.validate(), Err(ScenarioError::Invalid { .. })));
    }

    #[test]
    fn goal_outside_bounds_rejected() {
        let mut s = Scenario::minimal((8.0, 6.0), (1.0, 1.0, 0.0));
        s.goals.push(GoalSpec::at(9.0, 3.0));
        let err = s.validate().unwrap_err();
        assert!(matches!(err, ScenarioError::Invalid { field, .. } if field == "goals[0]"));
    }

    #[test]
    fn build_world_sorts_people_by_id() {
        let mut s = Scenario::minimal((8.0, 6.0), (1.0, 1.0, 0.0));
        for id in [3u32, 1, 2] {
            s.people.push(PersonSpec {
                id,
                waypoints: vec![(0.0, 4.0, 2.0)],
                height: default_height(),
                core_temp: default_core_temp(),
                entry_time: 0.0,
                cold_offset: 0.0,
                cold_tau: default_cold_tau(),
                chat_script: None,
            });
        }
        let w = s.build_world(7);
        let ids: Vec<u32> = w.people.iter().map(|p| p.id).collect();
        assert_eq!(ids, vec![1, 2, 3]);
        assert_eq!(w.limits.v_max, V_MAX);
    }

    #[test]
    fn bad_schema_is_rejected() {
        let mut s = Scenario::minimal((8.0, 6.0), (1.0, 1.0, 0.0));
        s.schema = "scenario/99".to_string();
        assert!(matches!(s.validate(), Err(ScenarioError::Schema(_))));
    }
}
