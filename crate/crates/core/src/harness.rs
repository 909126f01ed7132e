//! Deterministic tick loop wiring the whole robot together.
//!
//! Per-tick module order is fixed; reordering it changes RNG draw order and
//! therefore run output:
//!
//! 1. announcement on period boundaries
//! 2. sense: lidar sweep, detections, thermal frame
//! 3. presence count and detection events
//! 4. goal-manager presence step (stop / resume)
//! 5. servo step toward the detection nearest the image center
//! 6. per-person screening; only the servo target is read this tick
//! 7. chat sessions advance one exchange each
//! 8. occupancy update, then global (re)planning on schedule
//! 9. velocity command: paused/idle hold, final heading rotation, or DWA
//! 10. world step
//! 11. goal progress and trace row
//!
//! A run ends at the tick budget, or once every goal is reached and no chat
//! session is active (scenarios without goals always run the full budget).

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::chat::{ChatEngine, IntentSet, Speaker};
use crate::event::{EventKind, EventRecord, Metrics, TraceRow, METRICS_SCHEMA};
use crate::math;
use crate::nav::costmap::Costmap;
use crate::nav::dwa::{dwa_step, DynamicWindow};
use crate::nav::goal::{Directive, GoalManager, NavMode};
use crate::nav::grid::OccupancyGrid;
use crate::nav::plan_global;
use crate::scenario::{Scenario, ScenarioError};
use crate::servo::{center_offset, pick_servo_target, ManipulatorModel};
use crate::thermal::{screen_tick, DebounceState};
use crate::world::{person_present_count, Pose2D, VelocityCommand};

/// Cooperative answers used when a person has no scripted chat lines.
pub const DEFAULT_CHAT_SCRIPT: [&str; 4] =
    ["hello", "yes i am vaccinated", "no i feel fine", "thank you"];

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub events: Vec<EventRecord>,
    pub metrics: Metrics,
    pub trace: Vec<TraceRow>,
    /// Final occupancy belief, for map export and inspection.
    pub grid: OccupancyGrid,
}

struct Track {
    debounce: DebounceState,
    script: Vec<String>,
    script_pos: usize,
    /// Fever already flagged; screening stays off until the person leaves
    /// view, so one visit yields one fever event.
    hold: bool,
    first_visible: Option<f64>,
    first_reading: Option<f64>,
    hot_run: u32,
    hot_eligible: bool,
    fever_flagged: bool,
}

/// Execute a scenario for up to `ticks` (defaults to the scenario budget).
/// Identical (scenario, intents, seed) triples produce identical output.
pub fn run(
    scenario: &Scenario,
    intents: IntentSet,
    seed: u64,
    ticks: Option<u64>,
) -> Result<RunOutput, ScenarioError> {
    scenario.validate()?;

    let dt = scenario.run.dt;
    let max_ticks = ticks.unwrap_or(scenario.run.max_ticks);
    let fever_threshold = scenario.thermal.fever_threshold;
    let debounce_count = scenario.thermal.debounce_count;
    let planner_params = scenario.planner_params();
    let dwa = scenario.dwa_params();
    let replan_interval = scenario.planner.replan_interval_ticks;
    let announce_ticks = (math::round(scenario.run.announce_period / dt) as u64).max(1);

    let mut world = scenario.build_world(seed);
    let mut grid = OccupancyGrid::new(
        world.bounds.0,
        world.bounds.1,
        scenario.planner.resolution,
    );
    let had_goals = !scenario.goals.is_empty();
    let mut gm = GoalManager::new(scenario.goal_list());
    let mut chat = ChatEngine::new(intents, fever_threshold);
    let manipulator = ManipulatorModel::default();

    let mut tracks: BTreeMap<u32, Track> = world
        .people
        .iter()
        .map(|p| {
            let script = scenario
                .people
                .iter()
                .find(|s| s.id == p.id)
                .and_then(|s| s.chat_script.clone())
                .unwrap_or_else(|| DEFAULT_CHAT_SCRIPT.iter().map(|s| s.to_string()).collect());
            (
                p.id,
                Track {
                    debounce: DebounceState::new(fever_threshold, debounce_count),
                    script,
                    script_pos: 0,
                    hold: false,
                    first_visible: None,
                    first_reading: None,
                    hot_run: 0,
                    hot_eligible: false,
                    fever_flagged: false,
                },
            )
        })
        .collect();

    let mut events: Vec<EventRecord> = Vec::new();
    let mut trace: Vec<TraceRow> = Vec::new();
    let mut path: Option<Vec<Pose2D>> = None;
    let mut cursor = 0usize;
    let mut costmap: Option<Costmap> = None;
    let mut need_plan = true;
    let mut distance = 0.0f64;
    let mut completion: Option<f64> = None;
    let mut fevers = 0u32;
    let mut false_alarms = 0u32;

    for tick in 0..max_ticks {
        if tick > 0 && had_goals && gm.all_done() && !chat.has_active() {
            break;
        }
        let t = world.clock;

        if tick % announce_ticks == 0 {
            events.push(EventRecord::new(
                tick,
                t,
                EventKind::Announcement {
                    message: scenario.run.announce_message.clone(),
                },
            ));
        }

        // Sensing. RNG draw order inside these three calls is documented in
        // the world module and must stay: lidar, detections, thermal.
        let scan = world.simulate_lidar();
        let detections = world.simulate_detections();
        let frame = world.simulate_thermal_frame();

        for d in &detections {
            events.push(EventRecord::new(
                tick,
                t,
                EventKind::Detection {
                    person_id: d.person_id,
                    bbox: [d.bbox.x_min, d.bbox.y_min, d.bbox.x_max, d.bbox.y_max],
                },
            ));
        }
        let present = person_present_count(&detections);

        match gm.step(present) {
            Directive::Stop => {
                let g = gm.saved_goal().expect("stop saves the active goal");
                events.push(EventRecord::new(
                    tick,
                    t,
                    EventKind::Stop {
                        goal_x: g.x,
                        goal_y: g.y,
                        cmd_v: 0.0,
                        cmd_w: 0.0,
                    },
                ));
                path = None;
                cursor = 0;
            }
            Directive::Resume => {
                let g = gm.active_goal().expect("resume re-issues the saved goal");
                events.push(EventRecord::new(
                    tick,
                    t,
                    EventKind::Resume {
                        goal_x: g.x,
                        goal_y: g.y,
                    },
                ));
                need_plan = true;
            }
            Directive::Continue => {}
        }

        // Visual servoing tracks whichever detection is most centered.
        let target = pick_servo_target(&detections).copied();
        if let Some(d) = &target {
            world.robot = manipulator.align_step(&world.robot, center_offset(d));
        }

        // Screening. One reading stream: only the servo target is sampled;
        // everyone else's debounce run resets on their missing reading.
        let infos: Vec<(u32, bool, f64)> = world
            .people
            .iter()
            .map(|p| (p.id, world.person_visible(p), p.surface_temp(t)))
            .collect();
        for (id, visible, surface) in infos {
            let track = tracks.get_mut(&id).expect("track per person");
            if visible {
                if track.first_visible.is_none() {
                    track.first_visible = Some(t);
                }
                if surface > fever_threshold {
                    track.hot_run += 1;
                    if track.hot_run >= debounce_count {
                        track.hot_eligible = true;
                    }
                } else {
                    track.hot_run = 0;
                }
            } else {
                track.hot_run = 0;
                track.hold = false;
            }
            let session_active = chat.session(id).is_some_and(|s| !s.is_done());
            let det_for = target
                .as_ref()
                .filter(|d| d.person_id == id && !track.hold && !session_active);
            let out = screen_tick(&frame, det_for, &mut track.debounce);
            if let Some(reading) = out.reading {
                if track.first_reading.is_none() {
                    track.first_reading = Some(t);
                }
                events.push(EventRecord::new(
                    tick,
                    t,
                    EventKind::Reading {
                        person_id: id,
                        celsius: reading,
                    },
                ));
                if out.fever {
                    fevers += 1;
                    track.fever_flagged = true;
                    track.hold = true;
                    if surface <= fever_threshold {
                        false_alarms += 1;
                    }
                    events.push(EventRecord::new(
                        tick,
                        t,
                        EventKind::Fever {
                            person_id: id,
                            celsius: reading,
                        },
                    ));
                    if let Ok(opening) = chat.start_session(id, reading) {
                        events.push(EventRecord::new(
                            tick,
                            t,
                            EventKind::Chat {
                                person_id: id,
                                speaker: Speaker::Robot,
                                text: opening,
                                state: "greeting",
                            },
                        ));
                    }
                }
            }
        }

        // Chat: one exchange per active session per tick. An exhausted
        // script means the person stopped answering; the session is dropped.
        for id in chat.active_ids() {
            let track = tracks.get_mut(&id).expect("track per person");
            match track.script.get(track.script_pos).cloned() {
                None => {
                    chat.remove_session(id);
                }
                Some(utterance) => {
                    track.script_pos += 1;
                    let pre_state = chat.session(id).expect("active session").state;
                    let reply = chat.respond(id, &utterance).expect("session accepts input");
                    events.push(EventRecord::new(
                        tick,
                        t,
                        EventKind::Chat {
                            person_id: id,
                            speaker: Speaker::User,
                            text: utterance,
                            state: pre_state.as_str(),
                        },
                    ));
                    events.push(EventRecord::new(
                        tick,
                        t,
                        EventKind::Chat {
                            person_id: id,
                            speaker: Speaker::Robot,
                            text: reply.text,
                            state: reply.state.as_str(),
                        },
                    ));
                }
            }
        }

        // Mapping feeds planning.
        grid.apply_scan(&world.robot.pose, &scan);
        if gm.mode() == NavMode::Navigating
            && (need_plan || path.is_none() || tick % replan_interval == 0)
        {
            let cm = Costmap::build(&grid, &planner_params);
            let goal = *gm.active_goal().expect("navigating implies a goal");
            match plan_global(&cm, &world.robot.pose, &goal.pose()) {
                Ok(mut p) => {
                    p.push(goal.pose());
                    path = Some(p);
                    cursor = 0;
                    need_plan = false;
                }
                Err(e) => {
                    events.push(EventRecord::new(
                        tick,
                        t,
                        EventKind::PlanFailed {
                            goal_x: goal.x,
                            goal_y: goal.y,
                            reason: e.to_string(),
                        },
                    ));
                    gm.abandon_active();
                    path = None;
                    need_plan = true;
                }
            }
            costmap = Some(cm);
        }

        let cmd = match gm.mode() {
            NavMode::Paused | NavMode::Idle => VelocityCommand::zero(),
            NavMode::Navigating => {
                if let Some(target_theta) = gm.pending_heading(&world.robot.pose) {
                    // At the goal position: brake and rotate into the goal
                    // heading, inside the dynamic window.
                    let window = DynamicWindow::around(&world.robot, &dwa);
                    let err = math::angle_diff(target_theta, world.robot.pose.theta);
                    VelocityCommand::new(
                        window.v_lo,
                        math::clamp(2.0 * err, window.w_lo, window.w_hi),
                    )
                } else if let (Some(p), Some(cm)) = (&path, &costmap) {
                    while cursor + 1 < p.len()
                        && world.robot.pose.distance_to(&p[cursor]) <= dwa.lookahead
                    {
                        cursor += 1;
                    }
                    dwa_step(&world.robot, &p[cursor..], cm, &dwa)
                } else {
                    VelocityCommand::zero()
                }
            }
        };

        let before = world.robot.pose;
        world.step(dt, cmd);
        distance += before.distance_to(&world.robot.pose);

        if let Some(g) = gm.update_progress(&world.robot.pose) {
            events.push(EventRecord::new(
                tick,
                t,
                EventKind::GoalReached { x: g.x, y: g.y },
            ));
            path = None;
            cursor = 0;
            need_plan = true;
            if gm.all_done() {
                completion = Some(world.clock);
            }
        }

        trace.push(TraceRow {
            tick,
            t,
            x: world.robot.pose.x,
            y: world.robot.pose.y,
            theta: world.robot.pose.theta,
            v: world.robot.v,
            w: world.robot.w,
            pan: world.robot.pan,
            tilt: world.robot.tilt,
            person_present: present,
        });
    }

    let screened: Vec<&Track> = tracks.values().filter(|t| t.first_reading.is_some()).collect();
    let mean_time_to_scan = {
        let waits: Vec<f64> = screened
            .iter()
            .filter_map(|t| Some(t.first_reading? - t.first_visible?))
            .collect();
        if waits.is_empty() {
            None
        } else {
            Some(waits.iter().sum::<f64>() / waits.len() as f64)
        }
    };
    let metrics = Metrics {
        schema: METRICS_SCHEMA,
        people_screened: screened.len() as u32,
        fevers_flagged: fevers,
        false_alarms,
        missed_fevers: tracks
            .values()
            .filter(|t| t.hot_eligible && !t.fever_flagged)
            .count() as u32,
        mean_time_to_scan,
        goal_completion_time: completion,
        distance_traveled: distance,
    };

    Ok(RunOutput {
        events,
        metrics,
        trace,
        grid,
    })
}
