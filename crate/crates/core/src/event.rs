//! Event, metrics and trace records emitted by a run. Serialized by the
//! std crate as line-delimited JSON and CSV; field order is declaration
//! order, so identical runs serialize byte-identically.

use alloc::string::String;

use serde::Serialize;

use crate::chat::Speaker;

pub const EVENT_SCHEMA: &str = "event/1";
pub const METRICS_SCHEMA: &str = "metrics/1";

#[derive(Clone, Debug, Serialize)]
pub struct EventRecord {
    pub schema: &'static str,
    pub tick: u64,
    /// Simulation time at the start of the tick, s.
    pub sim_time: f64,
    #[serde(flatten)]
    pub kind: EventKind,
}

impl EventRecord {
    pub fn new(tick: u64, sim_time: f64, kind: EventKind) -> Self {
        Self {
            schema: EVENT_SCHEMA,
            tick,
            sim_time,
            kind,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventKind {
    Detection {
        person_id: u32,
        bbox: [f64; 4],
    },
    /// Goal saved and cancelled; the commanded velocity this tick.
    Stop {
        goal_x: f64,
        goal_y: f64,
        cmd_v: f64,
        cmd_w: f64,
    },
    /// Saved goal re-issued.
    Resume {
        goal_x: f64,
        goal_y: f64,
    },
    Reading {
        person_id: u32,
        celsius: f64,
    },
    Fever {
        person_id: u32,
        celsius: f64,
    },
    Chat {
        person_id: u32,
        speaker: Speaker,
        text: String,
        state: &'static str,
    },
    Announcement {
        message: String,
    },
    GoalReached {
        x: f64,
        y: f64,
    },
    PlanFailed {
        goal_x: f64,
        goal_y: f64,
        reason: String,
    },
}

/// Aggregate outcome of a run.
#[derive(Clone, Debug, Serialize)]
pub struct Metrics {
    pub schema: &'static str,
    /// Distinct people that produced at least one temperature reading.
    pub people_screened: u32,
    pub fevers_flagged: u32,
    /// Fever events for people whose true skin temperature was at or below
    /// the threshold at that moment.
    pub false_alarms: u32,
    /// People whose skin temperature exceeded the threshold while visible
    /// for at least the debounce count of consecutive ticks, yet never
    /// produced a fever event.
    pub missed_fevers: u32,
    /// Mean seconds from first visibility to first reading, over screened
    /// people.
    pub mean_time_to_scan: Option<f64>,
    /// Simulation time when the last goal was reached, if all goals were.
    pub goal_completion_time: Option<f64>,
    pub distance_traveled: f64,
}

/// One trajectory sample per tick; state after the tick's motion,
/// timestamped at the start of the tick.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TraceRow {
    pub tick: u64,
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub v: f64,
    pub w: f64,
    pub pan: f64,
    pub tilt: f64,
    pub person_present: usize,
}
