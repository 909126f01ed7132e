//! Person-triggered goal save/cancel/resume state machine plus waypoint
//! splitting.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::math;
use crate::world::Pose2D;

pub const DEFAULT_POSITION_TOLERANCE: f64 = 0.15;
pub const DEFAULT_HEADING_TOLERANCE: f64 = 0.3;

/// Navigation goal; heading is only enforced when `theta` is given.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoalSpec {
    pub x: f64,
    pub y: f64,
    pub theta: Option<f64>,
}

impl GoalSpec {
    pub fn at(x: f64, y: f64) -> Self {
        Self { x, y, theta: None }
    }

    pub fn pose(&self) -> Pose2D {
        Pose2D::new(self.x, self.y, self.theta.unwrap_or(0.0))
    }

    pub fn position_reached(&self, pose: &Pose2D, pos_tol: f64) -> bool {
        math::hypot(self.x - pose.x, self.y - pose.y) <= pos_tol
    }

    pub fn reached(&self, pose: &Pose2D, pos_tol: f64, heading_tol: f64) -> bool {
        if !self.position_reached(pose, pos_tol) {
            return false;
        }
        match self.theta {
            None => true,
            Some(t) => math::abs(math::angle_diff(pose.theta, t)) <= heading_tol,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NavMode {
    Idle,
    Navigating,
    Paused,
}

/// What the tick loop must do with the base this tick.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Directive {
    Continue,
    /// Zero the commanded velocity this very tick.
    Stop,
    /// Re-issue the saved goal.
    Resume,
}

/// Owns the goal queue and the pause bookkeeping. While `Paused` the saved
/// goal is held verbatim and re-issued bit-identically on resume, through
/// any number of pause/resume cycles.
#[derive(Clone, Debug)]
pub struct GoalManager {
    mode: NavMode,
    active_goal: Option<GoalSpec>,
    saved_goal: Option<GoalSpec>,
    queue: VecDeque<GoalSpec>,
    pub position_tolerance: f64,
    pub heading_tolerance: f64,
}

impl GoalManager {
    pub fn new(goals: Vec<GoalSpec>) -> Self {
        let mut queue: VecDeque<GoalSpec> = goals.into();
        let active_goal = queue.pop_front();
        Self {
            mode: if active_goal.is_some() {
                NavMode::Navigating
            } else {
                NavMode::Idle
            },
            active_goal,
            saved_goal: None,
            queue,
            position_tolerance: DEFAULT_POSITION_TOLERANCE,
            heading_tolerance: DEFAULT_HEADING_TOLERANCE,
        }
    }

    pub fn mode(&self) -> NavMode {
        self.mode
    }

    pub fn active_goal(&self) -> Option<&GoalSpec> {
        self.active_goal.as_ref()
    }

    pub fn saved_goal(&self) -> Option<&GoalSpec> {
        self.saved_goal.as_ref()
    }

    pub fn remaining(&self) -> usize {
        self.queue.len()
    }

    pub fn all_done(&self) -> bool {
        self.mode == NavMode::Idle && self.queue.is_empty() && self.active_goal.is_none()
    }

    /// Presence transition. Navigating with a person in view saves and
    /// cancels the goal and demands an immediate stop; an empty view while
    /// paused re-issues exactly the saved goal.
    pub fn step(&mut self, person_present: usize) -> Directive {
        match (self.mode, person_present) {
            (NavMode::Navigating, n) if n > 0 => {
                self.saved_goal = self.active_goal.take();
                self.mode = NavMode::Paused;
                Directive::Stop
            }
            (NavMode::Paused, 0) => {
                self.active_goal = self.saved_goal.take();
                self.mode = NavMode::Navigating;
                Directive::Resume
            }
            _ => Directive::Continue,
        }
    }

    /// Goal progress; call once per tick after motion. Returns the goal
    /// just reached, if any, after advancing to the next queued goal or
    /// dropping to idle.
    pub fn update_progress(&mut self, pose: &Pose2D) -> Option<GoalSpec> {
        if self.mode != NavMode::Navigating {
            return None;
        }
        let reached = self
            .active_goal
            .filter(|g| g.reached(pose, self.position_tolerance, self.heading_tolerance))?;
        self.advance();
        Some(reached)
    }

    /// Drop the active goal (e.g. no path) and move on.
    pub fn abandon_active(&mut self) -> Option<GoalSpec> {
        if self.mode != NavMode::Navigating {
            return None;
        }
        let dropped = self.active_goal;
        self.advance();
        dropped
    }

    fn advance(&mut self) {
        self.active_goal = self.queue.pop_front();
        if self.active_goal.is_none() {
            self.mode = NavMode::Idle;
        }
    }

    /// Goal heading to rotate toward once the position tolerance is met but
    /// the heading tolerance is not.
    pub fn pending_heading(&self, pose: &Pose2D) -> Option<f64> {
        if self.mode != NavMode::Navigating {
            return None;
        }
        let goal = self.active_goal.as_ref()?;
        let target = goal.theta?;
        if goal.position_reached(pose, self.position_tolerance)
            && math::abs(math::angle_diff(pose.theta, target)) > self.heading_tolerance
        {
            Some(target)
        } else {
            None
        }
    }
}

/// Subdivide a goal list so consecutive goals are at most `max_spacing`
/// apart, inserting evenly spaced position-only intermediates.
pub fn split_goals(goals: &[GoalSpec], max_spacing: f64) -> Vec<GoalSpec> {
    debug_assert!(max_spacing > 0.0);
    let mut out = Vec::new();
    for (i, goal) in goals.iter().enumerate() {
        if i > 0 {
            let prev = goals[i - 1];
            let d = math::hypot(goal.x - prev.x, goal.y - prev.y);
            if d > max_spacing {
                let pieces = math::ceil(d / max_spacing) as usize;
                for k in 1..pieces {
                    let f = k as f64 / pieces as f64;
                    out.push(GoalSpec::at(
                        prev.x + f * (goal.x - prev.x),
                        prev.y + f * (goal.y - prev.y),
                    ));
                }
            }
        }
        out.push(*goal);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    #[test]
    fn person_pauses_and_saves_goal() {
        let g = GoalSpec::at(8.0, 4.0);
        let mut gm = GoalManager::new(vec![g]);
        assert_eq!(gm.mode(), NavMode::Navigating);
        assert_eq!(gm.step(2), Directive::Stop);
        assert_eq!(gm.mode(), NavMode::Paused);
        assert_eq!(gm.saved_goal(), Some(&g));
        assert_eq!(gm.active_goal(), None);
    }

    #[test]
    fn resume_reissues_saved_goal() {
        let g = GoalSpec::at(8.0, 4.0);
        let mut gm = GoalManager::new(vec![g]);
        gm.step(1);
        assert_eq!(gm.step(0), Directive::Resume);
        assert_eq!(gm.mode(), NavMode::Navigating);
        assert_eq!(gm.active_goal(), Some(&g));
        assert_eq!(gm.saved_goal(), None);
    }

    #[test]
    fn paused_with_person_is_idempotent() {
        let mut gm = GoalManager::new(vec![GoalSpec::at(1.0, 1.0)]);
        gm.step(1);
        let saved = *gm.saved_goal().unwrap();
        for _ in 0..10 {
            assert_eq!(gm.step(3), Directive::Continue);
        }
        assert_eq!(gm.saved_goal(), Some(&saved));
    }

    #[test]
    fn navigating_without_person_continues() {
        let mut gm = GoalManager::new(vec![GoalSpec::at(1.0, 1.0)]);
        assert_eq!(gm.step(0), Directive::Continue);
        assert_eq!(gm.mode(), NavMode::Navigating);
    }

    #[test]
    fn goal_queue_advances_then_idles() {
        let mut gm = GoalManager::new(vec![GoalSpec::at(1.0, 1.0), GoalSpec::at(2.0, 2.0)]);
        let at_first = Pose2D::new(1.05, 0.95, 0.0);
        let reached = gm.update_progress(&at_first).unwrap();
        assert_eq!(reached, GoalSpec::at(1.0, 1.0));
        assert_eq!(gm.active_goal(), Some(&GoalSpec::at(2.0, 2.0)));
        let at_second = Pose2D::new(2.0, 2.0, 1.0);
        gm.update_progress(&at_second).unwrap();
        assert!(gm.all_done());
    }

    #[test]
    fn heading_gate_when_theta_given() {
        let goal = GoalSpec {
            x: 1.0,
            y: 1.0,
            theta: Some(1.5),
        };
        let mut gm = GoalManager::new(vec![goal]);
        let wrong_heading = Pose2D::new(1.0, 1.0, 0.0);
        assert!(gm.update_progress(&wrong_heading).is_none());
        assert_eq!(gm.pending_heading(&wrong_heading), Some(1.5));
        let aligned = Pose2D::new(1.0, 1.0, 1.4);
        assert!(gm.update_progress(&aligned).is_some());
    }

    #[test]
    fn abandon_moves_to_next_goal() {
        let mut gm = GoalManager::new(vec![GoalSpec::at(1.0, 1.0), GoalSpec::at(2.0, 2.0)]);
        assert_eq!(gm.abandon_active(), Some(GoalSpec::at(1.0, 1.0)));
        assert_eq!(gm.active_goal(), Some(&GoalSpec::at(2.0, 2.0)));
        gm.abandon_active();
        assert!(gm.all_done());
    }

    #[test]
    fn split_keeps_spacing_under_limit() {
        let goals = vec![GoalSpec::at(0.0, 0.0), GoalSpec::at(10.0, 0.0)];
        let split = split_goals(&goals, 3.0);
        assert_eq!(split.len(), 5); // 0, 2.5, 5, 7.5, 10
        for pair in split.windows(2) {
            let d = math::hypot(pair[1].x - pair[0].x, pair[1].y - pair[0].y);
            assert!(d <= 3.0 + 1e-12);
        }
        assert_eq!(split.last(), Some(&GoalSpec::at(10.0, 0.0)));
    }

    #[test]
    fn split_leaves_close_goals_alone() {
        let goals = vec![GoalSpec::at(0.0, 0.0), GoalSpec::at(1.0, 1.0)];
        assert_eq!(split_goals(&goals, 3.0), goals);
    }

    proptest! {
        #[test]
        fn resume_is_bit_exact_over_many_cycles(
            x in -100.0f64..100.0,
            y in -100.0f64..100.0,
            theta in proptest::option::of(-3.1f64..3.1),
            cycles in 1usize..50,
        ) {
            let goal = GoalSpec { x, y, theta };
            let mut gm = GoalManager::new(vec![goal]);
            for _ in 0..cycles {
                prop_assert_eq!(gm.step(1), Directive::Stop);
                let saved = *gm.saved_goal().unwrap();
                prop_assert_eq!(saved.x.to_bits(), x.to_bits());
                prop_assert_eq!(saved.y.to_bits(), y.to_bits());
                prop_assert_eq!(gm.step(0), Directive::Resume);
                let active = *gm.active_goal().unwrap();
                prop_assert_eq!(active.x.to_bits(), x.to_bits());
                prop_assert_eq!(active.y.to_bits(), y.to_bits());
                prop_assert_eq!(
                    active.theta.map(f64::to_bits),
                    theta.map(f64::to_bits)
                );
            }
        }

        #[test]
        fn split_never_exceeds_spacing(
            xs in proptest::collection::vec((-20.0f64..20.0, -20.0f64..20.0), 2..8),
            max in 0.5f64..5.0,
        ) {
            let goals: Vec<GoalSpec> = xs.iter().map(|&(x, y)| GoalSpec::at(x, y)).collect();
            let split = split_goals(&goals, max);
            for pair in split.windows(2) {
                let d = math::hypot(pair[1].x - pair[0].x, pair[1].y - pair[0].y);
                prop_assert!(d <= max + 1e-9);
            }
        }
    }
}
