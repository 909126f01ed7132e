//! Navigation stack: log-odds occupancy mapping, inflated-costmap A*
//! global planning, DWA local planning and the person-triggered goal
//! save/cancel/resume state machine.

pub mod astar;
pub mod costmap;
pub mod dwa;
pub mod goal;
pub mod grid;

pub use astar::{plan_global, PlanError};
pub use costmap::{Costmap, PlannerParams};
pub use dwa::{dwa_step, DwaParams};
pub use goal::{split_goals, Directive, GoalManager, GoalSpec, NavMode};
pub use grid::OccupancyGrid;
