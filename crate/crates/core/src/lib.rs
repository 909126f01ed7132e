//! Deterministic 2D simulation and control library for a mobile
//! fever-screening robot.
//!
//! The crate is split along the robot's subsystems:
//!
//! - [`world`]: differential-drive robot, scripted people and sensor
//!   simulation (lidar, detection camera, thermal camera)
//! - [`servo`]: pan-tilt alignment law turning pixel error into joint commands
//! - [`thermal`]: coordinate mapping, nine-point sampling and fever debounce
//! - [`chat`]: intent-matching dialog engine for the screening conversation
//! - [`nav`]: occupancy mapping, global/local planners and the goal manager
//! - [`harness`]: the tick loop wiring everything together
//!
//! Everything is `no_std`-compatible (with `alloc`); float math goes through
//! [`math`] so results are bit-identical across platforms. All randomness
//! comes from one seeded [`rng::SimRng`] in a documented call order, which
//! makes whole runs reproducible byte for byte.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod chat;
pub mod event;
pub mod geom;
pub mod harness;
pub mod math;
pub mod nav;
pub mod rng;
pub mod scenario;
pub mod servo;
pub mod thermal;
pub mod world;

pub use world::{Detection, LidarScan, Person, Pose2D, RobotState, ThermalFrame, VelocityCommand, World};
