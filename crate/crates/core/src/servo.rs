//! Pan-tilt alignment law: convert bounding-box pixel error into incremental
//! yaw/pitch commands that drive the target to the image center.
//!
//! The small-angle law maps pixel offset linearly onto bearing angle,
//! `angle = angle_max * offset / offset_max`, with the 60 degree field of
//! view fixing `angle_max = pi/6` on both axes. Against the simulator's
//! pinhole camera the law is only approximate, which is exactly what the
//! closed-loop tests measure.

use thiserror::Error;

use crate::math;
use crate::world::{Detection, RobotState, IMAGE_H, IMAGE_W};

#[derive(Debug, Error, PartialEq)]
pub enum ServoError {
    #[error("pixel offset {value} outside +-{limit}")]
    PixelOutOfRange { value: f64, limit: f64 },
}

/// Geometry of the 3-DOF arm reduced to a pan-tilt unit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ManipulatorModel {
    /// Radial offset of the camera from the pan axis, m.
    pub radial_offset: f64,
    pub px_max: f64,
    pub py_max: f64,
    pub alpha_max: f64,
    pub beta_max: f64,
    pub pan_limit: f64,
    pub tilt_limit: f64,
}

impl Default for ManipulatorModel {
    fn default() -> Self {
        Self {
            radial_offset: 0.1,
            px_max: IMAGE_W / 2.0,
            py_max: IMAGE_H / 2.0,
            alpha_max: math::FRAC_PI_6,
            beta_max: math::FRAC_PI_6,
            pan_limit: math::FRAC_PI_2,
            tilt_limit: math::FRAC_PI_4,
        }
    }
}

/// Center-origin pixel error: `px` rightward positive, `py` upward positive.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PixelOffset {
    pub px: f64,
    pub py: f64,
}

/// Absolute pan/tilt target produced by one alignment step, already clamped
/// to the joint limits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JointTarget {
    pub yaw: f64,
    pub pitch: f64,
}

/// Offset of the bbox center from the image center, up-positive.
pub fn center_offset(d: &Detection) -> PixelOffset {
    let (cx, cy) = d.bbox.center();
    PixelOffset {
        px: cx - IMAGE_W / 2.0,
        py: IMAGE_H / 2.0 - cy,
    }
}

impl ManipulatorModel {
    /// Yaw increment for a horizontal pixel offset.
    pub fn yaw_from_pixel(&self, px: f64) -> Result<f64, ServoError> {
        if math::abs(px) > self.px_max {
            return Err(ServoError::PixelOutOfRange {
                value: px,
                limit: self.px_max,
            });
        }
        Ok(self.alpha_max * (px / self.px_max))
    }

    /// Pitch increment for a vertical pixel offset.
    pub fn pitch_from_pixel(&self, py: f64) -> Result<f64, ServoError> {
        if math::abs(py) > self.py_max {
            return Err(ServoError::PixelOutOfRange {
                value: py,
                limit: self.py_max,
            });
        }
        Ok(self.beta_max * (py / self.py_max))
    }

    /// Joint angles one alignment increment away from the current state,
    /// clamped to the joint limits.
    ///
    /// Offsets coming from valid bounding boxes always satisfy the pixel
    /// bounds, so the law cannot fail here.
    pub fn joint_target(&self, state: &RobotState, offset: PixelOffset) -> JointTarget {
        let yaw = self.alpha_max * (math::clamp(offset.px, -self.px_max, self.px_max) / self.px_max);
        let pitch = self.beta_max * (math::clamp(offset.py, -self.py_max, self.py_max) / self.py_max);
        JointTarget {
            yaw: math::clamp(state.pan + yaw, -self.pan_limit, self.pan_limit),
            pitch: math::clamp(state.tilt + pitch, -self.tilt_limit, self.tilt_limit),
        }
    }

    /// One incremental servo step: apply [`Self::joint_target`] and split
    /// pitch equally across the two pitch actuators.
    pub fn align_step(&self, state: &RobotState, offset: PixelOffset) -> RobotState {
        let target = self.joint_target(state, offset);
        let mut next = *state;
        next.pan = target.yaw;
        next.tilt = target.pitch;
        next.tilt_split = [next.tilt / 2.0, next.tilt / 2.0];
        next
    }
}

/// Relative error of replacing `R + D` by `D`: `R / (R + D)`.
pub fn approximation_error(radial_offset: f64, distance: f64) -> f64 {
    debug_assert!(radial_offset >= 0.0 && distance > 0.0);
    radial_offset / (radial_offset + distance)
}

/// Among multiple detections, pick the one whose bbox center lies nearest
/// the image center; ties break toward the lowest person id.
pub fn pick_servo_target(detections: &[Detection]) -> Option<&Detection> {
    let mut best: Option<(&Detection, f64)> = None;
    for d in detections {
        let off = center_offset(d);
        let dist2 = off.px * off.px + off.py * off.py;
        let better = match best {
            None => true,
            Some((b, bd)) => dist2 < bd || (dist2 == bd && d.person_id < b.person_id),
        };
        if better {
            best = Some((d, dist2));
        }
    }
    best.map(|(d, _)| d)
}
