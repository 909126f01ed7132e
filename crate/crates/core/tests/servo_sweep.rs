//! Closed-loop servo convergence against the pinhole camera, swept over
//! initial bearings in one-degree steps on both axes.

use screenbot_core::math;
use screenbot_core::servo::{ManipulatorModel, PixelOffset};
use screenbot_core::world::{CameraModel, Pose2D, RobotState};

/// Drive one axis of the loop: project a point target at a fixed bearing
/// through the pinhole, apply align steps, and report per-step residuals
/// and pixel errors.
fn sweep_axis(bearing: f64, focal: f64, limit_px: f64, horizontal: bool) -> (Vec<f64>, Vec<f64>) {
    let m = ManipulatorModel::default();
    let mut state = RobotState::at(Pose2D::new(0.0, 0.0, 0.0));
    let mut residuals = Vec::new();
    let mut pixel_errors = Vec::new();
    for _ in 0..5 {
        let joint = if horizontal { state.pan } else { state.tilt };
        let px = math::clamp(focal * math::tan(bearing - joint), -limit_px, limit_px);
        let offset = if horizontal {
            PixelOffset { px, py: 0.0 }
        } else {
            PixelOffset { px: 0.0, py: px }
        };
        state = m.align_step(&state, offset);
        let joint = if horizontal { state.pan } else { state.tilt };
        residuals.push(math::abs(bearing - joint));
        pixel_errors.push(math::abs(
            math::clamp(focal * math::tan(bearing - joint), -limit_px, limit_px),
        ));
    }
    (residuals, pixel_errors)
}

#[test]
fn pan_axis_converges_for_all_bearings_to_30_degrees() {
    let cam = CameraModel::default();
    for deg in 1..=30 {
        let bearing = (deg as f64).to_radians();
        let (residuals, pixel_errors) = sweep_axis(bearing, cam.focal_h, 320.0, true);
        let mut prev = bearing;
        for (step, r) in residuals.iter().enumerate() {
            assert!(*r < prev + 1e-15, "bearing {deg}: step {step} grew {r} from {prev}");
            assert!(
                *r < 2.0f64.to_radians(),
                "bearing {deg}: residual {r} after step {step}"
            );
            prev = *r;
        }
        assert!(
            pixel_errors.iter().any(|&e| e < 10.0),
            "bearing {deg}: pixel error never fell below 10 px: {pixel_errors:?}"
        );
    }
}

#[test]
fn tilt_axis_converges_for_all_bearings_to_30_degrees() {
    let cam = CameraModel::default();
    for deg in 1..=30 {
        let bearing = (deg as f64).to_radians();
        let (residuals, pixel_errors) = sweep_axis(bearing, cam.focal_v, 240.0, false);
        for (step, r) in residuals.iter().enumerate() {
            assert!(
                *r < 2.0f64.to_radians(),
                "bearing {deg}: residual {r} after step {step}"
            );
        }
        assert!(
            pixel_errors.iter().any(|&e| e < 10.0),
            "bearing {deg}: pixel error never fell below 10 px: {pixel_errors:?}"
        );
    }
}

#[test]
fn negative_bearings_mirror_by_symmetry() {
    let cam = CameraModel::default();
    for deg in [-30, -17, -5, -1] {
        let bearing = (deg as f64).to_radians();
        let (residuals, pixel_errors) = sweep_axis(bearing, cam.focal_h, 320.0, true);
        assert!(residuals.last().unwrap() < &2.0f64.to_radians());
        assert!(pixel_errors.iter().any(|&e| e < 10.0));
    }
}
