//! Temperature extraction pipeline: map detection-image coordinates onto the
//! thermal frame, take the nine-point maximum, debounce consecutive readings
//! and declare fever at the threshold.

use thiserror::Error;

use crate::math;
use crate::world::{Detection, ThermalFrame, IMAGE_H, IMAGE_W, THERMAL_H, THERMAL_W};

#[derive(Debug, Error, PartialEq)]
pub enum ThermalError {
    #[error("point ({x}, {y}) outside the {w}x{h} detection image")]
    OutOfImage { x: f64, y: f64, w: f64, h: f64 },
}

/// Coordinate on the 160x120 thermal grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ThermalPoint {
    pub u: usize,
    pub v: usize,
}

/// Uniform quarter-scale mapping from the 640x480 detection image into the
/// thermal frame, floor-then-clamp on both axes.
pub fn map_to_thermal(x: f64, y: f64) -> Result<ThermalPoint, ThermalError> {
    if !(0.0..=IMAGE_W).contains(&x) || !(0.0..=IMAGE_H).contains(&y) {
        return Err(ThermalError::OutOfImage {
            x,
            y,
            w: IMAGE_W,
            h: IMAGE_H,
        });
    }
    let u = math::clamp(math::floor(x * THERMAL_W as f64 / IMAGE_W), 0.0, (THERMAL_W - 1) as f64);
    let v = math::clamp(math::floor(y * THERMAL_H as f64 / IMAGE_H), 0.0, (THERMAL_H - 1) as f64);
    Ok(ThermalPoint {
        u: u as usize,
        v: v as usize,
    })
}

/// The 3x3 neighborhood around `p` at one-pixel spacing; out-of-bounds
/// neighbors clamp to the frame edge so the sample count stays at nine.
pub fn sample_nine(frame: &ThermalFrame, p: ThermalPoint) -> [f64; 9] {
    let mut out = [0.0; 9];
    let mut i = 0;
    for dv in -1i64..=1 {
        for du in -1i64..=1 {
            let u = (p.u as i64 + du).clamp(0, THERMAL_W as i64 - 1) as usize;
            let v = (p.v as i64 + dv).clamp(0, THERMAL_H as i64 - 1) as usize;
            out[i] = frame.at(u, v);
            i += 1;
        }
    }
    out
}

/// Maximum of the nine samples.
pub fn max_temperature(samples: &[f64; 9]) -> f64 {
    samples.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Consecutive-over-threshold counter. A reading above the threshold
/// increments the run, anything else resets it; fever fires exactly when the
/// run reaches `required`, and the counter resets on firing so the same
/// person can be re-screened later.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DebounceState {
    pub consecutive_over: u32,
    pub threshold: f64,
    pub required: u32,
    pub last_reading: Option<f64>,
}

impl Default for DebounceState {
    fn default() -> Self {
        Self::new(38.0, 3)
    }
}

impl DebounceState {
    pub fn new(threshold: f64, required: u32) -> Self {
        debug_assert!(required >= 1);
        Self {
            consecutive_over: 0,
            threshold,
            required,
            last_reading: None,
        }
    }

    pub fn reset(&mut self) {
        self.consecutive_over = 0;
    }

    /// Feed one reading; returns true exactly on the fever trigger.
    pub fn update(&mut self, reading: f64) -> bool {
        self.last_reading = Some(reading);
        if reading > self.threshold {
            self.consecutive_over += 1;
            if self.consecutive_over >= self.required {
                self.consecutive_over = 0;
                return true;
            }
        } else {
            self.consecutive_over = 0;
        }
        false
    }
}

/// Outcome of one screening tick.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScreenOutcome {
    pub fever: bool,
    pub reading: Option<f64>,
}

/// Full per-tick pipeline for one tracked person: bbox center -> thermal
/// point -> nine samples -> max -> debounce. An absent detection resets the
/// run (leaving the frustum ends it).
pub fn screen_tick(
    frame: &ThermalFrame,
    detection: Option<&Detection>,
    state: &mut DebounceState,
) -> ScreenOutcome {
    let Some(det) = detection else {
        state.reset();
        return ScreenOutcome {
            fever: false,
            reading: None,
        };
    };
    let (cx, cy) = det.bbox.center();
    // Valid bboxes are clamped into the image, so the mapping cannot fail.
    let p = map_to_thermal(cx, cy).expect("bbox center inside image");
    let reading = max_temperature(&sample_nine(frame, p));
    let fever = state.update(reading);
    ScreenOutcome {
        fever,
        reading: Some(reading),
    }
}
