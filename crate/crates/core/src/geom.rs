//! Small 2D geometry helpers shared by the world simulation and mapping.

use crate::math;
use serde::{Deserialize, Serialize};

/// Axis-aligned rectangle, `min` inclusive, `max` inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: (f64, f64),
    pub max: (f64, f64),
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self {
            min: (x0.min(x1), y0.min(y1)),
            max: (x0.max(x1), y0.max(y1)),
        }
    }

    pub fn contains(&self, p: (f64, f64)) -> bool {
        p.0 >= self.min.0 && p.0 <= self.max.0 && p.1 >= self.min.1 && p.1 <= self.max.1
    }

    /// Euclidean distance from a point to the rectangle (0 inside).
    pub fn distance_to(&self, p: (f64, f64)) -> f64 {
        let dx = (self.min.0 - p.0).max(0.0).max(p.0 - self.max.0);
        let dy = (self.min.1 - p.1).max(0.0).max(p.1 - self.max.1);
        math::hypot(dx, dy)
    }

    /// Closed-set overlap test against another rectangle.
    pub fn intersects(&self, other: &Rect) -> bool {
        self.min.0 <= other.max.0
            && self.max.0 >= other.min.0
            && self.min.1 <= other.max.1
            && self.max.1 >= other.min.1
    }
}

/// First hit distance of the ray `origin + t*dir` (unit `dir`) against the
/// rectangle boundary, for `t >= 0`. Slab method.
pub fn ray_rect(origin: (f64, f64), dir: (f64, f64), rect: &Rect) -> Option<f64> {
    let mut t_near = f64::NEG_INFINITY;
    let mut t_far = f64::INFINITY;
    for axis in 0..2 {
        let (o, d, lo, hi) = if axis == 0 {
            (origin.0, dir.0, rect.min.0, rect.max.0)
        } else {
            (origin.1, dir.1, rect.min.1, rect.max.1)
        };
        if d == 0.0 {
            if o < lo || o > hi {
                return None;
            }
        } else {
            let mut t0 = (lo - o) / d;
            let mut t1 = (hi - o) / d;
            if t0 > t1 {
                core::mem::swap(&mut t0, &mut t1);
            }
            t_near = t_near.max(t0);
            t_far = t_far.min(t1);
            if t_near > t_far {
                return None;
            }
        }
    }
    if t_far < 0.0 {
        None
    } else if t_near >= 0.0 {
        Some(t_near)
    } else {
        // Origin inside: report the exit point.
        Some(t_far)
    }
}

/// First hit distance of a ray against a circle of radius `r` at `center`.
pub fn ray_circle(origin: (f64, f64), dir: (f64, f64), center: (f64, f64), r: f64) -> Option<f64> {
    let ox = origin.0 - center.0;
    let oy = origin.1 - center.1;
    let b = ox * dir.0 + oy * dir.1;
    let c = ox * ox + oy * oy - r * r;
    let disc = b * b - c;
    if disc < 0.0 {
        return None;
    }
    let s = math::sqrt(disc);
    let t0 = -b - s;
    let t1 = -b + s;
    if t0 >= 0.0 {
        Some(t0)
    } else if t1 >= 0.0 {
        Some(t1)
    } else {
        None
    }
}

/// True when the open segment `a -> b` passes through the rectangle.
pub fn segment_hits_rect(a: (f64, f64), b: (f64, f64), rect: &Rect) -> bool {
    let dx = b.0 - a.0;
    let dy = b.1 - a.1;
    let len = math::hypot(dx, dy);
    if len == 0.0 {
        return rect.contains(a);
    }
    let dir = (dx / len, dy / len);
    match ray_rect(a, dir, rect) {
        Some(t) => t <= len,
        None => false,
    }
}
