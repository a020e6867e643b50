//! Phase wrapping helpers. All phases are reported in `(-π, π]`.

use std::f64::consts::{PI, TAU};

/// Wraps an angle into `(-π, π]`.
pub fn wrap(angle: f64) -> f64 {
    if angle > -PI && angle <= PI {
        return angle;
    }
    let r = angle.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Wrapped difference `a - b` in `(-π, π]`.
pub fn wrapped_difference(a: f64, b: f64) -> f64 {
    wrap(a - b)
}
