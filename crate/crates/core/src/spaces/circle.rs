//! The unit circle with its angular metric.
//!
//! Positively curved and not uniquely geodesic at antipodes, so this space is
//! *not* Hadamard. It exists to demonstrate how shrinkage can fail.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::geometry::GeodesicSpace;

/// An angle canonicalised to `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CirclePoint(f64);

impl CirclePoint {
    pub fn new(angle: f64) -> Self {
        let mut a = angle.rem_euclid(TAU);
        if a >= TAU {
            a = 0.0;
        }
        CirclePoint(a)
    }

    pub fn angle(&self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Circle;

/// Signed shortest rotation from `a` to `b`, in `(-π, π]`.
fn signed_gap(a: CirclePoint, b: CirclePoint) -> f64 {
    let mut diff = (b.0 - a.0).rem_euclid(TAU);
    if diff > PI {
        diff -= TAU;
    }
    diff
}

pub fn circle_distance(a: CirclePoint, b: CirclePoint) -> f64 {
    let diff = (a.0 - b.0).abs();
    diff.min(TAU - diff)
}

/// Moves from `a` toward `b` along the shorter arc by fraction `t`.
///
/// The second value is true when `a` and `b` are exactly antipodal, in which
/// case the counterclockwise arc is used.
pub fn circle_interpolate(a: CirclePoint, b: CirclePoint, t: f64) -> (CirclePoint, bool) {
    let diff = signed_gap(a, b);
    let antipodal = diff == PI;
    if t == 1.0 {
        return (b, antipodal);
    }
    (CirclePoint::new(a.0 + t * diff), antipodal)
}

impl GeodesicSpace for Circle {
    type Point = CirclePoint;

    fn distance(&self, x: &CirclePoint, y: &CirclePoint) -> f64 {
        circle_distance(*x, *y)
    }

    fn interpolate(&self, x: &CirclePoint, y: &CirclePoint, t: f64) -> CirclePoint {
        circle_interpolate(*x, *y, t).0
    }

    fn is_hadamard(&self) -> bool {
        false
    }
}
