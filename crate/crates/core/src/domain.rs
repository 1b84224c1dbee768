use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Interval> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(GeomError::InvalidDomain(format!("[{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Signed distance to the nearest end, positive inside.
    pub fn margin(&self, x: f64) -> f64 {
        (x - self.lo).min(self.hi - x)
    }

    pub fn lerp(&self, s: f64) -> f64 {
        self.lo + s * (self.hi - self.lo)
    }
}

/// Rectangle `[u.lo, u.hi] x [v.lo, v.hi]` in the parameter plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub u: Interval,
    pub v: Interval,
}

impl Rect {
    pub fn new(u: Interval, v: Interval) -> Rect {
        Rect { u, v }
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        self.u.contains(u) && self.v.contains(v)
    }

    pub fn margin(&self, u: f64, v: f64) -> f64 {
        self.u.margin(u).min(self.v.margin(v))
    }
}
