//! Planar geometry shared by both engines: positions, the world rectangle
//! and particle identifiers.

use std::fmt;
use std::ops::{Add, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A position or displacement in world units.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn scale(self, k: f64) -> Self {
        Self::new(self.x * k, self.y * k)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Euclidean distance between two points.
pub fn euclidean_distance(a: Vec2, b: Vec2) -> f64 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    (dx * dx + dy * dy).sqrt()
}

/// Closed axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorldBounds {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Default for WorldBounds {
    fn default() -> Self {
        Self::square(0.0, 100.0)
    }
}

impl WorldBounds {
    /// Builds a rectangle, rejecting empty or non-finite extents.
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        let bounds = Self {
            x_min,
            x_max,
            y_min,
            y_max,
        };
        bounds.validate("world")?;
        Ok(bounds)
    }

    pub(crate) const fn square(lo: f64, hi: f64) -> Self {
        Self {
            x_min: lo,
            x_max: hi,
            y_min: lo,
            y_max: hi,
        }
    }

    /// Checks `x_min < x_max` and `y_min < y_max`; `key` prefixes the error.
    pub fn validate(&self, key: &str) -> Result<()> {
        let fields = [self.x_min, self.x_max, self.y_min, self.y_max];
        if fields.iter().any(|v| !v.is_finite()) {
            return Err(Error::config(key, "bounds must be finite"));
        }
        if self.x_min >= self.x_max {
            return Err(Error::config(
                format!("{key}.x_min"),
                format!(
                    "x_min ({}) must be below x_max ({})",
                    self.x_min, self.x_max
                ),
            ));
        }
        if self.y_min >= self.y_max {
            return Err(Error::config(
                format!("{key}.y_min"),
                format!(
                    "y_min ({}) must be below y_max ({})",
                    self.y_min, self.y_max
                ),
            ));
        }
        Ok(())
    }

    pub fn contains(&self, p: Vec2) -> bool {
        (self.x_min..=self.x_max).contains(&p.x) && (self.y_min..=self.y_max).contains(&p.y)
    }

    /// True when `other` lies entirely inside `self`.
    pub fn encloses(&self, other: &WorldBounds) -> bool {
        other.x_min >= self.x_min
            && other.x_max <= self.x_max
            && other.y_min >= self.y_min
            && other.y_max <= self.y_max
    }

    pub fn center(&self) -> Vec2 {
        Vec2::new(
            0.5 * (self.x_min + self.x_max),
            0.5 * (self.y_min + self.y_max),
        )
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }
}

/// Clamps each component of `p` into the world rectangle.
pub fn clamp_to_world(p: Vec2, w: &WorldBounds) -> Vec2 {
    Vec2::new(p.x.clamp(w.x_min, w.x_max), p.y.clamp(w.y_min, w.y_max))
}

/// Index of a particle in the swarm arrays. Stable for the whole run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParticleId(pub usize);

impl ParticleId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for ParticleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
