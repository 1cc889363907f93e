use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::interchange::ObjectClass;

/// Closed-form motion primitive. Positions are evaluated at time `t`
/// measured from the script's start.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "primitive")]
pub enum Motion {
    ConstantVelocity {
        origin: [f64; 3],
        velocity: [f64; 3],
    },
    /// Horizontal circle around `center`; positive `angular_speed` is
    /// counterclockwise seen from +z.
    Circle {
        center: [f64; 3],
        radius: f64,
        angular_speed: f64,
        phase: f64,
    },
    /// Straight legs at constant velocity; turns happen at leg boundaries.
    Piecewise { origin: [f64; 3], legs: Vec<Leg> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Leg {
    pub duration: f64,
    pub velocity: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Shape {
    Sphere { radius: f64 },
    Box { half_extents: [f64; 3] },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotionScript {
    pub object_id: String,
    pub class: ObjectClass,
    pub motion: Motion,
    /// Clip time at which the object appears.
    pub start: f64,
    pub duration: f64,
    pub shape: Shape,
    pub confidence: f64,
}

impl MotionScript {
    pub fn new(object_id: impl Into<String>, class: ObjectClass, motion: Motion, duration: f64) -> Self {
        Self {
            object_id: object_id.into(),
            class,
            motion,
            start: 0.0,
            duration,
            shape: Shape::Sphere { radius: 1.0 },
            confidence: 0.9,
        }
    }

    pub fn with_shape(mut self, shape: Shape) -> Self {
        self.shape = shape;
        self
    }

    pub fn end(&self) -> f64 {
        self.start + self.duration
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Synth(format!("{}: {m}", self.object_id)));
        if !(self.duration > 0.0 && self.duration <= crate::interchange::MAX_DURATION) {
            return bad(format!("duration {} outside (0, 20]", self.duration));
        }
        if !(self.start >= 0.0 && self.start.is_finite()) {
            return bad(format!("start {} must be >= 0", self.start));
        }
        if !(0.0..=1.0).contains(&self.confidence) {
            return bad(format!("confidence {} outside [0, 1]", self.confidence));
        }
        match &self.motion {
            Motion::Circle { radius, angular_speed, .. } => {
                if !(*radius > 0.0 && radius.is_finite() && angular_speed.is_finite()) {
                    return bad(format!("circle needs finite radius > 0, got {radius}"));
                }
            }
            Motion::Piecewise { legs, .. } => {
                if legs.is_empty() || legs.iter().any(|l| !(l.duration > 0.0)) {
                    return bad("piecewise motion needs legs with positive durations".into());
                }
            }
            Motion::ConstantVelocity { .. } => {}
        }
        match self.shape {
            Shape::Sphere { radius } if radius <= 0.0 => bad("sphere radius must be > 0".into()),
            Shape::Box { half_extents } if half_extents.iter().any(|h| *h <= 0.0) => {
                bad("box half extents must be > 0".into())
            }
            _ => Ok(()),
        }
    }

    /// Whether the object exists at clip time `t`.
    pub fn active(&self, t: f64) -> bool {
        t >= self.start - 1e-9 && t <= self.end() + 1e-9
    }

    /// Center at clip time `t`.
    pub fn position(&self, t: f64) -> Vec3 {
        self.motion.position(t - self.start)
    }

    pub fn velocity(&self, t: f64) -> Vec3 {
        self.motion.velocity(t - self.start)
    }

    /// Arc length of the continuous path between clip times `s` and `e`.
    pub fn path_length(&self, s: f64, e: f64) -> f64 {
        self.motion.path_length(s - self.start, e - self.start)
    }

    /// Sum of chords between samples at `s, s + step, ..., e`.
    pub fn chord_length(&self, s: f64, e: f64, step: f64) -> f64 {
        let n = ((e - s) / step).round() as usize;
        (0..n)
            .map(|i| {
                let a = s + i as f64 * step;
                (self.position(a + step) - self.position(a)).norm()
            })
            .sum()
    }
}

impl Motion {
    pub fn position(&self, t: f64) -> Vec3 {
        match self {
            Motion::ConstantVelocity { origin, velocity } => Vec3::from(*origin) + Vec3::from(*velocity) * t,
            Motion::Circle { center, radius, angular_speed, phase } => {
                let a = phase + angular_speed * t;
                Vec3::from(*center) + Vec3::new(radius * a.cos(), radius * a.sin(), 0.0)
            }
            Motion::Piecewise { origin, legs } => {
                let mut p = Vec3::from(*origin);
                let mut remaining = t;
                for (i, leg) in legs.iter().enumerate() {
                    let last = i + 1 == legs.len();
                    let dt = if last { remaining } else { remaining.min(leg.duration) };
                    p += Vec3::from(leg.velocity) * dt;
                    remaining -= dt;
                    if remaining <= 0.0 {
                        break;
                    }
                }
                p
            }
        }
    }

    pub fn velocity(&self, t: f64) -> Vec3 {
        match self {
            Motion::ConstantVelocity { velocity, .. } => Vec3::from(*velocity),
            Motion::Circle { radius, angular_speed, phase, .. } => {
                let a = phase + angular_speed * t;
                Vec3::new(-a.sin(), a.cos(), 0.0) * (radius * angular_speed)
            }
            Motion::Piecewise { legs, .. } => {
                let mut acc = 0.0;
                for leg in legs {
                    acc += leg.duration;
                    if t < acc {
                        return Vec3::from(leg.velocity);
                    }
                }
                Vec3::from(legs.last().expect("validated non-empty").velocity)
            }
        }
    }

    pub fn path_length(&self, s: f64, e: f64) -> f64 {
        match self {
            Motion::ConstantVelocity { velocity, .. } => Vec3::from(*velocity).norm() * (e - s),
            Motion::Circle { radius, angular_speed, .. } => radius * angular_speed.abs() * (e - s),
            Motion::Piecewise { legs, .. } => {
                let mut total = 0.0;
                let mut leg_start = 0.0;
                for (i, leg) in legs.iter().enumerate() {
                    let leg_end = if i + 1 == legs.len() { f64::INFINITY } else { leg_start + leg.duration };
                    let overlap = (e.min(leg_end) - s.max(leg_start)).max(0.0);
                    total += Vec3::from(leg.velocity).norm() * overlap;
                    leg_start = leg_end;
                }
                total
            }
        }
    }
}
