//! Object trajectories on a fixed time grid and every kinematic quantity
//! derived from them: traveled distance, speed, clock directions, direction
//! intervals, smoothing, plausibility checks and pairwise comparisons.

mod compare;
mod direction;
mod kinematics;
mod resample;
mod smooth;

use serde::{Deserialize, Serialize};

pub use compare::{compare_distance, compare_speed, same_direction, CompareConfig, DirectionVerdict, Verdict};
pub use direction::{
    clock_direction, clockwise_angle, direction_angle, direction_intervals, longest_interval,
    reference_direction, step_labels, DirectionLabel, DirectionSample,
};
pub use kinematics::{speed, total_distance, traveled_distance, MS_TO_KMH};
pub use smooth::{plausibility_filter, smooth, Plausibility, RejectReason, SmoothConfig, SpeedCaps};

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::interchange::ObjectClass;

/// Default grid spacing in seconds.
pub const GRID_STEP: f64 = 0.5;
/// Upper bound on samples per trajectory (a 40-frame clip).
pub const MAX_SAMPLES: usize = 40;

const GRID_EPS: f64 = 1e-9;

/// World "up" used to define the ground plane and clockwise orientation
/// (clockwise as seen from above).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "UpAxisRepr", into = "UpAxisRepr")]
pub struct UpAxis(Vec3);

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum UpAxisRepr {
    Named(String),
    Vector([f64; 3]),
}

impl TryFrom<UpAxisRepr> for UpAxis {
    type Error = Error;
    fn try_from(r: UpAxisRepr) -> Result<Self> {
        match r {
            UpAxisRepr::Named(s) => s.parse(),
            UpAxisRepr::Vector(v) => UpAxis::new(Vec3::from(v)),
        }
    }
}

impl From<UpAxis> for UpAxisRepr {
    fn from(u: UpAxis) -> Self {
        UpAxisRepr::Vector([u.0.x, u.0.y, u.0.z])
    }
}

impl std::str::FromStr for UpAxis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let v = match s {
            "x" | "+x" => Vec3::x(),
            "-x" => -Vec3::x(),
            "y" | "+y" => Vec3::y(),
            "-y" => -Vec3::y(),
            "z" | "+z" => Vec3::z(),
            "-z" => -Vec3::z(),
            other => {
                return Err(Error::InvalidArgument(format!(
                    "up axis must be one of x, -x, y, -y, z, -z, got {other:?}"
                )))
            }
        };
        Ok(UpAxis(v))
    }
}

impl Default for UpAxis {
    fn default() -> Self {
        UpAxis(Vec3::z())
    }
}

impl UpAxis {
    pub fn new(v: Vec3) -> Result<Self> {
        let n = v.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidArgument(format!("up axis {v:?} has no direction")));
        }
        Ok(UpAxis(v / n))
    }

    pub fn vector(&self) -> &Vec3 {
        &self.0
    }

    /// Removes the vertical component.
    pub fn ground(&self, v: &Vec3) -> Vec3 {
        v - self.0 * self.0.dot(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KinematicsConfig {
    pub grid_step: f64,
    /// Each grid point needs a raw sample within this many seconds.
    pub coverage_tolerance: f64,
    /// Ground-plane displacements shorter than this (meters) are stationary.
    pub epsilon_move: f64,
    pub up_axis: UpAxis,
}

impl Default for KinematicsConfig {
    fn default() -> Self {
        Self {
            grid_step: GRID_STEP,
            coverage_tolerance: GRID_STEP / 2.0,
            epsilon_move: 0.05,
            up_axis: UpAxis::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeInterval {
    pub start: f64,
    pub end: f64,
}

impl TimeInterval {
    pub fn new(start: f64, end: f64) -> Result<Self> {
        if !(start.is_finite() && end.is_finite() && 0.0 <= start && start < end) {
            return Err(Error::InvalidArgument(format!(
                "interval ({start}, {end}) must satisfy 0 <= start < end"
            )));
        }
        Ok(Self { start, end })
    }

    pub fn duration(&self) -> f64 {
        self.end - self.start
    }
}

/// One object's center positions on the grid `t_i = (first_index + i) * grid_step`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    object_id: String,
    class: ObjectClass,
    grid_step: f64,
    first_index: i64,
    positions: Vec<Vec3>,
}

impl Trajectory {
    pub fn new(
        object_id: impl Into<String>,
        class: ObjectClass,
        grid_step: f64,
        first_index: i64,
        positions: Vec<Vec3>,
    ) -> Result<Self> {
        if !(grid_step.is_finite() && grid_step > 0.0) {
            return Err(Error::InvalidTrajectory(format!("grid step {grid_step} must be > 0")));
        }
        if first_index < 0 {
            return Err(Error::InvalidTrajectory("grid starts before t = 0".into()));
        }
        if positions.len() < 2 {
            return Err(Error::InvalidTrajectory(format!(
                "{} sample(s); at least 2 required",
                positions.len()
            )));
        }
        if positions.len() > MAX_SAMPLES {
            return Err(Error::InvalidTrajectory(format!(
                "{} samples exceed the {MAX_SAMPLES}-sample budget",
                positions.len()
            )));
        }
        if let Some(i) = positions.iter().position(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(Error::InvalidTrajectory(format!("non-finite position at sample {i}")));
        }
        Ok(Self {
            object_id: object_id.into(),
            class,
            grid_step,
            first_index,
            positions,
        })
    }

    pub fn object_id(&self) -> &str {
        &self.object_id
    }

    pub fn class(&self) -> ObjectClass {
        self.class
    }

    pub fn grid_step(&self) -> f64 {
        self.grid_step
    }

    pub fn first_index(&self) -> i64 {
        self.first_index
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        (self.first_index + i as i64) as f64 * self.grid_step
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|i| self.time(i))
    }

    pub fn start(&self) -> f64 {
        self.time(0)
    }

    pub fn end(&self) -> f64 {
        self.time(self.len() - 1)
    }

    pub fn span(&self) -> TimeInterval {
        TimeInterval {
            start: self.start(),
            end: self.end(),
        }
    }

    /// Sample index of grid time `t`, if `t` lies on the grid inside the span.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let k = t / self.grid_step;
        let kr = k.round();
        if !t.is_finite() || (k - kr).abs() > GRID_EPS * kr.abs().max(1.0) {
            return None;
        }
        let i = kr as i64 - self.first_index;
        (0..self.len() as i64).contains(&i).then_some(i as usize)
    }

    pub(crate) fn require_index(&self, t: f64) -> Result<usize> {
        self.index_of(t).ok_or(Error::OffGrid {
            t,
            start: self.start(),
            end: self.end(),
        })
    }

    /// Same grid, new positions.
    pub(crate) fn with_positions(&self, positions: Vec<Vec3>) -> Self {
        debug_assert_eq!(positions.len(), self.positions.len());
        Self {
            positions,
            ..self.clone()
        }
    }

    pub fn resample(
        object_id: impl Into<String>,
        class: ObjectClass,
        raw: &[(f64, Vec3)],
        cfg: &KinematicsConfig,
    ) -> Result<Self> {
        resample::resample(object_id.into(), class, raw, cfg)
    }
}
