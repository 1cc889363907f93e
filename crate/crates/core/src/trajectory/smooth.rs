use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::Trajectory;
use crate::geometry::{median_in_place, Vec3};
use crate::interchange::ObjectClass;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SmoothConfig {
    pub median_window: usize,
    pub mean_window: usize,
}

impl Default for SmoothConfig {
    fn default() -> Self {
        Self {
            median_window: 3,
            mean_window: 3,
        }
    }
}

/// Symmetric window around `i`, shrunk equally on both sides near the ends
/// so the first and last samples are passed through.
fn window(i: usize, n: usize, width: usize) -> std::ops::RangeInclusive<usize> {
    let r = (width / 2).min(i).min(n - 1 - i);
    i - r..=i + r
}

fn filter(points: &[Vec3], width: usize, reduce: impl Fn(&mut [f64]) -> f64) -> Vec<Vec3> {
    let n = points.len();
    (0..n)
        .map(|i| {
            let w = window(i, n, width);
            let mut out = Vec3::zeros();
            for axis in 0..3 {
                let mut vals: Vec<f64> = points[w.clone()].iter().map(|p| p[axis]).collect();
                out[axis] = reduce(&mut vals);
            }
            out
        })
        .collect()
}

/// Component-wise sliding median followed by a centered moving average.
/// Windows are symmetric and shrink toward the ends, so straight-line motion
/// passes through unchanged.
pub fn smooth(traj: &Trajectory, cfg: &SmoothConfig) -> Trajectory {
    let med = filter(traj.positions(), cfg.median_window.max(1), |v| {
        median_in_place(v).expect("window is non-empty")
    });
    let mean = filter(&med, cfg.mean_window.max(1), |v| {
        v.iter().sum::<f64>() / v.len() as f64
    });
    traj.with_positions(mean)
}

/// Maximum plausible speed per class, m/s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedCaps(pub BTreeMap<ObjectClass, f64>);

impl Default for SpeedCaps {
    fn default() -> Self {
        SpeedCaps(
            ObjectClass::ALL
                .iter()
                .map(|&c| (c, if c == ObjectClass::Person { 12.0 } else { 60.0 }))
                .collect(),
        )
    }
}

impl SpeedCaps {
    pub fn cap(&self, class: ObjectClass) -> f64 {
        self.0.get(&class).copied().unwrap_or(60.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RejectReason {
    TooShort { samples: usize, required: usize },
    SpeedCap { at: f64, speed: f64, cap: f64 },
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::TooShort { samples, required } => {
                write!(f, "too short ({samples} samples, {required} required)")
            }
            RejectReason::SpeedCap { at, speed, cap } => {
                write!(f, "speed cap ({speed:.2} m/s > {cap} m/s at t = {at} s)")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Plausibility {
    Accept,
    Reject(RejectReason),
}

impl Plausibility {
    pub fn is_accept(&self) -> bool {
        matches!(self, Plausibility::Accept)
    }
}

pub fn plausibility_filter(traj: &Trajectory, caps: &SpeedCaps, min_samples: usize) -> Plausibility {
    if traj.len() < min_samples {
        return Plausibility::Reject(RejectReason::TooShort {
            samples: traj.len(),
            required: min_samples,
        });
    }
    let cap = caps.cap(traj.class());
    for (i, w) in traj.positions().windows(2).enumerate() {
        let speed = (w[1] - w[0]).norm() / traj.grid_step();
        if speed > cap {
            return Plausibility::Reject(RejectReason::SpeedCap {
                at: traj.time(i),
                speed,
                cap,
            });
        }
    }
    Plausibility::Accept
}
