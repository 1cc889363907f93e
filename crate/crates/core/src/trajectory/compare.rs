use serde::{Deserialize, Serialize};

use super::{speed, traveled_distance, KinematicsConfig, TimeInterval, Trajectory};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareConfig {
    /// The larger quantity must be at least this multiple of the smaller.
    pub ratio_margin: f64,
    pub same_max_deg: f64,
    pub different_min_deg: f64,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self {
            ratio_margin: 1.2,
            same_max_deg: 30.0,
            different_min_deg: 90.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Object A is larger (farther or faster).
    AGreater,
    BGreater,
    Ambiguous,
}

impl Verdict {
    pub fn swapped(self) -> Self {
        match self {
            Verdict::AGreater => Verdict::BGreater,
            Verdict::BGreater => Verdict::AGreater,
            Verdict::Ambiguous => Verdict::Ambiguous,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionVerdict {
    Same,
    Different,
    Ambiguous,
}

fn ratio_verdict(a: f64, b: f64, margin: f64) -> Verdict {
    if a > b && a >= margin * b {
        Verdict::AGreater
    } else if b > a && b >= margin * a {
        Verdict::BGreater
    } else {
        Verdict::Ambiguous
    }
}

pub fn compare_distance(a: &Trajectory, b: &Trajectory, window: TimeInterval, cfg: &CompareConfig) -> Result<Verdict> {
    let da = traveled_distance(a, window.start, window.end)?;
    let db = traveled_distance(b, window.start, window.end)?;
    Ok(ratio_verdict(da, db, cfg.ratio_margin))
}

pub fn compare_speed(a: &Trajectory, b: &Trajectory, window: TimeInterval, cfg: &CompareConfig) -> Result<Verdict> {
    let sa = speed(a, window.start, window.end)?;
    let sb = speed(b, window.start, window.end)?;
    Ok(ratio_verdict(sa, sb, cfg.ratio_margin))
}

/// Compares net ground-plane displacements over the window.
pub fn same_direction(
    a: &Trajectory,
    b: &Trajectory,
    window: TimeInterval,
    kin: &KinematicsConfig,
    cfg: &CompareConfig,
) -> Result<DirectionVerdict> {
    let net = |t: &Trajectory| -> Result<_> {
        let (i, j) = (t.require_index(window.start)?, t.require_index(window.end)?);
        if i >= j {
            return Err(Error::InvalidArgument(format!(
                "window start {} must precede end {}",
                window.start, window.end
            )));
        }
        let d = kin.up_axis.ground(&(t.positions()[j] - t.positions()[i]));
        if d.norm() < kin.epsilon_move {
            return Err(Error::StationaryWindow(t.object_id().to_string()));
        }
        Ok(d)
    };
    let (da, db) = (net(a)?, net(b)?);
    let phi = da.cross(&db).norm().atan2(da.dot(&db)).to_degrees();
    Ok(if phi <= cfg.same_max_deg {
        DirectionVerdict::Same
    } else if phi >= cfg.different_min_deg {
        DirectionVerdict::Different
    } else {
        DirectionVerdict::Ambiguous
    })
}
