//! Clock-face movement directions relative to an object's first heading.
//!
//! The first ground-plane displacement defines 12 o'clock. Later headings are
//! measured clockwise (seen from above) and binned into 30° sectors centered
//! on each hour.

use serde::{Deserialize, Serialize};

use super::{KinematicsConfig, TimeInterval, Trajectory};
use crate::error::{Error, Result};
use crate::geometry::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionLabel {
    Hour(u8),
    Stationary,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DirectionSample {
    /// Degrees clockwise from the reference, in `[0, 360)`.
    Angle(f64),
    Stationary,
}

/// Unit ground-plane vector of the first displacement.
pub fn reference_direction(traj: &Trajectory, cfg: &KinematicsConfig) -> Result<Vec3> {
    let p = traj.positions();
    let d = cfg.up_axis.ground(&(p[1] - p[0]));
    let magnitude = d.norm();
    if magnitude < cfg.epsilon_move {
        return Err(Error::StationaryStart {
            magnitude,
            epsilon: cfg.epsilon_move,
        });
    }
    Ok(d / magnitude)
}

/// Clockwise angle in degrees `[0, 360)` from `reference` to `v`, both taken
/// in the plane orthogonal to `up`.
pub fn clockwise_angle(reference: &Vec3, v: &Vec3, up: &Vec3) -> f64 {
    let ccw_sin = reference.cross(v).dot(up);
    let cos = reference.dot(v);
    let deg = (-ccw_sin).atan2(cos).to_degrees();
    let deg = if deg < 0.0 { deg + 360.0 } else { deg };
    // -tiny + 360 can round to 360; -0.0 normalizes to 0.0
    if deg >= 360.0 || deg == 0.0 {
        0.0
    } else {
        deg
    }
}

/// Heading of the step starting at grid time `t`.
pub fn direction_angle(traj: &Trajectory, t: f64, cfg: &KinematicsConfig) -> Result<DirectionSample> {
    let reference = reference_direction(traj, cfg)?;
    let i = traj.require_index(t)?;
    if i + 1 >= traj.len() {
        return Err(Error::OffGrid {
            t: t + traj.grid_step(),
            start: traj.start(),
            end: traj.end(),
        });
    }
    Ok(step_sample(traj, i, &reference, cfg))
}

fn step_sample(traj: &Trajectory, i: usize, reference: &Vec3, cfg: &KinematicsConfig) -> DirectionSample {
    let p = traj.positions();
    let d = cfg.up_axis.ground(&(p[i + 1] - p[i]));
    if d.norm() < cfg.epsilon_move {
        DirectionSample::Stationary
    } else {
        DirectionSample::Angle(clockwise_angle(reference, &d, cfg.up_axis.vector()))
    }
}

/// Bins a clockwise angle into an hour. Hour `k` covers `[30k - 15°, 30k + 15°)`,
/// with 12 covering `[345°, 15°)`.
pub fn clock_direction(angle_deg: f64) -> DirectionLabel {
    let a = angle_deg.rem_euclid(360.0);
    let hour = ((a / 30.0 + 0.5).floor() as i64).rem_euclid(12);
    DirectionLabel::Hour(if hour == 0 { 12 } else { hour as u8 })
}

/// Clock label of every step `i -> i + 1`.
pub fn step_labels(traj: &Trajectory, cfg: &KinematicsConfig) -> Result<Vec<DirectionLabel>> {
    let reference = reference_direction(traj, cfg)?;
    Ok((0..traj.len() - 1)
        .map(|i| match step_sample(traj, i, &reference, cfg) {
            DirectionSample::Angle(a) => clock_direction(a),
            DirectionSample::Stationary => DirectionLabel::Stationary,
        })
        .collect())
}

/// Maximal runs of consecutive steps labeled `hour`, as time intervals from
/// the first step's start to the last step's end.
pub fn direction_intervals(traj: &Trajectory, hour: u8, cfg: &KinematicsConfig) -> Result<Vec<TimeInterval>> {
    let labels = step_labels(traj, cfg)?;
    let target = DirectionLabel::Hour(hour);
    let mut out = Vec::new();
    let mut run_start: Option<usize> = None;
    for (i, label) in labels.iter().chain(std::iter::once(&DirectionLabel::Stationary)).enumerate() {
        match (run_start, *label == target && i < labels.len()) {
            (None, true) => run_start = Some(i),
            (Some(s), false) => {
                out.push(TimeInterval {
                    start: traj.time(s),
                    end: traj.time(i),
                });
                run_start = None;
            }
            _ => {}
        }
    }
    Ok(out)
}

/// Longest interval; the earliest wins ties.
pub fn longest_interval(intervals: &[TimeInterval]) -> Option<TimeInterval> {
    intervals
        .iter()
        .copied()
        .fold(None, |best: Option<TimeInterval>, iv| match best {
            Some(b) if b.duration() >= iv.duration() => Some(b),
            _ => Some(iv),
        })
}

#[cfg(test)]
mod tests {
    use super::super::testutil::*;
    use super::*;
    use proptest::prelude::*;

    fn cfg() -> KinematicsConfig {
        KinematicsConfig::default()
    }

    #[test]
    fn reference_projects_and_normalizes() {
        let t = traj(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.3], [2.0, 0.0, 0.0]]);
        assert_eq!(reference_direction(&t, &cfg()).unwrap(), Vec3::new(1.0, 0.0, 0.0));
        let t = traj(&[[0.0, 0.0, 0.0], [0.0, 0.0, 0.01], [2.0, 0.0, 0.0]]);
        assert!(matches!(reference_direction(&t, &cfg()), Err(Error::StationaryStart { .. })));
    }

    #[test]
    fn angles_against_reference() {
        let t = traj(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [3.0, 0.0, 0.0], [3.0, -1.0, 0.0], [3.0, -1.0, 0.0]]);
        assert_eq!(direction_angle(&t, 0.5, &cfg()).unwrap(), DirectionSample::Angle(0.0));
        assert_eq!(direction_angle(&t, 1.0, &cfg()).unwrap(), DirectionSample::Angle(90.0));
        assert_eq!(direction_angle(&t, 1.5, &cfg()).unwrap(), DirectionSample::Stationary);
        assert!(direction_angle(&t, 2.0, &cfg()).is_err());
    }

    #[test]
    fn clock_binning_table() {
        let h = |a| clock_direction(a);
        assert_eq!(h(0.0), DirectionLabel::Hour(12));
        assert_eq!(h(14.999), DirectionLabel::Hour(12));
        assert_eq!(h(15.0), DirectionLabel::Hour(1));
        assert_eq!(h(90.0), DirectionLabel::Hour(3));
        assert_eq!(h(270.0), DirectionLabel::Hour(9));
        assert_eq!(h(344.999), DirectionLabel::Hour(11));
        assert_eq!(h(345.0), DirectionLabel::Hour(12));
        assert_eq!(h(346.0), DirectionLabel::Hour(12));
    }

    #[test]
    fn constant_heading_is_twelve_throughout() {
        let pts: Vec<Vec3> = (0..=10).map(|i| Vec3::new(0.0, i as f64, 0.0)).collect();
        let t = traj_from(0, pts);
        let iv = direction_intervals(&t, 12, &cfg()).unwrap();
        assert_eq!(iv, vec![TimeInterval { start: 0.0, end: 5.0 }]);
        assert!(direction_intervals(&t, 7, &cfg()).unwrap().is_empty());
    }

    #[test]
    fn right_turn_at_three_seconds() {
        // heading +y until t = 3, then clockwise quarter turn to +x (up = z)
        let mut pts: Vec<Vec3> = (0..=6).map(|i| Vec3::new(0.0, i as f64, 0.0)).collect();
        for i in 1..=8 {
            pts.push(Vec3::new(i as f64, 6.0, 0.0));
        }
        let t = traj_from(0, pts);
        // per-step enumeration oracle
        let end = t.end();
        let labels = step_labels(&t, &cfg()).unwrap();
        let expected: Vec<_> = (0..labels.len())
            .map(|i| if t.time(i) < 3.0 { DirectionLabel::Hour(12) } else { DirectionLabel::Hour(3) })
            .collect();
        assert_eq!(labels, expected);
        assert_eq!(
            direction_intervals(&t, 3, &cfg()).unwrap(),
            vec![TimeInterval { start: 3.0, end }]
        );
    }

    #[test]
    fn longest_prefers_earliest_on_ties() {
        let a = TimeInterval { start: 0.0, end: 1.0 };
        let b = TimeInterval { start: 2.0, end: 4.0 };
        let c = TimeInterval { start: 5.0, end: 7.0 };
        assert_eq!(longest_interval(&[a, b, c]), Some(b));
        assert_eq!(longest_interval(&[]), None);
    }

    fn planar(r: f64) -> impl Strategy<Value = Vec3> {
        (-r..r, -r..r).prop_map(|(x, y)| Vec3::new(x, y, 0.0))
    }

    proptest! {
        #[test]
        fn unsigned_angle_matches_arccos(a in planar(10.0), b in planar(10.0)) {
            prop_assume!(a.norm() > 1e-3 && b.norm() > 1e-3);
            let cw = clockwise_angle(&a.normalize(), &b, &Vec3::z());
            let unsigned = if cw > 180.0 { 360.0 - cw } else { cw };
            let arccos = (a.dot(&b) / (a.norm() * b.norm())).clamp(-1.0, 1.0).acos().to_degrees();
            prop_assert!((unsigned - arccos).abs() < 1e-9 * 57.3, "{} vs {}", unsigned, arccos);
        }

        #[test]
        fn reference_is_unit(a in planar(50.0), z in -3.0..3.0f64) {
            prop_assume!(a.norm() > 0.05);
            let t = traj_from(0, vec![Vec3::zeros(), a + Vec3::new(0.0, 0.0, z)]);
            let r = reference_direction(&t, &cfg()).unwrap();
            prop_assert!((r.norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn labels_scale_invariant(pts in proptest::collection::vec(planar(30.0), 3..20), c in 0.1..10.0f64, pivot in planar(20.0)) {
            let t = traj_from(0, pts.clone());
            let scaled = traj_from(0, pts.iter().map(|p| pivot + (p - pivot) * c).collect());
            // stay away from the stationary threshold and bin edges
            let ok = |tr: &Trajectory| tr.positions().windows(2).all(|w| (w[1] - w[0]).norm() > 0.2);
            prop_assume!(ok(&t) && ok(&scaled));
            let r = reference_direction(&t, &cfg()).unwrap();
            let near_edge = t.positions().windows(2).any(|w| {
                let a = clockwise_angle(&r, &(w[1] - w[0]), &Vec3::z());
                ((a + 15.0) % 30.0).min(30.0 - (a + 15.0) % 30.0) < 1e-6
            });
            prop_assume!(!near_edge);
            prop_assert_eq!(step_labels(&t, &cfg()).unwrap(), step_labels(&scaled, &cfg()).unwrap());
        }

        #[test]
        fn intervals_partition_steps(pts in proptest::collection::vec(planar(5.0), 3..40)) {
            let t = traj_from(0, pts);
            prop_assume!(reference_direction(&t, &cfg()).is_ok());
            let labels = step_labels(&t, &cfg()).unwrap();
            let mut covered = vec![0usize; labels.len()];
            for hour in 1..=12u8 {
                for iv in direction_intervals(&t, hour, &cfg()).unwrap() {
                    let (i, j) = (t.index_of(iv.start).unwrap(), t.index_of(iv.end).unwrap());
                    for step in i..j {
                        prop_assert_eq!(labels[step], DirectionLabel::Hour(hour));
                        covered[step] += 1;
                    }
                }
            }
            for (step, label) in labels.iter().enumerate() {
                let expected = usize::from(*label != DirectionLabel::Stationary);
                prop_assert_eq!(covered[step], expected);
            }
        }
    }
}
