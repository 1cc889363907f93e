use super::Trajectory;
use crate::error::{Error, Result};

/// Exact m/s to km/h conversion factor.
pub const MS_TO_KMH: f64 = 3.6;

fn window(traj: &Trajectory, s: f64, e: f64) -> Result<(usize, usize)> {
    let (i, j) = (traj.require_index(s)?, traj.require_index(e)?);
    if i >= j {
        return Err(Error::InvalidArgument(format!("window start {s} must precede end {e}")));
    }
    Ok((i, j))
}

/// Sum of Euclidean distances between consecutive grid samples in `[s, e]`, meters.
pub fn traveled_distance(traj: &Trajectory, s: f64, e: f64) -> Result<f64> {
    let (i, j) = window(traj, s, e)?;
    Ok(traj.positions()[i..=j]
        .windows(2)
        .map(|w| (w[1] - w[0]).norm())
        .sum())
}

pub fn total_distance(traj: &Trajectory) -> f64 {
    traveled_distance(traj, traj.start(), traj.end()).expect("span endpoints lie on the grid")
}

/// Average speed over `[s, e]` in km/h.
pub fn speed(traj: &Trajectory, s: f64, e: f64) -> Result<f64> {
    let (i, j) = window(traj, s, e)?;
    let meters = traveled_distance(traj, s, e)?;
    let seconds = (j - i) as f64 * traj.grid_step();
    Ok(meters / seconds * MS_TO_KMH)
}

#[cfg(test)]
mod tests {
    use super::super::testutil::*;
    use super::*;
    use crate::geometry::Vec3;

    #[test]
    fn unit_steps() {
        let t = traj(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0]]);
        assert_eq!(traveled_distance(&t, 0.0, 1.0).unwrap(), 2.0);
        assert_eq!(traveled_distance(&t, 0.5, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn stationary_is_zero() {
        let t = traj(&[[3.0, 1.0, 0.0]; 5]);
        assert_eq!(traveled_distance(&t, 0.0, 2.0).unwrap(), 0.0);
        assert_eq!(speed(&t, 0.0, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn circle_chord_sum() {
        // radius 10 m, 0.2 rad per step, 10 steps
        let pts: Vec<Vec3> = (0..=10)
            .map(|i| {
                let a = 0.2 * i as f64;
                Vec3::new(10.0 * a.cos(), 10.0 * a.sin(), 0.0)
            })
            .collect();
        let t = traj_from(0, pts);
        let d = traveled_distance(&t, 0.0, 5.0).unwrap();
        let expected = 10.0 * 2.0 * 10.0 * (0.1f64).sin();
        assert!((d - expected).abs() < 1e-9);
        assert!((expected - 19.966_683_329_365_6).abs() < 1e-9);
    }

    #[test]
    fn twenty_meters_in_four_seconds() {
        let pts: Vec<Vec3> = (0..=8).map(|i| Vec3::new(2.5 * i as f64, 0.0, 0.0)).collect();
        let t = traj_from(0, pts);
        assert_eq!(traveled_distance(&t, 0.0, 4.0).unwrap(), 20.0);
        assert_eq!(speed(&t, 0.0, 4.0).unwrap(), 18.0);
    }

    #[test]
    fn window_errors() {
        let t = traj(&[[0.0; 3], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]]);
        assert!(matches!(traveled_distance(&t, 0.25, 1.0), Err(Error::OffGrid { .. })));
        assert!(matches!(traveled_distance(&t, 0.0, 1.5), Err(Error::OffGrid { .. })));
        assert!(matches!(traveled_distance(&t, 1.0, 1.0), Err(Error::InvalidArgument(_))));
        assert!(speed(&t, 1.0, 0.5).is_err());
    }
}
