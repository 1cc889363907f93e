use super::{KinematicsConfig, Trajectory};
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::interchange::ObjectClass;

const TIME_EPS: f64 = 1e-9;

/// Linear interpolation of raw timestamped centers onto the grid points that
/// fall inside the raw time span.
pub(super) fn resample(
    object_id: String,
    class: ObjectClass,
    raw: &[(f64, Vec3)],
    cfg: &KinematicsConfig,
) -> Result<Trajectory> {
    let step = cfg.grid_step;
    if raw.len() < 2 {
        return Err(Error::InvalidTrajectory(format!(
            "{object_id}: {} raw sample(s); at least 2 required",
            raw.len()
        )));
    }
    if let Some(i) = raw.windows(2).position(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::InvalidTrajectory(format!(
            "{object_id}: raw samples not strictly increasing in time at index {}",
            i + 1
        )));
    }
    let (t0, tn) = (raw[0].0, raw[raw.len() - 1].0);
    let k_first = (t0 / step - TIME_EPS).ceil().max(0.0) as i64;
    let k_last = (tn / step + TIME_EPS).floor() as i64;
    if k_last < k_first {
        return Err(Error::InvalidTrajectory(format!(
            "{object_id}: raw span [{t0}, {tn}] contains no grid point"
        )));
    }

    let mut positions = Vec::with_capacity((k_last - k_first + 1) as usize);
    for k in k_first..=k_last {
        let g = k as f64 * step;
        // first raw sample strictly after g (allowing for float noise)
        let j = raw.partition_point(|(t, _)| *t <= g + TIME_EPS);
        let before = j.checked_sub(1).map(|i| raw[i]);
        let after = raw.get(j).copied();
        let nearest = [before, after]
            .iter()
            .flatten()
            .map(|(t, _)| (t - g).abs())
            .fold(f64::INFINITY, f64::min);
        if nearest > cfg.coverage_tolerance + TIME_EPS {
            return Err(Error::CoverageGap {
                at: g,
                tolerance: cfg.coverage_tolerance,
            });
        }
        let p = match (before, after) {
            (Some((tb, pb)), _) if (tb - g).abs() <= TIME_EPS => pb,
            (Some((tb, pb)), Some((ta, pa))) => pb + (pa - pb) * ((g - tb) / (ta - tb)),
            (Some((_, pb)), None) => pb,
            (None, Some((_, pa))) => pa,
            (None, None) => unreachable!("raw has at least two samples"),
        };
        positions.push(p);
    }
    Trajectory::new(object_id, class, step, k_first, positions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg() -> KinematicsConfig {
        KinematicsConfig::default()
    }

    #[test]
    fn interpolates_between_brackets() {
        let raw = [(0.4, Vec3::zeros()), (1.1, Vec3::new(7.0, 0.0, 0.0))];
        let t = resample("a".into(), ObjectClass::Car, &raw, &cfg()).unwrap();
        assert_eq!(t.start(), 0.5);
        assert_eq!(t.len(), 2);
        assert!((t.positions()[0] - Vec3::new(1.0, 0.0, 0.0)).norm() < 1e-12);
        assert!((t.positions()[1] - Vec3::new(6.0, 0.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn on_grid_input_is_identity() {
        let raw: Vec<(f64, Vec3)> = (0..6)
            .map(|i| (i as f64 * 0.5 + 1.0, Vec3::new(i as f64 * 0.37, -(i as f64), 2.0)))
            .collect();
        let t = resample("a".into(), ObjectClass::Car, &raw, &cfg()).unwrap();
        assert_eq!(t.start(), 1.0);
        let back: Vec<(f64, Vec3)> = t.times().zip(t.positions().iter().copied()).collect();
        assert_eq!(back, raw);
    }

    #[test]
    fn gap_is_reported_with_location() {
        let raw = [(0.0, Vec3::zeros()), (0.5, Vec3::zeros()), (2.0, Vec3::zeros())];
        match resample("a".into(), ObjectClass::Car, &raw, &cfg()).unwrap_err() {
            Error::CoverageGap { at, .. } => assert_eq!(at, 1.0),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn rejects_unsorted_and_too_short() {
        let raw = [(1.0, Vec3::zeros()), (0.5, Vec3::zeros())];
        assert!(resample("a".into(), ObjectClass::Car, &raw, &cfg()).is_err());
        assert!(resample("a".into(), ObjectClass::Car, &raw[..1], &cfg()).is_err());
        // a single grid point inside the span is not a trajectory
        let raw = [(0.3, Vec3::zeros()), (0.7, Vec3::zeros())];
        assert!(resample("a".into(), ObjectClass::Car, &raw, &cfg()).is_err());
    }

    proptest! {
        // Piecewise-linear motion with knots at arbitrary times: the grid values
        // must equal the closed-form position of the polyline.
        #[test]
        fn matches_closed_form_polyline(
            t0 in 0.0..2.0f64,
            gaps in proptest::collection::vec(0.05..0.45f64, 3..30),
            vel in proptest::collection::vec((-20.0..20.0f64, -20.0..20.0f64, -2.0..2.0f64), 30),
        ) {
            let mut raw = vec![(t0, Vec3::new(1.0, -3.0, 0.5))];
            for (i, g) in gaps.iter().enumerate() {
                let (t, p) = raw[i];
                let v = Vec3::new(vel[i].0, vel[i].1, vel[i].2);
                raw.push((t + g, p + v * *g));
            }
            let tn = raw.last().unwrap().0;
            prop_assume!(((t0 / 0.5).ceil() as i64) < ((tn / 0.5).floor() as i64));
            let traj = resample("p".into(), ObjectClass::Car, &raw, &cfg()).unwrap();
            for (i, g) in traj.times().enumerate() {
                // closed form: locate the segment and evaluate p_k + v_k (g - t_k)
                let k = (0..raw.len() - 1).find(|&k| raw[k].0 <= g && g <= raw[k + 1].0).unwrap();
                let v = Vec3::new(vel[k].0, vel[k].1, vel[k].2);
                let expected = raw[k].1 + v * (g - raw[k].0);
                prop_assert!((traj.positions()[i] - expected).norm() < 1e-9);
            }
        }
    }
}
