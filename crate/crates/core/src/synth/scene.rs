use rand::Rng;

use super::motion::{Leg, Motion, MotionScript};
use crate::error::{Error, Result};
use crate::interchange::{Domain, ObjectClass, ObjectRecord, Sample, SceneManifest, Source, MAX_FRAMES};
use crate::trajectory::GRID_STEP;

/// Closed-form kinematics for every object in a synthetic scene.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticTruth {
    pub scripts: Vec<MotionScript>,
}

impl AnalyticTruth {
    pub fn script(&self, object_id: &str) -> Option<&MotionScript> {
        self.scripts.iter().find(|s| s.object_id == object_id)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticScene {
    pub manifest: SceneManifest,
    pub truth: AnalyticTruth,
}

/// Frame times `0, 0.5, ...` up to the clip duration, capped at the frame budget.
pub fn frame_times(duration: f64) -> Vec<f64> {
    (0..MAX_FRAMES)
        .map(|k| k as f64 * GRID_STEP)
        .take_while(|t| *t <= duration + 1e-9)
        .collect()
}

/// Samples every script at clip times `k * dt` inside its active span.
pub fn synth_manifest(
    scene_id: &str,
    domain: Domain,
    duration: f64,
    scripts: &[MotionScript],
    dt: f64,
) -> Result<SyntheticScene> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Synth(format!("sample step {dt} must be > 0")));
    }
    let mut objects = Vec::with_capacity(scripts.len());
    for s in scripts {
        s.validate()?;
        if s.end() > duration + 1e-9 {
            return Err(Error::Synth(format!(
                "{} ends at {} s, after the {duration} s clip",
                s.object_id,
                s.end()
            )));
        }
        let k0 = (s.start / dt - 1e-9).ceil() as i64;
        let k1 = (s.end() / dt + 1e-9).floor() as i64;
        let samples = (k0..=k1)
            .map(|k| {
                let t = k as f64 * dt;
                Sample { t, center: s.position(t) }
            })
            .collect();
        objects.push(ObjectRecord {
            object_id: s.object_id.clone(),
            class: s.class,
            samples,
            boxes2d: None,
            confidence: 1.0,
            source: Source::Lidar,
        });
    }
    let manifest = SceneManifest {
        scene_id: scene_id.to_string(),
        domain,
        duration,
        frame_timestamps: frame_times(duration),
        objects,
    };
    manifest.check()?;
    Ok(SyntheticScene {
        manifest,
        truth: AnalyticTruth { scripts: scripts.to_vec() },
    })
}

fn heading_velocity(speed: f64, heading: f64) -> [f64; 3] {
    [speed * heading.cos(), speed * heading.sin(), 0.0]
}

fn random_script<R: Rng>(rng: &mut R, id: String, clip: f64) -> MotionScript {
    let class = *[
        ObjectClass::Car,
        ObjectClass::Bus,
        ObjectClass::Truck,
        ObjectClass::Motorcycle,
        ObjectClass::Bicycle,
        ObjectClass::Person,
    ]
    .get(rng.gen_range(0..6))
    .expect("in range");
    let max_speed = if class == ObjectClass::Person { 3.0 } else { 18.0 };
    // grid-aligned start and at least 3 s of presence
    let slots = ((clip - 3.0) / GRID_STEP).floor() as i64;
    let start = rng.gen_range(0..=slots.clamp(0, 8)) as f64 * GRID_STEP;
    let max_len = ((clip - start) / GRID_STEP).floor() as i64;
    let len = rng.gen_range(6..=max_len.max(6)) as f64 * GRID_STEP;
    let origin = [rng.gen_range(-40.0..40.0), rng.gen_range(-40.0..40.0), rng.gen_range(0.0..1.5)];
    let motion = match rng.gen_range(0..10) {
        0 => Motion::ConstantVelocity { origin, velocity: [0.0; 3] },
        1..=4 => Motion::ConstantVelocity {
            origin,
            velocity: heading_velocity(rng.gen_range(0.3..max_speed), rng.gen_range(0.0..std::f64::consts::TAU)),
        },
        5..=6 => {
            let radius = rng.gen_range(4.0..30.0);
            let omega = rng.gen_range(0.05..(max_speed / radius).clamp(0.06, 0.6));
            Motion::Circle {
                center: origin,
                radius,
                angular_speed: if rng.gen_bool(0.5) { omega } else { -omega },
                phase: rng.gen_range(0.0..std::f64::consts::TAU),
            }
        }
        _ => {
            let n = rng.gen_range(2..=3);
            let mut heading = rng.gen_range(0.0..std::f64::consts::TAU);
            let leg_len = (len / n as f64 / GRID_STEP).floor().max(1.0) * GRID_STEP;
            let legs = (0..n)
                .map(|_| {
                    let leg = Leg {
                        duration: leg_len,
                        velocity: heading_velocity(rng.gen_range(0.5..max_speed), heading),
                    };
                    heading += rng.gen_range(-2.5..2.5);
                    leg
                })
                .collect();
            Motion::Piecewise { origin, legs }
        }
    };
    MotionScript {
        object_id: id,
        class,
        motion,
        start,
        duration: len,
        shape: super::motion::Shape::Sphere { radius: 1.0 },
        confidence: 1.0,
    }
}

/// A random scene with one to four objects on mixed motion primitives.
pub fn random_scene<R: Rng>(rng: &mut R, scene_id: &str, domain: Domain) -> SyntheticScene {
    let clip = [8.0, 10.0, 12.0, 15.0, 19.5][rng.gen_range(0..5)];
    let n = rng.gen_range(1..=4);
    let scripts: Vec<MotionScript> = (0..n).map(|i| random_script(rng, format!("obj_{i}"), clip)).collect();
    let dt = if rng.gen_bool(0.5) { 0.5 } else { 0.1 };
    synth_manifest(scene_id, domain, clip, &scripts, dt).expect("random scripts are valid")
}
