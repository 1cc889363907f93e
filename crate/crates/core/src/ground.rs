//! Per-object kinematics of a manifest, for inspection and debugging.

use serde::Serialize;

use crate::interchange::{ObjectClass, SceneManifest};
use crate::trajectory::{speed, step_labels, total_distance, DirectionLabel, KinematicsConfig, Trajectory};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObjectKinematics {
    pub object_id: String,
    pub class: ObjectClass,
    #[serde(flatten)]
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", untagged)]
pub enum Outcome {
    Grounded {
        start: f64,
        end: f64,
        samples: usize,
        total_distance_m: f64,
        mean_speed_kmh: f64,
        /// Clock hour of each grid step, `null` while stationary; empty when
        /// the first step is stationary and no reference exists.
        step_hours: Vec<Option<u8>>,
    },
    Skipped {
        skipped: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroundReport {
    pub scene_id: String,
    pub objects: Vec<ObjectKinematics>,
}

fn outcome(t: &Trajectory, kin: &KinematicsConfig) -> Outcome {
    let step_hours = step_labels(t, kin)
        .map(|labels| {
            labels
                .into_iter()
                .map(|l| match l {
                    DirectionLabel::Hour(h) => Some(h),
                    DirectionLabel::Stationary => None,
                })
                .collect()
        })
        .unwrap_or_default();
    Outcome::Grounded {
        start: t.start(),
        end: t.end(),
        samples: t.len(),
        total_distance_m: total_distance(t),
        mean_speed_kmh: speed(t, t.start(), t.end()).expect("span is on the grid"),
        step_hours,
    }
}

pub fn ground_manifest(m: &SceneManifest, kin: &KinematicsConfig) -> GroundReport {
    let objects = m
        .objects
        .iter()
        .map(|o| ObjectKinematics {
            object_id: o.object_id.clone(),
            class: o.class,
            outcome: match Trajectory::resample(&o.object_id, o.class, &o.raw_samples(), kin) {
                Ok(t) => outcome(&t, kin),
                Err(e) => Outcome::Skipped { skipped: e.to_string() },
            },
        })
        .collect();
    GroundReport {
        scene_id: m.scene_id.clone(),
        objects,
    }
}
