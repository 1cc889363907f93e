//! Synthetic scenes with analytic ground truth: manifests sampled from
//! closed-form motion, and full frame packages rendered from boxes and
//! spheres under a scripted camera.

mod motion;
mod render;
mod scene;

pub use motion::{Leg, Motion, MotionScript, Shape};
pub use render::{render_frame, synth_frames, CameraPath, NoiseConfig, RenderConfig};
pub use scene::{frame_times, random_scene, synth_manifest, AnalyticTruth, SyntheticScene};

use crate::interchange::ObjectClass;

/// A renderable scene: scripts, camera and raster settings.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameScene {
    pub scripts: Vec<MotionScript>,
    pub camera: CameraPath,
    pub render: RenderConfig,
}

/// Clip length of the presets: 20 frames on the 0.5 s grid.
pub const PRESET_DURATION: f64 = 9.5;

fn side_camera(origin: [f64; 3], velocity: [f64; 3]) -> CameraPath {
    CameraPath {
        origin,
        velocity,
        yaw_deg: 90.0,
        pitch_deg: 10.0,
    }
}

/// Car driving at 10 m/s along +x, 15 m from a camera that follows at 9 m/s.
pub fn preset_moving_car() -> FrameScene {
    let car = MotionScript::new(
        "car_1",
        ObjectClass::Car,
        Motion::ConstantVelocity { origin: [-4.75, 15.0, 0.75], velocity: [10.0, 0.0, 0.0] },
        PRESET_DURATION,
    )
    .with_shape(Shape::Box { half_extents: [2.0, 0.9, 0.75] });
    FrameScene {
        scripts: vec![car],
        camera: side_camera([0.0, 0.0, 1.5], [9.0, 0.0, 0.0]),
        render: RenderConfig::default(),
    }
}

/// Static sphere 12 m away while the camera slides sideways at 1 m/s.
pub fn preset_static_object() -> FrameScene {
    let ball = MotionScript::new(
        "ball_1",
        ObjectClass::Other,
        Motion::ConstantVelocity { origin: [0.0, 12.0, 1.0], velocity: [0.0; 3] },
        PRESET_DURATION,
    )
    .with_shape(Shape::Sphere { radius: 1.0 });
    FrameScene {
        scripts: vec![ball],
        camera: side_camera([-4.75, 0.0, 1.5], [1.0, 0.0, 0.0]),
        render: RenderConfig::default(),
    }
}

/// A slow car behind a pedestrian walking the other way, static camera.
pub fn preset_two_objects() -> FrameScene {
    let car = MotionScript::new(
        "car_1",
        ObjectClass::Car,
        Motion::ConstantVelocity { origin: [-8.0, 20.0, 0.75], velocity: [1.6, 0.0, 0.0] },
        PRESET_DURATION,
    )
    .with_shape(Shape::Box { half_extents: [2.0, 0.9, 0.75] });
    let person = MotionScript::new(
        "person_1",
        ObjectClass::Person,
        Motion::ConstantVelocity { origin: [3.0, 9.0, 0.9], velocity: [-0.6, 0.0, 0.0] },
        PRESET_DURATION,
    )
    .with_shape(Shape::Box { half_extents: [0.4, 0.4, 0.9] });
    FrameScene {
        scripts: vec![car, person],
        camera: side_camera([0.0, 0.0, 1.5], [0.0; 3]),
        render: RenderConfig::default(),
    }
}

pub fn preset(name: &str) -> Option<FrameScene> {
    match name {
        "moving_car" => Some(preset_moving_car()),
        "static_object" => Some(preset_static_object()),
        "two_objects" => Some(preset_two_objects()),
        _ => None,
    }
}

pub const PRESETS: [&str; 3] = ["moving_car", "static_object", "two_objects"];
