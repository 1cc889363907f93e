use nalgebra::Matrix3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::motion::{MotionScript, Shape};
use crate::error::{Error, Result};
use crate::geometry::{world_to_camera, CameraIntrinsics, CameraPose, Vec3};
use crate::interchange::{BitMask, Box2d, DepthKind, DepthRaster};
use crate::pseudolabel::{Detection, FramePackage};
use crate::trajectory::GRID_STEP;

/// Camera translating at constant velocity with fixed yaw and pitch.
/// Yaw is measured from +x toward +y in the ground plane; positive pitch
/// tilts the optical axis down.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraPath {
    pub origin: [f64; 3],
    pub velocity: [f64; 3],
    pub yaw_deg: f64,
    pub pitch_deg: f64,
}

impl CameraPath {
    pub fn pose(&self, t: f64) -> CameraPose {
        let (yaw, pitch) = (self.yaw_deg.to_radians(), self.pitch_deg.to_radians());
        let forward = Vec3::new(pitch.cos() * yaw.cos(), pitch.cos() * yaw.sin(), -pitch.sin());
        let right = forward.cross(&Vec3::z()).normalize();
        let down = forward.cross(&right);
        let rotation = Matrix3::from_columns(&[right, down, forward]);
        let translation = Vec3::from(self.origin) + Vec3::from(self.velocity) * t;
        CameraPose::new(rotation, translation).expect("orthonormal by construction")
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseConfig {
    /// Multiplicative metric-depth jitter, uniform in `[-j, j]`.
    pub depth_jitter: f64,
    /// Pixels peeled off every mask boundary.
    pub mask_erosion: u32,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RenderConfig {
    pub width: u32,
    pub height: u32,
    pub intrinsics: CameraIntrinsics,
    pub frames: usize,
    /// Metric depth divided by this gives the stored relative depth.
    pub alpha: f64,
    /// Ground plane at z = 0; without it only objects have valid depth.
    pub ground: bool,
    #[serde(default)]
    pub noise: NoiseConfig,
}

impl Default for RenderConfig {
    fn default() -> Self {
        Self {
            width: 160,
            height: 120,
            intrinsics: CameraIntrinsics::new(100.0, 100.0, 80.0, 60.0).expect("valid"),
            frames: 20,
            alpha: 2.5,
            ground: true,
            noise: NoiseConfig::default(),
        }
    }
}

/// Ray parameter of the first hit along `origin + s * dir`, if any.
fn hit(shape: &Shape, center: &Vec3, origin: &Vec3, dir: &Vec3) -> Option<f64> {
    match *shape {
        Shape::Sphere { radius } => {
            let oc = origin - center;
            let a = dir.norm_squared();
            let b = oc.dot(dir);
            let c = oc.norm_squared() - radius * radius;
            let disc = b * b - a * c;
            if disc < 0.0 {
                return None;
            }
            let s = (-b - disc.sqrt()) / a;
            (s > 0.0).then_some(s)
        }
        Shape::Box { half_extents } => {
            let (mut near, mut far) = (f64::NEG_INFINITY, f64::INFINITY);
            for i in 0..3 {
                let lo = center[i] - half_extents[i];
                let hi = center[i] + half_extents[i];
                if dir[i] == 0.0 {
                    if origin[i] < lo || origin[i] > hi {
                        return None;
                    }
                    continue;
                }
                let (mut s0, mut s1) = ((lo - origin[i]) / dir[i], (hi - origin[i]) / dir[i]);
                if s0 > s1 {
                    std::mem::swap(&mut s0, &mut s1);
                }
                near = near.max(s0);
                far = far.min(s1);
            }
            (near <= far && near > 0.0).then_some(near)
        }
    }
}

fn corners(shape: &Shape, c: &Vec3) -> Vec<Vec3> {
    let h = match *shape {
        Shape::Sphere { radius } => [radius; 3],
        Shape::Box { half_extents } => half_extents,
    };
    (0..8)
        .map(|i| {
            let s = |bit: usize, k: usize| if i & bit == 0 { -h[k] } else { h[k] };
            c + Vec3::new(s(1, 0), s(2, 1), s(4, 2))
        })
        .collect()
}

fn erode(mask: &BitMask) -> BitMask {
    let mut out = mask.clone();
    for (u, v) in mask.iter_set() {
        let edge = u == 0
            || v == 0
            || u + 1 == mask.width
            || v + 1 == mask.height
            || !mask.get(u - 1, v)
            || !mask.get(u + 1, v)
            || !mask.get(u, v - 1)
            || !mask.get(u, v + 1);
        if edge {
            out.set(u, v, false);
        }
    }
    out
}

/// Renders one frame: metric depth from the nearest surface, one exact
/// mask per visible object, and a box tight around its mask.
pub fn render_frame(scripts: &[MotionScript], camera: &CameraPath, cfg: &RenderConfig, index: usize) -> Result<FramePackage> {
    let t = index as f64 * GRID_STEP;
    let pose = camera.pose(t);
    let k = &cfg.intrinsics;
    let active: Vec<(&MotionScript, Vec3)> =
        scripts.iter().filter(|s| s.active(t)).map(|s| (s, s.position(t))).collect();
    for (s, c) in &active {
        for p in corners(&s.shape, c) {
            let q = world_to_camera(&p, &pose);
            let inside = k
                .project(&q)
                .is_some_and(|(u, v)| u >= 0.0 && v >= 0.0 && u <= (cfg.width - 1) as f64 && v <= (cfg.height - 1) as f64);
            if !inside {
                return Err(Error::Synth(format!(
                    "{} leaves the frustum in frame {index} (t = {t})",
                    s.object_id
                )));
            }
        }
    }
    let origin = *pose.translation();
    let (w, h) = (cfg.width, cfg.height);
    let mut metric = vec![0f32; (w * h) as usize];
    let mut owner: Vec<Option<usize>> = vec![None; (w * h) as usize];
    for v in 0..h {
        for u in 0..w {
            let dir_cam = Vec3::new((u as f64 - k.cx) / k.fx, (v as f64 - k.cy) / k.fy, 1.0);
            let dir = pose.rotation() * dir_cam;
            let mut best: Option<(f64, Option<usize>)> = None;
            if cfg.ground && dir.z < 0.0 && origin.z > 0.0 {
                best = Some((-origin.z / dir.z, None));
            }
            for (i, (s, c)) in active.iter().enumerate() {
                if let Some(d) = hit(&s.shape, c, &origin, &dir) {
                    if best.is_none_or(|(b, _)| d < b) {
                        best = Some((d, Some(i)));
                    }
                }
            }
            if let Some((d, who)) = best {
                // the ray has unit z in the camera frame, so its parameter is the depth
                let px = (v * w + u) as usize;
                metric[px] = d as f32;
                owner[px] = who;
            }
        }
    }
    if cfg.noise.depth_jitter > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.noise.seed ^ index as u64);
        for d in metric.iter_mut().filter(|d| **d > 0.0) {
            *d *= (1.0 + rng.gen_range(-cfg.noise.depth_jitter..=cfg.noise.depth_jitter)) as f32;
        }
    }
    let relative: Vec<f32> = metric
        .iter()
        .map(|&d| if d > 0.0 { (d as f64 / cfg.alpha) as f32 } else { 0.0 })
        .collect();
    let mut detections = Vec::new();
    for (i, (s, _)) in active.iter().enumerate() {
        let bits = owner.iter().map(|o| *o == Some(i)).collect();
        let mut mask = BitMask::from_bits(w, h, bits)?;
        for _ in 0..cfg.noise.mask_erosion {
            mask = erode(&mask);
        }
        let Some([x1, y1, x2, y2]) = mask.bounds() else {
            continue;
        };
        detections.push(Detection {
            track_id: s.object_id.clone(),
            class: s.class,
            mask,
            box2d: Box2d::new(x1 as f64, y1 as f64, x2 as f64, y2 as f64),
            confidence: s.confidence,
        });
    }
    let frame = FramePackage {
        t,
        relative_depth: DepthRaster::new(w, h, relative, DepthKind::Relative)?,
        metric_depth: DepthRaster::new(w, h, metric, DepthKind::Metric)?,
        intrinsics: *k,
        pose,
        detections,
    };
    frame.check()?;
    Ok(frame)
}

/// Renders every frame of a scripted scene on the 0.5 s grid.
pub fn synth_frames(scripts: &[MotionScript], camera: &CameraPath, cfg: &RenderConfig) -> Result<Vec<FramePackage>> {
    if !(cfg.alpha > 0.0 && cfg.alpha.is_finite()) {
        return Err(Error::Synth(format!("planted alpha {} must be > 0", cfg.alpha)));
    }
    if cfg.frames == 0 || cfg.frames > crate::interchange::MAX_FRAMES {
        return Err(Error::Synth(format!("frame count {} outside 1..=40", cfg.frames)));
    }
    for s in scripts {
        s.validate()?;
    }
    (0..cfg.frames)
        .into_par_iter()
        .map(|i| render_frame(scripts, camera, cfg, i))
        .collect()
}
