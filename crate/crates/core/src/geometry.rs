//! Pinhole camera math and metric-scale canonicalization.
//!
//! Camera frame: x right, y down, z forward. Poses map camera to world.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use crate::interchange::{is_valid_depth, BitMask, DepthKind, DepthRaster};

pub type Vec3 = Vector3<f64>;

const ORTHO_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraIntrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
}

impl CameraIntrinsics {
    pub fn new(fx: f64, fy: f64, cx: f64, cy: f64) -> Result<Self> {
        let k = Self { fx, fy, cx, cy };
        k.check()?;
        Ok(k)
    }

    pub fn check(&self) -> Result<()> {
        if !(self.fx > 0.0 && self.fy > 0.0 && self.fx.is_finite() && self.fy.is_finite())
            || !(self.cx.is_finite() && self.cy.is_finite())
        {
            return Err(Error::InvalidArgument(format!(
                "intrinsics need finite fx > 0 and fy > 0, got {self:?}"
            )));
        }
        Ok(())
    }

    /// Forward pinhole model. `None` for points at or behind the camera.
    pub fn project(&self, p: &Vec3) -> Option<(f64, f64)> {
        (p.z > 0.0).then(|| (self.fx * p.x / p.z + self.cx, self.fy * p.y / p.z + self.cy))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraPose {
    rotation: Matrix3<f64>,
    translation: Vec3,
}

impl CameraPose {
    /// Camera-to-world pose. The rotation must be orthonormal with det = +1.
    pub fn new(rotation: Matrix3<f64>, translation: Vec3) -> Result<Self> {
        if !rotation.iter().chain(translation.iter()).all(|v| v.is_finite()) {
            return Err(Error::InvalidPose("non-finite entry".into()));
        }
        let ortho = (rotation.transpose() * rotation - Matrix3::identity()).abs().max();
        if ortho > ORTHO_TOL {
            return Err(Error::InvalidPose(format!(
                "rotation is not orthonormal (max |R^T R - I| = {ortho:e})"
            )));
        }
        let det = rotation.determinant();
        if (det - 1.0).abs() > ORTHO_TOL {
            return Err(Error::InvalidPose(format!("det(R) = {det}, expected +1")));
        }
        Ok(Self { rotation, translation })
    }

    pub fn identity() -> Self {
        Self {
            rotation: Matrix3::identity(),
            translation: Vec3::zeros(),
        }
    }

    pub fn from_translation(t: Vec3) -> Self {
        Self {
            rotation: Matrix3::identity(),
            translation: t,
        }
    }

    pub fn rotation(&self) -> &Matrix3<f64> {
        &self.rotation
    }

    pub fn translation(&self) -> &Vec3 {
        &self.translation
    }

    pub fn inverse(&self) -> Self {
        let rt = self.rotation.transpose();
        Self {
            rotation: rt,
            translation: -(rt * self.translation),
        }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &CameraPose) -> Self {
        Self {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ScaleFactor(f64);

impl ScaleFactor {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 0.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::InvalidArgument(format!("scale factor must be finite and > 0, got {alpha}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

pub fn backproject(u: f64, v: f64, depth: f64, k: &CameraIntrinsics) -> Result<Vec3> {
    if !(depth.is_finite() && depth > 0.0) {
        return Err(Error::InvalidDepth(depth));
    }
    Ok(Vec3::new((u - k.cx) * depth / k.fx, (v - k.cy) * depth / k.fy, depth))
}

pub fn camera_to_world(p: &Vec3, pose: &CameraPose) -> Vec3 {
    pose.rotation * p + pose.translation
}

pub fn world_to_camera(p: &Vec3, pose: &CameraPose) -> Vec3 {
    pose.rotation.transpose() * (p - pose.translation)
}

/// Median of a non-empty slice (mean of the two middle values for even
/// lengths). Reorders the slice.
pub fn median_in_place(xs: &mut [f64]) -> Option<f64> {
    let n = xs.len();
    if n == 0 {
        return None;
    }
    let mid = n / 2;
    let (lower, m, _) = xs.select_nth_unstable_by(mid, f64::total_cmp);
    let m = *m;
    if n % 2 == 1 {
        Some(m)
    } else {
        let below = lower.iter().copied().max_by(f64::total_cmp).expect("n >= 2");
        Some((below + m) / 2.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScaleConfig {
    /// Only every `stride`-th pixel (row-major index) is considered.
    pub stride: usize,
    pub min_valid_pixels: usize,
}

impl Default for ScaleConfig {
    fn default() -> Self {
        Self {
            stride: 4,
            min_valid_pixels: 100,
        }
    }
}

/// Robust per-frame scale: median of metric / relative over pixels where
/// both depths are valid and the mask is set.
pub fn estimate_scale(
    relative: &DepthRaster,
    metric: &DepthRaster,
    valid: &BitMask,
    cfg: &ScaleConfig,
) -> Result<ScaleFactor> {
    if (relative.width, relative.height) != (metric.width, metric.height)
        || (relative.width, relative.height) != (valid.width, valid.height)
    {
        return Err(Error::DimensionMismatch(format!(
            "relative {}x{}, metric {}x{}, mask {}x{}",
            relative.width, relative.height, metric.width, metric.height, valid.width, valid.height
        )));
    }
    let stride = cfg.stride.max(1);
    let mut ratios: Vec<f64> = (0..relative.len())
        .step_by(stride)
        .filter(|&i| valid.bits()[i])
        .filter_map(|i| {
            let (r, m) = (relative.values[i], metric.values[i]);
            (is_valid_depth(r) && is_valid_depth(m)).then(|| m as f64 / r as f64)
        })
        .collect();
    if ratios.len() < cfg.min_valid_pixels.max(1) {
        return Err(Error::InsufficientPixels {
            found: ratios.len(),
            required: cfg.min_valid_pixels.max(1),
        });
    }
    ScaleFactor::new(median_in_place(&mut ratios).expect("non-empty"))
}

/// One global scale for the whole scene: the median of per-frame estimates.
pub fn canonical_scene_scale(per_frame: &[ScaleFactor]) -> Result<ScaleFactor> {
    let mut xs: Vec<f64> = per_frame.iter().map(|a| a.value()).collect();
    let m = median_in_place(&mut xs).ok_or(Error::Empty("per-frame scale list"))?;
    ScaleFactor::new(m)
}

/// Lifts the set pixels of `mask` into world coordinates using the rescaled
/// relative depth. Pixels with invalid depth are skipped.
pub fn lift_mask(
    mask: &BitMask,
    relative: &DepthRaster,
    alpha: ScaleFactor,
    k: &CameraIntrinsics,
    pose: &CameraPose,
) -> Result<Vec<Vec3>> {
    if (mask.width, mask.height) != (relative.width, relative.height) {
        return Err(Error::DimensionMismatch(format!(
            "mask {}x{} vs depth {}x{}",
            mask.width, mask.height, relative.width, relative.height
        )));
    }
    let points: Vec<Vec3> = mask
        .iter_set()
        .filter_map(|(u, v)| {
            let d = relative.get(u, v);
            is_valid_depth(d).then(|| {
                let depth = alpha.value() * d as f64;
                let p = backproject(u as f64, v as f64, depth, k).expect("depth checked");
                camera_to_world(&p, pose)
            })
        })
        .collect();
    if points.is_empty() {
        return Err(Error::EmptyLift);
    }
    Ok(points)
}

pub fn barycenter(points: &[Vec3]) -> Result<Vec3> {
    if points.is_empty() {
        return Err(Error::Empty("point set"));
    }
    let sum = points.iter().fold(Vec3::zeros(), |acc, p| acc + p);
    Ok(sum / points.len() as f64)
}
