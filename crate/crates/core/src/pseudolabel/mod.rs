//! Pseudo-label generation for videos without 3D annotations: canonicalize
//! the reconstruction's depth to metric scale, gate detections, lift each
//! tracked mask into the world frame, follow its barycenter over time and
//! emit a scene manifest.

mod scene_dir;

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use scene_dir::{
    frame_stem, read_frame, read_index, write_scene_dir, CameraFile, DetectionEntry, DetectionFile,
    FrameEntry, SceneIndex, INDEX_FILE,
};

use crate::error::{Error, Result};
use crate::geometry::{
    barycenter, canonical_scene_scale, estimate_scale, lift_mask, BitMask, CameraIntrinsics, CameraPose,
    DepthRaster, ScaleConfig, ScaleFactor, Vec3,
};
use crate::interchange::{Box2d, ObjectClass, ObjectRecord, Sample, SceneManifest, Source, TimedBox};
use crate::trajectory::{
    plausibility_filter, smooth, KinematicsConfig, Plausibility, RejectReason, SmoothConfig, SpeedCaps, Trajectory,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub track_id: String,
    pub class: ObjectClass,
    pub mask: BitMask,
    pub box2d: Box2d,
    pub confidence: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FramePackage {
    pub t: f64,
    pub relative_depth: DepthRaster,
    pub metric_depth: DepthRaster,
    pub intrinsics: CameraIntrinsics,
    pub pose: CameraPose,
    pub detections: Vec<Detection>,
}

impl FramePackage {
    pub fn width(&self) -> u32 {
        self.relative_depth.width
    }

    pub fn height(&self) -> u32 {
        self.relative_depth.height
    }

    pub fn area(&self) -> f64 {
        self.width() as f64 * self.height() as f64
    }

    pub fn check(&self) -> Result<()> {
        let dims = (self.width(), self.height());
        if (self.metric_depth.width, self.metric_depth.height) != dims {
            return Err(Error::DimensionMismatch(format!(
                "frame t={}: relative {}x{} vs metric {}x{}",
                self.t, dims.0, dims.1, self.metric_depth.width, self.metric_depth.height
            )));
        }
        for d in &self.detections {
            if (d.mask.width, d.mask.height) != dims {
                return Err(Error::DimensionMismatch(format!(
                    "frame t={}: mask of {} is {}x{}, raster {}x{}",
                    self.t, d.track_id, d.mask.width, d.mask.height, dims.0, dims.1
                )));
            }
            let b = d.box2d;
            if !b.is_well_formed() || b.x1 < 0.0 || b.y1 < 0.0 || b.x2 > dims.0 as f64 || b.y2 > dims.1 as f64 {
                return Err(Error::OutOfBounds(b.to_array(), dims.0, dims.1));
            }
            if !(0.0..=1.0).contains(&d.confidence) {
                return Err(Error::InvalidArgument(format!(
                    "frame t={}: confidence {} of {} outside [0, 1]",
                    self.t, d.confidence, d.track_id
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GateConfig {
    pub min_confidence: f64,
    /// Minimum box area as a fraction of the frame area.
    pub min_box_area_fraction: f64,
    /// Minimum number of gated frames, and of grid samples after resampling.
    pub min_track_samples: usize,
}

impl Default for GateConfig {
    fn default() -> Self {
        Self {
            min_confidence: 0.5,
            min_box_area_fraction: 0.005,
            min_track_samples: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateReject {
    Confidence(f64),
    BoxArea(f64),
}

impl fmt::Display for GateReject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateReject::Confidence(c) => write!(f, "confidence {c:.3} below gate"),
            GateReject::BoxArea(a) => write!(f, "box area {:.4}% below gate", a * 100.0),
        }
    }
}

pub fn quality_gate(d: &Detection, frame_area: f64, cfg: &GateConfig) -> std::result::Result<(), GateReject> {
    if d.confidence < cfg.min_confidence {
        return Err(GateReject::Confidence(d.confidence));
    }
    let fraction = d.box2d.area() / frame_area;
    if fraction < cfg.min_box_area_fraction {
        return Err(GateReject::BoxArea(fraction));
    }
    Ok(())
}

/// Single metric scale for the scene: median over frames of the per-frame
/// median depth ratio. Frames without enough valid pixels are skipped.
pub fn canonicalize(frames: &[FramePackage], cfg: &ScaleConfig) -> Result<ScaleFactor> {
    if frames.is_empty() {
        return Err(Error::Empty("frame list"));
    }
    let per_frame: Vec<ScaleFactor> = frames
        .par_iter()
        .map(|f| {
            let valid = BitMask::full(f.width(), f.height());
            estimate_scale(&f.relative_depth, &f.metric_depth, &valid, cfg)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .filter_map(|r| match r {
            Ok(a) => Some(Ok(a)),
            Err(Error::InsufficientPixels { .. }) => None,
            Err(e) => Some(Err(e)),
        })
        .collect::<Result<_>>()?;
    if per_frame.is_empty() {
        return Err(Error::InsufficientPixels {
            found: 0,
            required: cfg.min_valid_pixels,
        });
    }
    canonical_scene_scale(&per_frame)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub scale: ScaleConfig,
    pub gates: GateConfig,
    pub kinematics: KinematicsConfig,
    pub smoothing: SmoothConfig,
    pub speed_caps: SpeedCaps,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrackRejection {
    TooShort { frames: usize, required: usize },
    Lift { t: f64, reason: String },
    Resample(String),
    Implausible(RejectReason),
}

impl fmt::Display for TrackRejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrackRejection::TooShort { frames, required } => {
                write!(f, "too short ({frames} gated frames, {required} required)")
            }
            TrackRejection::Lift { t, reason } => write!(f, "lift failed at t = {t}: {reason}"),
            TrackRejection::Resample(r) => write!(f, "resampling failed: {r}"),
            TrackRejection::Implausible(r) => write!(f, "{r}"),
        }
    }
}

/// A track's surviving observations: the frame and its detection.
pub type TrackObservations<'a> = Vec<(&'a FramePackage, &'a Detection)>;

fn gated_tracks<'a>(frames: &'a [FramePackage], cfg: &GateConfig) -> BTreeMap<&'a str, TrackObservations<'a>> {
    let mut tracks: BTreeMap<&str, TrackObservations<'a>> = BTreeMap::new();
    for f in frames {
        for d in &f.detections {
            if quality_gate(d, f.area(), cfg).is_ok() {
                tracks.entry(d.track_id.as_str()).or_default().push((f, d));
            }
        }
    }
    tracks
}

/// Lifted barycenters of a track, resampled to the grid, smoothed and
/// checked for plausibility.
pub fn track_to_trajectory(
    track_id: &str,
    frames: &[FramePackage],
    alpha: ScaleFactor,
    cfg: &PipelineConfig,
) -> std::result::Result<Trajectory, TrackRejection> {
    let tracks = gated_tracks(frames, &cfg.gates);
    let obs = tracks.get(track_id).cloned().unwrap_or_default();
    trajectory_from_observations(track_id, &obs, alpha, cfg)
}

fn trajectory_from_observations(
    track_id: &str,
    obs: &TrackObservations<'_>,
    alpha: ScaleFactor,
    cfg: &PipelineConfig,
) -> std::result::Result<Trajectory, TrackRejection> {
    if obs.len() < cfg.gates.min_track_samples {
        return Err(TrackRejection::TooShort {
            frames: obs.len(),
            required: cfg.gates.min_track_samples,
        });
    }
    let raw: Vec<(f64, Vec3)> = obs
        .par_iter()
        .map(|(f, d)| {
            let points = lift_mask(&d.mask, &f.relative_depth, alpha, &f.intrinsics, &f.pose)
                .map_err(|e| TrackRejection::Lift { t: f.t, reason: e.to_string() })?;
            let c = barycenter(&points).map_err(|e| TrackRejection::Lift { t: f.t, reason: e.to_string() })?;
            Ok((f.t, c))
        })
        .collect::<std::result::Result<_, _>>()?;
    let class = majority_class(obs);
    let traj = Trajectory::resample(track_id, class, &raw, &cfg.kinematics)
        .map_err(|e| TrackRejection::Resample(e.to_string()))?;
    let traj = smooth(&traj, &cfg.smoothing);
    match plausibility_filter(&traj, &cfg.speed_caps, cfg.gates.min_track_samples) {
        Plausibility::Accept => Ok(traj),
        Plausibility::Reject(r) => Err(TrackRejection::Implausible(r)),
    }
}

fn majority_class(obs: &TrackObservations<'_>) -> ObjectClass {
    let mut counts: BTreeMap<ObjectClass, usize> = BTreeMap::new();
    for (_, d) in obs {
        *counts.entry(d.class).or_default() += 1;
    }
    // ties resolve to the class declared first
    counts
        .into_iter()
        .fold((ObjectClass::Other, 0), |best, (c, n)| if n > best.1 { (c, n) } else { best })
        .0
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutput {
    pub manifest: SceneManifest,
    pub alpha: ScaleFactor,
    pub rejected: Vec<(String, TrackRejection)>,
    pub warnings: Vec<String>,
}

/// Runs the whole pipeline over frames already in memory.
pub fn run_frames(index: &SceneIndex, frames: &[FramePackage], cfg: &PipelineConfig) -> Result<PipelineOutput> {
    let alpha = canonicalize(frames, &cfg.scale)?;
    let tracks = gated_tracks(frames, &cfg.gates);
    let mut objects = Vec::new();
    let mut rejected = Vec::new();
    for (track_id, obs) in &tracks {
        match trajectory_from_observations(track_id, obs, alpha, cfg) {
            Ok(traj) => objects.push(ObjectRecord {
                object_id: track_id.to_string(),
                class: traj.class(),
                samples: traj
                    .times()
                    .zip(traj.positions())
                    .map(|(t, p)| Sample { t, center: *p })
                    .collect(),
                boxes2d: Some(obs.iter().map(|(f, d)| TimedBox { t: f.t, bbox: d.box2d }).collect()),
                confidence: obs.iter().map(|(_, d)| d.confidence).sum::<f64>() / obs.len() as f64,
                source: Source::Pseudo,
            }),
            Err(r) => rejected.push((track_id.to_string(), r)),
        }
    }
    let mut warnings = Vec::new();
    for (id, r) in &rejected {
        warnings.push(format!("{}: track {id} rejected: {r}", index.scene_id));
    }
    if objects.is_empty() {
        warnings.push(format!("{}: no track survived gating and filtering", index.scene_id));
    }
    for w in &warnings {
        warn!("{w}");
    }
    let manifest = SceneManifest {
        scene_id: index.scene_id.clone(),
        domain: index.domain,
        duration: index.duration,
        frame_timestamps: frames.iter().map(|f| f.t).collect(),
        objects,
    };
    manifest.check()?;
    Ok(PipelineOutput {
        manifest,
        alpha,
        rejected,
        warnings,
    })
}

pub fn load_frames(scene_dir: &Path) -> Result<(SceneIndex, Vec<FramePackage>)> {
    let index = read_index(scene_dir)?;
    let frames = index
        .frames
        .par_iter()
        .map(|e| read_frame(scene_dir, e))
        .collect::<Result<Vec<_>>>()?;
    Ok((index, frames))
}

/// Reads a scene directory and produces its pseudo-labeled manifest.
pub fn run_pipeline(scene_dir: &Path, cfg: &PipelineConfig) -> Result<PipelineOutput> {
    let (index, frames) = load_frames(scene_dir)?;
    run_frames(&index, &frames, cfg)
}
