//! Scene directory layout consumed by the pseudo-label pipeline:
//!
//! ```text
//! scene.json                 index: scene id, domain, duration, frames
//! frame_0000.rel.d32         relative depth (KDEPTH01)
//! frame_0000.met.d32         metric depth in meters (KDEPTH01)
//! frame_0000.pose.json       intrinsics + camera-to-world pose
//! frame_0000.det.json        detections, each naming a KMASK001 mask file
//! frame_0000.<track>.kmask
//! ```

use std::fs;
use std::path::Path;

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use super::{Detection, FramePackage};
use crate::error::{Error, Result};
use crate::geometry::{CameraIntrinsics, CameraPose, Vec3};
use crate::interchange::{read_depth, read_mask, write_depth, write_mask, Box2d, DepthKind, Domain, ObjectClass};

pub const INDEX_FILE: &str = "scene.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneIndex {
    pub scene_id: String,
    pub domain: Domain,
    pub duration: f64,
    pub frames: Vec<FrameEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameEntry {
    pub index: u32,
    pub t: f64,
    pub relative_depth: String,
    pub metric_depth: String,
    pub camera: String,
    pub detections: String,
}

impl FrameEntry {
    pub fn standard(index: u32, t: f64) -> Self {
        let stem = frame_stem(index);
        Self {
            index,
            t,
            relative_depth: format!("{stem}.rel.d32"),
            metric_depth: format!("{stem}.met.d32"),
            camera: format!("{stem}.pose.json"),
            detections: format!("{stem}.det.json"),
        }
    }
}

pub fn frame_stem(index: u32) -> String {
    format!("frame_{index:04}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraFile {
    pub intrinsics: CameraIntrinsics,
    /// Row-major camera-to-world rotation.
    pub rotation: [[f64; 3]; 3],
    pub translation: [f64; 3],
}

impl CameraFile {
    pub fn new(k: &CameraIntrinsics, pose: &CameraPose) -> Self {
        let r = pose.rotation();
        let t = pose.translation();
        Self {
            intrinsics: *k,
            rotation: [
                [r[(0, 0)], r[(0, 1)], r[(0, 2)]],
                [r[(1, 0)], r[(1, 1)], r[(1, 2)]],
                [r[(2, 0)], r[(2, 1)], r[(2, 2)]],
            ],
            translation: [t.x, t.y, t.z],
        }
    }

    pub fn pose(&self) -> Result<CameraPose> {
        let r = self.rotation;
        CameraPose::new(
            Matrix3::new(
                r[0][0], r[0][1], r[0][2], r[1][0], r[1][1], r[1][2], r[2][0], r[2][1], r[2][2],
            ),
            Vec3::from(self.translation),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectionFile {
    pub detections: Vec<DetectionEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectionEntry {
    pub track_id: String,
    pub class: ObjectClass,
    pub confidence: f64,
    #[serde(rename = "box")]
    pub bbox: [f64; 4],
    pub mask: String,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::malformed(path.display().to_string(), e))
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_index(dir: &Path) -> Result<SceneIndex> {
    let index: SceneIndex = read_json(&dir.join(INDEX_FILE))?;
    if index.frames.windows(2).any(|w| w[1].t <= w[0].t) {
        return Err(Error::malformed(
            dir.join(INDEX_FILE).display().to_string(),
            "frame times must be strictly increasing",
        ));
    }
    Ok(index)
}

pub fn read_frame(dir: &Path, entry: &FrameEntry) -> Result<FramePackage> {
    let relative_depth = read_depth(dir.join(&entry.relative_depth), DepthKind::Relative)?;
    let metric_depth = read_depth(dir.join(&entry.metric_depth), DepthKind::Metric)?;
    let camera: CameraFile = read_json(&dir.join(&entry.camera))?;
    camera.intrinsics.check()?;
    let pose = camera.pose()?;
    let dets: DetectionFile = read_json(&dir.join(&entry.detections))?;
    let detections = dets
        .detections
        .into_iter()
        .map(|d| {
            Ok(Detection {
                track_id: d.track_id,
                class: d.class,
                confidence: d.confidence,
                box2d: Box2d::new(d.bbox[0], d.bbox[1], d.bbox[2], d.bbox[3]),
                mask: read_mask(dir.join(&d.mask))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let frame = FramePackage {
        t: entry.t,
        relative_depth,
        metric_depth,
        intrinsics: camera.intrinsics,
        pose,
        detections,
    };
    frame.check()?;
    Ok(frame)
}

/// Writes a complete scene directory in the standard layout.
pub fn write_scene_dir(dir: &Path, scene_id: &str, domain: Domain, duration: f64, frames: &[FramePackage]) -> Result<SceneIndex> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut entries = Vec::with_capacity(frames.len());
    for (k, f) in frames.iter().enumerate() {
        f.check()?;
        let entry = FrameEntry::standard(k as u32, f.t);
        write_depth(&f.relative_depth, dir.join(&entry.relative_depth))?;
        write_depth(&f.metric_depth, dir.join(&entry.metric_depth))?;
        write_json(&CameraFile::new(&f.intrinsics, &f.pose), &dir.join(&entry.camera))?;
        let stem = frame_stem(k as u32);
        let mut dets = Vec::with_capacity(f.detections.len());
        for d in &f.detections {
            let mask = format!("{stem}.{}.kmask", d.track_id);
            write_mask(&d.mask, dir.join(&mask))?;
            dets.push(DetectionEntry {
                track_id: d.track_id.clone(),
                class: d.class,
                confidence: d.confidence,
                bbox: d.box2d.to_array(),
                mask,
            });
        }
        write_json(&DetectionFile { detections: dets }, &dir.join(&entry.detections))?;
        entries.push(entry);
    }
    let index = SceneIndex {
        scene_id: scene_id.to_string(),
        domain,
        duration,
        frames: entries,
    };
    write_json(&index, &dir.join(INDEX_FILE))?;
    Ok(index)
}
