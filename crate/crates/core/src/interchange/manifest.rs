use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde::Deserialize;

use super::fixed::Node;
use crate::error::{Error, Result, Violation};
use crate::geometry::Vec3;

/// Longest clip the toolkit accepts, in seconds.
pub const MAX_DURATION: f64 = 20.0;
/// Most frames a clip may carry.
pub const MAX_FRAMES: usize = 40;

macro_rules! string_enum {
    ($(#[$m:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$m])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, ::serde::Serialize, ::serde::Deserialize)]
        pub enum $name {
            $(#[serde(rename = $text)] $variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }
        }

        impl ::std::fmt::Display for $name {
            fn fmt(&self, f: &mut ::std::fmt::Formatter<'_>) -> ::std::fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl ::std::str::FromStr for $name {
            type Err = $crate::error::Error;
            fn from_str(s: &str) -> $crate::error::Result<Self> {
                match s {
                    $($text => Ok($name::$variant),)+
                    other => Err($crate::error::Error::InvalidArgument(format!(
                        "unknown {} {other:?}", stringify!($name)
                    ))),
                }
            }
        }
    };
}
pub(crate) use string_enum;

string_enum!(
    /// Source domain of a clip; sports clips carry no direction questions.
    Domain {
        Driving => "driving",
        Sports => "sports",
        General => "general",
    }
);

string_enum!(ObjectClass {
    Car => "car",
    Bus => "bus",
    Truck => "truck",
    Motorcycle => "motorcycle",
    Bicycle => "bicycle",
    Person => "person",
    Other => "other",
});

string_enum!(
    /// Where an object's 3D centers came from.
    Source {
        Lidar => "lidar",
        VioSlam => "vio_slam",
        Pseudo => "pseudo",
    }
);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Box2d {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
}

impl Box2d {
    pub fn new(x1: f64, y1: f64, x2: f64, y2: f64) -> Self {
        Self { x1, y1, x2, y2 }
    }

    pub fn area(&self) -> f64 {
        (self.x2 - self.x1).max(0.0) * (self.y2 - self.y1).max(0.0)
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.x1, self.y1, self.x2, self.y2]
    }

    pub fn is_well_formed(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite()) && self.x1 < self.x2 && self.y1 < self.y2
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub center: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimedBox {
    pub t: f64,
    pub bbox: Box2d,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectRecord {
    pub object_id: String,
    pub class: ObjectClass,
    pub samples: Vec<Sample>,
    pub boxes2d: Option<Vec<TimedBox>>,
    pub confidence: f64,
    pub source: Source,
}

impl ObjectRecord {
    pub fn raw_samples(&self) -> Vec<(f64, Vec3)> {
        self.samples.iter().map(|s| (s.t, s.center)).collect()
    }

    /// The 2D box annotated at time `t`, if any, matched within a microsecond.
    pub fn box_at(&self, t: f64) -> Option<Box2d> {
        self.boxes2d
            .as_ref()?
            .iter()
            .find(|b| (b.t - t).abs() < 1e-6)
            .map(|b| b.bbox)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneManifest {
    pub scene_id: String,
    pub domain: Domain,
    pub duration: f64,
    pub frame_timestamps: Vec<f64>,
    pub objects: Vec<ObjectRecord>,
}

impl SceneManifest {
    pub fn object(&self, id: &str) -> Option<&ObjectRecord> {
        self.objects.iter().find(|o| o.object_id == id)
    }

    /// Every broken invariant, each with its field path. Empty means valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.scene_id.is_empty() {
            out.push(Violation::new("scene_id", "must not be empty"));
        }
        let duration_ok = self.duration.is_finite() && self.duration > 0.0;
        if !duration_ok {
            out.push(Violation::new("duration", format!("must be > 0, got {}", self.duration)));
        } else if self.duration > MAX_DURATION {
            out.push(Violation::new(
                "duration",
                format!("{} s exceeds the {MAX_DURATION} s clip budget", self.duration),
            ));
        }
        let in_clip = |t: f64| t.is_finite() && t >= 0.0 && (!duration_ok || t <= self.duration);

        if self.frame_timestamps.len() > MAX_FRAMES {
            out.push(Violation::new(
                "frame_timestamps",
                format!("{} frames exceed the {MAX_FRAMES}-frame budget", self.frame_timestamps.len()),
            ));
        }
        for (i, &t) in self.frame_timestamps.iter().enumerate() {
            let path = format!("frame_timestamps[{i}]");
            if !in_clip(t) {
                out.push(Violation::new(&path, format!("{t} outside [0, duration]")));
            }
            if i > 0 && t <= self.frame_timestamps[i - 1] {
                out.push(Violation::new(&path, "timestamps must be strictly increasing"));
            }
        }

        let mut seen = HashSet::new();
        for (oi, obj) in self.objects.iter().enumerate() {
            let base = if obj.object_id.is_empty() {
                out.push(Violation::new(format!("objects[{oi}].object_id"), "must not be empty"));
                format!("objects[{oi}]")
            } else {
                format!("objects[{}]", obj.object_id)
            };
            if !obj.object_id.is_empty() && !seen.insert(obj.object_id.as_str()) {
                out.push(Violation::new(format!("{base}.object_id"), "duplicate object_id"));
            }
            if !(0.0..=1.0).contains(&obj.confidence) {
                out.push(Violation::new(
                    format!("{base}.confidence"),
                    format!("{} outside [0, 1]", obj.confidence),
                ));
            }
            if obj.samples.is_empty() {
                out.push(Violation::new(format!("{base}.samples"), "must not be empty"));
            }
            for (i, s) in obj.samples.iter().enumerate() {
                let path = format!("{base}.samples[{i}]");
                if !in_clip(s.t) {
                    out.push(Violation::new(format!("{path}.t"), format!("{} outside [0, duration]", s.t)));
                }
                if i > 0 && s.t <= obj.samples[i - 1].t {
                    out.push(Violation::new(
                        format!("{path}.t"),
                        format!(
                            "out of time order: {} does not follow {}",
                            s.t,
                            obj.samples[i - 1].t
                        ),
                    ));
                }
                if !s.center.iter().all(|c| c.is_finite()) {
                    out.push(Violation::new(format!("{path}.center"), "non-finite coordinate"));
                }
            }
            for (i, b) in obj.boxes2d.iter().flatten().enumerate() {
                let path = format!("{base}.boxes2d[{i}]");
                if !in_clip(b.t) {
                    out.push(Violation::new(format!("{path}.t"), format!("{} outside [0, duration]", b.t)));
                }
                if !b.bbox.is_well_formed() {
                    out.push(Violation::new(
                        format!("{path}.box"),
                        format!("requires x1 < x2 and y1 < y2, got {:?}", b.bbox.to_array()),
                    ));
                }
            }
        }
        out
    }

    pub fn check(&self) -> Result<()> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid {
                what: format!("manifest {}", self.scene_id),
                violations,
            })
        }
    }

    pub(crate) fn to_node(&self) -> Node {
        let objects = self
            .objects
            .iter()
            .map(|o| {
                let mut fields = vec![
                    ("object_id", Node::str(&o.object_id)),
                    ("class", Node::str(o.class.as_str())),
                    ("confidence", Node::Num(o.confidence)),
                    ("source", Node::str(o.source.as_str())),
                    (
                        "samples",
                        Node::Arr(
                            o.samples
                                .iter()
                                .map(|s| {
                                    Node::obj(vec![
                                        ("t", Node::Num(s.t)),
                                        ("center", Node::nums(&[s.center.x, s.center.y, s.center.z])),
                                    ])
                                })
                                .collect(),
                        ),
                    ),
                ];
                if let Some(boxes) = &o.boxes2d {
                    fields.push((
                        "boxes2d",
                        Node::Arr(
                            boxes
                                .iter()
                                .map(|b| {
                                    Node::obj(vec![
                                        ("t", Node::Num(b.t)),
                                        ("box", Node::nums(&b.bbox.to_array())),
                                    ])
                                })
                                .collect(),
                        ),
                    ));
                }
                Node::obj(fields)
            })
            .collect();
        Node::obj(vec![
            ("scene_id", Node::str(&self.scene_id)),
            ("domain", Node::str(self.domain.as_str())),
            ("duration", Node::Num(self.duration)),
            ("frame_timestamps", Node::nums(&self.frame_timestamps)),
            ("objects", Node::Arr(objects)),
        ])
    }

    /// Canonical text form: stable key order, six-decimal floats.
    pub fn to_json_string(&self) -> String {
        self.to_node().render()
    }

    pub fn from_json_str(text: &str, what: &str) -> Result<Self> {
        let raw: RawManifest = serde_json::from_str(text).map_err(|e| Error::malformed(what, e))?;
        let m = raw.into_manifest();
        let violations = m.validate();
        if violations.is_empty() {
            Ok(m)
        } else {
            Err(Error::Invalid {
                what: what.to_string(),
                violations,
            })
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    scene_id: String,
    domain: Domain,
    duration: f64,
    frame_timestamps: Vec<f64>,
    objects: Vec<RawObject>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawObject {
    object_id: String,
    class: ObjectClass,
    confidence: f64,
    source: Source,
    samples: Vec<RawSample>,
    #[serde(default)]
    boxes2d: Option<Vec<RawBox>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSample {
    t: f64,
    center: [f64; 3],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBox {
    t: f64,
    #[serde(rename = "box")]
    bbox: [f64; 4],
}

impl RawManifest {
    fn into_manifest(self) -> SceneManifest {
        SceneManifest {
            scene_id: self.scene_id,
            domain: self.domain,
            duration: self.duration,
            frame_timestamps: self.frame_timestamps,
            objects: self
                .objects
                .into_iter()
                .map(|o| ObjectRecord {
                    object_id: o.object_id,
                    class: o.class,
                    confidence: o.confidence,
                    source: o.source,
                    samples: o
                        .samples
                        .into_iter()
                        .map(|s| Sample {
                            t: s.t,
                            center: Vec3::from(s.center),
                        })
                        .collect(),
                    boxes2d: o.boxes2d.map(|bs| {
                        bs.into_iter()
                            .map(|b| TimedBox {
                                t: b.t,
                                bbox: Box2d::new(b.bbox[0], b.bbox[1], b.bbox[2], b.bbox[3]),
                            })
                            .collect()
                    }),
                })
                .collect(),
        }
    }
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<SceneManifest> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    SceneManifest::from_json_str(&text, &path.display().to_string())
}

/// Writes the canonical form. Floats are rounded to six decimals, so values
/// with finer resolution do not survive a round trip exactly.
pub fn write_manifest(m: &SceneManifest, path: impl AsRef<Path>) -> Result<()> {
    m.check()?;
    let path = path.as_ref();
    fs::write(path, m.to_json_string()).map_err(|e| Error::io(path, e))
}

/// Scene ids must be unique across a dataset.
pub fn validate_dataset(manifests: &[SceneManifest]) -> Vec<Violation> {
    let mut seen = HashSet::new();
    manifests
        .iter()
        .enumerate()
        .filter(|(_, m)| !seen.insert(m.scene_id.as_str()))
        .map(|(i, m)| Violation::new(format!("[{i}].scene_id"), format!("duplicate scene_id {:?}", m.scene_id)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn one_object() -> SceneManifest {
        SceneManifest {
            scene_id: "scene-0001".into(),
            domain: Domain::Driving,
            duration: 1.0,
            frame_timestamps: vec![0.0, 0.5, 1.0],
            objects: vec![ObjectRecord {
                object_id: "car_1".into(),
                class: ObjectClass::Car,
                samples: vec![
                    Sample { t: 0.0, center: Vec3::new(1.0, 2.5, 0.0) },
                    Sample { t: 0.5, center: Vec3::new(2.0, 2.5, 0.0) },
                    Sample { t: 1.0, center: Vec3::new(3.0, 2.5, 0.0) },
                ],
                boxes2d: Some(vec![TimedBox { t: 0.0, bbox: Box2d::new(10.0, 20.0, 30.0, 40.0) }]),
                confidence: 1.0,
                source: Source::Lidar,
            }],
        }
    }

    #[test]
    fn well_formed_round_trip() {
        let m = one_object();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.json");
        write_manifest(&m, &p).unwrap();
        let back = read_manifest(&p).unwrap();
        assert_eq!(back.objects.len(), 1);
        assert_eq!(back, m);
    }

    #[test]
    fn writes_identical_bytes_twice() {
        let m = one_object();
        assert_eq!(m.to_json_string(), m.to_json_string());
        assert!(m.to_json_string().contains("1.000000, 2.500000, 0.000000"));
    }

    #[test]
    fn out_of_order_samples_name_object_and_index() {
        let mut m = one_object();
        m.objects[0].samples.swap(1, 2);
        let err = SceneManifest::from_json_str(&m.to_node().render(), "m.json").unwrap_err();
        match err {
            Error::Invalid { violations, .. } => {
                assert!(violations.iter().any(|v| v.path == "objects[car_1].samples[2].t"), "{violations:?}");
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn lists_every_failing_field() {
        let mut m = one_object();
        m.duration = 25.0;
        m.objects[0].confidence = 1.5;
        m.objects[0].boxes2d = Some(vec![TimedBox { t: 0.0, bbox: Box2d::new(5.0, 5.0, 5.0, 6.0) }]);
        let paths: Vec<_> = m.validate().into_iter().map(|v| v.path).collect();
        assert!(paths.contains(&"duration".to_string()));
        assert!(paths.contains(&"objects[car_1].confidence".to_string()));
        assert!(paths.contains(&"objects[car_1].boxes2d[0].box".to_string()));
    }

    #[test]
    fn frame_budget_enforced() {
        let mut m = one_object();
        m.duration = 20.0;
        m.frame_timestamps = (0..41).map(|i| i as f64 * 0.5).collect();
        assert!(m.validate().iter().any(|v| v.path == "frame_timestamps"));
    }

    #[test]
    fn malformed_json_is_reported() {
        let err = SceneManifest::from_json_str("{\"scene_id\": 3}", "x").unwrap_err();
        assert!(matches!(err, Error::Malformed { .. }));
    }

    #[test]
    fn duplicate_scene_ids() {
        let m = one_object();
        assert_eq!(validate_dataset(&[m.clone(), m]).len(), 1);
    }
}
