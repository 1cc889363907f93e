//! On-disk formats shared by every stage: scene manifests (JSON), depth
//! rasters and masks (binary), QA datasets and predictions (JSON Lines).

pub mod depth;
pub(crate) mod fixed;
pub mod jsonl;
pub mod manifest;
pub mod mask;
pub mod qa;

pub use depth::{is_valid_depth, read_depth, write_depth, DepthKind, DepthRaster};
pub use jsonl::{parse_jsonl, read_jsonl, to_jsonl_string, write_jsonl};
pub use manifest::{
    read_manifest, validate_dataset, write_manifest, Box2d, Domain, ObjectClass, ObjectRecord,
    Sample, SceneManifest, Source, TimedBox, MAX_DURATION, MAX_FRAMES,
};
pub use mask::{read_mask, write_mask, BitMask};
pub use qa::{Answer, Color, Polarity, QaItem, QaParams, Task};
