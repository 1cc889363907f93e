//! Kinematic grounding of tracked objects in video: metric trajectories
//! from 3D annotations or monocular reconstructions, traveled distance,
//! speed and clock-face headings, template QA generation over seven tasks,
//! label-balanced benchmark assembly and scoring of model responses.

pub mod bench;
pub mod config;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod ground;
pub mod interchange;
pub mod pseudolabel;
pub mod qagen;
pub mod synth;
pub mod trajectory;

pub use error::{Error, Result};
