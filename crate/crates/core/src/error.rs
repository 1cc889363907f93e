use std::fmt;
use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// One failed invariant, located by a JSON-style field path such as
/// `objects[car_1].samples[2].t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl Violation {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

fn list(vs: &[Violation]) -> String {
    vs.iter()
        .map(|v| format!("  - {v}"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    #[error("{what}: malformed input: {message}")]
    Malformed { what: String, message: String },

    #[error("{what}: {} invariant violation(s)\n{}", violations.len(), list(violations))]
    Invalid {
        what: String,
        violations: Vec<Violation>,
    },

    #[error("{what}: bad magic")]
    BadMagic { what: String },

    #[error("{what}: truncated payload: expected {expected} bytes, found {actual}")]
    Truncated {
        what: String,
        expected: usize,
        actual: usize,
    },

    #[error("run-length sum {sum} does not match {width}x{height} = {expected}")]
    RunLengthMismatch {
        sum: u64,
        width: u32,
        height: u32,
        expected: u64,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-positive or invalid depth {0}")]
    InvalidDepth(f64),

    #[error("insufficient valid pixels: {found} found, {required} required")]
    InsufficientPixels { found: usize, required: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("all masked pixels have invalid depth")]
    EmptyLift,

    #[error("invalid camera pose: {0}")]
    InvalidPose(String),

    #[error("coverage gap: no raw sample within {tolerance} s of grid time {at} s")]
    CoverageGap { at: f64, tolerance: f64 },

    #[error("time {t} s is off-grid or outside the trajectory span [{start}, {end}]")]
    OffGrid { t: f64, start: f64, end: f64 },

    #[error("invalid trajectory: {0}")]
    InvalidTrajectory(String),

    #[error("stationary start: first ground-plane displacement {magnitude:.4} m is below {epsilon} m")]
    StationaryStart { magnitude: f64, epsilon: f64 },

    #[error("object {0} is stationary over the window")]
    StationaryWindow(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("box {0:?} lies outside the {1}x{2} raster")]
    OutOfBounds([f64; 4], u32, u32),

    #[error("pool underflow: {}", .0.iter().map(|(t, s)| format!("{t} short by {s}")).collect::<Vec<_>>().join(", "))]
    PoolUnderflow(Vec<(String, usize)>),

    #[error("synthetic scene: {0}")]
    Synth(String),

    #[error("external extractor: {0}")]
    Extractor(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn malformed(what: impl Into<String>, message: impl fmt::Display) -> Self {
        Error::Malformed {
            what: what.into(),
            message: message.to_string(),
        }
    }

    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
