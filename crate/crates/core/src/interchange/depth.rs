//! `KDEPTH01` depth rasters: 8-byte magic, `u32` width and height, then
//! row-major little-endian `f32` values.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub const DEPTH_MAGIC: &[u8; 8] = b"KDEPTH01";
const HEADER_LEN: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DepthKind {
    /// Unitless, up to an unknown global scale.
    Relative,
    /// Meters.
    Metric,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DepthRaster {
    pub width: u32,
    pub height: u32,
    pub values: Vec<f32>,
    pub kind: DepthKind,
}

/// A depth value is usable when finite and strictly positive; anything else
/// is a hole left by the upstream model.
#[inline]
pub fn is_valid_depth(d: f32) -> bool {
    d.is_finite() && d > 0.0
}

impl DepthRaster {
    pub fn new(width: u32, height: u32, values: Vec<f32>, kind: DepthKind) -> Result<Self> {
        let expected = width as usize * height as usize;
        if values.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "{width}x{height} raster needs {expected} values, got {}",
                values.len()
            )));
        }
        Ok(Self { width, height, values, kind })
    }

    pub fn filled(width: u32, height: u32, value: f32, kind: DepthKind) -> Self {
        Self {
            width,
            height,
            values: vec![value; width as usize * height as usize],
            kind,
        }
    }

    #[inline]
    pub fn get(&self, u: u32, v: u32) -> f32 {
        self.values[(v * self.width + u) as usize]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 4 * self.values.len());
        out.extend_from_slice(DEPTH_MAGIC);
        out.extend_from_slice(&self.width.to_le_bytes());
        out.extend_from_slice(&self.height.to_le_bytes());
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8], kind: DepthKind, what: &str) -> Result<Self> {
        if bytes.len() < 8 || &bytes[..8] != DEPTH_MAGIC {
            return Err(Error::BadMagic { what: what.to_string() });
        }
        if bytes.len() < HEADER_LEN {
            return Err(Error::Truncated {
                what: what.to_string(),
                expected: HEADER_LEN,
                actual: bytes.len(),
            });
        }
        let width = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
        let height = u32::from_le_bytes(bytes[12..16].try_into().unwrap());
        let count = width as usize * height as usize;
        let expected = HEADER_LEN + 4 * count;
        if bytes.len() != expected {
            return Err(Error::Truncated {
                what: what.to_string(),
                expected,
                actual: bytes.len(),
            });
        }
        let values = bytes[HEADER_LEN..]
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(Self { width, height, values, kind })
    }
}

pub fn read_depth(path: impl AsRef<Path>, kind: DepthKind) -> Result<DepthRaster> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    DepthRaster::from_bytes(&bytes, kind, &path.display().to_string())
}

pub fn write_depth(d: &DepthRaster, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, d.to_bytes()).map_err(|e| Error::io(path, e))
}
