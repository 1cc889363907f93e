//! `KMASK001` binary masks: 8-byte magic, `u32` width and height, then `u32`
//! run lengths over the row-major pixel sequence. Runs alternate starting
//! with a zero-run, which is emitted even when its length is 0.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub const MASK_MAGIC: &[u8; 8] = b"KMASK001";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMask {
    pub width: u32,
    pub height: u32,
    bits: Vec<bool>,
}

impl BitMask {
    pub fn empty(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width as usize * height as usize],
        }
    }

    pub fn full(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            bits: vec![true; width as usize * height as usize],
        }
    }

    pub fn from_bits(width: u32, height: u32, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != width as usize * height as usize {
            return Err(Error::DimensionMismatch(format!(
                "{width}x{height} mask needs {} bits, got {}",
                width as usize * height as usize,
                bits.len()
            )));
        }
        Ok(Self { width, height, bits })
    }

    #[inline]
    pub fn get(&self, u: u32, v: u32) -> bool {
        self.bits[(v * self.width + u) as usize]
    }

    #[inline]
    pub fn set(&mut self, u: u32, v: u32, on: bool) {
        self.bits[(v * self.width + u) as usize] = on;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    /// Set pixels as `(u, v)` in row-major order.
    pub fn iter_set(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let w = self.width;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, b)| **b)
            .map(move |(i, _)| (i as u32 % w, i as u32 / w))
    }

    /// Tight pixel bounds `[x1, y1, x2, y2)` of the set pixels.
    pub fn bounds(&self) -> Option<[u32; 4]> {
        let mut it = self.iter_set();
        let (u0, v0) = it.next()?;
        let mut b = [u0, v0, u0 + 1, v0 + 1];
        for (u, v) in it {
            b[0] = b[0].min(u);
            b[1] = b[1].min(v);
            b[2] = b[2].max(u + 1);
            b[3] = b[3].max(v + 1);
        }
        Some(b)
    }

    pub fn runs(&self) -> Vec<u32> {
        let mut runs = Vec::new();
        let mut current = false;
        let mut len = 0u32;
        for &b in &self.bits {
            if b == current {
                len += 1;
            } else {
                runs.push(len);
                current = b;
                len = 1;
            }
        }
        if len > 0 || runs.is_empty() {
            runs.push(len);
        }
        runs
    }

    pub fn from_runs(width: u32, height: u32, runs: &[u32]) -> Result<Self> {
        let expected = width as u64 * height as u64;
        let sum: u64 = runs.iter().map(|&r| r as u64).sum();
        if sum != expected {
            return Err(Error::RunLengthMismatch { sum, width, height, expected });
        }
        let mut bits = Vec::with_capacity(expected as usize);
        for (i, &r) in runs.iter().enumerate() {
            bits.extend(std::iter::repeat_n(i % 2 == 1, r as usize));
        }
        Ok(Self { width, height, bits })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let runs = self.runs();
        let mut out = Vec::with_capacity(16 + 4 * runs.len());
        out.extend_from_slice(MASK_MAGIC);
        out.extend_from_slice(&self.width.to_le_bytes());
        out.extend_from_slice(&self.height.to_le_bytes());
        for r in runs {
            out.extend_from_slice(&r.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8], what: &str) -> Result<Self> {
        if bytes.len() < 8 || &bytes[..8] != MASK_MAGIC {
            return Err(Error::BadMagic { what: what.to_string() });
        }
        if bytes.len() < 16 || !(bytes.len() - 16).is_multiple_of(4) {
            let expected = if bytes.len() < 16 { 16 } else { bytes.len().next_multiple_of(4) };
            return Err(Error::Truncated {
                what: what.to_string(),
                expected,
                actual: bytes.len(),
            });
        }
        let width = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
        let height = u32::from_le_bytes(bytes[12..16].try_into().unwrap());
        let runs: Vec<u32> = bytes[16..]
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Self::from_runs(width, height, &runs)
    }
}

pub fn read_mask(path: impl AsRef<Path>) -> Result<BitMask> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    BitMask::from_bytes(&bytes, &path.display().to_string())
}

pub fn write_mask(m: &BitMask, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, m.to_bytes()).map_err(|e| Error::io(path, e))
}
