use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ImageEncoder, ImageFormat, Rgb};

use crate::error::{Error, Result};
use crate::interchange::{Box2d, Color};

pub type RgbRaster = image::RgbImage;

/// Inclusive pixel extent `(l, t, r, b)` covered by a box.
fn extent(b: &Box2d) -> (u32, u32, u32, u32) {
    (
        b.x1.floor() as u32,
        b.y1.floor() as u32,
        (b.x2.ceil() as u32).saturating_sub(1),
        (b.y2.ceil() as u32).saturating_sub(1),
    )
}

/// Draws rectangle outlines `thickness` pixels wide, inside each box's
/// pixel extent. Every other pixel is left untouched.
pub fn render_overlay(frame: &RgbRaster, boxes: &[(Box2d, Color)], thickness: u32) -> Result<RgbRaster> {
    let (w, h) = frame.dimensions();
    for (b, _) in boxes {
        if !b.is_well_formed() || b.x1 < 0.0 || b.y1 < 0.0 || b.x2 > w as f64 || b.y2 > h as f64 {
            return Err(Error::OutOfBounds(b.to_array(), w, h));
        }
    }
    let mut out = frame.clone();
    for (b, color) in boxes {
        let (l, t, r, bt) = extent(b);
        let px = Rgb(color.rgb());
        for y in t..=bt {
            for x in l..=r {
                if x - l < thickness || r - x < thickness || y - t < thickness || bt - y < thickness {
                    out.put_pixel(x, y, px);
                }
            }
        }
    }
    Ok(out)
}

/// Pixels an outline of the given thickness covers for a box.
pub fn outline_pixel_count(b: &Box2d, thickness: u32) -> u64 {
    let (l, t, r, bt) = extent(b);
    let (w, h) = ((r - l + 1) as u64, (bt - t + 1) as u64);
    let inner = |n: u64| n.saturating_sub(2 * thickness as u64);
    w * h - inner(w) * inner(h)
}

pub fn write_ppm(raster: &RgbRaster, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    PnmEncoder::new(BufWriter::new(file))
        .with_subtype(PnmSubtype::Pixmap(SampleEncoding::Binary))
        .write_image(raster.as_raw(), raster.width(), raster.height(), image::ExtendedColorType::Rgb8)
        .map_err(|e| Error::malformed(path.display().to_string(), e))
}

pub fn read_ppm(path: impl AsRef<Path>) -> Result<RgbRaster> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    image::load_from_memory_with_format(&bytes, ImageFormat::Pnm)
        .map(|img| img.to_rgb8())
        .map_err(|e| Error::malformed(path.display().to_string(), e))
}
