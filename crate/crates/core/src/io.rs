//! Reading and writing 8-bit PGM and PNG files.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use image::codecs::png::PngEncoder;
use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{DynamicImage, ExtendedColorType, ImageEncoder, ImageReader};

use crate::error::{Error, Result};
use crate::image::{GapMask, GrayImage};

/// Mask pixels below this value mark gaps.
pub const MASK_THRESHOLD: u8 = 128;

fn unsupported(path: &Path, reason: impl Into<String>) -> Error {
    Error::UnsupportedFormat {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

fn luminance(r: u8, g: u8, b: u8) -> f64 {
    (0.299 * f64::from(r) + 0.587 * f64::from(g) + 0.114 * f64::from(b)).round()
}

fn decode_8bit(path: &Path) -> Result<(usize, usize, Vec<u8>)> {
    let decoded = ImageReader::open(path)?.with_guessed_format()?.decode()?;
    let (w, h) = (decoded.width() as usize, decoded.height() as usize);
    let gray: Vec<u8> = match decoded {
        DynamicImage::ImageLuma8(buf) => buf.into_raw(),
        DynamicImage::ImageLumaA8(buf) => buf.pixels().map(|p| p.0[0]).collect(),
        DynamicImage::ImageRgb8(buf) => buf.pixels().map(|p| luminance(p.0[0], p.0[1], p.0[2]) as u8).collect(),
        DynamicImage::ImageRgba8(buf) => buf.pixels().map(|p| luminance(p.0[0], p.0[1], p.0[2]) as u8).collect(),
        other => {
            return Err(unsupported(
                path,
                format!("only 8-bit images are supported, found {:?}", other.color()),
            ))
        }
    };
    Ok((w, h, gray))
}

/// Reads an 8-bit grayscale image; colour images are converted with
/// `Y = 0.299 R + 0.587 G + 0.114 B` rounded to the nearest level.
pub fn read_image(path: impl AsRef<Path>) -> Result<GrayImage> {
    let (w, h, gray) = decode_8bit(path.as_ref())?;
    GrayImage::new(w, h, gray.into_iter().map(f64::from).collect())
}

/// Rounds half away from zero and clamps to `0..=255`.
pub fn quantize(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

fn write_gray(bytes: &[u8], width: usize, height: usize, path: &Path) -> Result<()> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .unwrap_or_default();
    let (w, h) = (width as u32, height as u32);
    let out = BufWriter::new(File::create(path)?);
    match ext.as_str() {
        "pgm" | "pnm" => PnmEncoder::new(out)
            .with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary))
            .write_image(bytes, w, h, ExtendedColorType::L8)?,
        "png" => PngEncoder::new(out).write_image(bytes, w, h, ExtendedColorType::L8)?,
        _ => return Err(unsupported(path, "output must end in .pgm, .pnm or .png")),
    }
    Ok(())
}

/// Writes an 8-bit PGM (binary) or PNG, chosen by extension.
pub fn write_image(image: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    let bytes: Vec<u8> = image.pixels().iter().map(|&v| quantize(v)).collect();
    write_gray(&bytes, image.width(), image.height(), path.as_ref())
}

/// Reads a mask; pixels darker than [`MASK_THRESHOLD`] are gaps.
pub fn read_mask(path: impl AsRef<Path>) -> Result<GapMask> {
    let (w, h, gray) = decode_8bit(path.as_ref())?;
    GapMask::new(w, h, gray.into_iter().map(|v| v < MASK_THRESHOLD).collect())
}

/// Writes a mask with gaps as 0 and present pixels as 255.
pub fn write_mask(mask: &GapMask, path: impl AsRef<Path>) -> Result<()> {
    let bytes: Vec<u8> = mask.flags().iter().map(|&m| if m { 0 } else { 255 }).collect();
    write_gray(&bytes, mask.width(), mask.height(), path.as_ref())
}
