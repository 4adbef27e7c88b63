//! PNG/PPM/PGM decode and encode, converting between 8-bit pixels and the
//! floating-point planes the solver works on.
//!
//! Quantization happens only here: values are rounded to nearest (ties
//! away from zero) and clamped to `[0, 255]` on save. 16-bit inputs are
//! rescaled to `[0, 255]` with a warning.

use std::path::Path;

use image::{DynamicImage, GrayImage, RgbImage};
use tvdehaze::ImagePlane;

use crate::error::CliError;

fn plane_from_luma8(img: &GrayImage) -> Result<ImagePlane, CliError> {
    let (w, h) = img.dimensions();
    let data = img.pixels().map(|p| p.0[0] as f64).collect();
    ImagePlane::new(h as usize, w as usize, data).map_err(|e| CliError::Io(e.to_string()))
}

fn planes_from_rgb8(img: &RgbImage) -> Result<Vec<ImagePlane>, CliError> {
    let (w, h) = img.dimensions();
    let mut channels = Vec::with_capacity(3);
    for c in 0..3 {
        let data = img.pixels().map(|p| p.0[c] as f64).collect();
        channels.push(
            ImagePlane::new(h as usize, w as usize, data)
                .map_err(|e| CliError::Io(e.to_string()))?,
        );
    }
    Ok(channels)
}

/// Decodes an image into 1 (grayscale) or 3 (RGB) planes in `[0, 255]`.
pub fn load_channels(path: &Path) -> Result<Vec<ImagePlane>, CliError> {
    let decoded =
        image::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    match decoded {
        DynamicImage::ImageLuma8(g) => Ok(vec![plane_from_luma8(&g)?]),
        DynamicImage::ImageRgb8(rgb) => planes_from_rgb8(&rgb),
        DynamicImage::ImageLumaA8(ga) => {
            eprintln!("warning: {}: alpha channel ignored", path.display());
            Ok(vec![plane_from_luma8(
                &DynamicImage::ImageLumaA8(ga).to_luma8(),
            )?])
        }
        DynamicImage::ImageRgba8(rgba) => {
            eprintln!("warning: {}: alpha channel ignored", path.display());
            planes_from_rgb8(&DynamicImage::ImageRgba8(rgba).to_rgb8())
        }
        DynamicImage::ImageLuma16(g16) => {
            eprintln!(
                "warning: {}: 16-bit input rescaled to [0, 255]",
                path.display()
            );
            let (w, h) = g16.dimensions();
            let data = g16
                .pixels()
                .map(|p| p.0[0] as f64 * 255.0 / 65535.0)
                .collect();
            Ok(vec![ImagePlane::new(h as usize, w as usize, data)
                .map_err(|e| CliError::Io(e.to_string()))?])
        }
        DynamicImage::ImageRgb16(rgb16) => {
            eprintln!(
                "warning: {}: 16-bit input rescaled to [0, 255]",
                path.display()
            );
            let (w, h) = rgb16.dimensions();
            let mut channels = Vec::with_capacity(3);
            for c in 0..3 {
                let data = rgb16
                    .pixels()
                    .map(|p| p.0[c] as f64 * 255.0 / 65535.0)
                    .collect();
                channels.push(
                    ImagePlane::new(h as usize, w as usize, data)
                        .map_err(|e| CliError::Io(e.to_string()))?,
                );
            }
            Ok(channels)
        }
        other => {
            eprintln!(
                "warning: {}: unsupported pixel layout, converted to 8-bit RGB",
                path.display()
            );
            planes_from_rgb8(&other.to_rgb8())
        }
    }
}

/// Nearest integer with ties away from zero, clamped to one byte.
pub fn quantize(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// Encodes 1 or 3 planes as an 8-bit grayscale or RGB file; the format
/// follows the extension (png, ppm, pgm).
pub fn save_channels(path: &Path, channels: &[ImagePlane]) -> Result<(), CliError> {
    match channels {
        [gray] => {
            let (h, w) = (gray.rows() as u32, gray.cols() as u32);
            let bytes: Vec<u8> = gray.as_slice().iter().map(|&v| quantize(v)).collect();
            let img = GrayImage::from_raw(w, h, bytes)
                .ok_or_else(|| CliError::Io("buffer size mismatch".into()))?;
            img.save(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
        }
        [r, g, b] => {
            let (h, w) = (r.rows() as u32, r.cols() as u32);
            let mut bytes = Vec::with_capacity((w * h * 3) as usize);
            for k in 0..r.len() {
                bytes.push(quantize(r.as_slice()[k]));
                bytes.push(quantize(g.as_slice()[k]));
                bytes.push(quantize(b.as_slice()[k]));
            }
            let img = RgbImage::from_raw(w, h, bytes)
                .ok_or_else(|| CliError::Io("buffer size mismatch".into()))?;
            img.save(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
        }
        other => Err(CliError::Io(format!(
            "cannot encode {} channels",
            other.len()
        ))),
    }
}

/// Saves a `[0, 1]` map (e.g. a transmission field) as an 8-bit grayscale
/// image with gray level `round(255 * v)`.
pub fn save_unit_map(path: &Path, map: &ImagePlane) -> Result<(), CliError> {
    save_channels(path, &[map.map(|v| 255.0 * v)])
}
