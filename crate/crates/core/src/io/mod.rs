//! Image, layout and diagnostics files.
//!
//! Supported rasters: binary PGM/PPM (`P5`/`P6`, 8 or 16 bit, big-endian),
//! PNG (8 or 16 bit, grey or colour) and PFM (`Pf`/`PF`, 32-bit float,
//! little-endian, bottom-to-top scanlines). Colour images are handled as
//! independent channels.

mod png_io;
mod pnm;
mod trace;

use std::fs;
use std::path::Path;

pub use trace::{load_trace, save_trace, write_trace, TRACE_HEADER};

use crate::error::{Error, Result};
use crate::image::{Field, PositiveImage, Raster};
use crate::layout::FrameLayout;

/// On-disk raster encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Pnm8,
    Pnm16,
    Png8,
    Png16,
    Pfm,
}

impl ImageFormat {
    /// Picks the format from the file extension; `sixteen_bit` selects the
    /// integer depth for `.pgm`/`.ppm`/`.png`.
    pub fn from_path(path: &Path, sixteen_bit: bool) -> Result<Self> {
        let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
        match (ext.as_deref(), sixteen_bit) {
            (Some("pgm" | "ppm" | "pnm"), false) => Ok(ImageFormat::Pnm8),
            (Some("pgm" | "ppm" | "pnm"), true) => Ok(ImageFormat::Pnm16),
            (Some("png"), false) => Ok(ImageFormat::Png8),
            (Some("png"), true) => Ok(ImageFormat::Png16),
            (Some("pfm"), _) => Ok(ImageFormat::Pfm),
            _ => Err(Error::UnsupportedFormat(path.display().to_string())),
        }
    }

    pub fn is_float(self) -> bool {
        self == ImageFormat::Pfm
    }

    /// Largest representable integer sample, `None` for float formats.
    pub fn max_value(self) -> Option<f64> {
        match self {
            ImageFormat::Pnm8 | ImageFormat::Png8 => Some(255.0),
            ImageFormat::Pnm16 | ImageFormat::Png16 => Some(65535.0),
            ImageFormat::Pfm => None,
        }
    }
}

/// A decoded raster before the positivity lift, one plane per channel.
#[derive(Debug, Clone, PartialEq)]
pub struct RawImage {
    pub width: usize,
    pub height: usize,
    pub format: ImageFormat,
    pub channels: Vec<Vec<f64>>,
}

impl RawImage {
    pub fn channel(&self, c: usize) -> Result<Field> {
        Field::new(self.width, self.height, self.channels[c].clone())
    }

    /// The lift applied when the caller does not choose one: 1 for integer
    /// formats, `1e-6 * max` for float data.
    pub fn default_lift(&self) -> f64 {
        if self.format.is_float() {
            let max = self.channels.iter().flatten().fold(0.0f64, |m, v| m.max(*v));
            if max > 0.0 {
                1e-6 * max
            } else {
                1e-6
            }
        } else {
            1.0
        }
    }

    pub fn lift(&self, eps: Option<f64>) -> Result<Vec<PositiveImage>> {
        let eps = eps.unwrap_or_else(|| self.default_lift());
        self.channels
            .iter()
            .map(|plane| PositiveImage::lift(self.width, self.height, plane.clone(), eps))
            .collect()
    }
}

/// Reads any supported raster without modifying its values.
pub fn load_raw(path: impl AsRef<Path>) -> Result<RawImage> {
    let path = path.as_ref();
    let bytes = fs::read(path)?;
    let decode_err = |reason: String| Error::Decode {
        path: path.display().to_string(),
        reason,
    };
    match bytes.get(..2) {
        Some(b"P5") | Some(b"P6") => pnm::decode_pnm(&bytes).map_err(decode_err),
        Some(b"Pf") | Some(b"PF") => pnm::decode_pfm(&bytes).map_err(decode_err),
        _ if bytes.starts_with(b"\x89PNG") => png_io::decode(&bytes).map_err(decode_err),
        _ => Err(Error::UnsupportedFormat(path.display().to_string())),
    }
}

/// Loads a single-channel image and applies the lift `max(value, eps)`.
/// `None` selects [`RawImage::default_lift`].
pub fn load_image(path: impl AsRef<Path>, eps: Option<f64>) -> Result<PositiveImage> {
    let raw = load_raw(path.as_ref())?;
    if raw.channels.len() != 1 {
        return Err(Error::UnsupportedFormat(format!(
            "{} has {} channels; use load_channels",
            path.as_ref().display(),
            raw.channels.len()
        )));
    }
    Ok(raw.lift(eps)?.remove(0))
}

/// Loads every channel of an image as an independent lifted image.
pub fn load_channels(path: impl AsRef<Path>, eps: Option<f64>) -> Result<(Vec<PositiveImage>, ImageFormat)> {
    let raw = load_raw(path)?;
    Ok((raw.lift(eps)?, raw.format))
}

/// Outcome of an image write.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SaveReport {
    /// Samples clamped to the integer range of the format.
    pub clamped: usize,
}

pub fn save_image(img: &impl Raster, path: impl AsRef<Path>, format: ImageFormat) -> Result<SaveReport> {
    save_channels(img.width(), img.height(), &[img.data()], path, format)
}

/// Writes one (grey) or three (colour) planes. Integer formats round to
/// nearest and clamp to the format range; PFM stores `f32`.
pub fn save_channels(
    width: usize,
    height: usize,
    planes: &[&[f64]],
    path: impl AsRef<Path>,
    format: ImageFormat,
) -> Result<SaveReport> {
    if !matches!(planes.len(), 1 | 3) {
        return Err(Error::UnsupportedFormat(format!("{} channels", planes.len())));
    }
    if planes.iter().any(|p| p.len() != width * height) {
        return Err(Error::InvalidImage(format!(
            "plane length does not match {width}x{height}"
        )));
    }
    let mut report = SaveReport::default();
    let bytes = match format {
        ImageFormat::Pfm => pnm::encode_pfm(width, height, planes),
        ImageFormat::Pnm8 | ImageFormat::Pnm16 | ImageFormat::Png8 | ImageFormat::Png16 => {
            let max = format.max_value().expect("integer format");
            let samples = interleave(planes, |v| {
                let r = v.round();
                if !(0.0..=max).contains(&r) || v.is_nan() {
                    report.clamped += 1;
                }
                if v.is_nan() {
                    0
                } else {
                    r.clamp(0.0, max) as u16
                }
            });
            let sixteen = max > 255.0;
            match format {
                ImageFormat::Pnm8 | ImageFormat::Pnm16 => {
                    pnm::encode_pnm(width, height, planes.len(), sixteen, &samples)
                }
                _ => png_io::encode(width, height, planes.len(), sixteen, &samples)?,
            }
        }
    };
    fs::write(path, bytes)?;
    if report.clamped > 0 {
        log::warn!("{} samples clamped to the {format:?} range", report.clamped);
    }
    Ok(report)
}

fn interleave(planes: &[&[f64]], mut convert: impl FnMut(f64) -> u16) -> Vec<u16> {
    let n = planes[0].len();
    let mut out = Vec::with_capacity(n * planes.len());
    for p in 0..n {
        for plane in planes {
            out.push(convert(plane[p]));
        }
    }
    out
}

pub fn load_layout(path: impl AsRef<Path>) -> Result<FrameLayout> {
    FrameLayout::from_json(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lift_zero_pixels_of_8_bit_image() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("z.pgm");
        let raw = Field::new(3, 1, vec![0.0, 5.0, 255.0]).unwrap();
        save_image(&raw, &path, ImageFormat::Pnm8).unwrap();
        let img = load_image(&path, Some(1.0)).unwrap();
        assert_eq!(img.data(), &[1.0, 5.0, 255.0]);
        assert_eq!(load_image(&path, None).unwrap().floor(), 1.0);
    }

    #[test]
    fn positive_pfm_is_unchanged() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.pfm");
        let img = PositiveImage::from_fn(5, 3, |i, j| 0.125 + i as f64 * 0.5 + j as f64).unwrap();
        save_image(&img, &path, ImageFormat::Pfm).unwrap();
        let back = load_image(&path, None).unwrap();
        assert_eq!(back.data(), img.data());
    }

    #[test]
    fn sixteen_bit_pgm_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.pgm");
        let img = PositiveImage::from_fn(7, 4, |i, j| 1.0 + ((i * 9973 + j * 7919) % 65535) as f64).unwrap();
        save_image(&img, &path, ImageFormat::Pnm16).unwrap();
        let once = load_image(&path, Some(1.0)).unwrap();
        assert_eq!(once.data(), img.data());
        let path2 = dir.path().join("b.pgm");
        save_image(&once, &path2, ImageFormat::Pnm16).unwrap();
        assert_eq!(fs::read(&path).unwrap(), fs::read(&path2).unwrap());
    }

    #[test]
    fn png_round_trip_and_clamping() {
        let dir = tempfile::tempdir().unwrap();
        for (format, max) in [(ImageFormat::Png8, 255.0), (ImageFormat::Png16, 65535.0)] {
            let path = dir.path().join("a.png");
            let field = Field::new(4, 2, vec![1.0, 2.4, 2.6, max, max + 10.0, -3.0, 7.0, 8.0]).unwrap();
            let report = save_image(&field, &path, format).unwrap();
            assert_eq!(report.clamped, 2);
            let raw = load_raw(&path).unwrap();
            assert_eq!(raw.format, format);
            assert_eq!(raw.channels[0], vec![1.0, 2.0, 3.0, max, max, 0.0, 7.0, 8.0]);
        }
    }

    #[test]
    fn constant_image_round_trips_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let img = PositiveImage::constant(6, 6, 42.0).unwrap();
        for (name, format) in [
            ("c.pgm", ImageFormat::Pnm8),
            ("c.png", ImageFormat::Png16),
            ("c.pfm", ImageFormat::Pfm),
        ] {
            let path = dir.path().join(name);
            assert_eq!(save_image(&img, &path, format).unwrap().clamped, 0);
            assert_eq!(load_image(&path, None).unwrap().data(), img.data());
        }
    }

    #[test]
    fn colour_channels() {
        let dir = tempfile::tempdir().unwrap();
        let r = vec![10.0, 20.0];
        let g = vec![30.0, 40.0];
        let b = vec![50.0, 60.0];
        for name in ["c.ppm", "c.png", "c.pfm"] {
            let path = dir.path().join(name);
            let format = ImageFormat::from_path(&path, false).unwrap();
            save_channels(2, 1, &[&r, &g, &b], &path, format).unwrap();
            let (channels, _) = load_channels(&path, None).unwrap();
            assert_eq!(channels.len(), 3);
            assert_eq!(channels[1].data(), &g[..]);
            assert!(load_image(&path, None).is_err());
        }
    }

    #[test]
    fn unsupported_and_corrupt_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.bmp");
        fs::write(&path, b"BM....").unwrap();
        assert!(matches!(load_raw(&path), Err(Error::UnsupportedFormat(_))));
        let path = dir.path().join("x.pgm");
        fs::write(&path, b"P5\n4 4\n255\n\x01\x02").unwrap();
        assert!(matches!(load_raw(&path), Err(Error::Decode { .. })));
        assert!(matches!(load_raw(dir.path().join("missing.pgm")), Err(Error::Io(_))));
        assert!(ImageFormat::from_path(Path::new("a.tif"), false).is_err());
    }
}
