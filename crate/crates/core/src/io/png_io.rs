use std::io::Cursor;

use png::{BitDepth, ColorType, Decoder, Encoder, Transformations};

use super::{ImageFormat, RawImage};
use crate::error::{Error, Result};

pub(super) fn decode(bytes: &[u8]) -> std::result::Result<RawImage, String> {
    let mut decoder = Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(Transformations::EXPAND);
    let mut reader = decoder.read_info().map_err(|e| e.to_string())?;
    let size = reader.output_buffer_size().ok_or("image too large")?;
    let mut buf = vec![0; size];
    let info = reader.next_frame(&mut buf).map_err(|e| e.to_string())?;
    let (width, height) = (info.width as usize, info.height as usize);
    let stored = match info.color_type {
        ColorType::Grayscale => 1,
        ColorType::GrayscaleAlpha => 2,
        ColorType::Rgb => 3,
        ColorType::Rgba => 4,
        ColorType::Indexed => return Err("indexed colour was not expanded".into()),
    };
    // alpha is dropped
    let kept = if stored >= 3 { 3 } else { 1 };
    let sixteen = info.bit_depth == BitDepth::Sixteen;
    let samples: Vec<f64> = if sixteen {
        buf[..info.line_size * height]
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]) as f64)
            .collect()
    } else {
        buf[..info.line_size * height].iter().map(|b| *b as f64).collect()
    };
    let channels = (0..kept)
        .map(|c| {
            samples
                .iter()
                .skip(c)
                .step_by(stored)
                .take(width * height)
                .copied()
                .collect()
        })
        .collect();
    let format = if sixteen { ImageFormat::Png16 } else { ImageFormat::Png8 };
    Ok(RawImage {
        width,
        height,
        format,
        channels,
    })
}

pub(super) fn encode(width: usize, height: usize, channels: usize, sixteen: bool, samples: &[u16]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    {
        let mut encoder = Encoder::new(&mut out, width as u32, height as u32);
        encoder.set_color(if channels == 3 {
            ColorType::Rgb
        } else {
            ColorType::Grayscale
        });
        encoder.set_depth(if sixteen { BitDepth::Sixteen } else { BitDepth::Eight });
        let bytes: Vec<u8> = if sixteen {
            samples.iter().flat_map(|s| s.to_be_bytes()).collect()
        } else {
            samples.iter().map(|s| *s as u8).collect()
        };
        let mut writer = encoder.write_header().map_err(png_err)?;
        writer.write_image_data(&bytes).map_err(png_err)?;
        writer.finish().map_err(png_err)?;
    }
    Ok(out)
}

fn png_err(e: png::EncodingError) -> Error {
    Error::Io(std::io::Error::other(e))
}
