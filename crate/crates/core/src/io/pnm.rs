//! Netpbm binary greymaps/pixmaps and portable float maps.

use super::{ImageFormat, RawImage};

struct Header {
    magic: [u8; 2],
    fields: Vec<String>,
    data_start: usize,
}

/// Splits off `count` whitespace-separated header tokens (skipping `#`
/// comments), followed by exactly one whitespace byte.
fn read_header(bytes: &[u8], count: usize) -> Result<Header, String> {
    let magic = [bytes[0], bytes[1]];
    let mut pos = 2;
    let mut fields = Vec::with_capacity(count);
    while fields.len() < count {
        match bytes.get(pos) {
            None => return Err("truncated header".into()),
            Some(b'#') => {
                while bytes.get(pos).is_some_and(|b| *b != b'\n') {
                    pos += 1;
                }
            }
            Some(b) if b.is_ascii_whitespace() => pos += 1,
            Some(_) => {
                let start = pos;
                while bytes.get(pos).is_some_and(|b| !b.is_ascii_whitespace()) {
                    pos += 1;
                }
                fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
            }
        }
    }
    if !bytes.get(pos).is_some_and(|b| b.is_ascii_whitespace()) {
        return Err("missing whitespace after header".into());
    }
    Ok(Header {
        magic,
        fields,
        data_start: pos + 1,
    })
}

fn parse_dim(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(format!("invalid dimension '{s}'")),
    }
}

pub(super) fn decode_pnm(bytes: &[u8]) -> Result<RawImage, String> {
    let header = read_header(bytes, 3)?;
    let channels = if &header.magic == b"P6" { 3 } else { 1 };
    let width = parse_dim(&header.fields[0])?;
    let height = parse_dim(&header.fields[1])?;
    let maxval: u32 = header.fields[2]
        .parse()
        .map_err(|_| format!("invalid maxval '{}'", header.fields[2]))?;
    if maxval == 0 || maxval > 65535 {
        return Err(format!("maxval {maxval} out of range"));
    }
    let sample_bytes = if maxval > 255 { 2 } else { 1 };
    let n = width * height * channels;
    let data = &bytes[header.data_start..];
    if data.len() < n * sample_bytes {
        return Err(format!(
            "expected {} data bytes, found {}",
            n * sample_bytes,
            data.len()
        ));
    }
    let samples: Vec<f64> = if sample_bytes == 2 {
        data[..2 * n]
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]) as f64)
            .collect()
    } else {
        data[..n].iter().map(|b| *b as f64).collect()
    };
    let format = if sample_bytes == 2 {
        ImageFormat::Pnm16
    } else {
        ImageFormat::Pnm8
    };
    Ok(RawImage {
        width,
        height,
        format,
        channels: deinterleave(&samples, channels),
    })
}

pub(super) fn encode_pnm(width: usize, height: usize, channels: usize, sixteen: bool, samples: &[u16]) -> Vec<u8> {
    let magic = if channels == 3 { "P6" } else { "P5" };
    let maxval = if sixteen { 65535 } else { 255 };
    let mut out = format!("{magic}\n{width} {height}\n{maxval}\n").into_bytes();
    if sixteen {
        out.extend(samples.iter().flat_map(|s| s.to_be_bytes()));
    } else {
        out.extend(samples.iter().map(|s| *s as u8));
    }
    out
}

pub(super) fn decode_pfm(bytes: &[u8]) -> Result<RawImage, String> {
    let header = read_header(bytes, 3)?;
    let channels = if &header.magic == b"PF" { 3 } else { 1 };
    let width = parse_dim(&header.fields[0])?;
    let height = parse_dim(&header.fields[1])?;
    let scale: f32 = header.fields[2]
        .parse()
        .map_err(|_| format!("invalid scale '{}'", header.fields[2]))?;
    if scale == 0.0 || !scale.is_finite() {
        return Err(format!("invalid scale {scale}"));
    }
    let little_endian = scale < 0.0;
    let n = width * height * channels;
    let data = &bytes[header.data_start..];
    if data.len() < 4 * n {
        return Err(format!("expected {} data bytes, found {}", 4 * n, data.len()));
    }
    let mut samples = vec![0.0; n];
    let row_len = width * channels;
    // scanlines are stored bottom to top
    for (file_row, chunk) in data[..4 * n].chunks_exact(4 * row_len).enumerate() {
        let row = height - 1 - file_row;
        for (k, c) in chunk.chunks_exact(4).enumerate() {
            let b = [c[0], c[1], c[2], c[3]];
            let v = if little_endian {
                f32::from_le_bytes(b)
            } else {
                f32::from_be_bytes(b)
            };
            samples[row * row_len + k] = v as f64;
        }
    }
    Ok(RawImage {
        width,
        height,
        format: ImageFormat::Pfm,
        channels: deinterleave(&samples, channels),
    })
}

pub(super) fn encode_pfm(width: usize, height: usize, planes: &[&[f64]]) -> Vec<u8> {
    let magic = if planes.len() == 3 { "PF" } else { "Pf" };
    let mut out = format!("{magic}\n{width} {height}\n-1.0\n").into_bytes();
    for row in (0..height).rev() {
        for i in 0..width {
            for plane in planes {
                out.extend((plane[row * width + i] as f32).to_le_bytes());
            }
        }
    }
    out
}

fn deinterleave(samples: &[f64], channels: usize) -> Vec<Vec<f64>> {
    (0..channels)
        .map(|c| samples.iter().skip(c).step_by(channels).copied().collect())
        .collect()
}
