//! Binary PGM (P5) image I/O, 8- or 16-bit, square images only.

use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::model::Image;

/// Reads header tokens, skipping whitespace and `#` comments. Returns the
/// byte offset where pixel data begins.
fn header_tokens(data: &[u8]) -> Result<(Vec<String>, usize)> {
    let mut tokens = Vec::new();
    let mut i = 0;
    while tokens.len() < 4 {
        if i >= data.len() {
            return Err(Error::UnsupportedFormat("truncated header".into()));
        }
        let b = data[i];
        if b == b'#' {
            while i < data.len() && data[i] != b'\n' {
                i += 1;
            }
        } else if b.is_ascii_whitespace() {
            i += 1;
        } else {
            let start = i;
            while i < data.len() && !data[i].is_ascii_whitespace() && data[i] != b'#' {
                i += 1;
            }
            tokens.push(String::from_utf8_lossy(&data[start..i]).into_owned());
        }
    }
    // Exactly one whitespace byte separates the maxval from the raster.
    if i >= data.len() || !data[i].is_ascii_whitespace() {
        return Err(Error::UnsupportedFormat("missing raster separator".into()));
    }
    Ok((tokens, i + 1))
}

/// Loads a binary grayscale PGM. Stored samples are normalized by the
/// maxval so pixel values land in [0, 1], the intensity scale the weight
/// updates assume.
pub fn load_image(path: &Path) -> Result<Image> {
    let data = std::fs::read(path)?;
    let (tokens, offset) = header_tokens(&data)?;
    if tokens[0] != "P5" {
        return Err(Error::UnsupportedFormat(format!("magic '{}', expected P5", tokens[0])));
    }
    let parse = |s: &str, what: &str| -> Result<usize> {
        s.parse().map_err(|_| Error::UnsupportedFormat(format!("bad {what} '{s}'")))
    };
    let width = parse(&tokens[1], "width")?;
    let height = parse(&tokens[2], "height")?;
    let maxval = parse(&tokens[3], "maxval")?;
    if height != width {
        return Err(Error::NonSquareImage { height, width });
    }
    let n = width;
    let bytes_per = match maxval {
        255 => 1,
        65535 => 2,
        other => return Err(Error::UnsupportedFormat(format!("maxval {other}"))),
    };
    let need = n * n * bytes_per;
    let raster = &data[offset..];
    if raster.len() < need {
        return Err(Error::UnsupportedFormat(format!(
            "raster holds {} bytes, need {need}",
            raster.len()
        )));
    }
    let scale = maxval as f64;
    let pixels = Array2::from_shape_fn((n, n), |(r, c)| {
        let i = (r * n + c) * bytes_per;
        let raw = if bytes_per == 1 {
            raster[i] as f64
        } else {
            // 16-bit PGM samples are big-endian.
            u16::from_be_bytes([raster[i], raster[i + 1]]) as f64
        };
        raw / scale
    });
    Image::new(pixels)
}

/// Writes a 16-bit binary PGM. Unit-scale values are quantized to the
/// 1/65535 grid and clamped to [0, 1]; a round trip is lossless at the
/// stored precision.
pub fn save_image(img: &Image, path: &Path) -> Result<()> {
    let n = img.n();
    let mut out = format!("P5\n{n} {n}\n65535\n").into_bytes();
    for v in img.pixels().iter() {
        let q = (v * 65535.0).round().clamp(0.0, 65535.0) as u16;
        out.extend_from_slice(&q.to_be_bytes());
    }
    std::fs::write(path, out)?;
    Ok(())
}
