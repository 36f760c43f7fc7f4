//! Binary 8-bit portable graymap (P5) reader/writer and a bilinear
//! rescaler. Kept dependency-free so image bytes are bit-exact.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

fn ingest_err(path: &Path, reason: impl Into<String>) -> Error {
    Error::Ingestion {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

/// Read a binary graymap. Returns `(width, height, row-major bytes)`.
pub fn read_pgm(path: &Path) -> Result<(usize, usize, Vec<u8>)> {
    let bytes = fs::read(path).map_err(|e| ingest_err(path, e.to_string()))?;
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        let reason = if bytes.starts_with(b"P2") {
            "ASCII graymap (P2) not supported; expected binary P5"
        } else {
            "not a binary graymap (missing P5 magic)"
        };
        return Err(ingest_err(path, reason));
    }

    // Header tokens: width, height, maxval; '#' starts a comment.
    let mut pos = 2usize;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        // skip whitespace and comments
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                break;
            }
        }
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if pos == start {
            return Err(ingest_err(path, "malformed graymap header"));
        }
        let token = std::str::from_utf8(&bytes[start..pos]).unwrap();
        *field = token
            .parse()
            .map_err(|_| ingest_err(path, "malformed graymap header"))?;
    }
    let [width, height, maxval] = fields;
    if width == 0 || height == 0 {
        return Err(ingest_err(path, "zero image dimension"));
    }
    if maxval == 0 || maxval > 255 {
        return Err(ingest_err(
            path,
            format!("maxval {maxval} is not 8-bit grayscale"),
        ));
    }
    // Single whitespace byte separates header from raster data.
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(ingest_err(path, "malformed graymap header"));
    }
    pos += 1;
    let expected = width * height;
    if bytes.len() - pos < expected {
        return Err(ingest_err(
            path,
            format!(
                "truncated raster: expected {expected} bytes, found {}",
                bytes.len() - pos
            ),
        ));
    }
    Ok((width, height, bytes[pos..pos + expected].to_vec()))
}

/// Write a binary graymap with maxval 255.
pub fn write_pgm(path: &Path, width: usize, height: usize, data: &[u8]) -> Result<()> {
    if data.len() != width * height {
        return Err(Error::Dimension(format!(
            "raster has {} bytes for a {width}x{height} image",
            data.len()
        )));
    }
    let mut file = fs::File::create(path)?;
    write!(file, "P5\n{width} {height}\n255\n")?;
    file.write_all(data)?;
    Ok(())
}

/// Bilinear rescale of a row-major image, pixel-center aligned.
pub fn resize_bilinear(
    src: &[f64],
    src_w: usize,
    src_h: usize,
    dst_w: usize,
    dst_h: usize,
) -> Vec<f64> {
    if src_w == dst_w && src_h == dst_h {
        return src.to_vec();
    }
    let mut out = vec![0.0; dst_w * dst_h];
    let sx = src_w as f64 / dst_w as f64;
    let sy = src_h as f64 / dst_h as f64;
    for oy in 0..dst_h {
        let fy = ((oy as f64 + 0.5) * sy - 0.5).clamp(0.0, (src_h - 1) as f64);
        let y0 = fy.floor() as usize;
        let y1 = (y0 + 1).min(src_h - 1);
        let wy = fy - y0 as f64;
        for ox in 0..dst_w {
            let fx = ((ox as f64 + 0.5) * sx - 0.5).clamp(0.0, (src_w - 1) as f64);
            let x0 = fx.floor() as usize;
            let x1 = (x0 + 1).min(src_w - 1);
            let wx = fx - x0 as f64;
            let top = src[y0 * src_w + x0] * (1.0 - wx) + src[y0 * src_w + x1] * wx;
            let bottom = src[y1 * src_w + x0] * (1.0 - wx) + src[y1 * src_w + x1] * wx;
            out[oy * dst_w + ox] = top * (1.0 - wy) + bottom * wy;
        }
    }
    out
}
