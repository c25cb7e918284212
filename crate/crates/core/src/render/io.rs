//! File formats.
//!
//! Grid layout (all little-endian):
//!
//! | offset | size | field                                   |
//! |--------|------|-----------------------------------------|
//! | 0      | 8    | magic `RDYNGRID`                        |
//! | 8      | 1    | version (`1`)                           |
//! | 9      | 1    | kind: 0 parameter, 1 dynamical          |
//! | 10     | 2    | reserved, zero                          |
//! | 12     | 4    | width `u32`                             |
//! | 16     | 4    | height `u32`                            |
//! | 20     | 4    | max_iter `u32`                          |
//! | 24     | 32   | x_min, x_max, y_min, y_max as `f64`     |
//!
//! followed by `width · height` cells, row-major with the top row first:
//! outcome `u8` (0 zero, 1 infinity, 2 strange, 3 undecided), flags `u8`
//! (bit 0 degenerate), attractor id `u16`, iterations `u32`.

use super::{Cell, GridSpec, OutcomeCounts, PlaneGrid, PlaneKind, Window};
use crate::error::{Error, Result};
use crate::orbit::Outcome;
use image::RgbImage;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;

pub const GRID_MAGIC: &[u8; 8] = b"RDYNGRID";
pub const GRID_VERSION: u8 = 1;
pub const GRID_HEADER_BYTES: usize = 56;
pub const GRID_CELL_BYTES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImageFormat {
    Ppm,
    Png,
}

impl ImageFormat {
    /// Guesses from the file extension; anything but `.png` is PPM.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("png") => ImageFormat::Png,
            _ => ImageFormat::Ppm,
        }
    }
}

/// Binary P6 with maxval 255.
pub fn encode_ppm(img: &RgbImage) -> Vec<u8> {
    let header = format!("P6\n{} {}\n255\n", img.width(), img.height());
    let mut out = Vec::with_capacity(header.len() + img.as_raw().len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(img.as_raw());
    out
}

/// Parses binary P6 with maxval 255; `#` comments are allowed in the header.
pub fn decode_ppm(bytes: &[u8]) -> std::result::Result<RgbImage, String> {
    let mut pos = 0;
    let mut token = || -> std::result::Result<String, String> {
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err("truncated header".into());
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };
    if token()? != "P6" {
        return Err("not a binary PPM (P6)".into());
    }
    let num = |s: String| s.parse::<u32>().map_err(|_| format!("bad header field {s:?}"));
    let w = num(token()?)?;
    let h = num(token()?)?;
    let maxval = num(token()?)?;
    if maxval != 255 {
        return Err(format!("unsupported maxval {maxval}"));
    }
    // exactly one whitespace byte separates the header from the raster
    let data = bytes.get(pos + 1..).ok_or("truncated header")?;
    let need = w as usize * h as usize * 3;
    if data.len() != need {
        return Err(format!("raster has {} bytes, expected {need}", data.len()));
    }
    RgbImage::from_raw(w, h, data.to_vec()).ok_or_else(|| "raster size mismatch".into())
}

pub fn read_ppm(path: &Path) -> Result<RgbImage> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_ppm(&bytes).map_err(|m| Error::format(path, m))
}

pub fn write_image(img: &RgbImage, path: &Path, format: ImageFormat) -> Result<()> {
    match format {
        ImageFormat::Ppm => fs::write(path, encode_ppm(img)).map_err(|e| Error::io(path, e)),
        ImageFormat::Png => img.save_with_format(path, image::ImageFormat::Png).map_err(|e| match e {
            image::ImageError::IoError(io) => Error::io(path, io),
            other => Error::format(path, other.to_string()),
        }),
    }
}

fn outcome_code(o: Outcome) -> (u8, u16) {
    match o {
        Outcome::ToZero => (0, 0),
        Outcome::ToInfinity => (1, 0),
        Outcome::ToStrange(id) => (2, id),
        Outcome::Undecided => (3, 0),
    }
}

pub(crate) fn encode_grid(grid: &PlaneGrid) -> Vec<u8> {
    let mut out = Vec::with_capacity(GRID_HEADER_BYTES + grid.cells.len() * GRID_CELL_BYTES);
    out.extend_from_slice(GRID_MAGIC);
    out.push(GRID_VERSION);
    out.push(match grid.kind {
        PlaneKind::Parameter => 0,
        PlaneKind::Dynamical => 1,
    });
    out.extend_from_slice(&0u16.to_le_bytes());
    out.extend_from_slice(&(grid.spec.width as u32).to_le_bytes());
    out.extend_from_slice(&(grid.spec.height as u32).to_le_bytes());
    out.extend_from_slice(&grid.max_iter.to_le_bytes());
    let w = &grid.window;
    for v in [w.x_min, w.x_max, w.y_min, w.y_max] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    debug_assert_eq!(out.len(), GRID_HEADER_BYTES);
    for c in &grid.cells {
        let (code, id) = outcome_code(c.outcome);
        out.push(code);
        out.push(c.degenerate as u8);
        out.extend_from_slice(&id.to_le_bytes());
        out.extend_from_slice(&c.iterations.to_le_bytes());
    }
    out
}

pub(crate) fn decode_grid(bytes: &[u8]) -> std::result::Result<PlaneGrid, String> {
    if bytes.len() < GRID_HEADER_BYTES {
        return Err(format!("file too short for a grid header ({} bytes)", bytes.len()));
    }
    if &bytes[0..8] != GRID_MAGIC {
        return Err(format!(
            "bad magic {:?}; not a version-{GRID_VERSION} grid file",
            String::from_utf8_lossy(&bytes[0..8])
        ));
    }
    if bytes[8] != GRID_VERSION {
        return Err(format!("grid version {} unsupported (expected {GRID_VERSION})", bytes[8]));
    }
    let kind = match bytes[9] {
        0 => PlaneKind::Parameter,
        1 => PlaneKind::Dynamical,
        k => return Err(format!("unknown plane kind {k}")),
    };
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let (width, height, max_iter) = (u32_at(12) as usize, u32_at(16) as usize, u32_at(20));
    let window = Window::new(f64_at(24), f64_at(32), f64_at(40), f64_at(48)).map_err(|e| e.to_string())?;
    let spec = GridSpec::new(width, height).map_err(|e| e.to_string())?;
    let body = &bytes[GRID_HEADER_BYTES..];
    if body.len() != spec.len() * GRID_CELL_BYTES {
        return Err(format!(
            "cell data has {} bytes, expected {} for {width}×{height}",
            body.len(),
            spec.len() * GRID_CELL_BYTES
        ));
    }
    let cells = body
        .chunks_exact(GRID_CELL_BYTES)
        .map(|c| {
            let id = u16::from_le_bytes([c[2], c[3]]);
            let outcome = match c[0] {
                0 => Outcome::ToZero,
                1 => Outcome::ToInfinity,
                2 => Outcome::ToStrange(id),
                3 => Outcome::Undecided,
                x => return Err(format!("unknown outcome code {x}")),
            };
            Ok(Cell {
                outcome,
                iterations: u32::from_le_bytes([c[4], c[5], c[6], c[7]]),
                degenerate: c[1] & 1 == 1,
            })
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(PlaneGrid {
        kind,
        window,
        spec,
        max_iter,
        cells,
    })
}

pub fn write_grid(grid: &PlaneGrid, path: &Path) -> Result<()> {
    fs::write(path, encode_grid(grid)).map_err(|e| Error::io(path, e))
}

pub fn read_grid(path: &Path) -> Result<PlaneGrid> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_grid(&bytes).map_err(|m| Error::format(path, m))
}

/// One header row and one data row of outcome counts.
pub fn write_summary_csv(counts: &OutcomeCounts, path: &Path) -> Result<()> {
    let total = counts.to_zero + counts.to_infinity + counts.to_strange + counts.undecided;
    let text = format!(
        "to_zero,to_infinity,to_strange,undecided,degenerate,total\n{},{},{},{},{},{}\n",
        counts.to_zero, counts.to_infinity, counts.to_strange, counts.undecided, counts.degenerate, total
    );
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ppm_two_by_one() {
        let img = RgbImage::from_raw(2, 1, vec![255, 0, 0, 0, 0, 0]).unwrap();
        let bytes = encode_ppm(&img);
        assert_eq!(bytes, b"P6\n2 1\n255\n\xff\x00\x00\x00\x00\x00");
        assert_eq!(decode_ppm(&bytes).unwrap(), img);
    }

    #[test]
    fn ppm_with_comment() {
        let bytes = b"P6 # made by hand\n1 1\n255\n\x01\x02\x03";
        assert_eq!(decode_ppm(bytes).unwrap().as_raw(), &vec![1, 2, 3]);
    }

    #[test]
    fn rejects_bad_magic() {
        let mut bytes = vec![0u8; GRID_HEADER_BYTES];
        bytes[..8].copy_from_slice(b"NOTAGRID");
        let err = decode_grid(&bytes).unwrap_err();
        assert!(err.contains("version-1"), "{err}");
    }
}
