//! Grayscale image files: binary PGM (P5, 8 or 16 bit) and raw float32.
//!
//! Raw float32 layout: magic `BDCF`, `u32` height and width, then row-major
//! little-endian `f32` samples.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::point::{Point, Shape};

const BDCF_MAGIC: &[u8; 4] = b"BDCF";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ImageFormat {
    /// P5 with the given maxval. Samples are rounded and clamped to `[0, maxval]`.
    Pgm { maxval: u16 },
    Float32,
}

impl ImageFormat {
    /// `.bdcf` is float32, anything else 8-bit PGM.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("bdcf") => ImageFormat::Float32,
            _ => ImageFormat::Pgm { maxval: 255 },
        }
    }
}

pub fn write_image(mut w: impl Write, image: &Point, format: ImageFormat) -> Result<()> {
    let shape = image
        .shape()
        .ok_or_else(|| Error::InvalidInput("cannot write an image without a shape".into()))?;
    image.check_finite("image")?;
    match format {
        ImageFormat::Pgm { maxval } => {
            if maxval == 0 {
                return Err(Error::InvalidInput("PGM maxval must be positive".into()));
            }
            write!(w, "P5\n{} {}\n{}\n", shape.width, shape.height, maxval)?;
            let m = maxval as f64;
            let mut bytes = Vec::with_capacity(shape.len() * 2);
            for &v in image.values() {
                let q = v.round().clamp(0.0, m) as u16;
                if maxval < 256 {
                    bytes.push(q as u8);
                } else {
                    bytes.extend_from_slice(&q.to_be_bytes());
                }
            }
            w.write_all(&bytes)?;
        }
        ImageFormat::Float32 => {
            w.write_all(BDCF_MAGIC)?;
            for d in [shape.height, shape.width] {
                let d = u32::try_from(d).map_err(|_| Error::InvalidInput("image too large".into()))?;
                w.write_all(&d.to_le_bytes())?;
            }
            for &v in image.values() {
                w.write_all(&(v as f32).to_le_bytes())?;
            }
        }
    }
    Ok(())
}

/// Detects the format from the leading bytes.
pub fn read_image(r: impl Read, source_name: &str) -> Result<Point> {
    let mut r = BufReader::new(r);
    let head = r.fill_buf()?;
    if head.starts_with(b"P5") {
        read_pgm(r, source_name)
    } else if head.starts_with(BDCF_MAGIC) {
        read_bdcf(r, source_name)
    } else {
        Err(parse_err(source_name, None, "unknown image format (expected P5 or BDCF)"))
    }
}

pub fn save_image(path: &Path, image: &Point, format: ImageFormat) -> Result<()> {
    let mut f = std::io::BufWriter::new(crate::error::create_file(path)?);
    write_image(&mut f, image, format)?;
    f.flush()?;
    Ok(())
}

pub fn load_image(path: &Path) -> Result<Point> {
    read_image(crate::error::open_file(path)?, &path.display().to_string())
}

fn parse_err(source_name: &str, line: Option<usize>, message: impl Into<String>) -> Error {
    Error::Parse {
        source_name: source_name.to_string(),
        line,
        message: message.into(),
    }
}

fn read_pgm(mut r: impl BufRead, source_name: &str) -> Result<Point> {
    // Header: four whitespace-separated tokens; `#` comments run to end of line.
    let mut tokens: Vec<(String, usize)> = Vec::new();
    let mut line = 1;
    let mut cur = String::new();
    let mut cur_line = 1;
    let mut in_comment = false;
    let mut byte = [0u8; 1];
    while tokens.len() < 4 {
        if r.read(&mut byte)? == 0 {
            return Err(parse_err(source_name, Some(line), "truncated PGM header"));
        }
        let c = byte[0];
        if c == b'#' && cur.is_empty() {
            in_comment = true;
        }
        if c.is_ascii_whitespace() || in_comment {
            if !cur.is_empty() {
                tokens.push((std::mem::take(&mut cur), cur_line));
            }
        } else {
            if cur.is_empty() {
                cur_line = line;
            }
            cur.push(c as char);
        }
        if c == b'\n' {
            line += 1;
            in_comment = false;
        }
    }
    let num = |i: usize, what: &str| -> Result<usize> {
        let (s, l) = &tokens[i];
        s.parse::<usize>()
            .map_err(|_| parse_err(source_name, Some(*l), format!("bad {what}: {s:?}")))
    };
    let width = num(1, "width")?;
    let height = num(2, "height")?;
    let maxval = num(3, "maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(parse_err(source_name, Some(tokens[3].1), format!("maxval {maxval} out of range")));
    }
    let shape = Shape::new(height, width);
    let bps = if maxval < 256 { 1 } else { 2 };
    let mut raw = vec![0u8; shape.len() * bps];
    r.read_exact(&mut raw)
        .map_err(|_| parse_err(source_name, None, "truncated PGM pixel data"))?;
    let values = if bps == 1 {
        raw.iter().map(|&b| b as f64).collect()
    } else {
        raw.chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]) as f64)
            .collect()
    };
    Point::image(shape, values)
}

fn read_bdcf(mut r: impl Read, source_name: &str) -> Result<Point> {
    let mut header = [0u8; 12];
    r.read_exact(&mut header)
        .map_err(|_| parse_err(source_name, None, "truncated BDCF header"))?;
    let height = u32::from_le_bytes(header[4..8].try_into().expect("4 bytes")) as usize;
    let width = u32::from_le_bytes(header[8..12].try_into().expect("4 bytes")) as usize;
    let shape = Shape::new(height, width);
    let mut raw = vec![0u8; shape.len() * 4];
    r.read_exact(&mut raw)
        .map_err(|_| parse_err(source_name, None, "truncated BDCF pixel data"))?;
    let values = raw
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
        .collect();
    Point::image(shape, values)
}
