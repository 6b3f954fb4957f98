//! Binary masks as PGM (`P5`, maxval 255) and probability grids as
//! `SOFTMASK v1` files (row-major little-endian `f32`).

use std::io::{Read, Write};

use super::IoError;
use crate::raster::{BinaryGrid, Grid, SoftGrid};

const SOFT_MAGIC: &str = "SOFTMASK v1";

pub fn write_pgm(w: impl Write, grid: &BinaryGrid) -> Result<(), IoError> {
    write_gray_pgm(w, &grid.map(|b| if b { 255u8 } else { 0 }))
}

/// Writes an 8-bit grayscale PGM.
pub fn write_gray_pgm(mut w: impl Write, grid: &Grid<u8>) -> Result<(), IoError> {
    write!(w, "P5\n{} {}\n255\n", grid.width(), grid.height())?;
    w.write_all(grid.cells())?;
    Ok(())
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.buf.len() {
            match self.buf[self.pos] {
                b'#' => {
                    while self.pos < self.buf.len() && self.buf[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize, IoError> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.buf.len() && self.buf[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.buf[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| IoError::BadHeader(format!("missing or invalid {what} at byte {start}")))
    }
}

fn read_gray(buf: &[u8]) -> Result<(Grid<u8>, usize), IoError> {
    if !buf.starts_with(b"P5") {
        return Err(IoError::BadMagic { expected: "P5" });
    }
    let mut c = Cursor { buf, pos: 2 };
    let width = c.number("width")?;
    let height = c.number("height")?;
    let maxval = c.number("maxval")?;
    if width == 0 || height == 0 || width.checked_mul(height).is_none() {
        return Err(IoError::BadDimensions { width, height });
    }
    if maxval != 255 {
        return Err(IoError::BadHeader(format!("maxval must be 255, got {maxval}")));
    }
    if c.pos >= buf.len() || !buf[c.pos].is_ascii_whitespace() {
        return Err(IoError::BadHeader("missing whitespace after maxval".into()));
    }
    let start = c.pos + 1;
    let n = width * height;
    let found = buf.len() - start;
    if found != n {
        return Err(IoError::Truncated { expected: n, found });
    }
    let grid = Grid::from_vec(height, width, buf[start..].to_vec()).map_err(|_| IoError::BadDimensions { width, height })?;
    Ok((grid, start))
}

/// Reads a binary mask; every pixel must be 0 or 255.
pub fn read_pgm(mut r: impl Read) -> Result<BinaryGrid, IoError> {
    let mut buf = Vec::new();
    r.read_to_end(&mut buf)?;
    let (gray, start) = read_gray(&buf)?;
    if let Some((i, &v)) = gray.cells().iter().enumerate().find(|(_, &v)| v != 0 && v != 255) {
        return Err(IoError::ValueOutOfRange {
            offset: start + i,
            value: v as f64,
        });
    }
    Ok(gray.map(|v| v == 255))
}

pub fn write_softmask(mut w: impl Write, grid: &SoftGrid) -> Result<(), IoError> {
    write!(w, "{SOFT_MAGIC}\n{} {}\n", grid.width(), grid.height())?;
    let mut bytes = Vec::with_capacity(grid.cells().len() * 4);
    for &v in grid.cells() {
        bytes.extend_from_slice(&(v as f32).to_le_bytes());
    }
    w.write_all(&bytes)?;
    Ok(())
}

fn parse_softmask(buf: &[u8]) -> Result<SoftGrid, IoError> {
    let magic = format!("{SOFT_MAGIC}\n");
    if !buf.starts_with(magic.as_bytes()) {
        return Err(IoError::BadMagic { expected: SOFT_MAGIC });
    }
    let rest = &buf[magic.len()..];
    let nl = rest
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| IoError::BadHeader("missing dimension line".into()))?;
    let dims = std::str::from_utf8(&rest[..nl]).map_err(|_| IoError::BadHeader("dimension line is not text".into()))?;
    let parts: Vec<&str> = dims.split(' ').collect();
    let parse = |s: &str| s.parse::<usize>().ok();
    let (width, height) = match parts.as_slice() {
        [w, h] => match (parse(w), parse(h)) {
            (Some(w), Some(h)) => (w, h),
            _ => return Err(IoError::BadHeader(format!("bad dimension line {dims:?}"))),
        },
        _ => return Err(IoError::BadHeader(format!("bad dimension line {dims:?}"))),
    };
    let n = width.checked_mul(height).filter(|&n| n > 0);
    let Some(n) = n else {
        return Err(IoError::BadDimensions { width, height });
    };
    let start = magic.len() + nl + 1;
    let data = &buf[start..];
    let expected = n.checked_mul(4).ok_or(IoError::BadDimensions { width, height })?;
    if data.len() != expected {
        return Err(IoError::Truncated {
            expected,
            found: data.len(),
        });
    }
    let mut cells = Vec::with_capacity(n);
    for (i, chunk) in data.chunks_exact(4).enumerate() {
        let v = f32::from_le_bytes(chunk.try_into().expect("4-byte chunk")) as f64;
        if !(0.0..=1.0).contains(&v) {
            return Err(IoError::ValueOutOfRange {
                offset: start + 4 * i,
                value: v,
            });
        }
        cells.push(v);
    }
    SoftGrid::from_vec(height, width, cells).map_err(|_| IoError::BadDimensions { width, height })
}

pub fn read_softmask(mut r: impl Read) -> Result<SoftGrid, IoError> {
    let mut buf = Vec::new();
    r.read_to_end(&mut buf)?;
    parse_softmask(&buf)
}

/// Reads either format. PGM gray levels map to `v / 255`.
pub fn read_mask_any(mut r: impl Read) -> Result<SoftGrid, IoError> {
    let mut buf = Vec::new();
    r.read_to_end(&mut buf)?;
    if buf.starts_with(b"P5") {
        let (gray, _) = read_gray(&buf)?;
        let g = gray.map(|v| v as f64 / 255.0);
        return Ok(SoftGrid::from_grid(g).expect("gray levels are in [0, 1]"));
    }
    if buf.starts_with(SOFT_MAGIC.as_bytes()) {
        return parse_softmask(&buf);
    }
    Err(IoError::BadMagic {
        expected: "P5 or SOFTMASK v1",
    })
}
