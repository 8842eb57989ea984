//! Reader and writer for the bilevel and grayscale Netpbm formats
//! (PBM P1/P4, PGM P2/P5).

use std::fs;
use std::path::Path;

use lattice_itc::GridField64;

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaveMode {
    /// 0/1 field written as P4; any nonzero cell becomes a black pixel.
    Binary,
    /// `[min, max]` mapped linearly onto `[0, 255]` and written as P5.
    GrayNormalized,
}

/// Decoded samples in file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    /// 1 for PBM; the declared maxval for PGM.
    pub maxval: u16,
    /// For PBM, 1 means black.
    pub samples: Vec<u16>,
}

impl Raster {
    /// Foreground is a black PBM pixel, or a PGM sample of at least 128 on
    /// the 0..255 scale.
    pub fn to_mask(&self) -> GridField64 {
        let values = self
            .samples
            .iter()
            .map(|&s| {
                let fg = if self.maxval == 1 {
                    s == 1
                } else {
                    s as u32 * 255 >= 128 * self.maxval as u32
                };
                if fg {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        GridField64::from_vec(self.width, self.height, values).expect("decoded raster has valid size")
    }

    pub fn to_field(&self) -> GridField64 {
        let values = self.samples.iter().map(|&s| s as f64).collect();
        GridField64::from_vec(self.width, self.height, values).expect("decoded raster has valid size")
    }
}

fn malformed(msg: impl Into<String>) -> HarnessError {
    HarnessError::MalformedHeader(msg.into())
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(malformed(format!("expected {what} at byte {start}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| malformed(format!("{what} out of range")))
    }

    /// Consumes the single whitespace byte that ends a binary header.
    fn raster_start(&mut self) -> Result<&'a [u8]> {
        match self.bytes.get(self.pos) {
            Some(b) if b.is_ascii_whitespace() => Ok(&self.bytes[self.pos + 1..]),
            _ => Err(malformed("missing whitespace before raster")),
        }
    }
}

pub fn decode(bytes: &[u8]) -> Result<Raster> {
    if bytes.len() < 2 || bytes[0] != b'P' || !bytes[1].is_ascii_digit() {
        return Err(HarnessError::UnsupportedFormat("not a netpbm file".into()));
    }
    let kind = bytes[1];
    if !matches!(kind, b'1' | b'2' | b'4' | b'5') {
        return Err(HarnessError::UnsupportedFormat(format!("P{}", kind as char)));
    }
    let mut cur = Cursor { bytes, pos: 2 };
    let width = cur.number("width")? as usize;
    let height = cur.number("height")? as usize;
    if width == 0 || height == 0 {
        return Err(malformed(format!("empty image {width}x{height}")));
    }
    let maxval = match kind {
        b'2' | b'5' => {
            let m = cur.number("maxval")?;
            if m == 0 || m > u16::MAX as u32 {
                return Err(malformed(format!("maxval {m} outside 1..=65535")));
            }
            m as u16
        }
        _ => 1,
    };
    let count = width * height;
    let samples = match kind {
        b'1' => {
            let mut s = Vec::with_capacity(count);
            while s.len() < count {
                cur.skip_space_and_comments();
                match cur.bytes.get(cur.pos) {
                    Some(b'0') => s.push(0),
                    Some(b'1') => s.push(1),
                    Some(&b) => return Err(malformed(format!("unexpected byte {b:#04x} in P1 raster"))),
                    None => return Err(malformed("P1 raster is truncated")),
                }
                cur.pos += 1;
            }
            s
        }
        b'2' => (0..count)
            .map(|_| match cur.number("sample") {
                Ok(x) if x <= maxval as u32 => Ok(x as u16),
                Ok(x) => Err(malformed(format!("sample {x} exceeds maxval {maxval}"))),
                Err(_) => Err(malformed("P2 raster is truncated")),
            })
            .collect::<Result<_>>()?,
        b'4' => {
            let raster = cur.raster_start()?;
            let stride = width.div_ceil(8);
            if raster.len() < stride * height {
                return Err(malformed("P4 raster is truncated"));
            }
            let mut s = Vec::with_capacity(count);
            for row in raster[..stride * height].chunks(stride) {
                s.extend((0..width).map(|u| ((row[u / 8] >> (7 - u % 8)) & 1) as u16));
            }
            s
        }
        _ => {
            let raster = cur.raster_start()?;
            let depth = if maxval > 255 { 2 } else { 1 };
            if raster.len() < count * depth {
                return Err(malformed("P5 raster is truncated"));
            }
            let s: Vec<u16> = if depth == 1 {
                raster[..count].iter().map(|&b| b as u16).collect()
            } else {
                raster[..2 * count]
                    .chunks(2)
                    .map(|p| u16::from_be_bytes([p[0], p[1]]))
                    .collect()
            };
            if let Some(x) = s.iter().find(|&&x| x > maxval) {
                return Err(malformed(format!("sample {x} exceeds maxval {maxval}")));
            }
            s
        }
    };
    Ok(Raster {
        width,
        height,
        maxval,
        samples,
    })
}

fn read(path: &Path) -> Result<Raster> {
    let bytes = fs::read(path).map_err(|e| HarnessError::io(path, e))?;
    decode(&bytes)
}

/// Loads a PBM or PGM file as a 0/1 foreground mask.
pub fn load_binary_image(path: impl AsRef<Path>) -> Result<GridField64> {
    Ok(read(path.as_ref())?.to_mask())
}

/// Loads raw sample values, e.g. an external weight map.
pub fn load_gray_image(path: impl AsRef<Path>) -> Result<GridField64> {
    Ok(read(path.as_ref())?.to_field())
}

pub fn encode_pbm(width: usize, height: usize, on: impl Fn(usize, usize) -> bool) -> Vec<u8> {
    let mut out = format!("P4\n{width} {height}\n").into_bytes();
    let stride = width.div_ceil(8);
    for v in 0..height {
        let mut row = vec![0u8; stride];
        for u in (0..width).filter(|&u| on(u, v)) {
            row[u / 8] |= 0x80 >> (u % 8);
        }
        out.extend_from_slice(&row);
    }
    out
}

pub fn encode_pgm(width: usize, height: usize, pixels: &[u8]) -> Vec<u8> {
    assert_eq!(pixels.len(), width * height);
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(pixels);
    out
}

/// Linear rescale of `[min, max]` onto `[0, 255]`; a constant field maps to 0.
pub fn normalize_gray(field: &GridField64) -> Vec<u8> {
    let (lo, hi) = field.min_max();
    let range = hi - lo;
    field
        .values()
        .iter()
        .map(|&x| {
            if range > 0.0 {
                ((x - lo) / range * 255.0).round() as u8
            } else {
                0
            }
        })
        .collect()
}

pub fn encode_field(field: &GridField64, mode: SaveMode) -> Vec<u8> {
    let (w, h) = field.dims();
    match mode {
        SaveMode::Binary => encode_pbm(w, h, |u, v| field.get(u, v) != 0.0),
        SaveMode::GrayNormalized => encode_pgm(w, h, &normalize_gray(field)),
    }
}

pub fn write_file(path: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, bytes).map_err(|e| HarnessError::io(path, e))
}

pub fn save_field(field: &GridField64, path: impl AsRef<Path>, mode: SaveMode) -> Result<()> {
    write_file(path, &encode_field(field, mode))
}
