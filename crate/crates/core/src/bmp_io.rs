//! 24-bit uncompressed BMP codec.
//!
//! Layout, little-endian throughout:
//!
//! ```text
//!  0  "BM"            2  u32 file size    6  u32 reserved   10  u32 pixel offset
//! 14  u32 info size  18  i32 width       22  i32 height     26  u16 planes
//! 28  u16 bpp        30  u32 compression 34  u32 image size 38  i32 x ppm
//! 42  i32 y ppm      46  u32 colors      50  u32 important
//! ```
//!
//! Rows are stored BGR, padded to a multiple of 4 bytes, bottom-up when the
//! height is positive and top-down when negative.

use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::color_model::RgbImage;

pub const FILE_HEADER_LEN: usize = 14;
pub const INFO_HEADER_LEN: usize = 40;
pub const HEADER_LEN: usize = FILE_HEADER_LEN + INFO_HEADER_LEN;
/// 72 DPI.
pub const PIXELS_PER_METER: i32 = 2835;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BmpError {
    #[error("truncated file: {field} needs {needed} bytes, only {available} present")]
    Truncated {
        field: &'static str,
        needed: u64,
        available: u64,
    },
    #[error("bad magic: expected \"BM\", found {0:02x?}")]
    BadMagic([u8; 2]),
    #[error("unsupported info header size {0} (at least 40 required)")]
    UnsupportedInfoHeader(u32),
    #[error("unsupported planes value {0} (must be 1)")]
    UnsupportedPlanes(u16),
    #[error("unsupported bpp {0} (only 24-bit is supported)")]
    UnsupportedBpp(u16),
    #[error("unsupported compression {0} (only uncompressed BI_RGB is supported)")]
    UnsupportedCompression(u32),
    #[error("invalid dimensions: width {width}, height {height}")]
    InvalidDimensions { width: i32, height: i32 },
    #[error("pixel offset {offset} points inside the {header_end}-byte header")]
    BadPixelOffset { offset: u32, header_end: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BmpHeader {
    pub file_size: u32,
    pub pixel_offset: u32,
    pub info_size: u32,
    pub width: i32,
    /// Positive for bottom-up rows.
    pub height: i32,
    pub bpp: u16,
    pub compression: u32,
}

impl BmpHeader {
    pub fn row_stride(&self) -> u64 {
        row_stride(self.width.unsigned_abs() as usize) as u64
    }

    pub fn bottom_up(&self) -> bool {
        self.height > 0
    }
}

pub fn row_stride(width: usize) -> usize {
    (3 * width).div_ceil(4) * 4
}

fn need(bytes: &[u8], len: usize, field: &'static str) -> Result<(), BmpError> {
    if bytes.len() < len {
        return Err(BmpError::Truncated {
            field,
            needed: len as u64,
            available: bytes.len() as u64,
        });
    }
    Ok(())
}

fn u16_at(b: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([b[at], b[at + 1]])
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([b[at], b[at + 1], b[at + 2], b[at + 3]])
}

fn i32_at(b: &[u8], at: usize) -> i32 {
    u32_at(b, at) as i32
}

pub fn parse_header(bytes: &[u8]) -> Result<BmpHeader, BmpError> {
    need(bytes, 2, "magic")?;
    if &bytes[..2] != b"BM" {
        return Err(BmpError::BadMagic([bytes[0], bytes[1]]));
    }
    need(bytes, FILE_HEADER_LEN, "file header")?;
    need(bytes, FILE_HEADER_LEN + 4, "info header size")?;
    let info_size = u32_at(bytes, 14);
    if (info_size as usize) < INFO_HEADER_LEN {
        return Err(BmpError::UnsupportedInfoHeader(info_size));
    }
    need(bytes, HEADER_LEN, "info header")?;

    let header = BmpHeader {
        file_size: u32_at(bytes, 2),
        pixel_offset: u32_at(bytes, 10),
        info_size,
        width: i32_at(bytes, 18),
        height: i32_at(bytes, 22),
        bpp: u16_at(bytes, 28),
        compression: u32_at(bytes, 30),
    };
    let planes = u16_at(bytes, 26);
    if planes != 1 {
        return Err(BmpError::UnsupportedPlanes(planes));
    }
    if header.bpp != 24 {
        return Err(BmpError::UnsupportedBpp(header.bpp));
    }
    if header.compression != 0 {
        return Err(BmpError::UnsupportedCompression(header.compression));
    }
    if header.width <= 0 || header.height == 0 || header.height == i32::MIN {
        return Err(BmpError::InvalidDimensions {
            width: header.width,
            height: header.height,
        });
    }
    let header_end = FILE_HEADER_LEN as u64 + info_size as u64;
    if (header.pixel_offset as u64) < header_end {
        return Err(BmpError::BadPixelOffset {
            offset: header.pixel_offset,
            header_end,
        });
    }
    Ok(header)
}

pub fn read_bmp24(bytes: &[u8]) -> Result<RgbImage, BmpError> {
    let header = parse_header(bytes)?;
    let width = header.width as usize;
    let height = header.height.unsigned_abs() as usize;
    let stride = header.row_stride();
    let needed = header.pixel_offset as u64 + stride * height as u64;
    if (bytes.len() as u64) < needed {
        return Err(BmpError::Truncated {
            field: "pixel data",
            needed,
            available: bytes.len() as u64,
        });
    }

    let data = &bytes[header.pixel_offset as usize..];
    let stride = stride as usize;
    let mut pixels = Vec::with_capacity(width * height);
    for y in 0..height {
        let stored = if header.bottom_up() {
            height - 1 - y
        } else {
            y
        };
        let row = &data[stored * stride..stored * stride + 3 * width];
        pixels.extend(row.chunks_exact(3).map(|bgr| [bgr[2], bgr[1], bgr[0]]));
    }
    Ok(RgbImage::new(width, height, pixels).expect("validated dimensions"))
}

pub fn write_bmp24(img: &RgbImage) -> Vec<u8> {
    let (width, height) = img.dimensions();
    let stride = row_stride(width);
    let image_size = stride * height;
    let file_size = HEADER_LEN + image_size;

    let mut out = Vec::with_capacity(file_size);
    out.extend_from_slice(b"BM");
    out.extend_from_slice(&(file_size as u32).to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes());
    out.extend_from_slice(&(HEADER_LEN as u32).to_le_bytes());

    out.extend_from_slice(&(INFO_HEADER_LEN as u32).to_le_bytes());
    out.extend_from_slice(&(width as i32).to_le_bytes());
    out.extend_from_slice(&(height as i32).to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&24u16.to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes());
    out.extend_from_slice(&(image_size as u32).to_le_bytes());
    out.extend_from_slice(&PIXELS_PER_METER.to_le_bytes());
    out.extend_from_slice(&PIXELS_PER_METER.to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes());

    let pad = stride - 3 * width;
    for row in img.pixels().chunks_exact(width).rev() {
        for px in row {
            out.extend_from_slice(&[px[2], px[1], px[0]]);
        }
        out.extend(std::iter::repeat_n(0u8, pad));
    }
    out
}

#[derive(Debug, Error)]
pub enum BmpFileError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}: {source}")]
    Format { path: String, source: BmpError },
}

pub fn read_bmp_file(path: impl AsRef<Path>) -> Result<RgbImage, BmpFileError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| BmpFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_bmp24(&bytes).map_err(|source| BmpFileError::Format {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_bmp_file(path: impl AsRef<Path>, img: &RgbImage) -> io::Result<()> {
    fs::write(path, write_bmp24(img))
}
