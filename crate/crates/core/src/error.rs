use thiserror::Error;

use crate::bmp_io::BmpError;
use crate::color_model::Channel;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("image dimensions must be at least 1x1, got {width}x{height}")]
    EmptyImage { width: usize, height: usize },

    #[error("expected {expected} pixels for the given dimensions, got {actual}")]
    PixelCount { expected: usize, actual: usize },

    #[error("dimension mismatch: {left_width}x{left_height} vs {right_width}x{right_height}")]
    DimensionMismatch {
        left_width: usize,
        left_height: usize,
        right_width: usize,
        right_height: usize,
    },

    #[error(
        "cover {cover} is {cover_width}x{cover_height}, smaller than the \
         {secret_width}x{secret_height} secret"
    )]
    CoverTooSmall {
        cover: usize,
        cover_width: usize,
        cover_height: usize,
        secret_width: usize,
        secret_height: usize,
    },

    #[error("covers {first} and {second} are identical; three distinct covers are required")]
    DuplicateCover { first: usize, second: usize },

    #[error("shares were generated in different modes")]
    ModeMismatch,

    #[error("expected exactly one share per channel, channel {0} is missing or repeated")]
    RoleMismatch(Channel),

    #[error("expected 3 shares, got {0}")]
    ShareCount(usize),

    #[error("stacked image dimensions {width}x{height} are not divisible by 2")]
    OddDimensions { width: usize, height: usize },

    #[error("block at ({x}, {y}) has {weight} black subpixels; a stacked pair has 2 or 4")]
    InvalidBlock { x: usize, y: usize, weight: u8 },

    #[error(transparent)]
    Bmp(#[from] BmpError),
}
