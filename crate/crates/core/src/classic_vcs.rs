//! Black-and-white (2,2) visual cryptography with 2×2 pixel expansion.
//!
//! Every secret pixel becomes a 2×2 block in each share. Share 1 gets one
//! of the six blocks with exactly two black subpixels, drawn uniformly. Share
//! 2 repeats that block for a white pixel and uses its complement for a
//! black one. Stacking (OR) yields 2 black subpixels for white and 4 for
//! black. A single share is uniform over the six blocks either way.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::color_model::{check_dimensions, ensure_same_dims};
use crate::error::{Error, Result};

/// Identifier of the generator behind [`encrypt_bw`], recorded with the seed.
pub const RNG_ALGORITHM: &str = "chacha8";

/// Black subpixels of a 2×2 block, indexed top-left, top-right, bottom-left,
/// bottom-right. All C(4,2) choices in lexicographic order, so the
/// complement of pattern `i` is pattern `5 - i`.
pub const PATTERNS: [[bool; 4]; 6] = [
    [true, true, false, false],
    [true, false, true, false],
    [true, false, false, true],
    [false, true, true, false],
    [false, true, false, true],
    [false, false, true, true],
];

/// Row-major bitmap, `true` = black.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitImage {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BitImage {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        check_dimensions(width, height)?;
        if bits.len() != width * height {
            return Err(Error::PixelCount {
                expected: width * height,
                actual: bits.len(),
            });
        }
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> bool,
    ) -> Result<Self> {
        check_dimensions(width, height)?;
        let bits = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        Self::new(width, height, bits)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    fn set(&mut self, x: usize, y: usize, black: bool) {
        self.bits[y * self.width + x] = black;
    }

    /// The 2×2 block whose top-left subpixel is `(2*bx, 2*by)`.
    pub fn block(&self, bx: usize, by: usize) -> [bool; 4] {
        let (x, y) = (2 * bx, 2 * by);
        [
            self.get(x, y),
            self.get(x + 1, y),
            self.get(x, y + 1),
            self.get(x + 1, y + 1),
        ]
    }

    fn put_block(&mut self, bx: usize, by: usize, block: [bool; 4]) {
        let (x, y) = (2 * bx, 2 * by);
        self.set(x, y, block[0]);
        self.set(x + 1, y, block[1]);
        self.set(x, y + 1, block[2]);
        self.set(x + 1, y + 1, block[3]);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicSharePair {
    pub share1: BitImage,
    pub share2: BitImage,
    pub seed: u64,
}

impl ClassicSharePair {
    /// Subpixel expansion per axis.
    pub const EXPANSION: usize = 2;

    pub fn stacked(&self) -> BitImage {
        superimpose(&self.share1, &self.share2).expect("share pair dimensions match")
    }
}

/// Index into [`PATTERNS`] of a block, if it is one of them.
pub fn pattern_index(block: [bool; 4]) -> Option<usize> {
    PATTERNS.iter().position(|p| *p == block)
}

pub fn encrypt_bw(secret: &BitImage, seed: u64) -> ClassicSharePair {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (secret.width * 2, secret.height * 2);
    let mut share1 = BitImage {
        width: w,
        height: h,
        bits: vec![false; w * h],
    };
    let mut share2 = share1.clone();
    for by in 0..secret.height {
        for bx in 0..secret.width {
            let i = rng.random_range(0..PATTERNS.len());
            let j = if secret.get(bx, by) {
                PATTERNS.len() - 1 - i
            } else {
                i
            };
            share1.put_block(bx, by, PATTERNS[i]);
            share2.put_block(bx, by, PATTERNS[j]);
        }
    }
    ClassicSharePair {
        share1,
        share2,
        seed,
    }
}

pub fn superimpose(a: &BitImage, b: &BitImage) -> Result<BitImage> {
    ensure_same_dims(a.dimensions(), b.dimensions())?;
    Ok(BitImage {
        width: a.width,
        height: a.height,
        bits: a.bits.iter().zip(&b.bits).map(|(&p, &q)| p | q).collect(),
    })
}

pub fn decode_by_contrast(stacked: &BitImage) -> Result<BitImage> {
    let (w, h) = stacked.dimensions();
    if w % 2 != 0 || h % 2 != 0 {
        return Err(Error::OddDimensions {
            width: w,
            height: h,
        });
    }
    let mut bits = Vec::with_capacity(w * h / 4);
    for by in 0..h / 2 {
        for bx in 0..w / 2 {
            let weight = stacked.block(bx, by).iter().filter(|&&b| b).count() as u8;
            match weight {
                4 => bits.push(true),
                2 => bits.push(false),
                _ => {
                    return Err(Error::InvalidBlock {
                        x: bx,
                        y: by,
                        weight,
                    })
                }
            }
        }
    }
    BitImage::new(w / 2, h / 2, bits)
}
