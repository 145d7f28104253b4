//! Choosing which cover carries which primitive channel.
//!
//! Every (channel, cover) pair gets a cost: the mean absolute difference
//! between the quarter-reduced secret channel and the three-quarter-scaled
//! matching channel of the cover, over the cover's top-left region of the
//! secret's size. The assignment is the bijection with the smallest total
//! cost, found by trying all six permutations.

use rayon::prelude::*;

use crate::color_model::{
    rgb_to_cmy, scale_three_quarter, Channel, ChannelPlane, CmyPlanes, RgbImage,
};
use crate::error::{Error, Result};

/// Max CMY channel at or above this counts as a dark pixel.
pub const DARK_LEVEL: u8 = 192;
/// Fraction of dark pixels above which a secret gets the dark-image warning.
pub const DARK_WARNING_FRACTION: f64 = 0.5;

/// The six bijections {C, M, Y} → {0, 1, 2} in lexicographic order.
pub const PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

#[derive(Debug, Clone, PartialEq)]
pub struct CoverAssignment {
    /// `mapping[channel.index()]` is the cover carrying that channel.
    mapping: [usize; 3],
    /// `costs[channel.index()][cover]`, mean absolute difference.
    costs: [[f64; 3]; 3],
    total_cost: f64,
}

impl CoverAssignment {
    /// Builds an assignment from a known mapping, e.g. one read from share
    /// metadata. Costs are unknown and left at zero.
    pub fn from_mapping(mapping: [usize; 3]) -> Option<Self> {
        if !PERMUTATIONS.contains(&mapping) {
            return None;
        }
        Some(Self {
            mapping,
            costs: [[0.0; 3]; 3],
            total_cost: 0.0,
        })
    }

    pub fn cover_for(&self, channel: Channel) -> usize {
        self.mapping[channel.index()]
    }

    pub fn channel_for(&self, cover: usize) -> Option<Channel> {
        self.mapping
            .iter()
            .position(|&k| k == cover)
            .and_then(Channel::from_index)
    }

    pub fn mapping(&self) -> [usize; 3] {
        self.mapping
    }

    pub fn cost(&self, channel: Channel, cover: usize) -> f64 {
        self.costs[channel.index()][cover]
    }

    pub fn costs(&self) -> &[[f64; 3]; 3] {
        &self.costs
    }

    pub fn total_cost(&self) -> f64 {
        self.total_cost
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuitabilityReport {
    pub size_ok: [bool; 3],
    pub dark_fraction: f64,
    pub dark_warning: bool,
}

impl SuitabilityReport {
    pub fn all_sizes_ok(&self) -> bool {
        self.size_ok.iter().all(|&ok| ok)
    }
}

/// Sum of absolute differences over the secret-sized top-left region.
fn abs_diff_sum(reduced: &ChannelPlane, cover_channel: &ChannelPlane) -> Result<u64> {
    let (w, h) = reduced.dimensions();
    if cover_channel.width() < w || cover_channel.height() < h {
        return Err(Error::DimensionMismatch {
            left_width: w,
            left_height: h,
            right_width: cover_channel.width(),
            right_height: cover_channel.height(),
        });
    }
    let sum = reduced
        .values()
        .chunks_exact(w)
        .zip(cover_channel.values().chunks_exact(cover_channel.width()))
        .map(|(a, b)| {
            a.iter()
                .zip(&b[..w])
                .map(|(&x, &y)| x.abs_diff(y) as u64)
                .sum::<u64>()
        })
        .sum();
    Ok(sum)
}

/// Mean absolute difference between a reduced secret plane and a scaled cover plane.
pub fn score_cover(reduced: &ChannelPlane, cover_channel: &ChannelPlane) -> Result<f64> {
    let sum = abs_diff_sum(reduced, cover_channel)?;
    Ok(sum as f64 / (reduced.width() * reduced.height()) as f64)
}

fn size_error(cover: usize, img: &RgbImage, secret: (usize, usize)) -> Error {
    Error::CoverTooSmall {
        cover,
        cover_width: img.width(),
        cover_height: img.height(),
        secret_width: secret.0,
        secret_height: secret.1,
    }
}

pub fn assign_covers(reduced: &CmyPlanes, covers: &[RgbImage; 3]) -> Result<CoverAssignment> {
    let (w, h) = reduced.dimensions();
    let pixels = (w * h) as f64;

    // sums[cover][channel]
    let sums: Vec<[u64; 3]> = covers
        .par_iter()
        .enumerate()
        .map(|(k, cover)| {
            let cropped = cover
                .crop(w, h)
                .ok_or_else(|| size_error(k, cover, (w, h)))?;
            let cmy = rgb_to_cmy(&cropped);
            let mut row = [0u64; 3];
            for ch in Channel::ALL {
                let scaled = scale_three_quarter(cmy.get(ch));
                row[ch.index()] = abs_diff_sum(reduced.get(ch), &scaled)?;
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;

    let mut best = PERMUTATIONS[0];
    let mut best_sum = u64::MAX;
    for perm in PERMUTATIONS {
        let total: u64 = (0..3).map(|ch| sums[perm[ch]][ch]).sum();
        if total < best_sum {
            best_sum = total;
            best = perm;
        }
    }

    let mut costs = [[0.0; 3]; 3];
    for (ch, row) in costs.iter_mut().enumerate() {
        for (k, cost) in row.iter_mut().enumerate() {
            *cost = sums[k][ch] as f64 / pixels;
        }
    }
    Ok(CoverAssignment {
        mapping: best,
        costs,
        total_cost: best_sum as f64 / pixels,
    })
}

pub fn check_suitability(secret: &RgbImage, covers: &[RgbImage; 3]) -> SuitabilityReport {
    let size_ok = covers
        .each_ref()
        .map(|c| c.width() >= secret.width() && c.height() >= secret.height());
    // max(255 - r, 255 - g, 255 - b) >= DARK_LEVEL  <=>  min(r, g, b) <= 255 - DARK_LEVEL
    let dark = secret
        .pixels()
        .iter()
        .filter(|px| px.iter().copied().min().unwrap_or(255) <= 255 - DARK_LEVEL)
        .count();
    let dark_fraction = dark as f64 / secret.pixels().len() as f64;
    SuitabilityReport {
        size_ok,
        dark_fraction,
        dark_warning: dark_fraction > DARK_WARNING_FRACTION,
    }
}
