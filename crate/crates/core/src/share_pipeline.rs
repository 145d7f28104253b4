//! Share generation and secret recovery.
//!
//! Each share carries one primitive channel of the secret. Its plane is
//! `floor(p/4) | cover`, where `p` is the secret's CMY value and `cover` is
//! the three-quarter-scaled CMY value of the assigned cover. The viewable
//! share is the cover with that channel replaced by the plane.
//!
//! Two modes exist:
//!
//! * [`ShareMode::PaperLiteral`] ORs the full scaled cover value in, and
//!   recovers with `255 - floor(3s/4)` applied to the share value `s`. This
//!   is lossy because the OR cannot be undone.
//! * [`ShareMode::Separable`] keeps only bits 6 and 7 of the scaled cover,
//!   so the secret occupies bits 0..=5 on its own. Recovery masks them out.
//!   The reconstruction is then `4·floor(p/4)`, within 3 of the original.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::color_model::{
    cmy_to_rgb, ensure_same_dims, reduce_quarter, rescale_x4, rgb_to_cmy, scale_three_quarter,
    three_quarter, Channel, ChannelPlane, CmyPlanes, RgbImage,
};
use crate::cover_select::{assign_covers, CoverAssignment};
use crate::error::{Error, Result};

/// Bits of a share value owned by the cover in separable mode.
pub const COVER_MASK: u8 = 0xC0;
/// Bits of a share value owned by the secret in separable mode.
pub const SECRET_MASK: u8 = 0x3F;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ShareMode {
    PaperLiteral,
    #[default]
    Separable,
}

impl fmt::Display for ShareMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ShareMode::PaperLiteral => "paper",
            ShareMode::Separable => "separable",
        })
    }
}

impl FromStr for ShareMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "paper" | "paper-literal" => Ok(ShareMode::PaperLiteral),
            "separable" => Ok(ShareMode::Separable),
            other => Err(format!(
                "unknown share mode `{other}` (expected paper or separable)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Share {
    role: Channel,
    cover_index: usize,
    mode: ShareMode,
    plane: ChannelPlane,
    rendered: RgbImage,
}

impl Share {
    /// Rebuilds a share from its viewable image, e.g. one loaded from disk.
    /// The mixed plane is the complement of the role's RGB component.
    pub fn from_rendered(
        rendered: RgbImage,
        role: Channel,
        cover_index: usize,
        mode: ShareMode,
    ) -> Self {
        let plane = rgb_to_cmy(&rendered).get(role).clone();
        Self {
            role,
            cover_index,
            mode,
            plane,
            rendered,
        }
    }

    pub fn role(&self) -> Channel {
        self.role
    }

    pub fn cover_index(&self) -> usize {
        self.cover_index
    }

    pub fn mode(&self) -> ShareMode {
        self.mode
    }

    pub fn plane(&self) -> &ChannelPlane {
        &self.plane
    }

    pub fn rendered(&self) -> &RgbImage {
        &self.rendered
    }

    pub fn dimensions(&self) -> (usize, usize) {
        self.plane.dimensions()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShareSet {
    /// Ordered C, M, Y.
    shares: [Share; 3],
    assignment: CoverAssignment,
    mode: ShareMode,
}

impl ShareSet {
    pub fn shares(&self) -> &[Share; 3] {
        &self.shares
    }

    pub fn share(&self, role: Channel) -> &Share {
        &self.shares[role.index()]
    }

    pub fn assignment(&self) -> &CoverAssignment {
        &self.assignment
    }

    pub fn mode(&self) -> ShareMode {
        self.mode
    }

    pub fn recover(&self) -> Result<RgbImage> {
        recover_secret(&self.shares)
    }
}

#[inline]
pub fn mix_pixel(p_reduced: u8, c_scaled: u8) -> u8 {
    debug_assert!(
        p_reduced <= SECRET_MASK,
        "reduced value {p_reduced} exceeds 6 bits"
    );
    p_reduced | c_scaled
}

fn cover_contribution(mode: ShareMode, cover_value: u8) -> u8 {
    match mode {
        ShareMode::PaperLiteral => cover_value,
        ShareMode::Separable => cover_value & COVER_MASK,
    }
}

pub fn generate_shares(
    secret: &RgbImage,
    covers: &[RgbImage; 3],
    mode: ShareMode,
) -> Result<ShareSet> {
    let (w, h) = secret.dimensions();
    let mut cropped = Vec::with_capacity(3);
    for (k, cover) in covers.iter().enumerate() {
        cropped.push(cover.crop(w, h).ok_or(Error::CoverTooSmall {
            cover: k,
            cover_width: cover.width(),
            cover_height: cover.height(),
            secret_width: w,
            secret_height: h,
        })?);
    }
    for (first, second) in [(0, 1), (0, 2), (1, 2)] {
        if cropped[first] == cropped[second] {
            return Err(Error::DuplicateCover { first, second });
        }
    }
    let cropped: [RgbImage; 3] = cropped.try_into().expect("three covers");

    let reduced = rgb_to_cmy(secret).map(reduce_quarter);
    let assignment = assign_covers(&reduced, &cropped)?;

    let shares = Channel::ALL
        .par_iter()
        .map(|&role| {
            let cover_index = assignment.cover_for(role);
            let cover = &cropped[cover_index];
            let scaled = scale_three_quarter(rgb_to_cmy(cover).get(role));
            let plane = reduced
                .get(role)
                .zip_with(&scaled, |p, c| mix_pixel(p, cover_contribution(mode, c)))?;
            let rendered = cover.with_cmy_channel(&plane)?;
            Ok(Share {
                role,
                cover_index,
                mode,
                plane,
                rendered,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ShareSet {
        shares: shares.try_into().expect("one share per channel"),
        assignment,
        mode,
    })
}

/// Strips the cover's contribution from a share plane.
pub fn remove_cover(share: &Share) -> ChannelPlane {
    match share.mode {
        ShareMode::PaperLiteral => share.plane.map(|s| 255 - three_quarter(s)),
        ShareMode::Separable => share.plane.map(|s| s & SECRET_MASK),
    }
}

/// Recovers the secret from three shares with distinct roles, in any order.
pub fn recover_secret(shares: &[Share]) -> Result<RgbImage> {
    if shares.len() != 3 {
        return Err(Error::ShareCount(shares.len()));
    }
    let mode = shares[0].mode;
    if shares.iter().any(|s| s.mode != mode) {
        return Err(Error::ModeMismatch);
    }
    for s in &shares[1..] {
        ensure_same_dims(shares[0].dimensions(), s.dimensions())?;
    }
    let find = |role: Channel| {
        let mut it = shares.iter().filter(|s| s.role == role);
        match (it.next(), it.next()) {
            (Some(s), None) => Ok(rescale_x4(&remove_cover(s)).with_role(role)),
            _ => Err(Error::RoleMismatch(role)),
        }
    };
    let planes = CmyPlanes::new(find(Channel::C)?, find(Channel::M)?, find(Channel::Y)?)?;
    Ok(cmy_to_rgb(&planes))
}

/// Simulates stacking the printed shares: each RGB component is the
/// minimum of the three inputs.
pub fn subtractive_stack(images: &[RgbImage; 3]) -> Result<RgbImage> {
    let [a, b, c] = images;
    ensure_same_dims(a.dimensions(), b.dimensions())?;
    ensure_same_dims(a.dimensions(), c.dimensions())?;
    let pixels = a
        .pixels()
        .iter()
        .zip(b.pixels())
        .zip(c.pixels())
        .map(|((p, q), r)| [0, 1, 2].map(|i| p[i].min(q[i]).min(r[i])))
        .collect();
    RgbImage::new(a.width(), a.height(), pixels)
}
