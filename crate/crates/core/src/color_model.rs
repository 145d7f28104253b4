//! Pixel arithmetic under the subtractive CMY model.
//!
//! Cyan, magenta and yellow are the 8-bit complements of red, green and
//! blue. The scalar maps used by the share pipeline (quarter reduction,
//! three-quarter scaling, ×4 rescale) all use floor division and are
//! exposed both per value and per plane.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// One of the three primitive subtractive channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Channel {
    C,
    M,
    Y,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::C, Channel::M, Channel::Y];

    /// Position of the channel in (C, M, Y) order, which is also the index of
    /// the complementary RGB component.
    pub fn index(self) -> usize {
        match self {
            Channel::C => 0,
            Channel::M => 1,
            Channel::Y => 2,
        }
    }

    pub fn from_index(index: usize) -> Option<Channel> {
        Self::ALL.get(index).copied()
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Channel::C => "C",
            Channel::M => "M",
            Channel::Y => "Y",
        })
    }
}

impl FromStr for Channel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "C" | "c" => Ok(Channel::C),
            "M" | "m" => Ok(Channel::M),
            "Y" | "y" => Ok(Channel::Y),
            other => Err(format!("unknown channel `{other}`")),
        }
    }
}

/// Row-major 8-bit RGB image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    pixels: Vec<[u8; 3]>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, pixels: Vec<[u8; 3]>) -> Result<Self> {
        check_dimensions(width, height)?;
        if pixels.len() != width * height {
            return Err(Error::PixelCount {
                expected: width * height,
                actual: pixels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Result<Self> {
        Self::new(width, height, vec![rgb; width * height])
    }

    /// Builds an image by evaluating `f(x, y)` in row-major order.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> [u8; 3],
    ) -> Result<Self> {
        check_dimensions(width, height)?;
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::new(width, height, pixels)
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

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        self.pixels[y * self.width + x]
    }

    /// Top-left `width`×`height` region. Returns `None` if the region does not fit.
    pub fn crop(&self, width: usize, height: usize) -> Option<RgbImage> {
        if width == 0 || height == 0 || width > self.width || height > self.height {
            return None;
        }
        if (width, height) == self.dimensions() {
            return Some(self.clone());
        }
        let mut pixels = Vec::with_capacity(width * height);
        for row in self.pixels.chunks_exact(self.width).take(height) {
            pixels.extend_from_slice(&row[..width]);
        }
        Some(RgbImage {
            width,
            height,
            pixels,
        })
    }

    /// Copy of the image with one RGB component replaced by the complement
    /// of `plane`, i.e. the plane is written back in CMY terms.
    pub fn with_cmy_channel(&self, plane: &ChannelPlane) -> Result<RgbImage> {
        ensure_same_dims(self.dimensions(), plane.dimensions())?;
        let index = plane.role().index();
        let pixels = self
            .pixels
            .iter()
            .zip(plane.values())
            .map(|(px, &v)| {
                let mut px = *px;
                px[index] = 255 - v;
                px
            })
            .collect();
        Ok(RgbImage {
            width: self.width,
            height: self.height,
            pixels,
        })
    }
}

/// A single 8-bit plane tagged with the primitive channel it carries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelPlane {
    width: usize,
    height: usize,
    values: Vec<u8>,
    role: Channel,
}

impl ChannelPlane {
    pub fn new(width: usize, height: usize, values: Vec<u8>, role: Channel) -> Result<Self> {
        check_dimensions(width, height)?;
        if values.len() != width * height {
            return Err(Error::PixelCount {
                expected: width * height,
                actual: values.len(),
            });
        }
        Ok(Self {
            width,
            height,
            values,
            role,
        })
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

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    pub fn role(&self) -> Channel {
        self.role
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.values[y * self.width + x]
    }

    /// Applies `f` to every value, keeping dimensions and role.
    pub fn map(&self, f: impl Fn(u8) -> u8) -> ChannelPlane {
        ChannelPlane {
            width: self.width,
            height: self.height,
            values: self.values.iter().map(|&v| f(v)).collect(),
            role: self.role,
        }
    }

    /// Combines two same-sized planes value by value. The result keeps `self`'s role.
    pub fn zip_with(&self, other: &ChannelPlane, f: impl Fn(u8, u8) -> u8) -> Result<ChannelPlane> {
        ensure_same_dims(self.dimensions(), other.dimensions())?;
        Ok(ChannelPlane {
            width: self.width,
            height: self.height,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            role: self.role,
        })
    }

    pub fn with_role(mut self, role: Channel) -> ChannelPlane {
        self.role = role;
        self
    }
}

/// The three subtractive planes of one image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CmyPlanes {
    c: ChannelPlane,
    m: ChannelPlane,
    y: ChannelPlane,
}

impl CmyPlanes {
    pub fn new(c: ChannelPlane, m: ChannelPlane, y: ChannelPlane) -> Result<Self> {
        ensure_same_dims(c.dimensions(), m.dimensions())?;
        ensure_same_dims(c.dimensions(), y.dimensions())?;
        for (plane, expected) in [(&c, Channel::C), (&m, Channel::M), (&y, Channel::Y)] {
            if plane.role() != expected {
                return Err(Error::RoleMismatch(expected));
            }
        }
        Ok(Self { c, m, y })
    }

    pub fn get(&self, channel: Channel) -> &ChannelPlane {
        match channel {
            Channel::C => &self.c,
            Channel::M => &self.m,
            Channel::Y => &self.y,
        }
    }

    pub fn dimensions(&self) -> (usize, usize) {
        self.c.dimensions()
    }

    pub fn map(&self, f: impl Fn(&ChannelPlane) -> ChannelPlane) -> CmyPlanes {
        CmyPlanes {
            c: f(&self.c),
            m: f(&self.m),
            y: f(&self.y),
        }
    }
}

#[inline]
pub fn quarter(v: u8) -> u8 {
    v / 4
}

#[inline]
pub fn three_quarter(v: u8) -> u8 {
    ((3 * v as u16) / 4) as u8
}

#[inline]
pub fn times_four(v: u8) -> u8 {
    (4 * v as u16).min(255) as u8
}

pub fn rgb_to_cmy(img: &RgbImage) -> CmyPlanes {
    let plane = |channel: Channel| ChannelPlane {
        width: img.width,
        height: img.height,
        values: img
            .pixels
            .iter()
            .map(|px| 255 - px[channel.index()])
            .collect(),
        role: channel,
    };
    CmyPlanes {
        c: plane(Channel::C),
        m: plane(Channel::M),
        y: plane(Channel::Y),
    }
}

pub fn cmy_to_rgb(planes: &CmyPlanes) -> RgbImage {
    let pixels = planes
        .c
        .values
        .iter()
        .zip(&planes.m.values)
        .zip(&planes.y.values)
        .map(|((&c, &m), &y)| [255 - c, 255 - m, 255 - y])
        .collect();
    RgbImage {
        width: planes.c.width,
        height: planes.c.height,
        pixels,
    }
}

pub fn reduce_quarter(plane: &ChannelPlane) -> ChannelPlane {
    plane.map(quarter)
}

pub fn scale_three_quarter(plane: &ChannelPlane) -> ChannelPlane {
    plane.map(three_quarter)
}

pub fn rescale_x4(plane: &ChannelPlane) -> ChannelPlane {
    plane.map(times_four)
}

pub(crate) fn check_dimensions(width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::EmptyImage { width, height });
    }
    Ok(())
}

pub(crate) fn ensure_same_dims(left: (usize, usize), right: (usize, usize)) -> Result<()> {
    if left != right {
        return Err(Error::DimensionMismatch {
            left_width: left.0,
            left_height: left.1,
            right_width: right.0,
            right_height: right.1,
        });
    }
    Ok(())
}
