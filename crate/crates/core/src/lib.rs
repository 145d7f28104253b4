//! Color visual cryptography with meaningful shares.
//!
//! A 24-bit secret image is split into its cyan, magenta and yellow
//! components. Each component is reduced to a quarter of its value and
//! OR-mixed into a three-quarter-scaled cover image, giving three shares
//! that look like the covers. Recovery strips the cover contribution,
//! rescales by four and recombines the channels. No pixel expansion is
//! involved, so the reconstruction has the secret's size.
//!
//! The classic black-and-white (2,2) scheme with 2×2 subpixel expansion
//! lives in [`classic_vcs`] as a reference point.

pub mod bmp_io;
pub mod classic_vcs;
pub mod cli;
pub mod color_model;
pub mod cover_select;
pub mod error;
pub mod metrics;
pub mod share_pipeline;

pub use color_model::{Channel, ChannelPlane, CmyPlanes, RgbImage};
pub use cover_select::{CoverAssignment, SuitabilityReport};
pub use error::{Error, Result};
pub use share_pipeline::{Share, ShareMode, ShareSet};
