//! Reconstruction quality and single-share leakage.
//!
//! Sums are accumulated as exact integers, so every figure is reproducible
//! bit for bit regardless of how callers parallelize around it.

use std::fmt;

use crate::color_model::{ensure_same_dims, rgb_to_cmy, Channel, ChannelPlane, RgbImage};
use crate::error::Result;
use crate::share_pipeline::{Share, ShareSet, SECRET_MASK};

fn squared_error_sum(a: &RgbImage, b: &RgbImage) -> Result<u64> {
    ensure_same_dims(a.dimensions(), b.dimensions())?;
    Ok(a.pixels()
        .iter()
        .zip(b.pixels())
        .flat_map(|(p, q)| (0..3).map(move |i| (p[i].abs_diff(q[i]) as u64).pow(2)))
        .sum())
}

pub fn mse(a: &RgbImage, b: &RgbImage) -> Result<f64> {
    let n = (a.pixels().len() * 3) as f64;
    Ok(squared_error_sum(a, b)? as f64 / n)
}

/// Peak signal-to-noise ratio over all channels, `+inf` for identical images.
pub fn psnr(a: &RgbImage, b: &RgbImage) -> Result<f64> {
    let sse = squared_error_sum(a, b)?;
    if sse == 0 {
        return Ok(f64::INFINITY);
    }
    let mse = sse as f64 / (a.pixels().len() * 3) as f64;
    Ok(10.0 * (255.0f64 * 255.0 / mse).log10())
}

/// Mean absolute error per RGB channel.
pub fn per_channel_mae(a: &RgbImage, b: &RgbImage) -> Result<[f64; 3]> {
    ensure_same_dims(a.dimensions(), b.dimensions())?;
    let mut sums = [0u64; 3];
    for (p, q) in a.pixels().iter().zip(b.pixels()) {
        for i in 0..3 {
            sums[i] += p[i].abs_diff(q[i]) as u64;
        }
    }
    let n = a.pixels().len() as f64;
    Ok(sums.map(|s| s as f64 / n))
}

pub fn mae(a: &RgbImage, b: &RgbImage) -> Result<f64> {
    let per = per_channel_mae(a, b)?;
    Ok(per.iter().sum::<f64>() / 3.0)
}

/// Largest per-channel absolute difference.
pub fn max_abs_error(a: &RgbImage, b: &RgbImage) -> Result<u8> {
    ensure_same_dims(a.dimensions(), b.dimensions())?;
    Ok(a.pixels()
        .iter()
        .zip(b.pixels())
        .flat_map(|(p, q)| (0..3).map(move |i| p[i].abs_diff(q[i])))
        .max()
        .unwrap_or(0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlation {
    pub value: f64,
    /// One of the inputs had zero variance; `value` is then 0.
    pub degenerate: bool,
}

pub fn pearson(a: &[u8], b: &[u8]) -> Correlation {
    assert_eq!(a.len(), b.len());
    let n = a.len() as i128;
    let (mut sa, mut sb, mut saa, mut sbb, mut sab) = (0i128, 0i128, 0i128, 0i128, 0i128);
    for (&x, &y) in a.iter().zip(b) {
        let (x, y) = (x as i128, y as i128);
        sa += x;
        sb += y;
        saa += x * x;
        sbb += y * y;
        sab += x * y;
    }
    // n² · cov, n² · var
    let cov = n * sab - sa * sb;
    let va = n * saa - sa * sa;
    let vb = n * sbb - sb * sb;
    if va == 0 || vb == 0 {
        return Correlation {
            value: 0.0,
            degenerate: true,
        };
    }
    let value = cov as f64 / ((va as f64).sqrt() * (vb as f64).sqrt());
    Correlation {
        value: value.clamp(-1.0, 1.0),
        degenerate: false,
    }
}

/// Pearson correlation between a share's mixed plane and a secret channel.
pub fn leakage_correlation(share: &Share, secret_channel: &ChannelPlane) -> Result<Correlation> {
    ensure_same_dims(share.dimensions(), secret_channel.dimensions())?;
    Ok(pearson(share.plane().values(), secret_channel.values()))
}

/// Fraction of pixels whose low six share bits equal the quarter-reduced secret.
pub fn exposed_fraction(share: &Share, secret_channel: &ChannelPlane) -> Result<f64> {
    ensure_same_dims(share.dimensions(), secret_channel.dimensions())?;
    let hits = share
        .plane()
        .values()
        .iter()
        .zip(secret_channel.values())
        .filter(|(&s, &p)| s & SECRET_MASK == p / 4)
        .count();
    Ok(hits as f64 / secret_channel.values().len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShareLeakage {
    pub role: Channel,
    /// Correlation of this share's plane with the secret's C, M and Y planes.
    pub correlation: [Correlation; 3],
    /// [`exposed_fraction`] against the share's own secret channel.
    pub exposed_fraction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub psnr_db: f64,
    pub mae: f64,
    pub max_abs_error: u8,
    pub per_channel_mae: [f64; 3],
    pub leakage: Vec<ShareLeakage>,
}

impl MetricsReport {
    /// Quality of `recovered` against `secret` only.
    pub fn quality(secret: &RgbImage, recovered: &RgbImage) -> Result<Self> {
        Ok(Self {
            psnr_db: psnr(secret, recovered)?,
            mae: mae(secret, recovered)?,
            max_abs_error: max_abs_error(secret, recovered)?,
            per_channel_mae: per_channel_mae(secret, recovered)?,
            leakage: Vec::new(),
        })
    }

    /// Quality plus per-share leakage.
    pub fn full(secret: &RgbImage, recovered: &RgbImage, shares: &ShareSet) -> Result<Self> {
        let mut report = Self::quality(secret, recovered)?;
        let cmy = rgb_to_cmy(secret);
        for share in shares.shares() {
            let mut correlation = [Correlation {
                value: 0.0,
                degenerate: true,
            }; 3];
            for ch in Channel::ALL {
                correlation[ch.index()] = leakage_correlation(share, cmy.get(ch))?;
            }
            report.leakage.push(ShareLeakage {
                role: share.role(),
                correlation,
                exposed_fraction: exposed_fraction(share, cmy.get(share.role()))?,
            });
        }
        Ok(report)
    }

    /// Line-oriented `key=value` rendering, each key prefixed by `prefix`.
    pub fn write_key_values(&self, prefix: &str, out: &mut impl fmt::Write) -> fmt::Result {
        writeln!(out, "{prefix}psnr_db={}", format_db(self.psnr_db))?;
        writeln!(out, "{prefix}mae={:.6}", self.mae)?;
        writeln!(out, "{prefix}max_abs_error={}", self.max_abs_error)?;
        for (name, v) in ["r", "g", "b"].iter().zip(self.per_channel_mae) {
            writeln!(out, "{prefix}mae.{name}={v:.6}")?;
        }
        for leak in &self.leakage {
            for ch in Channel::ALL {
                let c = leak.correlation[ch.index()];
                writeln!(out, "{prefix}leak.{}.{ch}={:.6}", leak.role, c.value)?;
                if c.degenerate {
                    writeln!(out, "{prefix}leak.{}.{ch}.degenerate=true", leak.role)?;
                }
            }
            writeln!(
                out,
                "{prefix}exposed.{}={:.6}",
                leak.role, leak.exposed_fraction
            )?;
        }
        Ok(())
    }
}

impl fmt::Display for MetricsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_key_values("", f)
    }
}

fn format_db(v: f64) -> String {
    if v.is_infinite() {
        "inf".to_string()
    } else {
        format!("{v:.4}")
    }
}
