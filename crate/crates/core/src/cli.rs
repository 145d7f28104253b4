//! Command-line front end.
//!
//! Every command prints `key=value` lines on stdout. Exit codes:
//!
//! | code | meaning                                                  |
//! |------|----------------------------------------------------------|
//! | 0    | success                                                  |
//! | 2    | I/O, argument or image format error                      |
//! | 3    | cover rule violation (cover smaller than secret, duplicate covers) |
//! | 4    | mode/dimension mismatch, missing or malformed sidecar    |
//! | 5    | stacked image is not a valid classic share pair          |

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::bmp_io::{read_bmp_file, write_bmp_file, BmpFileError};
use crate::classic_vcs::{
    decode_by_contrast, encrypt_bw, BitImage, ClassicSharePair, RNG_ALGORITHM,
};
use crate::color_model::{Channel, RgbImage};
use crate::cover_select::{check_suitability, CoverAssignment, SuitabilityReport};
use crate::error::Error;
use crate::metrics::MetricsReport;
use crate::share_pipeline::{generate_shares, recover_secret, subtractive_stack, Share, ShareMode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 2;
pub const EXIT_COVER_RULE: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;
pub const EXIT_INVALID_BLOCK: i32 = 5;

/// Share files written by `encrypt`, in C, M, Y order.
pub const SHARE_FILES: [&str; 3] = ["share_a.bmp", "share_b.bmp", "share_c.bmp"];
pub const META_FILE: &str = "shares.meta";

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "VCSHARE_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "vcshare",
    version,
    about = "Color visual cryptography with cover-image shares"
)]
pub struct CliConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Split a secret into three shares that look like the covers.
    Encrypt {
        #[arg(long)]
        secret: PathBuf,
        #[arg(long, num_args = 3, required = true)]
        covers: Vec<PathBuf>,
        #[arg(long, default_value_t = ShareMode::Separable)]
        mode: ShareMode,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recover the secret from three shares and their sidecar.
    Decrypt {
        #[arg(long, num_args = 3, required = true)]
        shares: Vec<PathBuf>,
        #[arg(long)]
        meta: PathBuf,
        #[arg(long)]
        reference: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Simulate physically stacking three printed shares.
    Stack {
        #[arg(long, num_args = 3, required = true)]
        shares: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Classic black-and-white (2,2) scheme: write two expanded shares and their stack.
    ClassicEncrypt {
        #[arg(long)]
        secret: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decode a stacked classic share pair.
    ClassicDecode {
        #[arg(long)]
        stacked: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Report suitability, assignment and reconstruction quality in both modes.
    Analyze {
        #[arg(long)]
        secret: PathBuf,
        #[arg(long, num_args = 3, required = true)]
        covers: Vec<PathBuf>,
    },
}

#[derive(Debug)]
pub enum CliError {
    Io(String),
    CoverRule(String),
    Mismatch(String),
    InvalidBlock(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => EXIT_IO,
            CliError::CoverRule(_) => EXIT_COVER_RULE,
            CliError::Mismatch(_) => EXIT_MISMATCH,
            CliError::InvalidBlock(_) => EXIT_INVALID_BLOCK,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Io(m)
            | CliError::CoverRule(m)
            | CliError::Mismatch(m)
            | CliError::InvalidBlock(m) => m,
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<BmpFileError> for CliError {
    fn from(e: BmpFileError) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::CoverTooSmall { .. } | Error::DuplicateCover { .. } => CliError::CoverRule(msg),
            Error::InvalidBlock { .. } | Error::OddDimensions { .. } => CliError::InvalidBlock(msg),
            Error::Bmp(_) => CliError::Io(msg),
            _ => CliError::Mismatch(msg),
        }
    }
}

type CliResult = Result<(), CliError>;

/// Sidecar written next to the shares.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShareMeta {
    pub mode: ShareMode,
    /// Cover index per channel, C, M, Y.
    pub assign: [usize; 3],
    pub width: usize,
    pub height: usize,
    /// Channel carried by share a, b, c.
    pub roles: [Channel; 3],
}

impl ShareMeta {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "mode={}", self.mode).unwrap();
        for ch in Channel::ALL {
            writeln!(s, "assign.{ch}={}", self.assign[ch.index()]).unwrap();
        }
        writeln!(s, "width={}", self.width).unwrap();
        writeln!(s, "height={}", self.height).unwrap();
        for (name, role) in ["share_a", "share_b", "share_c"].iter().zip(self.roles) {
            writeln!(s, "role.{name}={role}").unwrap();
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut kv = BTreeMap::new();
        for line in text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
        {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("malformed sidecar line `{line}`"))?;
            kv.insert(k.trim(), v.trim());
        }
        let get = |key: &str| {
            kv.get(key)
                .copied()
                .ok_or_else(|| format!("sidecar is missing `{key}`"))
        };
        let num = |key: &str| -> Result<usize, String> {
            get(key)?
                .parse()
                .map_err(|_| format!("sidecar `{key}` is not a number"))
        };

        let mode = get("mode")?.parse()?;
        let assign = [num("assign.C")?, num("assign.M")?, num("assign.Y")?];
        if CoverAssignment::from_mapping(assign).is_none() {
            return Err(format!(
                "sidecar assignment {assign:?} is not a permutation of 0,1,2"
            ));
        }
        let (width, height) = (num("width")?, num("height")?);
        if width == 0 || height == 0 {
            return Err("sidecar dimensions must be positive".into());
        }
        let mut roles = Channel::ALL;
        for (i, name) in ["share_a", "share_b", "share_c"].iter().enumerate() {
            if let Some(v) = kv.get(format!("role.{name}").as_str()) {
                roles[i] = v.parse()?;
            }
        }
        let mut sorted = roles;
        sorted.sort();
        if sorted != Channel::ALL {
            return Err(format!(
                "sidecar roles {roles:?} must name each channel once"
            ));
        }
        Ok(Self {
            mode,
            assign,
            width,
            height,
            roles,
        })
    }
}

/// Sizes the global rayon pool from `VCSHARE_THREADS`, if set.
pub fn init_thread_pool() {
    if let Some(n) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        if n > 0 {
            // Fails only if the pool already exists.
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match CliConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_IO } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match execute(&config.command, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.exit_code()
        }
    }
}

pub fn execute(command: &Command, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    match command {
        Command::Encrypt {
            secret,
            covers,
            mode,
            out: dir,
        } => run_encrypt(secret, covers, *mode, dir, out, err),
        Command::Decrypt {
            shares,
            meta,
            reference,
            out: file,
        } => run_decrypt(shares, meta, reference.as_deref(), file, out),
        Command::Stack { shares, out: file } => run_stack(shares, file, out),
        Command::ClassicEncrypt {
            secret,
            seed,
            out: dir,
        } => run_classic_encrypt(secret, *seed, dir, out),
        Command::ClassicDecode { stacked, out: file } => run_classic_decode(stacked, file, out),
        Command::Analyze { secret, covers } => run_analyze(secret, covers, out, err),
    }
}

fn read_three(paths: &[PathBuf]) -> Result<[RgbImage; 3], CliError> {
    let images = paths
        .iter()
        .map(read_bmp_file)
        .collect::<Result<Vec<_>, _>>()?;
    images
        .try_into()
        .map_err(|v: Vec<_>| CliError::Io(format!("expected 3 images, got {}", v.len())))
}

fn print_suitability(
    report: &SuitabilityReport,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> io::Result<()> {
    for (k, ok) in report.size_ok.iter().enumerate() {
        writeln!(out, "size_ok.{k}={ok}")?;
    }
    writeln!(out, "dark_fraction={:.6}", report.dark_fraction)?;
    writeln!(out, "dark_warning={}", report.dark_warning)?;
    if report.dark_warning {
        writeln!(
            err,
            "warning: {:.1}% of the secret is dark; shares will look noisy",
            100.0 * report.dark_fraction
        )?;
    }
    Ok(())
}

fn check_sizes(report: &SuitabilityReport, secret: &RgbImage, covers: &[RgbImage; 3]) -> CliResult {
    match report.size_ok.iter().position(|ok| !ok) {
        None => Ok(()),
        Some(k) => Err(CliError::CoverRule(format!(
            "cover {k} is {}x{}, smaller than the {}x{} secret",
            covers[k].width(),
            covers[k].height(),
            secret.width(),
            secret.height()
        ))),
    }
}

fn print_assignment(a: &CoverAssignment, out: &mut dyn Write) -> io::Result<()> {
    for ch in Channel::ALL {
        writeln!(out, "assign.{ch}={}", a.cover_for(ch))?;
    }
    for ch in Channel::ALL {
        for k in 0..3 {
            writeln!(out, "cost.{ch}.{k}={:.6}", a.cost(ch, k))?;
        }
    }
    writeln!(out, "total_cost={:.6}", a.total_cost())
}

fn run_encrypt(
    secret_path: &Path,
    cover_paths: &[PathBuf],
    mode: ShareMode,
    dir: &Path,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CliResult {
    let secret = read_bmp_file(secret_path)?;
    let covers = read_three(cover_paths)?;
    let report = check_suitability(&secret, &covers);
    print_suitability(&report, out, err)?;
    check_sizes(&report, &secret, &covers)?;

    let set = generate_shares(&secret, &covers, mode)?;
    writeln!(out, "mode={mode}")?;
    print_assignment(set.assignment(), out)?;

    fs::create_dir_all(dir)?;
    for (share, name) in set.shares().iter().zip(SHARE_FILES) {
        let path = dir.join(name);
        write_bmp_file(&path, share.rendered())?;
        writeln!(out, "share.{}={}", share.role(), path.display())?;
    }
    let meta = ShareMeta {
        mode,
        assign: set.assignment().mapping(),
        width: secret.width(),
        height: secret.height(),
        roles: Channel::ALL,
    };
    let meta_path = dir.join(META_FILE);
    fs::write(&meta_path, meta.to_text())?;
    writeln!(out, "meta={}", meta_path.display())?;
    Ok(())
}

fn run_decrypt(
    share_paths: &[PathBuf],
    meta_path: &Path,
    reference: Option<&Path>,
    file: &Path,
    out: &mut dyn Write,
) -> CliResult {
    let text = fs::read_to_string(meta_path)
        .map_err(|e| CliError::Mismatch(format!("{}: {e}", meta_path.display())))?;
    let meta = ShareMeta::parse(&text)
        .map_err(|e| CliError::Mismatch(format!("{}: {e}", meta_path.display())))?;
    let images = read_three(share_paths)?;

    let mut shares = Vec::with_capacity(3);
    for ((img, role), path) in images.into_iter().zip(meta.roles).zip(share_paths) {
        if img.dimensions() != (meta.width, meta.height) {
            return Err(CliError::Mismatch(format!(
                "{} is {}x{}, sidecar says {}x{}",
                path.display(),
                img.width(),
                img.height(),
                meta.width,
                meta.height
            )));
        }
        shares.push(Share::from_rendered(
            img,
            role,
            meta.assign[role.index()],
            meta.mode,
        ));
    }
    let recovered = recover_secret(&shares)?;
    write_bmp_file(file, &recovered)?;
    writeln!(out, "mode={}", meta.mode)?;
    writeln!(out, "recovered={}", file.display())?;

    if let Some(reference) = reference {
        let original = read_bmp_file(reference)?;
        let report = MetricsReport::quality(&original, &recovered)?;
        write!(out, "{report}")?;
    }
    Ok(())
}

fn run_stack(share_paths: &[PathBuf], file: &Path, out: &mut dyn Write) -> CliResult {
    let images = read_three(share_paths)?;
    let stacked = subtractive_stack(&images)?;
    write_bmp_file(file, &stacked)?;
    writeln!(out, "stacked={}", file.display())?;
    Ok(())
}

/// Black iff the channel mean is below 128.
pub fn binarize(img: &RgbImage) -> BitImage {
    BitImage::from_fn(img.width(), img.height(), |x, y| {
        let [r, g, b] = img.get(x, y);
        (r as u16 + g as u16 + b as u16) < 3 * 128
    })
    .expect("image is non-empty")
}

pub fn bits_to_rgb(bits: &BitImage) -> RgbImage {
    RgbImage::from_fn(bits.width(), bits.height(), |x, y| {
        if bits.get(x, y) {
            [0; 3]
        } else {
            [255; 3]
        }
    })
    .expect("bitmap is non-empty")
}

fn run_classic_encrypt(
    secret_path: &Path,
    seed: u64,
    dir: &Path,
    out: &mut dyn Write,
) -> CliResult {
    let secret = binarize(&read_bmp_file(secret_path)?);
    let pair = encrypt_bw(&secret, seed);
    let stacked = pair.stacked();

    fs::create_dir_all(dir)?;
    for (name, bits) in [
        ("share1.bmp", &pair.share1),
        ("share2.bmp", &pair.share2),
        ("stacked.bmp", &stacked),
    ] {
        let path = dir.join(name);
        write_bmp_file(&path, &bits_to_rgb(bits))?;
        writeln!(out, "{}={}", name.trim_end_matches(".bmp"), path.display())?;
    }
    let meta = format!(
        "seed={seed}\nrng={RNG_ALGORITHM}\nexpansion={exp}x{exp}\nwidth={}\nheight={}\n",
        secret.width(),
        secret.height(),
        exp = ClassicSharePair::EXPANSION,
    );
    fs::write(dir.join("classic.meta"), &meta)?;
    writeln!(out, "seed={seed}")?;
    writeln!(out, "rng={RNG_ALGORITHM}")?;
    writeln!(out, "share_width={}", stacked.width())?;
    writeln!(out, "share_height={}", stacked.height())?;
    Ok(())
}

fn run_classic_decode(stacked_path: &Path, file: &Path, out: &mut dyn Write) -> CliResult {
    let stacked = binarize(&read_bmp_file(stacked_path)?);
    let secret = decode_by_contrast(&stacked)?;
    write_bmp_file(file, &bits_to_rgb(&secret))?;
    writeln!(out, "recovered={}", file.display())?;
    writeln!(out, "width={}", secret.width())?;
    writeln!(out, "height={}", secret.height())?;
    Ok(())
}

fn run_analyze(
    secret_path: &Path,
    cover_paths: &[PathBuf],
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CliResult {
    let secret = read_bmp_file(secret_path)?;
    let covers = read_three(cover_paths)?;
    let report = check_suitability(&secret, &covers);
    print_suitability(&report, out, err)?;
    check_sizes(&report, &secret, &covers)?;

    let mut assignment_printed = false;
    for (mode, prefix) in [
        (ShareMode::PaperLiteral, "paper."),
        (ShareMode::Separable, "separable."),
    ] {
        let set = generate_shares(&secret, &covers, mode)?;
        if !assignment_printed {
            print_assignment(set.assignment(), out)?;
            assignment_printed = true;
        }
        let recovered = set.recover()?;
        let mut text = String::new();
        MetricsReport::full(&secret, &recovered, &set)?
            .write_key_values(prefix, &mut text)
            .expect("writing to a String");
        out.write_all(text.as_bytes())?;
    }
    Ok(())
}
