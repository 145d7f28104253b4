use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

use vcshare::bmp_io::{read_bmp24, write_bmp24};
use vcshare::RgbImage;

fn vcshare(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vcshare"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn key(out: &str, key: &str) -> Option<String> {
    out.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .map(str::to_owned)
}

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        Self {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn p(&self, name: &str) -> String {
        self.path(name).display().to_string()
    }

    fn write(&self, name: &str, img: &RgbImage) -> String {
        fs::write(self.path(name), write_bmp24(img)).unwrap();
        self.p(name)
    }

    fn random(&self, name: &str, rng: &mut impl Rng, w: usize, h: usize) -> String {
        let img = RgbImage::from_fn(w, h, |_, _| rng.random()).unwrap();
        self.write(name, &img)
    }

    /// Secret 12×9 plus three slightly larger covers.
    fn standard(&self, seed: u64) -> (String, [String; 3]) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let secret = self.random("secret.bmp", &mut rng, 12, 9);
        let covers = [
            self.random("c0.bmp", &mut rng, 12, 9),
            self.random("c1.bmp", &mut rng, 15, 9),
            self.random("c2.bmp", &mut rng, 12, 11),
        ];
        (secret, covers)
    }

    fn encrypt(&self, secret: &str, covers: &[String; 3], mode: &str, out: &str) -> Output {
        vcshare(&[
            "encrypt", "--secret", secret, "--covers", &covers[0], &covers[1], &covers[2],
            "--mode", mode, "--out", out,
        ])
    }

    fn decrypt(&self, dir: &str, out: &str, reference: Option<&str>) -> Output {
        let shares = ["share_a.bmp", "share_b.bmp", "share_c.bmp"].map(|s| format!("{dir}/{s}"));
        let meta = format!("{dir}/shares.meta");
        let mut args = vec![
            "decrypt", "--shares", &shares[0], &shares[1], &shares[2], "--meta", &meta,
        ];
        if let Some(r) = reference {
            args.extend(["--reference", r]);
        }
        args.extend(["--out", out]);
        vcshare(&args)
    }
}

fn read(path: impl AsRef<Path>) -> RgbImage {
    read_bmp24(&fs::read(path).unwrap()).unwrap()
}

#[test]
fn encrypt_writes_three_shares_and_sidecar() {
    let fx = Fixture::new();
    let (secret, covers) = fx.standard(1);
    let out = fx.p("shares");
    let o = fx.encrypt(&secret, &covers, "separable", &out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["share_a.bmp", "share_b.bmp", "share_c.bmp"] {
        assert_eq!(read(fx.path("shares").join(name)).dimensions(), (12, 9));
    }
    let meta = fs::read_to_string(fx.path("shares/shares.meta")).unwrap();
    for k in [
        "mode=separable",
        "assign.C=",
        "assign.M=",
        "assign.Y=",
        "width=12",
        "height=9",
    ] {
        assert!(meta.contains(k), "sidecar lacks {k}:\n{meta}");
    }
    let text = stdout(&o);
    assert!(text.lines().all(|l| l.contains('=')));
    assert_eq!(key(&text, "size_ok.1").as_deref(), Some("true"));
    assert!(key(&text, "dark_warning").is_some());
}

#[test]
fn separable_round_trip_within_three() {
    let fx = Fixture::new();
    let (secret, covers) = fx.standard(2);
    let out = fx.p("shares");
    assert_eq!(code(&fx.encrypt(&secret, &covers, "separable", &out)), 0);
    let rec = fx.p("rec.bmp");
    let o = fx.decrypt(&out, &rec, Some(&secret));
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let (a, b) = (read(&secret), read(&rec));
    for (p, q) in a.pixels().iter().zip(b.pixels()) {
        for i in 0..3 {
            assert!(p[i].abs_diff(q[i]) <= 3);
        }
    }
    let text = stdout(&o);
    let psnr: f64 = key(&text, "psnr_db").unwrap().parse().unwrap();
    let mae: f64 = key(&text, "mae").unwrap().parse().unwrap();
    assert!(psnr >= 38.5 && mae <= 3.0, "{text}");
}

#[test]
fn small_cover_exits_3_without_writing() {
    let fx = Fixture::new();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let secret = fx.random("secret.bmp", &mut rng, 4, 4);
    let covers = [
        fx.random("c0.bmp", &mut rng, 4, 4),
        fx.random("c1.bmp", &mut rng, 3, 8),
        fx.random("c2.bmp", &mut rng, 5, 5),
    ];
    let o = fx.encrypt(&secret, &covers, "separable", &fx.p("out"));
    assert_eq!(code(&o), 3);
    assert_eq!(key(&stdout(&o), "size_ok.1").as_deref(), Some("false"));
    assert!(!fx.path("out").exists());
}

#[test]
fn duplicate_covers_exit_3() {
    let fx = Fixture::new();
    let (secret, covers) = fx.standard(4);
    let o = fx.encrypt(
        &secret,
        &[covers[0].clone(), covers[0].clone(), covers[2].clone()],
        "paper",
        &fx.p("out"),
    );
    assert_eq!(code(&o), 3);
}

#[test]
fn non_bmp_input_exits_2() {
    let fx = Fixture::new();
    let (_, covers) = fx.standard(5);
    fs::write(fx.path("secret.png"), b"\x89PNG\r\n\x1a\n not a bitmap").unwrap();
    let o = fx.encrypt(&fx.p("secret.png"), &covers, "separable", &fx.p("out"));
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad magic"));

    let o = fx.encrypt(&fx.p("missing.bmp"), &covers, "separable", &fx.p("out"));
    assert_eq!(code(&o), 2);
}

#[test]
fn bad_arguments_exit_2() {
    assert_eq!(code(&vcshare(&["encrypt", "--secret", "x.bmp"])), 2);
    assert_eq!(code(&vcshare(&["frobnicate"])), 2);
    assert_eq!(code(&vcshare(&["--help"])), 0);
}

#[test]
fn missing_sidecar_exits_4() {
    let fx = Fixture::new();
    let (secret, covers) = fx.standard(6);
    let out = fx.p("shares");
    assert_eq!(code(&fx.encrypt(&secret, &covers, "separable", &out)), 0);
    fs::remove_file(fx.path("shares/shares.meta")).unwrap();
    assert_eq!(code(&fx.decrypt(&out, &fx.p("rec.bmp"), None)), 4);
}

#[test]
fn mismatched_share_sizes_exit_4() {
    let fx = Fixture::new();
    let (secret, covers) = fx.standard(7);
    let out = fx.p("shares");
    assert_eq!(code(&fx.encrypt(&secret, &covers, "separable", &out)), 0);
    let mut rng = ChaCha8Rng::seed_from_u64(70);
    fx.random("shares/share_b.bmp", &mut rng, 11, 9);
    assert_eq!(code(&fx.decrypt(&out, &fx.p("rec.bmp"), None)), 4);
}

#[test]
fn identical_invocations_are_byte_identical() {
    let fx = Fixture::new();
    let (secret, covers) = fx.standard(8);
    for mode in ["paper", "separable"] {
        let (a, b) = (fx.p(&format!("{mode}1")), fx.p(&format!("{mode}2")));
        let o1 = fx.encrypt(&secret, &covers, mode, &a);
        let o2 = fx.encrypt(&secret, &covers, mode, &b);
        assert_eq!(code(&o1), 0);
        // Paths differ; everything else on stdout must match.
        assert_eq!(stdout(&o1).replace(&a, ""), stdout(&o2).replace(&b, ""));
        for name in ["share_a.bmp", "share_b.bmp", "share_c.bmp", "shares.meta"] {
            assert_eq!(
                fs::read(Path::new(&a).join(name)).unwrap(),
                fs::read(Path::new(&b).join(name)).unwrap()
            );
        }
    }
}

#[test]
fn thread_cap_does_not_change_output() {
    let fx = Fixture::new();
    let (secret, covers) = fx.standard(9);
    let run = |threads: &str, out: &str| {
        Command::new(env!("CARGO_BIN_EXE_vcshare"))
            .env("VCSHARE_THREADS", threads)
            .args([
                "encrypt", "--secret", &secret, "--covers", &covers[0], &covers[1], &covers[2],
                "--out", out,
            ])
            .output()
            .unwrap()
    };
    assert_eq!(code(&run("1", &fx.p("t1"))), 0);
    assert_eq!(code(&run("4", &fx.p("t4"))), 0);
    for name in ["share_a.bmp", "share_b.bmp", "share_c.bmp"] {
        assert_eq!(
            fs::read(fx.path("t1").join(name)).unwrap(),
            fs::read(fx.path("t4").join(name)).unwrap()
        );
    }
}

#[test]
fn stack_takes_channel_minimum() {
    let fx = Fixture::new();
    let (secret, covers) = fx.standard(10);
    let out = fx.p("shares");
    assert_eq!(code(&fx.encrypt(&secret, &covers, "paper", &out)), 0);
    let shares = ["share_a.bmp", "share_b.bmp", "share_c.bmp"].map(|s| format!("{out}/{s}"));
    let o = vcshare(&[
        "stack",
        "--shares",
        &shares[0],
        &shares[1],
        &shares[2],
        "--out",
        &fx.p("stacked.bmp"),
    ]);
    assert_eq!(code(&o), 0);
    let stacked = read(fx.path("stacked.bmp"));
    let imgs = shares.clone().map(read);
    for (i, px) in stacked.pixels().iter().enumerate() {
        for (c, &v) in px.iter().enumerate() {
            let m = imgs.iter().map(|im| im.pixels()[i][c]).min().unwrap();
            assert_eq!(v, m);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let odd = fx.random("odd.bmp", &mut rng, 3, 3);
    let o = vcshare(&[
        "stack",
        "--shares",
        &shares[0],
        &shares[1],
        &odd,
        "--out",
        &fx.p("x.bmp"),
    ]);
    assert_eq!(code(&o), 4);
}

#[test]
fn classic_round_trip_over_seeds() {
    let fx = Fixture::new();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let secret = RgbImage::from_fn(9, 7, |_, _| rng.random()).unwrap();
    let secret_path = fx.write("secret.bmp", &secret);
    let expected = vcshare::cli::bits_to_rgb(&vcshare::cli::binarize(&secret));

    for seed in ["0", "1", "42", "18446744073709551615"] {
        let out = fx.p(&format!("classic{seed}"));
        let o = vcshare(&[
            "classic-encrypt",
            "--secret",
            &secret_path,
            "--seed",
            seed,
            "--out",
            &out,
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let text = stdout(&o);
        assert_eq!(key(&text, "seed").as_deref(), Some(seed));
        assert_eq!(key(&text, "rng").as_deref(), Some("chacha8"));

        let stacked = read(Path::new(&out).join("stacked.bmp"));
        assert_eq!(stacked.dimensions(), (18, 14));
        assert_eq!(
            read(Path::new(&out).join("share1.bmp")).dimensions(),
            (18, 14)
        );
        let meta = fs::read_to_string(Path::new(&out).join("classic.meta")).unwrap();
        assert!(meta.contains(&format!("seed={seed}\n")) && meta.contains("rng=chacha8\n"));

        let rec = fx.p(&format!("rec{seed}.bmp"));
        let o = vcshare(&[
            "classic-decode",
            "--stacked",
            &format!("{out}/stacked.bmp"),
            "--out",
            &rec,
        ]);
        assert_eq!(code(&o), 0);
        assert_eq!(read(&rec), expected);
    }

    let a = fs::read(fx.path("classic42/share1.bmp")).unwrap();
    let o = vcshare(&[
        "classic-encrypt",
        "--secret",
        &secret_path,
        "--seed",
        "42",
        "--out",
        &fx.p("again"),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(fs::read(fx.path("again/share1.bmp")).unwrap(), a);
}

#[test]
fn classic_decode_rejects_non_stacked_image() {
    let fx = Fixture::new();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let noise = fx.random("noise.bmp", &mut rng, 16, 16);
    let o = vcshare(&[
        "classic-decode",
        "--stacked",
        &noise,
        "--out",
        &fx.p("rec.bmp"),
    ]);
    assert_eq!(code(&o), 5);
    assert!(!fx.path("rec.bmp").exists());
}

#[test]
fn analyze_reports_both_modes() {
    let fx = Fixture::new();
    let (secret, covers) = fx.standard(14);
    let o = vcshare(&[
        "analyze", "--secret", &secret, "--covers", &covers[0], &covers[1], &covers[2],
    ]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    for k in [
        "paper.psnr_db",
        "paper.mae",
        "separable.psnr_db",
        "separable.mae",
        "separable.leak.C.C",
        "separable.exposed.Y",
        "assign.C",
        "total_cost",
    ] {
        assert!(key(&text, k).is_some(), "missing {k}:\n{text}");
    }
    let sep: f64 = key(&text, "separable.psnr_db").unwrap().parse().unwrap();
    assert!(sep >= 38.5);
}

#[test]
fn dark_secret_warns_but_succeeds() {
    let fx = Fixture::new();
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let secret = fx.write("dark.bmp", &RgbImage::filled(6, 6, [10, 20, 30]).unwrap());
    let covers = [0, 1, 2].map(|k| fx.random(&format!("c{k}.bmp"), &mut rng, 6, 6));
    let o = fx.encrypt(&secret, &covers, "separable", &fx.p("out"));
    assert_eq!(code(&o), 0);
    assert_eq!(key(&stdout(&o), "dark_warning").as_deref(), Some("true"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
}
