//! Acceptance suite: one test — and one printed summary line — per release
//! criterion. Run with `cargo test -p freqspec-cli --test acceptance --
//! --nocapture` to see the PASS lines on success; a failed criterion shows up
//! as the usual failed test with its measured numbers in the panic message.
//!
//! The image corpus used by the generalization, robustness, and
//! distribution-distance checks (500 images per source, size 128) is written
//! once per run by the CLI binary under `target/tmp` and shared between
//! tests.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;

use freqspec::bench::{
    build_manifest, list_images, run_generalization, run_generalization_with, run_robustness,
    spectral_features, train_detector, EvalConfig, FeatureMode, Manifest, ReportRow, SplitRatios,
};
use freqspec::metrics::{self, GaussianStats, Label};
use freqspec::model::{self, ModelKind, TrainConfig};
use freqspec::oracles;
use freqspec::perturb::{self, PerturbationKind};
use freqspec::raster::{self, Raster};
use freqspec::rng;
use freqspec::spectrum;
use freqspec::synth::{self, SynthKind, SynthSpec};

// ---------------------------------------------------------------------------
// shared fixture
// ---------------------------------------------------------------------------

const CORPUS_COUNT: usize = 500;
const CORPUS_SIZE: usize = 128;
/// Spectral decay of the natural base field. A steep decay keeps the
/// mirrored replicas of the `upsampled` kind above the natural
/// high-frequency floor, so all four fake kinds deviate from the real
/// cluster in the same (excess) direction and a detector trained on two of
/// them has a fighting chance on the other two.
const CORPUS_ALPHA: f64 = 3.0;
const CORPUS_STRENGTH: f64 = 4.0;
const CORPUS_SEED: u64 = 42;

struct Corpus {
    manifest: Manifest,
}

static CORPUS: OnceLock<Corpus> = OnceLock::new();

fn cli_bin() -> &'static str {
    env!("CARGO_BIN_EXE_freqspec")
}

fn run_cli(args: &[&str]) {
    let out = Command::new(cli_bin()).args(args).output().expect("spawning the CLI binary");
    assert!(
        out.status.success(),
        "CLI {:?} failed with {:?}\nstderr: {}",
        args,
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
}

/// The shared evaluation corpus, generated by the real `synth` subcommand so
/// the fixture exercises the shipped artifact writer.
fn corpus() -> &'static Corpus {
    CORPUS.get_or_init(|| {
        let root = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance-corpus");
        if root.exists() {
            fs::remove_dir_all(&root).expect("clearing stale corpus");
        }
        run_cli(&[
            "synth",
            "--out",
            root.to_str().unwrap(),
            "--kind",
            "all",
            "--count",
            &CORPUS_COUNT.to_string(),
            "--size",
            &CORPUS_SIZE.to_string(),
            "--alpha",
            &CORPUS_ALPHA.to_string(),
            "--strength",
            &CORPUS_STRENGTH.to_string(),
            "--seed",
            &CORPUS_SEED.to_string(),
            "--threads",
            "1",
        ]);
        let ratios = SplitRatios { train: 0.6, val: 0.0, test: 0.4 };
        let manifest = build_manifest(&root, ratios).expect("scanning the generated corpus");
        Corpus { manifest }
    })
}

fn eval_cfg() -> EvalConfig {
    EvalConfig { seed: CORPUS_SEED, ..EvalConfig::default() }
}

fn mlp_cfg() -> TrainConfig {
    TrainConfig { kind: ModelKind::Mlp1, seed: CORPUS_SEED, ..TrainConfig::default() }
}

fn uniform(seed: u64, i: u64, j: u64) -> f64 {
    rng::uniform_open(rng::key3(seed, i, j))
}

fn row_auc<'a>(rows: &'a [ReportRow], test_source: &str) -> &'a ReportRow {
    rows.iter()
        .find(|r| r.test_source == test_source && r.perturbation.is_none())
        .unwrap_or_else(|| panic!("missing report row for {test_source}"))
}

// ---------------------------------------------------------------------------
// 1. implementation-vs-oracle equivalence
// ---------------------------------------------------------------------------

#[test]
fn a1_oracle_equivalence() {
    let t0 = Instant::now();

    // Fast FFT against the direct O(N^4) transform: 100 seeded 16x16 planes.
    let n = 16;
    let mut worst_fft = 0.0f64;
    for seed in 0..100u64 {
        let plane: Vec<f64> =
            (0..n * n).map(|i| 255.0 * uniform(seed, i as u64, 0)).collect();
        let fast = spectrum::fft2d(&Raster::new(n, n, 1, plane.clone())).unwrap();
        let slow = oracles::naive_dft(&plane, n).unwrap();
        for (f, (re, im)) in fast.iter().zip(slow) {
            let err = ((f.re - re).powi(2) + (f.im - im).powi(2)).sqrt();
            let rel = err / (1.0 + (re * re + im * im).sqrt());
            worst_fft = worst_fft.max(rel);
        }
    }
    assert!(worst_fft <= 1e-9, "fft relative error {worst_fft:.3e} above 1e-9");

    // Median residual against the sorted-window filter: exact, mixed shapes.
    for seed in 0..20u64 {
        let w = 9 + (rng::mix64(seed) % 24) as usize;
        let h = 9 + (rng::mix64(seed ^ 0xABCD) % 24) as usize;
        let k = if seed % 2 == 0 { 3 } else { 5 };
        let plane: Vec<f64> =
            (0..w * h).map(|i| (256.0 * uniform(seed, i as u64, 1)).floor()).collect();
        let residual = spectrum::highpass_residual(&Raster::new(w, h, 1, plane.clone()), k)
            .unwrap();
        let median = oracles::sorted_median(&plane, w, h, k).unwrap();
        for (i, (&r, (&p, &m))) in
            residual.data().iter().zip(plane.iter().zip(&median)).enumerate()
        {
            assert_eq!(r, p - m, "residual mismatch at {i} (seed {seed}, k {k})");
        }
    }

    // Ranking metrics against exhaustive pairwise / threshold-sweep oracles:
    // 200 random score sets with forced ties, n <= 64 per set.
    let (mut worst_auc, mut worst_ap) = (0.0f64, 0.0f64);
    for set in 0..200u64 {
        let n_real = 2 + (rng::mix64(set * 2 + 1) % 31) as usize;
        let n_fake = 2 + (rng::mix64(set * 2 + 2) % 31) as usize;
        let quant = |x: f64| (x * 8.0).floor() / 8.0; // coarse grid forces ties
        let real: Vec<f64> = (0..n_real).map(|i| quant(uniform(set, i as u64, 2))).collect();
        let fake: Vec<f64> =
            (0..n_fake).map(|i| quant(0.2 + 0.8 * uniform(set, i as u64, 3))).collect();
        let samples = metrics::scored(&real, &fake);
        let auc = metrics::auc(&samples).unwrap();
        let auc_ref = oracles::pairwise_auc(&real, &fake).unwrap();
        worst_auc = worst_auc.max((auc - auc_ref).abs());

        let ap = metrics::average_precision(&samples).unwrap();
        let labels: Vec<bool> = samples.iter().map(|s| s.label == Label::Fake).collect();
        let scores: Vec<f64> = samples.iter().map(|s| s.score).collect();
        let ap_ref = oracles::sweep_ap(&labels, &scores).unwrap();
        worst_ap = worst_ap.max((ap - ap_ref).abs());
    }
    assert!(worst_auc <= 1e-12, "auc vs pairwise oracle differs by {worst_auc:.3e}");
    assert!(worst_ap <= 1e-12, "ap vs sweep oracle differs by {worst_ap:.3e}");

    // Gaussian fit against the textbook two-pass mean/covariance.
    let mut worst_cov = 0.0f64;
    for set in 0..20u64 {
        let n_rows = 8 + (rng::mix64(set ^ 0x55) % 33) as usize;
        let d = 2 + (rng::mix64(set ^ 0x77) % 11) as usize;
        let rows: Vec<Vec<f64>> = (0..n_rows)
            .map(|r| (0..d).map(|c| 10.0 * uniform(set, r as u64, c as u64 + 4)).collect())
            .collect();
        let stats = metrics::fit_gaussian(&rows).unwrap();
        let (mean_ref, cov_ref) = oracles::twopass_cov(&rows).unwrap();
        for (a, b) in stats.mean().iter().zip(&mean_ref) {
            worst_cov = worst_cov.max((a - b).abs());
        }
        for i in 0..d {
            for j in 0..d {
                worst_cov =
                    worst_cov.max((stats.covariance()[(i, j)] - cov_ref[i * d + j]).abs());
            }
        }
    }
    assert!(worst_cov <= 1e-10, "covariance vs two-pass oracle differs by {worst_cov:.3e}");

    let dt = t0.elapsed();
    assert!(dt < Duration::from_secs(30), "oracle comparisons took {dt:.1?}, budget 30s");
    println!(
        "acceptance 1 (oracle equivalence): PASS — fft {worst_fft:.1e}, auc {worst_auc:.1e}, \
         ap {worst_ap:.1e}, cov {worst_cov:.1e}, residual exact, in {dt:.1?}"
    );
}

// ---------------------------------------------------------------------------
// 2. spectral invariants
// ---------------------------------------------------------------------------

#[test]
fn a2_spectral_invariants() {
    // Energy conservation of the unnormalized transform:
    // sum |F|^2 == N^2 * sum |x|^2.
    let mut worst_parseval = 0.0f64;
    for seed in 0..20u64 {
        let n = 32;
        let plane: Vec<f64> =
            (0..n * n).map(|i| 255.0 * uniform(seed, i as u64, 5)).collect();
        let spectral: f64 = spectrum::fft2d(&Raster::new(n, n, 1, plane.clone()))
            .unwrap()
            .iter()
            .map(|c| c.norm_sqr())
            .sum();
        let pixel: f64 = plane.iter().map(|&v| v * v).sum();
        let rel = (spectral - (n * n) as f64 * pixel).abs() / (spectral.abs() + 1e-300);
        worst_parseval = worst_parseval.max(rel);
    }
    assert!(worst_parseval <= 1e-6, "energy mismatch {worst_parseval:.3e} above 1e-6");

    // Real inputs give centro-symmetric magnitude spectra.
    let mut worst_sym = 0.0f64;
    for seed in 0..8u64 {
        let img = synth::generate::<f64>(&SynthSpec {
            kind: SynthKind::Natural,
            size: 64,
            alpha: 2.0,
            artifact_strength: synth::DEFAULT_STRENGTH,
            seed,
        })
        .unwrap();
        let spec = spectrum::image_log_spectrum(&img, 3, spectrum::DEFAULT_EPSILON).unwrap();
        worst_sym = worst_sym.max(spec.max_symmetry_error());
    }
    assert!(worst_sym <= 1e-9, "symmetry error {worst_sym:.3e} above 1e-9");

    // Adding a constant offset leaves the high-pass residual bitwise
    // unchanged (the median of shifted integer samples shifts exactly).
    for seed in 0..8u64 {
        let (w, h) = (21, 17);
        let plane: Vec<f64> =
            (0..w * h).map(|i| (200.0 * uniform(seed, i as u64, 6)).floor()).collect();
        let shifted: Vec<f64> = plane.iter().map(|&v| v + 17.0).collect();
        for k in [3usize, 5] {
            let base =
                spectrum::highpass_residual(&Raster::new(w, h, 1, plane.clone()), k).unwrap();
            let offset =
                spectrum::highpass_residual(&Raster::new(w, h, 1, shifted.clone()), k).unwrap();
            assert_eq!(base.data(), offset.data(), "offset changed residual (seed {seed} k {k})");
        }
    }

    println!(
        "acceptance 2 (spectral invariants): PASS — parseval {worst_parseval:.1e}, \
         symmetry {worst_sym:.1e}, offset-invariance exact"
    );
}

// ---------------------------------------------------------------------------
// 3. perturbation properties
// ---------------------------------------------------------------------------

/// Spectral energy above radius N/4 on the wrapped frequency lattice.
fn high_band_energy(img: &Raster<f64>) -> f64 {
    let gray = raster::to_grayscale(img);
    let n = gray.width();
    let bins = spectrum::fft2d(&gray).unwrap();
    let mut energy = 0.0;
    for v in 0..n {
        for u in 0..n {
            let fu = u.min(n - u) as f64;
            let fv = v.min(n - v) as f64;
            if fu.hypot(fv) > n as f64 / 4.0 {
                energy += bins[v * n + u].norm_sqr();
            }
        }
    }
    energy
}

#[test]
fn a3_perturbation_properties() {
    let natural = synth::generate::<f64>(&SynthSpec {
        kind: SynthKind::Natural,
        size: 64,
        alpha: synth::DEFAULT_ALPHA,
        artifact_strength: synth::DEFAULT_STRENGTH,
        seed: 7,
    })
    .unwrap();

    // JPEG: fidelity grows with the quality setting, up to 0.1 dB of jitter.
    let mut psnrs = Vec::new();
    for &q in PerturbationKind::Jpeg.grid() {
        let coded = perturb::jpeg_roundtrip(&natural, q).unwrap();
        psnrs.push(metrics::psnr(&natural, &coded).unwrap());
    }
    for pair in psnrs.windows(2) {
        assert!(
            pair[1] >= pair[0] - 0.1,
            "psnr fell from {:.2} to {:.2} dB as quality rose: {psnrs:?}",
            pair[0],
            pair[1]
        );
    }

    // Blur: brightness is preserved and high bands only lose energy as the
    // kernel grows.
    let in_mean = natural.data().iter().sum::<f64>() / natural.data().len() as f64;
    let mut energies = Vec::new();
    for &k in PerturbationKind::Blur.grid() {
        let blurred = perturb::gaussian_blur(&natural, k).unwrap();
        let out_mean = blurred.data().iter().sum::<f64>() / blurred.data().len() as f64;
        assert!(
            (out_mean - in_mean).abs() <= 1e-6 * in_mean.abs(),
            "kernel {k} moved the mean from {in_mean} to {out_mean}"
        );
        energies.push(high_band_energy(&blurred));
    }
    for pair in energies.windows(2) {
        assert!(pair[1] < pair[0], "high-band energy not strictly decreasing: {energies:?}");
    }

    // Noise: sample std within 2% of the request on a clamp-free image and a
    // bitwise-stable stream per seed.
    let gray = Raster::<f64>::constant(256, 256, 3, 128.0);
    let sigma = 5.0;
    let noised = perturb::add_gaussian_noise(&gray, sigma, 99);
    let deltas: Vec<f64> =
        noised.data().iter().zip(gray.data()).map(|(o, i)| o - i).collect();
    let mean = deltas.iter().sum::<f64>() / deltas.len() as f64;
    let var = deltas.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / deltas.len() as f64;
    assert!(
        (var.sqrt() - sigma).abs() <= 0.02 * sigma,
        "noise std {:.4} strays more than 2% from {sigma}",
        var.sqrt()
    );
    let again = perturb::add_gaussian_noise(&gray, sigma, 99);
    assert_eq!(noised.data(), again.data(), "same seed must reproduce the same noise bytes");

    // Resize: shape round-trips, and content above the downscaled Nyquist is
    // attenuated at least tenfold.
    let big = synth::generate::<f64>(&SynthSpec {
        kind: SynthKind::Natural,
        size: 128,
        alpha: synth::DEFAULT_ALPHA,
        artifact_strength: synth::DEFAULT_STRENGTH,
        seed: 11,
    })
    .unwrap();
    for &f in PerturbationKind::Resize.grid() {
        let out = perturb::resize_down_up(&big, f).unwrap();
        assert_eq!(
            (out.width(), out.height(), out.channels()),
            (big.width(), big.height(), big.channels()),
            "factor {f} changed the output shape"
        );
    }
    let n = 128usize;
    let sine = Raster::from_fn(n, n, 1, |x, _, _| {
        128.0 + 100.0 * (2.0 * std::f64::consts::PI * x as f64 / 4.0).sin()
    });
    let bin = |img: &Raster<f64>| spectrum::fft2d(img).unwrap()[n / 4].norm();
    let before = bin(&sine);
    let after = bin(&perturb::resize_down_up(&sine, 4).unwrap());
    assert!(
        after * 10.0 <= before,
        "period-4 sinusoid survived factor-4 resize: {before:.3e} -> {after:.3e}"
    );

    println!(
        "acceptance 3 (perturbation properties): PASS — psnr range {:.1}..{:.1} dB, \
         blur energy x{:.0} drop, noise std {:.3}, sinusoid x{:.0} attenuation",
        psnrs.first().unwrap(),
        psnrs.last().unwrap(),
        energies.first().unwrap() / energies.last().unwrap(),
        var.sqrt(),
        before / after
    );
}

// ---------------------------------------------------------------------------
// 4. training checks
// ---------------------------------------------------------------------------

fn toy_dataset(seed: u64) -> (Vec<Vec<f64>>, Vec<Label>) {
    let (n_per_class, dim) = (24, 6);
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for i in 0..2 * n_per_class {
        let fake = i >= n_per_class;
        let shift = if fake { 0.8 } else { 0.0 };
        features.push(
            (0..dim)
                .map(|c| shift + rng::standard_normal(seed, i as u64, c as u64))
                .collect(),
        );
        labels.push(if fake { Label::Fake } else { Label::Real });
    }
    (features, labels)
}

#[test]
fn a4_training_checks() {
    let (features, labels) = toy_dataset(3);

    // Analytic gradient against central differences for both model kinds.
    let mut worst_grad = 0.0f64;
    for kind in [ModelKind::Linear, ModelKind::Mlp1] {
        let cfg = TrainConfig { kind, epochs: 40, hidden: 8, seed: 5, ..TrainConfig::default() };
        let model = model::train(&features, &labels, &cfg).unwrap().model;
        let (_, grad) = model.loss_and_gradient(&features, &labels, cfg.l2).unwrap();
        let params = model.flat_params();
        let h = 1e-5;
        for (i, g) in grad.iter().enumerate() {
            let mut probe = model.clone();
            let mut bumped = params.clone();
            bumped[i] += h;
            probe.set_flat_params(&bumped).unwrap();
            let (hi, _) = probe.loss_and_gradient(&features, &labels, cfg.l2).unwrap();
            bumped[i] = params[i] - h;
            probe.set_flat_params(&bumped).unwrap();
            let (lo, _) = probe.loss_and_gradient(&features, &labels, cfg.l2).unwrap();
            let numeric = (hi - lo) / (2.0 * h);
            let rel = (numeric - g).abs() / g.abs().max(1.0);
            worst_grad = worst_grad.max(rel);
            assert!(
                rel <= 1e-5,
                "{kind:?} param {i}: analytic {g:.6e} vs numeric {numeric:.6e} (rel {rel:.2e})"
            );
        }
    }

    // Bitwise training reproducibility.
    for kind in [ModelKind::Linear, ModelKind::Mlp1] {
        let cfg = TrainConfig { kind, seed: 9, ..TrainConfig::default() };
        let a = model::train(&features, &labels, &cfg).unwrap();
        let b = model::train(&features, &labels, &cfg).unwrap();
        assert_eq!(a.model.flat_params(), b.model.flat_params(), "{kind:?} params drifted");
        assert_eq!(a.loss_history, b.loss_history, "{kind:?} loss history drifted");
    }

    // Full-batch descent at lr 1e-3 never increases the regularized loss.
    for kind in [ModelKind::Linear, ModelKind::Mlp1] {
        let cfg = TrainConfig {
            kind,
            learning_rate: 1e-3,
            epochs: 300,
            seed: 9,
            ..TrainConfig::default()
        };
        let history = model::train(&features, &labels, &cfg).unwrap().loss_history;
        for (i, pair) in history.windows(2).enumerate() {
            assert!(
                pair[1] <= pair[0] + 1e-12,
                "{kind:?} loss rose at epoch {i}: {} -> {}",
                pair[0],
                pair[1]
            );
        }
    }

    println!("acceptance 4 (training checks): PASS — gradient rel {worst_grad:.1e}, \
              bitwise retrain, monotone loss at lr 1e-3");
}

// ---------------------------------------------------------------------------
// 5. generalization to unseen artifact kinds
// ---------------------------------------------------------------------------

#[test]
fn a5_generalization_to_unseen_kinds() {
    // All work runs on one thread: the budget below is a single-core budget.
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    pool.install(|| {
        let t0 = Instant::now();
        let corpus = corpus();
        let cfg = eval_cfg();
        let train_cfg = mlp_cfg();
        let train_sources = ["hf_noise".to_string(), "lowfreq_axis".to_string()];

        let spectral =
            run_generalization(&corpus.manifest, &train_sources, &cfg, &train_cfg).unwrap();
        let pixel = run_generalization_with(
            &corpus.manifest,
            &train_sources,
            &cfg,
            &train_cfg,
            FeatureMode::PixelStats,
        )
        .unwrap();

        let s_grid = row_auc(&spectral.report.rows, "grid").auc;
        let s_up = row_auc(&spectral.report.rows, "upsampled").auc;
        let p_grid = row_auc(&pixel.report.rows, "grid").auc;
        let p_up = row_auc(&pixel.report.rows, "upsampled").auc;
        let gap = (s_grid + s_up) / 2.0 - (p_grid + p_up) / 2.0;
        let dt = t0.elapsed();

        assert!(s_grid >= 0.95, "unseen-kind auc on grid {s_grid:.4} below 0.95");
        assert!(s_up >= 0.95, "unseen-kind auc on upsampled {s_up:.4} below 0.95");
        assert!(
            gap >= 0.10,
            "spectral lead over the pixel-statistics baseline is {gap:.4} \
             (spectral {s_grid:.4}/{s_up:.4}, pixel {p_grid:.4}/{p_up:.4})"
        );
        assert!(dt < Duration::from_secs(180), "generalization run took {dt:.1?}, budget 180s");

        println!(
            "acceptance 5 (generalization to unseen kinds): PASS — grid {s_grid:.4}, \
             upsampled {s_up:.4}, pixel-baseline gap {gap:.3}, in {dt:.1?} on one thread"
        );
    });
}

// ---------------------------------------------------------------------------
// 6. robustness sweep
// ---------------------------------------------------------------------------

#[test]
fn a6_robustness_sweep() {
    let t0 = Instant::now();
    let corpus = corpus();
    let cfg = eval_cfg();
    let sources = corpus.manifest.fake_sources();
    let detector =
        train_detector(&corpus.manifest, &sources, &cfg, &mlp_cfg(), FeatureMode::Spectral)
            .unwrap();
    let sweep = perturb::sweep_grid(cfg.seed);

    let run = || {
        run_robustness(&corpus.manifest, &detector.model, &detector.train_label, &sweep, &cfg)
            .unwrap()
    };
    let report = run();
    assert_eq!(report.rows.len(), 29, "expected baseline + 28 sweep rows");
    assert_eq!(report.to_csv(), run().to_csv(), "two sweep runs must be byte-identical");

    // Within every perturbation family, AUC may only fall as severity grows
    // (rows are emitted mildest first), up to 0.02 of jitter. The
    // unperturbed baseline is the mildest point of each curve.
    let baseline = report.rows[0].auc;
    assert!(report.rows[0].perturbation.is_none(), "first row must be the baseline");
    let mut last: BTreeMap<&str, f64> = BTreeMap::new();
    for row in &report.rows[1..] {
        let kind = row.perturbation.as_deref().expect("sweep rows carry a perturbation");
        let prev = *last.get(kind).unwrap_or(&baseline);
        assert!(
            row.auc <= prev + 0.02,
            "auc rose beyond jitter at {kind} {:?}: {prev:.4} -> {:.4}",
            row.param,
            row.auc
        );
        last.insert(kind, row.auc);
    }

    let dt = t0.elapsed();
    let floor = report.rows[1..].iter().map(|r| r.auc).fold(f64::INFINITY, f64::min);
    println!(
        "acceptance 6 (robustness sweep): PASS — 29 rows, baseline {baseline:.4}, \
         floor {floor:.4}, deterministic rerun, in {dt:.1?}"
    );
}

// ---------------------------------------------------------------------------
// 7. distribution distance
// ---------------------------------------------------------------------------

fn stats_1d(mean: f64, var: f64) -> GaussianStats {
    GaussianStats::new(vec![mean], DMatrix::from_element(1, 1, var), 2)
}

fn random_stats(seed: u64) -> GaussianStats {
    let d = 2 + (rng::mix64(seed) % 5) as usize;
    let mean: Vec<f64> = (0..d).map(|i| 4.0 * uniform(seed, i as u64, 7) - 2.0).collect();
    let a = DMatrix::from_fn(d, d, |r, c| uniform(seed, (r * d + c) as u64, 8) - 0.5);
    let cov = &a * a.transpose() + DMatrix::identity(d, d) * 0.1;
    GaussianStats::new(mean, cov, 16)
}

#[test]
fn a7_distribution_distance() {
    // One-dimensional closed form: d^2 = (m1-m2)^2 + (s1-s2)^2.
    let cases = [
        ((0.0, 1.0), (0.0, 1.0), 0.0),
        ((1.0, 4.0), (3.0, 1.0), 4.0 + 1.0),
        ((-2.0, 9.0), (0.5, 0.25), 6.25 + 6.25),
        ((0.0, 2.0), (0.0, 8.0), (2.0f64.sqrt() - 8.0f64.sqrt()).powi(2)),
    ];
    let mut worst_closed = 0.0f64;
    for ((m1, v1), (m2, v2), expected) in cases {
        let d2 = metrics::frechet_distance(&stats_1d(m1, v1), &stats_1d(m2, v2)).unwrap();
        worst_closed = worst_closed.max((d2 - expected).abs());
        assert!(
            (d2 - expected).abs() <= 1e-12,
            "closed form ({m1},{v1}) vs ({m2},{v2}): {d2} != {expected}"
        );
    }

    // Symmetry and zero self-distance over 100 random statistics.
    let mut worst_sym = 0.0f64;
    let mut worst_self = 0.0f64;
    for seed in 0..100u64 {
        let a = random_stats(seed);
        let b = random_stats(seed ^ 0xDEAD_BEEF);
        if a.dim() == b.dim() {
            let ab = metrics::frechet_distance(&a, &b).unwrap();
            let ba = metrics::frechet_distance(&b, &a).unwrap();
            worst_sym = worst_sym.max((ab - ba).abs() / ab.abs().max(1.0));
        }
        worst_self = worst_self.max(metrics::frechet_distance(&a, &a).unwrap().abs());
    }
    assert!(worst_sym <= 1e-9, "asymmetry {worst_sym:.3e} above 1e-9");
    assert!(worst_self <= 1e-9, "self-distance {worst_self:.3e} above 1e-9");

    // On the corpus: the natural-vs-grid feature distance must tower over
    // the natural-vs-natural resampling distance.
    let corpus = corpus();
    let cfg = eval_cfg();
    let features_of = |source: &str| -> Vec<Vec<f64>> {
        let dir = corpus.manifest.root.join(source);
        list_images(&dir)
            .unwrap()
            .iter()
            .map(|p| {
                let img = raster::load_image::<f64>(p).unwrap();
                spectral_features(&img, &cfg).unwrap()
            })
            .collect()
    };
    let natural = features_of("real");
    let grid = features_of("grid");
    let half = natural.len() / 2;
    let d_resample = metrics::frechet_distance(
        &metrics::fit_gaussian(&natural[..half]).unwrap(),
        &metrics::fit_gaussian(&natural[half..]).unwrap(),
    )
    .unwrap();
    let d_cross = metrics::frechet_distance(
        &metrics::fit_gaussian(&natural).unwrap(),
        &metrics::fit_gaussian(&grid).unwrap(),
    )
    .unwrap();
    assert!(
        d_cross > d_resample,
        "natural-vs-grid d^2 {d_cross:.4} not above natural resample floor {d_resample:.4}"
    );

    println!(
        "acceptance 7 (distribution distance): PASS — closed form {worst_closed:.1e}, \
         natural-vs-grid {d_cross:.2} vs resample floor {d_resample:.2}"
    );
}

// ---------------------------------------------------------------------------
// 8. CLI determinism
// ---------------------------------------------------------------------------

/// Every file under `dir`, keyed by its relative path.
fn dir_snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for entry in fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                let rel = path.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.insert(rel, fs::read(&path).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(dir, dir, &mut out);
    out
}

/// Runs every subcommand once into `dir` with the given worker count and
/// returns the byte snapshot of everything it produced.
fn cli_chain(dir: &Path, threads: &str) -> BTreeMap<String, Vec<u8>> {
    fs::create_dir_all(dir).unwrap();
    let p = |name: &str| dir.join(name).to_str().unwrap().to_owned();
    let corpus = p("corpus");
    let run = |args: &[&str]| {
        let mut full = args.to_vec();
        full.extend(["--threads", threads]);
        run_cli(&full);
    };

    run(&[
        "synth", "--out", &corpus, "--kind", "all", "--count", "12", "--size", "32",
        "--seed", "7",
    ]);
    run(&["spectrum", "--in", &p("corpus/real/00.png"), "--out", &p("spec.png"), "--seed", "7"]);
    run(&[
        "mean-spectrum", "--in", &p("corpus/real"), "--n", "5", "--out", &p("mean.pgm"),
        "--seed", "7",
    ]);
    run(&[
        "perturb", "--kind", "jpeg", "--param", "50", "--in", &p("corpus/grid"),
        "--out", &p("perturbed"), "--seed", "7",
    ]);
    run(&[
        "train", "--corpus", &corpus, "--split-ratios", "0.5,0,0.5",
        "--train-sources", "hf_noise,lowfreq_axis", "--model-kind", "mlp1",
        "--out", &p("model.txt"), "--seed", "7",
    ]);
    run(&[
        "eval", "--corpus", &corpus, "--split-ratios", "0.5,0,0.5",
        "--train-sources", "hf_noise", "--out", &p("eval.json"), "--format", "json",
        "--save-model", &p("eval-model.txt"), "--seed", "7",
    ]);
    run(&[
        "robustness", "--corpus", &corpus, "--split-ratios", "0.5,0,0.5",
        "--model", &p("model.txt"), "--train-label", "hf_noise+lowfreq_axis",
        "--out", &p("robustness.csv"), "--seed", "7",
    ]);
    run(&["report", "--in", &p("eval.json"), "--out", &p("report.csv")]);

    dir_snapshot(dir)
}

#[test]
fn a8_cli_determinism() {
    let t0 = Instant::now();
    let root = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance-cli");
    if root.exists() {
        fs::remove_dir_all(&root).unwrap();
    }

    let one_a = cli_chain(&root.join("one-a"), "1");
    let one_b = cli_chain(&root.join("one-b"), "1");
    let eight_a = cli_chain(&root.join("eight-a"), "8");
    let eight_b = cli_chain(&root.join("eight-b"), "8");

    let files = one_a.len();
    assert!(files > 60, "chain produced only {files} files");
    let diff = |a: &BTreeMap<String, Vec<u8>>, b: &BTreeMap<String, Vec<u8>>, what: &str| {
        assert_eq!(
            a.keys().collect::<Vec<_>>(),
            b.keys().collect::<Vec<_>>(),
            "{what}: file sets differ"
        );
        for (path, bytes) in a {
            assert_eq!(bytes, &b[path], "{what}: {path} differs");
        }
    };
    diff(&one_a, &one_b, "rerun with --threads 1");
    diff(&eight_a, &eight_b, "rerun with --threads 8");
    diff(&one_a, &eight_a, "--threads 1 vs --threads 8");

    println!(
        "acceptance 8 (CLI determinism): PASS — {files} artifacts byte-identical across \
         reruns and thread counts, in {:.1?}",
        t0.elapsed()
    );
}
