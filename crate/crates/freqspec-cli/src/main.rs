//! Single-binary command line for the spectral-forensics toolkit: corpus
//! generation, spectrum rendering, perturbations, detector training, and the
//! generalization/robustness benchmarks.
//!
//! Every run prints its fully resolved configuration up front, takes all
//! randomness from `--seed`, and produces artifacts that do not depend on
//! `--threads`. Exit codes: 0 success, 1 usage error, 2 runtime failure.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use freqspec::bench::{
    self, build_manifest, EvalConfig, FeatureMode, Manifest, ReportFormat, SplitRatios,
};
use freqspec::model::{self, ModelKind, TrainConfig};
use freqspec::perturb::{self, PerturbationKind, PerturbationSpec};
use freqspec::raster::{self, Raster};
use freqspec::rng;
use freqspec::spectrum;
use freqspec::synth::{self, SynthKind, SynthSpec};

#[derive(Parser)]
#[command(
    name = "freqspec",
    version,
    about = "Frequency-domain forensics for synthetic images",
    propagate_version = true
)]
struct Cli {
    /// Base seed for every random choice in the run
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (0 = one per core); outputs never depend on this
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// JSON config file with evaluation settings; explicit flags override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

/// Evaluation settings accepted by most subcommands. Precedence:
/// flag > config file > built-in default.
#[derive(Args, Debug)]
struct EvalFlags {
    /// Downscale images larger than this square resolution at load
    #[arg(long)]
    resolution: Option<usize>,

    /// Median-filter window (odd) for the high-pass residual
    #[arg(long)]
    median_k: Option<usize>,

    /// Log-magnitude floor offset
    #[arg(long)]
    epsilon: Option<f64>,

    /// Radial band count of the feature vector
    #[arg(long)]
    bands: Option<usize>,

    /// Cap images per source within each split (0 removes a config-file cap)
    #[arg(long)]
    sample_cap: Option<usize>,
}

/// Where the corpus comes from: a prebuilt manifest or a directory scan.
#[derive(Args, Debug)]
struct CorpusArgs {
    /// Manifest JSON file describing the corpus
    #[arg(long, conflicts_with = "corpus", required_unless_present = "corpus")]
    manifest: Option<PathBuf>,

    /// Corpus directory to scan: one subdirectory per source plus real/
    #[arg(long)]
    corpus: Option<PathBuf>,

    /// train,val,test fractions used when scanning --corpus
    #[arg(long, default_value = "0.95,0.025,0.025", value_parser = parse_ratios)]
    split_ratios: SplitRatios,

    /// Also write the manifest built from --corpus here
    #[arg(long)]
    manifest_out: Option<PathBuf>,
}

/// Classifier hyperparameters.
#[derive(Args, Debug)]
struct TrainFlags {
    /// Classifier kind: linear | mlp1
    #[arg(long, default_value = "linear", value_parser = clap_parse::<ModelKind>)]
    model_kind: ModelKind,

    /// Gradient-descent step size
    #[arg(long, default_value_t = 0.05)]
    learning_rate: f64,

    /// Full-batch gradient steps
    #[arg(long, default_value_t = 500)]
    epochs: usize,

    /// L2 penalty on weights
    #[arg(long, default_value_t = 1e-4)]
    l2: f64,

    /// Hidden units for mlp1
    #[arg(long, default_value_t = 16)]
    hidden: usize,

    /// Feature extractor: spectral | pixel
    #[arg(long, default_value = "spectral", value_parser = clap_parse::<FeatureMode>)]
    features: FeatureMode,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic image corpus
    Synth {
        /// Output directory; `--kind all` writes real/ plus one dir per fake kind
        #[arg(long)]
        out: PathBuf,

        /// natural | hf_noise | grid | lowfreq_axis | upsampled | all
        #[arg(long, default_value = "all")]
        kind: String,

        /// Images per kind
        #[arg(long, default_value_t = 100)]
        count: usize,

        /// Square image size (power of two)
        #[arg(long, default_value_t = 128)]
        size: usize,

        /// Spectral decay exponent of the natural base field
        #[arg(long, default_value_t = synth::DEFAULT_ALPHA)]
        alpha: f64,

        /// Artifact amplitude added by the fake kinds
        #[arg(long, default_value_t = synth::DEFAULT_STRENGTH)]
        strength: f64,
    },

    /// Render the residual log-magnitude spectrum of one image
    Spectrum {
        /// Input image
        #[arg(long = "in")]
        input: PathBuf,

        /// Output spectrum image (.png or .pgm)
        #[arg(long)]
        out: PathBuf,

        #[command(flatten)]
        eval: EvalFlags,
    },

    /// Average the residual log spectra of a directory sample
    MeanSpectrum {
        /// Directory of input images
        #[arg(long = "in")]
        input: PathBuf,

        /// Number of images sampled (seeded choice; 0 = all)
        #[arg(long, default_value_t = 0)]
        n: usize,

        /// Output spectrum image (.png or .pgm)
        #[arg(long)]
        out: PathBuf,

        #[command(flatten)]
        eval: EvalFlags,
    },

    /// Apply one perturbation to an image or a directory of images
    Perturb {
        /// jpeg | blur | noise | resize
        #[arg(long, value_parser = clap_parse::<PerturbationKind>)]
        kind: PerturbationKind,

        /// Grid parameter: quality / kernel size / noise std / resize factor
        #[arg(long)]
        param: u32,

        /// Input image or directory
        #[arg(long = "in")]
        input: PathBuf,

        /// Output image or directory (PNG)
        #[arg(long)]
        out: PathBuf,
    },

    /// Train a detector and save it
    Train {
        #[command(flatten)]
        data: CorpusArgs,

        /// Comma-separated fake sources to train against
        #[arg(long, value_delimiter = ',', required = true)]
        train_sources: Vec<String>,

        /// Output model file
        #[arg(long)]
        out: PathBuf,

        #[command(flatten)]
        train: TrainFlags,

        #[command(flatten)]
        eval: EvalFlags,
    },

    /// Train and score every source's test split (generalization matrix)
    Eval {
        #[command(flatten)]
        data: CorpusArgs,

        /// Comma-separated fake sources to train against
        #[arg(long, value_delimiter = ',', required = true)]
        train_sources: Vec<String>,

        /// Report file (.csv or .json)
        #[arg(long)]
        out: PathBuf,

        /// csv | json (default: by --out extension)
        #[arg(long, value_parser = clap_parse::<ReportFormat>)]
        format: Option<ReportFormat>,

        /// Also save the trained model here
        #[arg(long)]
        save_model: Option<PathBuf>,

        #[command(flatten)]
        train: TrainFlags,

        #[command(flatten)]
        eval: EvalFlags,
    },

    /// Score the test split under the full perturbation sweep
    Robustness {
        #[command(flatten)]
        data: CorpusArgs,

        /// Trained model file
        #[arg(long)]
        model: PathBuf,

        /// Training-set label recorded in the report rows
        #[arg(long, default_value = "model")]
        train_label: String,

        /// Report file (.csv or .json)
        #[arg(long)]
        out: PathBuf,

        /// csv | json (default: by --out extension)
        #[arg(long, value_parser = clap_parse::<ReportFormat>)]
        format: Option<ReportFormat>,

        /// Feature extractor the model was trained with: spectral | pixel
        #[arg(long, default_value = "spectral", value_parser = clap_parse::<FeatureMode>)]
        features: FeatureMode,

        #[command(flatten)]
        eval: EvalFlags,
    },

    /// Convert a JSON report to CSV or JSON
    Report {
        /// Input report (JSON)
        #[arg(long = "in")]
        input: PathBuf,

        /// Output report file
        #[arg(long)]
        out: PathBuf,

        /// csv | json (default: by --out extension)
        #[arg(long, value_parser = clap_parse::<ReportFormat>)]
        format: Option<ReportFormat>,
    },
}

/// Adapter so types with `FromStr<Err = String>` plug into clap.
fn clap_parse<T: std::str::FromStr<Err = String> + Clone + Send + Sync + 'static>(
    s: &str,
) -> Result<T, String> {
    s.parse()
}

fn parse_ratios(s: &str) -> Result<SplitRatios, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected train,val,test fractions, got `{s}`"));
    }
    let mut vals = [0.0f64; 3];
    for (slot, part) in vals.iter_mut().zip(&parts) {
        *slot = part.trim().parse().map_err(|_| format!("bad fraction `{part}`"))?;
    }
    Ok(SplitRatios { train: vals[0], val: vals[1], test: vals[2] })
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    if let Err(err) = run(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(2);
    }
}

fn run(cli: Cli) -> Result<()> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .context("thread pool already initialized")?;
    }
    let seed = cli.seed.unwrap_or(0);

    match &cli.command {
        Command::Synth { out, kind, count, size, alpha, strength } => {
            announce(
                &cli,
                "synth",
                serde_json::json!({
                    "out": out, "kind": kind, "count": count, "size": size,
                    "alpha": alpha, "strength": strength, "seed": seed,
                }),
            );
            cmd_synth(out, kind, *count, *size, *alpha, *strength, seed)
        }
        Command::Spectrum { input, out, eval } => {
            let cfg = resolve_eval(&cli, eval)?;
            announce(&cli, "spectrum", with_io(&cfg, input, out)?);
            cmd_spectrum(input, out, &cfg)
        }
        Command::MeanSpectrum { input, n, out, eval } => {
            let cfg = resolve_eval(&cli, eval)?;
            let mut detail = with_io(&cfg, input, out)?;
            detail["n"] = (*n).into();
            announce(&cli, "mean-spectrum", detail);
            cmd_mean_spectrum(input, *n, out, &cfg)
        }
        Command::Perturb { kind, param, input, out } => {
            announce(
                &cli,
                "perturb",
                serde_json::json!({
                    "kind": kind.to_string(), "param": param,
                    "in": input, "out": out, "seed": seed,
                }),
            );
            cmd_perturb(*kind, *param, input, out, seed)
        }
        Command::Train { data, train_sources, out, train, eval } => {
            let cfg = resolve_eval(&cli, eval)?;
            let train_cfg = to_train_config(train, cfg.seed);
            announce(
                &cli,
                "train",
                serde_json::json!({
                    "eval": serde_json::to_value(&cfg)?,
                    "train_sources": train_sources,
                    "model_kind": train.model_kind.to_string(),
                    "learning_rate": train.learning_rate, "epochs": train.epochs,
                    "l2": train.l2, "hidden": train.hidden,
                    "features": feature_name(train.features),
                    "out": out,
                }),
            );
            let manifest = load_corpus(data)?;
            let detector =
                bench::train_detector(&manifest, train_sources, &cfg, &train_cfg, train.features)?;
            model::save_model(&detector.model, out)?;
            println!(
                "trained {} detector on {{{}}}, {} features -> {}",
                detector.model.kind(),
                detector.train_label,
                detector.model.dim(),
                out.display()
            );
            Ok(())
        }
        Command::Eval { data, train_sources, out, format, save_model, train, eval } => {
            let cfg = resolve_eval(&cli, eval)?;
            let train_cfg = to_train_config(train, cfg.seed);
            announce(
                &cli,
                "eval",
                serde_json::json!({
                    "eval": serde_json::to_value(&cfg)?,
                    "train_sources": train_sources,
                    "model_kind": train.model_kind.to_string(),
                    "features": feature_name(train.features),
                    "out": out,
                }),
            );
            let manifest = load_corpus(data)?;
            let outcome = bench::run_generalization_with(
                &manifest,
                train_sources,
                &cfg,
                &train_cfg,
                train.features,
            )?;
            for row in &outcome.report.rows {
                println!(
                    "test {:<14} auc {:.4} ap {:.4} ({} real / {} fake)",
                    row.test_source, row.auc, row.ap, row.n_real, row.n_fake
                );
            }
            bench::write_report(&outcome.report, out, report_format(*format, out))?;
            if let Some(path) = save_model {
                model::save_model(&outcome.model, path)?;
            }
            Ok(())
        }
        Command::Robustness { data, model: model_path, train_label, out, format, features, eval } => {
            let cfg = resolve_eval(&cli, eval)?;
            announce(
                &cli,
                "robustness",
                serde_json::json!({
                    "eval": serde_json::to_value(&cfg)?,
                    "model": model_path, "train_label": train_label,
                    "features": feature_name(*features), "out": out,
                }),
            );
            let manifest = load_corpus(data)?;
            let detector = model::load_model(model_path)?;
            let sweep = perturb::sweep_grid(cfg.seed);
            let report = bench::run_robustness_with(
                &manifest,
                &detector,
                train_label,
                &sweep,
                &cfg,
                *features,
            )?;
            for row in &report.rows {
                println!(
                    "{:<10} auc {:.4} ap {:.4}",
                    match (&row.perturbation, row.param) {
                        (Some(kind), Some(param)) => format!("{kind}_{param}"),
                        _ => "clean".to_string(),
                    },
                    row.auc,
                    row.ap
                );
            }
            bench::write_report(&report, out, report_format(*format, out))?;
            Ok(())
        }
        Command::Report { input, out, format } => {
            announce(
                &cli,
                "report",
                serde_json::json!({ "in": input, "out": out }),
            );
            let report = bench::read_report_json(input)
                .with_context(|| format!("reading report {}", input.display()))?;
            bench::write_report(&report, out, report_format(*format, out))?;
            Ok(())
        }
    }
}

/// Prints the resolved configuration before the run, defaults included.
fn announce(cli: &Cli, command: &str, detail: serde_json::Value) {
    println!(
        "config: {}",
        serde_json::json!({ "command": command, "threads": cli.threads, "settings": detail })
    );
}

fn with_io(cfg: &EvalConfig, input: &Path, out: &Path) -> Result<serde_json::Value> {
    let mut value = serde_json::to_value(cfg)?;
    value["in"] = input.display().to_string().into();
    value["out"] = out.display().to_string().into();
    Ok(value)
}

fn feature_name(mode: FeatureMode) -> &'static str {
    match mode {
        FeatureMode::Spectral => "spectral",
        FeatureMode::PixelStats => "pixel",
    }
}

/// Applies precedence: explicit flags over config file over defaults.
fn resolve_eval(cli: &Cli, flags: &EvalFlags) -> Result<EvalConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading config {}", path.display()))?;
            serde_json::from_str::<EvalConfig>(&text)
                .with_context(|| format!("parsing config {}", path.display()))?
        }
        None => EvalConfig::default(),
    };
    if let Some(v) = flags.resolution {
        cfg.resolution = v;
    }
    if let Some(v) = flags.median_k {
        cfg.median_k = v;
    }
    if let Some(v) = flags.epsilon {
        cfg.epsilon = v;
    }
    if let Some(v) = flags.bands {
        cfg.bands = v;
    }
    if let Some(v) = flags.sample_cap {
        cfg.sample_cap = if v == 0 { None } else { Some(v) };
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn to_train_config(flags: &TrainFlags, seed: u64) -> TrainConfig {
    TrainConfig {
        learning_rate: flags.learning_rate,
        epochs: flags.epochs,
        l2: flags.l2,
        seed,
        kind: flags.model_kind,
        hidden: flags.hidden,
    }
}

fn load_corpus(args: &CorpusArgs) -> Result<Manifest> {
    match (&args.manifest, &args.corpus) {
        (Some(path), None) => {
            Manifest::load(path).with_context(|| format!("loading {}", path.display()))
        }
        (None, Some(dir)) => {
            let manifest = build_manifest(dir, args.split_ratios)
                .with_context(|| format!("scanning {}", dir.display()))?;
            if let Some(out) = &args.manifest_out {
                manifest.save(out)?;
            }
            Ok(manifest)
        }
        _ => bail!("exactly one of --manifest or --corpus is required"),
    }
}

fn report_format(flag: Option<ReportFormat>, out: &Path) -> ReportFormat {
    flag.unwrap_or_else(|| match out.extension().and_then(|e| e.to_str()) {
        Some("json") => ReportFormat::Json,
        _ => ReportFormat::Csv,
    })
}

fn cmd_synth(
    out: &Path,
    kind: &str,
    count: usize,
    size: usize,
    alpha: f64,
    strength: f64,
    seed: u64,
) -> Result<()> {
    if count == 0 {
        bail!("--count must be positive");
    }
    // (directory, kind) pairs; natural images land in real/ for corpus layout
    let targets: Vec<(String, SynthKind)> = if kind == "all" {
        let mut t = vec![("real".to_string(), SynthKind::Natural)];
        t.extend(SynthKind::FAKES.iter().map(|&k| (k.to_string(), k)));
        t
    } else {
        let parsed: SynthKind = kind.parse().map_err(|e: String| anyhow::anyhow!(e))?;
        vec![(String::new(), parsed)]
    };

    let digits = (count.max(2) - 1).to_string().len();
    let mut jobs = Vec::with_capacity(targets.len() * count);
    for (dir, synth_kind) in &targets {
        let dir_seed = rng::derive_seed(seed, if dir.is_empty() { "images" } else { dir });
        let target = out.join(dir);
        std::fs::create_dir_all(&target)?;
        for i in 0..count {
            let spec = SynthSpec {
                kind: *synth_kind,
                size,
                alpha,
                artifact_strength: strength,
                seed: rng::fold(dir_seed, i as u64),
            };
            jobs.push((target.join(format!("{i:0digits$}.png")), spec));
        }
    }
    jobs.par_iter().try_for_each(|(path, spec)| -> Result<()> {
        let img: Raster<f64> = synth::generate(spec)?;
        raster::write_png(&img, path)?;
        Ok(())
    })?;
    println!("wrote {} images under {}", jobs.len(), out.display());
    Ok(())
}

fn cmd_spectrum(input: &Path, out: &Path, cfg: &EvalConfig) -> Result<()> {
    let img = bench::normalize_eval_image(raster::load_image(input)?, cfg)?;
    let spec = spectrum::image_log_spectrum(&img, cfg.median_k, cfg.epsilon)?;
    spectrum::export_spectrum_image(&spec, out)?;
    println!("wrote {}", out.display());
    Ok(())
}

fn cmd_mean_spectrum(input: &Path, n: usize, out: &Path, cfg: &EvalConfig) -> Result<()> {
    let mut files = bench::list_images(input)?;
    if files.is_empty() {
        bail!("no images in {}", input.display());
    }
    if n > 0 && n < files.len() {
        // seeded, order-independent sample: rank by keyed hash of the name
        files.sort_by_key(|p| {
            let name = p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            (rng::fold(cfg.seed, rng::hash_str(&name)), name)
        });
        files.truncate(n);
        files.sort();
    }
    let images = files
        .par_iter()
        .map(|path| bench::normalize_eval_image(raster::load_image(path)?, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let spec = spectrum::mean_spectrum(&images, cfg.median_k, cfg.epsilon)?;
    spectrum::export_spectrum_image(&spec, out)?;
    println!("averaged {} spectra into {}", images.len(), out.display());
    Ok(())
}

fn cmd_perturb(
    kind: PerturbationKind,
    param: u32,
    input: &Path,
    out: &Path,
    seed: u64,
) -> Result<()> {
    let base = PerturbationSpec::from_grid(kind, param, seed)?;
    let run_one = |src: &Path, dst: &Path| -> Result<()> {
        let name = src.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let image_seed = rng::derive_seed(rng::derive_seed(seed, &base.label()), &name);
        let img: Raster<f64> = raster::load_image(src)?;
        let perturbed = base.with_seed(image_seed).apply(&img)?;
        raster::write_png(&perturbed, dst)?;
        Ok(())
    };

    if input.is_dir() {
        let files = bench::list_images(input)?;
        if files.is_empty() {
            bail!("no images in {}", input.display());
        }
        std::fs::create_dir_all(out)?;
        files.par_iter().try_for_each(|src| {
            let stem = src.file_stem().expect("listed file has a stem").to_string_lossy();
            run_one(src, &out.join(format!("{stem}.png")))
        })?;
        println!("perturbed {} images into {}", files.len(), out.display());
    } else {
        run_one(input, out)?;
        println!("wrote {}", out.display());
    }
    Ok(())
}
