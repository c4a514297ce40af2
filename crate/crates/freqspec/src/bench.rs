//! Benchmark orchestration: manifests over image corpora, deterministic
//! hash-based splits, the cross-generator generalization matrix, and the
//! perturbation robustness sweep, with CSV/JSON report emission.
//!
//! Everything here is reproducible by construction: manifests are sorted,
//! splits depend only on file paths, per-image perturbation seeds are derived
//! from the sweep seed and the image path, and parallel feature extraction
//! reduces in input order so worker count never changes a single bit of the
//! output.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::metrics::{self, Label, MetricsError, ScoredSample};
use crate::model::{self, ClassifierModel, ModelError, TrainConfig};
use crate::perturb::{PerturbError, PerturbationSpec};
use crate::raster::{self, Raster, RasterError, ResizeMethod};
use crate::rng;
use crate::spectrum::{self, SpectrumError};

/// Corpus split fractions matching a 38k/1k/1k protocol on 40k files.
pub const DEFAULT_SPLIT_RATIOS: SplitRatios =
    SplitRatios { train: 0.95, val: 0.025, test: 0.025 };

/// Working resolution images are bilinearly downscaled to when they exceed it.
pub const DEFAULT_RESOLUTION: usize = 256;

/// File extensions picked up when scanning a corpus directory.
const IMAGE_EXTENSIONS: [&str; 4] = ["png", "jpg", "jpeg", "pgm"];

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("source directory `{name}` contains no images")]
    EmptySource { name: String },
    #[error("corpus has no `real/` image set")]
    MissingRealSet,
    #[error("unknown source `{name}`")]
    UnknownSource { name: String },
    #[error("manifest lists `{path}` more than once")]
    DuplicatePath { path: String },
    #[error("manifest references missing file `{path}`")]
    MissingFile { path: PathBuf },
    #[error("split ratios must be non-negative and sum to 1, got {train}/{val}/{test}")]
    InvalidRatios { train: f64, val: f64, test: f64 },
    #[error("invalid eval config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Raster(#[from] RasterError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Perturb(#[from] PerturbError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// Which split a manifest entry belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

/// One corpus image: path relative to the manifest root, its class label,
/// the generator (or `real`) it came from, and its split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub label: Label,
    pub source: String,
    pub split: Split,
}

/// A corpus description: base directory plus one entry per image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub root: PathBuf,
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    /// Checks structural invariants: unique paths and every file present.
    pub fn validate(&self) -> Result<(), BenchError> {
        let mut seen = BTreeSet::new();
        for entry in &self.entries {
            if !seen.insert(entry.path.as_str()) {
                return Err(BenchError::DuplicatePath { path: entry.path.clone() });
            }
            let full = self.root.join(&entry.path);
            if !full.is_file() {
                return Err(BenchError::MissingFile { path: full });
            }
        }
        Ok(())
    }

    /// Reads and validates a JSON manifest.
    pub fn load(path: &Path) -> Result<Self, BenchError> {
        let manifest: Manifest = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        manifest.validate()?;
        Ok(manifest)
    }

    /// Writes the manifest as pretty JSON.
    pub fn save(&self, path: &Path) -> Result<(), BenchError> {
        Ok(std::fs::write(path, serde_json::to_string_pretty(self)?)?)
    }

    /// Names of all fake sources, sorted.
    pub fn fake_sources(&self) -> Vec<String> {
        let set: BTreeSet<&str> = self
            .entries
            .iter()
            .filter(|e| e.label == Label::Fake)
            .map(|e| e.source.as_str())
            .collect();
        set.into_iter().map(str::to_owned).collect()
    }

    /// Entries of one split and source, in manifest order, truncated to
    /// `cap` when given.
    fn select(&self, split: Split, source: &str, cap: Option<usize>) -> Vec<&ManifestEntry> {
        let mut picked: Vec<&ManifestEntry> = self
            .entries
            .iter()
            .filter(|e| e.split == split && e.source == source)
            .collect();
        picked.sort_by(|a, b| a.path.cmp(&b.path));
        picked.truncate(cap.unwrap_or(usize::MAX));
        picked
    }
}

/// Fractions of each source assigned to train/val/test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitRatios {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

impl Default for SplitRatios {
    fn default() -> Self {
        DEFAULT_SPLIT_RATIOS
    }
}

impl SplitRatios {
    fn validate(self) -> Result<(), BenchError> {
        let fine = |v: f64| (0.0..=1.0).contains(&v);
        let sum = self.train + self.val + self.test;
        if !fine(self.train) || !fine(self.val) || !fine(self.test) || (sum - 1.0).abs() > 1e-9
        {
            return Err(BenchError::InvalidRatios {
                train: self.train,
                val: self.val,
                test: self.test,
            });
        }
        Ok(())
    }
}

/// Integer split sizes for `n` files by largest-remainder rounding: floors
/// first, leftovers to the biggest fractional parts, ties broken toward the
/// earlier split.
fn split_counts(n: usize, ratios: SplitRatios) -> [usize; 3] {
    let shares = [ratios.train, ratios.val, ratios.test];
    let mut counts = [0usize; 3];
    let mut remainders = [(0.0f64, 0usize); 3];
    let mut assigned = 0;
    for (i, &share) in shares.iter().enumerate() {
        let exact = n as f64 * share;
        counts[i] = exact.floor() as usize;
        assigned += counts[i];
        remainders[i] = (exact - exact.floor(), i);
    }
    remainders.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    for k in 0..n.saturating_sub(assigned) {
        counts[remainders[k % 3].1] += 1;
    }
    counts
}

/// Scans a corpus directory into a manifest.
///
/// The layout is one subdirectory per fake source plus `real/`. Splits are
/// decided per source by ordering files on the hash of their relative path,
/// so the result is independent of directory enumeration order and stable
/// across machines.
pub fn build_manifest(root: &Path, ratios: SplitRatios) -> Result<Manifest, BenchError> {
    ratios.validate()?;
    let mut sources: Vec<String> = Vec::new();
    for dirent in std::fs::read_dir(root)? {
        let dirent = dirent?;
        if dirent.file_type()?.is_dir() {
            sources.push(dirent.file_name().to_string_lossy().into_owned());
        }
    }
    sources.sort();
    if !sources.iter().any(|s| s == "real") {
        return Err(BenchError::MissingRealSet);
    }

    let mut entries = Vec::new();
    for source in &sources {
        let mut files: Vec<String> = list_images(&root.join(source))?
            .into_iter()
            .map(|path| {
                format!(
                    "{source}/{}",
                    path.file_name().expect("file has a name").to_string_lossy()
                )
            })
            .collect();
        if files.is_empty() {
            return Err(BenchError::EmptySource { name: source.clone() });
        }
        files.sort_by(|a, b| (rng::hash_str(a), a).cmp(&(rng::hash_str(b), b)));
        let counts = split_counts(files.len(), ratios);
        let label = if source == "real" { Label::Real } else { Label::Fake };
        for (i, path) in files.into_iter().enumerate() {
            let split = if i < counts[0] {
                Split::Train
            } else if i < counts[0] + counts[1] {
                Split::Val
            } else {
                Split::Test
            };
            entries.push(ManifestEntry { path, label, source: source.clone(), split });
        }
    }
    entries.sort_by(|a, b| a.path.cmp(&b.path));
    Ok(Manifest { root: root.to_path_buf(), entries })
}

/// Everything an evaluation run needs besides the data itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    /// Images larger than this are bilinearly downscaled to it at load.
    pub resolution: usize,
    /// Median-filter window for the high-pass residual.
    pub median_k: usize,
    /// Log-magnitude floor offset.
    pub epsilon: f64,
    /// Radial band count of the feature vector.
    pub bands: usize,
    /// Base seed for every random choice in the run.
    pub seed: u64,
    /// Per-source image cap within each split, for quick runs.
    pub sample_cap: Option<usize>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            resolution: DEFAULT_RESOLUTION,
            median_k: spectrum::DEFAULT_MEDIAN_K,
            epsilon: spectrum::DEFAULT_EPSILON,
            bands: spectrum::DEFAULT_BANDS,
            seed: 0,
            sample_cap: None,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.resolution == 0 {
            return Err(BenchError::InvalidConfig("resolution must be positive".into()));
        }
        if self.median_k % 2 == 0 {
            return Err(BenchError::InvalidConfig(format!(
                "median window must be odd, got {}",
                self.median_k
            )));
        }
        if !(self.epsilon > 0.0) {
            return Err(BenchError::InvalidConfig(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.bands == 0 {
            return Err(BenchError::InvalidConfig("bands must be positive".into()));
        }
        Ok(())
    }
}

/// Which per-image feature vector feeds the classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureMode {
    /// Radial/directional/axis/Nyquist summary of the residual log spectrum.
    Spectral,
    /// Mean, variance, and gradient energy of the grayscale image — a
    /// deliberately spectrum-blind reference point.
    PixelStats,
}

impl FromStr for FeatureMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "spectral" => Ok(Self::Spectral),
            "pixel" => Ok(Self::PixelStats),
            other => Err(format!("unknown feature mode `{other}` (spectral|pixel)")),
        }
    }
}

/// Image files directly inside `dir`, sorted by name.
pub fn list_images(dir: &Path) -> Result<Vec<PathBuf>, BenchError> {
    let mut files = Vec::new();
    for dirent in std::fs::read_dir(dir)? {
        let path = dirent?.path();
        let is_image = path.is_file()
            && path
                .extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| IMAGE_EXTENSIONS.contains(&e.to_lowercase().as_str()));
        if is_image {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Puts a decoded image into evaluation shape: grayscale inputs are
/// replicated to three channels, oversized ones bilinearly downscaled to the
/// working resolution.
pub fn normalize_eval_image(
    mut img: Raster<f64>,
    cfg: &EvalConfig,
) -> Result<Raster<f64>, BenchError> {
    if img.channels() == 1 {
        let plane = img.plane(0);
        img = Raster::from_planes(img.width(), img.height(), &[
            plane.clone(),
            plane.clone(),
            plane,
        ]);
    }
    if img.width() > cfg.resolution || img.height() > cfg.resolution {
        img = raster::resize(&img, cfg.resolution, cfg.resolution, ResizeMethod::Bilinear)?;
    }
    Ok(img)
}

/// Loads one manifest entry in evaluation shape.
pub fn load_eval_image(
    root: &Path,
    entry: &ManifestEntry,
    cfg: &EvalConfig,
) -> Result<Raster<f64>, BenchError> {
    normalize_eval_image(raster::load_image(&root.join(&entry.path))?, cfg)
}

/// The spectral feature vector of one image, flattened for the classifier.
pub fn spectral_features(img: &Raster<f64>, cfg: &EvalConfig) -> Result<Vec<f64>, BenchError> {
    let spec = spectrum::image_log_spectrum(img, cfg.median_k, cfg.epsilon)?;
    Ok(spectrum::extract_features(&spec, cfg.bands).flatten())
}

/// Pixel-statistics features: grayscale mean, variance, and mean squared
/// forward-difference (gradient energy).
pub fn pixel_stat_features(img: &Raster<f64>) -> Vec<f64> {
    let gray = raster::to_grayscale(img);
    let (w, h) = (gray.width(), gray.height());
    let n = (w * h) as f64;
    let mean = gray.data().iter().sum::<f64>() / n;
    let variance = gray.data().iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let mut grad = 0.0;
    let mut terms = 0usize;
    for y in 0..h {
        for x in 0..w {
            let v = gray.get(x, y, 0);
            if x + 1 < w {
                let d = gray.get(x + 1, y, 0) - v;
                grad += d * d;
                terms += 1;
            }
            if y + 1 < h {
                let d = gray.get(x, y + 1, 0) - v;
                grad += d * d;
                terms += 1;
            }
        }
    }
    vec![mean, variance, if terms > 0 { grad / terms as f64 } else { 0.0 }]
}

fn image_features(
    img: &Raster<f64>,
    cfg: &EvalConfig,
    mode: FeatureMode,
) -> Result<Vec<f64>, BenchError> {
    match mode {
        FeatureMode::Spectral => spectral_features(img, cfg),
        FeatureMode::PixelStats => Ok(pixel_stat_features(img)),
    }
}

/// Features for a batch of manifest entries, in entry order. Work is spread
/// across the thread pool; the ordered collect keeps the result independent
/// of worker count.
fn batch_features(
    manifest: &Manifest,
    entries: &[&ManifestEntry],
    cfg: &EvalConfig,
    mode: FeatureMode,
) -> Result<Vec<Vec<f64>>, BenchError> {
    entries
        .par_iter()
        .map(|entry| image_features(&load_eval_image(&manifest.root, entry, cfg)?, cfg, mode))
        .collect()
}

/// One result line: which sources trained the model, which source it was
/// tested on, the perturbation applied (if any), and the scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub train_sources: String,
    pub test_source: String,
    pub perturbation: Option<String>,
    pub param: Option<u32>,
    pub auc: f64,
    pub ap: f64,
    pub n_real: usize,
    pub n_fake: usize,
}

/// An ordered collection of result rows.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub rows: Vec<ReportRow>,
}

impl EvalReport {
    /// CSV rendering: fixed header, empty cells for absent perturbations,
    /// scores at four decimals.
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("train_sources,test_source,perturbation,param,auc,ap,n_real,n_fake\n");
        for row in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{:.4},{:.4},{},{}",
                row.train_sources,
                row.test_source,
                row.perturbation.as_deref().unwrap_or(""),
                row.param.map_or(String::new(), |p| p.to_string()),
                row.auc,
                row.ap,
                row.n_real,
                row.n_fake,
            )
            .expect("string write cannot fail");
        }
        out
    }
}

/// On-disk report encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(format!("unknown report format `{other}`")),
        }
    }
}

/// Writes a report as CSV (fixed column order) or JSON (loss-free floats).
pub fn write_report(
    report: &EvalReport,
    path: &Path,
    format: ReportFormat,
) -> Result<(), BenchError> {
    let text = match format {
        ReportFormat::Csv => report.to_csv(),
        ReportFormat::Json => serde_json::to_string_pretty(report)?,
    };
    Ok(std::fs::write(path, text)?)
}

/// Reads back a JSON report written by [`write_report`].
pub fn read_report_json(path: &Path) -> Result<EvalReport, BenchError> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

/// A generalization run's report together with the model it trained.
#[derive(Debug, Clone)]
pub struct GeneralizationOutcome {
    pub report: EvalReport,
    pub model: ClassifierModel,
}

fn scored_rows(
    real_scores: &[f64],
    fake_scores: &[f64],
) -> Result<(f64, f64), BenchError> {
    let samples: Vec<ScoredSample<f64>> = real_scores
        .iter()
        .map(|&s| ScoredSample::new(Label::Real, s))
        .chain(fake_scores.iter().map(|&s| ScoredSample::new(Label::Fake, s)))
        .collect();
    Ok((metrics::auc(&samples)?, metrics::average_precision(&samples)?))
}

fn join_sources(sources: &[String]) -> String {
    sources.join("+")
}

/// Trains one detector on train-split real images plus the named fake
/// sources, then evaluates it on the test split of every fake source
/// separately; the same real test images anchor every row. Appends an
/// `average` row over the per-source rows.
pub fn run_generalization(
    manifest: &Manifest,
    train_sources: &[String],
    cfg: &EvalConfig,
    train_cfg: &TrainConfig,
) -> Result<GeneralizationOutcome, BenchError> {
    run_generalization_with(manifest, train_sources, cfg, train_cfg, FeatureMode::Spectral)
}

/// A detector fitted by [`train_detector`], tagged with its training sources.
#[derive(Debug, Clone)]
pub struct TrainedDetector {
    pub model: ClassifierModel,
    /// Sorted `+`-joined fake sources the model was trained against.
    pub train_label: String,
}

/// Fits one classifier on the train split: real images plus the named fake
/// sources, features per `mode`.
pub fn train_detector(
    manifest: &Manifest,
    train_sources: &[String],
    cfg: &EvalConfig,
    train_cfg: &TrainConfig,
    mode: FeatureMode,
) -> Result<TrainedDetector, BenchError> {
    cfg.validate()?;
    let fake_sources = manifest.fake_sources();
    let mut selected: Vec<String> = train_sources.to_vec();
    selected.sort();
    selected.dedup();
    if selected.is_empty() {
        return Err(BenchError::UnknownSource { name: "<none>".into() });
    }
    for source in &selected {
        if !fake_sources.contains(source) {
            return Err(BenchError::UnknownSource { name: source.clone() });
        }
    }

    let mut train_entries = manifest.select(Split::Train, "real", cfg.sample_cap);
    if train_entries.is_empty() {
        return Err(BenchError::MissingRealSet);
    }
    for source in &selected {
        train_entries.extend(manifest.select(Split::Train, source, cfg.sample_cap));
    }
    let features = batch_features(manifest, &train_entries, cfg, mode)?;
    let labels: Vec<Label> = train_entries.iter().map(|e| e.label).collect();
    let model = model::train(&features, &labels, train_cfg)?.model;
    Ok(TrainedDetector { model, train_label: join_sources(&selected) })
}

/// [`run_generalization`] with an explicit feature extractor, so spectral
/// detectors and the pixel-statistics reference train through the exact same
/// protocol.
pub fn run_generalization_with(
    manifest: &Manifest,
    train_sources: &[String],
    cfg: &EvalConfig,
    train_cfg: &TrainConfig,
    mode: FeatureMode,
) -> Result<GeneralizationOutcome, BenchError> {
    let TrainedDetector { model, train_label } =
        train_detector(manifest, train_sources, cfg, train_cfg, mode)?;
    let fake_sources = manifest.fake_sources();

    // Shared real test scores anchor every per-source row.
    let real_test = manifest.select(Split::Test, "real", cfg.sample_cap);
    let real_features = batch_features(manifest, &real_test, cfg, mode)?;
    let real_scores = model.score_batch(&real_features)?;

    let mut rows = Vec::new();
    for source in &fake_sources {
        let fake_test = manifest.select(Split::Test, source, cfg.sample_cap);
        let fake_features = batch_features(manifest, &fake_test, cfg, mode)?;
        let fake_scores = model.score_batch(&fake_features)?;
        let (auc, ap) = scored_rows(&real_scores, &fake_scores)?;
        rows.push(ReportRow {
            train_sources: train_label.clone(),
            test_source: source.clone(),
            perturbation: None,
            param: None,
            auc,
            ap,
            n_real: real_scores.len(),
            n_fake: fake_scores.len(),
        });
    }
    let count = rows.len() as f64;
    rows.push(ReportRow {
        train_sources: train_label,
        test_source: "average".into(),
        perturbation: None,
        param: None,
        auc: rows.iter().map(|r| r.auc).sum::<f64>() / count,
        ap: rows.iter().map(|r| r.ap).sum::<f64>() / count,
        n_real: real_scores.len(),
        n_fake: rows.iter().map(|r| r.n_fake).sum(),
    });
    Ok(GeneralizationOutcome { report: EvalReport { rows }, model })
}

/// Scores the pooled test split under every sweep point.
///
/// Both classes are perturbed — perturbing fakes alone would let the model
/// win by detecting the perturbation itself. The first row is the
/// unperturbed baseline; with a single fake source it coincides with the
/// matching [`run_generalization`] row. Per-image perturbation seeds derive
/// from the sweep seed, the grid label, and the image path.
pub fn run_robustness(
    manifest: &Manifest,
    detector: &ClassifierModel,
    train_label: &str,
    sweep: &[PerturbationSpec],
    cfg: &EvalConfig,
) -> Result<EvalReport, BenchError> {
    run_robustness_with(manifest, detector, train_label, sweep, cfg, FeatureMode::Spectral)
}

/// [`run_robustness`] with an explicit feature extractor.
pub fn run_robustness_with(
    manifest: &Manifest,
    detector: &ClassifierModel,
    train_label: &str,
    sweep: &[PerturbationSpec],
    cfg: &EvalConfig,
    mode: FeatureMode,
) -> Result<EvalReport, BenchError> {
    cfg.validate()?;
    let fake_sources = manifest.fake_sources();
    let mut entries = manifest.select(Split::Test, "real", cfg.sample_cap);
    if entries.is_empty() {
        return Err(BenchError::MissingRealSet);
    }
    let n_real = entries.len();
    for source in &fake_sources {
        entries.extend(manifest.select(Split::Test, source, cfg.sample_cap));
    }
    let n_fake = entries.len() - n_real;
    let test_label = join_sources(&fake_sources);

    let mut rows = Vec::new();
    for point in std::iter::once(None).chain(sweep.iter().map(Some)) {
        let scores: Vec<(Label, f64)> = entries
            .par_iter()
            .map(|entry| -> Result<(Label, f64), BenchError> {
                let img = load_eval_image(&manifest.root, entry, cfg)?;
                let img = match point {
                    None => img,
                    Some(spec) => {
                        let image_seed = rng::derive_seed(
                            rng::derive_seed(spec.seed, &spec.label()),
                            &entry.path,
                        );
                        spec.with_seed(image_seed).apply(&img)?
                    }
                };
                let features = image_features(&img, cfg, mode)?;
                Ok((entry.label, detector.score(&features)?))
            })
            .collect::<Result<_, _>>()?;
        let real_scores: Vec<f64> =
            scores.iter().filter(|(l, _)| *l == Label::Real).map(|&(_, s)| s).collect();
        let fake_scores: Vec<f64> =
            scores.iter().filter(|(l, _)| *l == Label::Fake).map(|&(_, s)| s).collect();
        let (auc, ap) = scored_rows(&real_scores, &fake_scores)?;
        rows.push(ReportRow {
            train_sources: train_label.to_string(),
            test_source: test_label.clone(),
            perturbation: point.map(|s| s.kind.to_string()),
            param: point.map(|s| s.param),
            auc,
            ap,
            n_real,
            n_fake,
        });
    }
    Ok(EvalReport { rows })
}
