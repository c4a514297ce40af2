//! Evaluation mathematics: ranking metrics (ROC-AUC, average precision),
//! PSNR, and the Fréchet distance between Gaussian feature statistics.
//!
//! Fake is the positive class throughout: higher scores mean "more fake".

use nalgebra::{DMatrix, DVector};

use crate::raster::Raster;
use crate::real::Real;

#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    #[error("need at least one sample of each class")]
    SingleClass,
    #[error("average precision needs at least one positive sample")]
    NoPositives,
    #[error("score is not finite")]
    NonFiniteScore,
    #[error("shape mismatch: {0}x{1}x{2} vs {3}x{4}x{5}")]
    ShapeMismatch(usize, usize, usize, usize, usize, usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("need at least two samples to fit a covariance, got {0}")]
    TooFewSamples(usize),
}

/// Class of a scored sample; fake is the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Real,
    Fake,
}

/// One classifier output attached to its ground-truth class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredSample<T> {
    pub label: Label,
    pub score: T,
}

impl<T: Real> ScoredSample<T> {
    pub fn new(label: Label, score: T) -> Self {
        Self { label, score }
    }
}

/// Area under the ROC curve as the Mann-Whitney statistic:
/// P(fake score > real score) + half the tie probability.
///
/// Computed by midrank assignment after one sort, O(n log n).
pub fn auc<T: Real>(samples: &[ScoredSample<T>]) -> Result<f64, MetricsError> {
    if samples.iter().any(|s| !s.score.is_finite()) {
        return Err(MetricsError::NonFiniteScore);
    }
    let n_fake = samples.iter().filter(|s| s.label == Label::Fake).count();
    let n_real = samples.len() - n_fake;
    if n_fake == 0 || n_real == 0 {
        return Err(MetricsError::SingleClass);
    }

    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&a, &b| samples[a].score.partial_cmp(&samples[b].score).unwrap());

    // midranks: tied scores share the average of their 1-based rank range
    let mut rank_sum_fake = 0.0f64;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && samples[order[j]].score == samples[order[i]].score {
            j += 1;
        }
        let midrank = (i + 1 + j) as f64 / 2.0;
        for &idx in &order[i..j] {
            if samples[idx].label == Label::Fake {
                rank_sum_fake += midrank;
            }
        }
        i = j;
    }

    let nf = n_fake as f64;
    let u = rank_sum_fake - nf * (nf + 1.0) / 2.0;
    Ok(u / (nf * n_real as f64))
}

/// Average precision with step interpolation: AP = Σ (R_k − R_{k−1})·P_k over
/// descending-score threshold groups, tied scores forming one group.
pub fn average_precision<T: Real>(samples: &[ScoredSample<T>]) -> Result<f64, MetricsError> {
    if samples.iter().any(|s| !s.score.is_finite()) {
        return Err(MetricsError::NonFiniteScore);
    }
    let total_pos = samples.iter().filter(|s| s.label == Label::Fake).count();
    if total_pos == 0 {
        return Err(MetricsError::NoPositives);
    }
    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&a, &b| samples[b].score.partial_cmp(&samples[a].score).unwrap());

    let mut ap = 0.0f64;
    let mut tp = 0usize;
    let mut seen = 0usize;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        let mut group_tp = 0usize;
        while j < order.len() && samples[order[j]].score == samples[order[i]].score {
            if samples[order[j]].label == Label::Fake {
                group_tp += 1;
            }
            j += 1;
        }
        let prev_tp = tp;
        tp += group_tp;
        seen = j;
        let recall_step = (tp - prev_tp) as f64 / total_pos as f64;
        let precision = tp as f64 / seen as f64;
        ap += recall_step * precision;
        i = j;
    }
    debug_assert_eq!(seen, samples.len());
    Ok(ap)
}

/// Peak signal-to-noise ratio in decibels against the 0-255 scale;
/// identical inputs yield `+∞`.
pub fn psnr<T: Real>(a: &Raster<T>, b: &Raster<T>) -> Result<f64, MetricsError> {
    if (a.width(), a.height(), a.channels()) != (b.width(), b.height(), b.channels()) {
        return Err(MetricsError::ShapeMismatch(
            a.width(),
            a.height(),
            a.channels(),
            b.width(),
            b.height(),
            b.channels(),
        ));
    }
    let n = a.data().len() as f64;
    let mse = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(&x, &y)| {
            let d = (x - y).to_f64_c();
            d * d
        })
        .sum::<f64>()
        / n;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (255.0 * 255.0 / mse).log10())
}

/// Mean and covariance summary of a feature sample.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianStats {
    mean: DVector<f64>,
    covariance: DMatrix<f64>,
    n: usize,
}

impl GaussianStats {
    /// Wraps precomputed statistics; the covariance is symmetrized.
    pub fn new(mean: Vec<f64>, covariance: DMatrix<f64>, n: usize) -> Self {
        let covariance = (&covariance + covariance.transpose()) / 2.0;
        Self { mean: DVector::from_vec(mean), covariance, n }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        self.mean.as_slice()
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// Sample mean and unbiased covariance of a feature matrix (rows = samples).
pub fn fit_gaussian(features: &[Vec<f64>]) -> Result<GaussianStats, MetricsError> {
    if features.len() < 2 {
        return Err(MetricsError::TooFewSamples(features.len()));
    }
    let n = features.len();
    let d = features[0].len();
    for row in features {
        if row.len() != d {
            return Err(MetricsError::DimensionMismatch(d, row.len()));
        }
    }
    let mut mean = vec![0.0f64; d];
    for row in features {
        for (m, &v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    let mut cov = DMatrix::zeros(d, d);
    for row in features {
        let centered: Vec<f64> = row.iter().zip(&mean).map(|(&v, &m)| v - m).collect();
        for i in 0..d {
            for j in i..d {
                cov[(i, j)] += centered[i] * centered[j];
            }
        }
    }
    for i in 0..d {
        for j in i..d {
            cov[(i, j)] /= (n - 1) as f64;
            cov[(j, i)] = cov[(i, j)];
        }
    }
    Ok(GaussianStats { mean: DVector::from_vec(mean), covariance: cov, n })
}

/// Principal square root of a symmetric PSD matrix via eigendecomposition;
/// eigenvalues below zero (roundoff) are clamped.
fn sqrtm_psd(m: &DMatrix<f64>) -> DMatrix<f64> {
    let sym = (m + m.transpose()) / 2.0;
    let eig = sym.symmetric_eigen();
    let sqrt_vals = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
    &eig.eigenvectors * DMatrix::from_diagonal(&sqrt_vals) * eig.eigenvectors.transpose()
}

/// Squared Fréchet distance between two Gaussians:
/// `‖μ₁−μ₂‖² + Tr(Σ₁+Σ₂−2(Σ₁Σ₂)^½)`, reported as d² by FID convention.
///
/// The cross term uses the symmetrized product `√Σ₁ Σ₂ √Σ₁`, which is PSD
/// whenever both inputs are, keeping the eigendecomposition real.
pub fn frechet_distance(a: &GaussianStats, b: &GaussianStats) -> Result<f64, MetricsError> {
    if a.dim() != b.dim() {
        return Err(MetricsError::DimensionMismatch(a.dim(), b.dim()));
    }
    let diff = &a.mean - &b.mean;
    let sqrt_a = sqrtm_psd(&a.covariance);
    let inner = &sqrt_a * &b.covariance * &sqrt_a;
    let cross = sqrtm_psd(&inner);
    let d2 = diff.norm_squared() + (&a.covariance + &b.covariance - 2.0 * cross).trace();
    Ok(d2.max(0.0))
}

/// Convenience: labeled sample vectors from parallel score slices.
pub fn scored<T: Real>(real: &[T], fake: &[T]) -> Vec<ScoredSample<T>> {
    real.iter()
        .map(|&s| ScoredSample::new(Label::Real, s))
        .chain(fake.iter().map(|&s| ScoredSample::new(Label::Fake, s)))
        .collect()
}
