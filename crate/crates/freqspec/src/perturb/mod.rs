//! Test-time image perturbations — JPEG recompression, Gaussian blur,
//! additive Gaussian noise, and bicubic down/up rescaling — at the fixed
//! intensity grids used by the robustness sweep.
//!
//! Every operation is a pure function of (image, parameters, seed): the noise
//! generator is counter-based and keyed per pixel, so outputs are bit-stable
//! across runs and thread counts.

mod jpeg;

pub use jpeg::jpeg_roundtrip;

use std::fmt;
use std::str::FromStr;

use crate::raster::{self, Raster, ResizeMethod};
use crate::real::Real;
use crate::rng;

/// JPEG quality factors swept by the robustness harness.
pub const JPEG_QUALITY_GRID: [u32; 9] = [10, 20, 30, 40, 50, 60, 70, 80, 90];
/// Gaussian blur kernel sizes swept by the robustness harness.
pub const BLUR_KERNEL_GRID: [u32; 7] = [3, 5, 7, 9, 11, 13, 15];
/// Gaussian noise standard deviations (0-255 scale) swept by the harness.
pub const NOISE_STD_GRID: [u32; 6] = [5, 10, 15, 20, 25, 30];
/// Down/up rescaling factors swept by the robustness harness.
pub const RESIZE_FACTOR_GRID: [u32; 6] = [2, 4, 6, 8, 10, 12];

#[derive(Debug, thiserror::Error)]
pub enum PerturbError {
    #[error("jpeg quality must be 1..=100, got {0}")]
    InvalidQuality(u32),
    #[error("blur kernel must be odd, got {0}")]
    EvenKernel(u32),
    #[error("jpeg round trip needs a 3-channel image, got {0} channels")]
    NotRgb(usize),
    #[error("resize factor {factor} collapses a {width}x{height} image to zero size")]
    DegenerateIntermediate { width: usize, height: usize, factor: u32 },
    #[error("{param} is not on the {kind} sweep grid")]
    OffGrid { kind: PerturbationKind, param: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PerturbationKind {
    Jpeg,
    Blur,
    Noise,
    Resize,
}

impl PerturbationKind {
    pub const ALL: [PerturbationKind; 4] =
        [Self::Jpeg, Self::Blur, Self::Noise, Self::Resize];

    /// The sweep intensities for this kind, mildest last for jpeg (higher
    /// quality is milder) and mildest first for the others.
    pub fn grid(self) -> &'static [u32] {
        match self {
            Self::Jpeg => &JPEG_QUALITY_GRID,
            Self::Blur => &BLUR_KERNEL_GRID,
            Self::Noise => &NOISE_STD_GRID,
            Self::Resize => &RESIZE_FACTOR_GRID,
        }
    }

    /// Grid order from mildest to harshest perturbation.
    pub fn grid_by_severity(self) -> Vec<u32> {
        let mut g = self.grid().to_vec();
        if self == Self::Jpeg {
            g.reverse(); // quality 90 is the mildest setting
        }
        g
    }
}

impl fmt::Display for PerturbationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Jpeg => "jpeg",
            Self::Blur => "blur",
            Self::Noise => "noise",
            Self::Resize => "resize",
        })
    }
}

impl FromStr for PerturbationKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "jpeg" => Ok(Self::Jpeg),
            "blur" => Ok(Self::Blur),
            "noise" => Ok(Self::Noise),
            "resize" => Ok(Self::Resize),
            other => Err(format!("unknown perturbation kind `{other}`")),
        }
    }
}

/// One perturbation kind at one fixed intensity.
///
/// The seed only matters for noise; it is carried everywhere so a spec is
/// self-contained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PerturbationSpec {
    pub kind: PerturbationKind,
    pub param: u32,
    pub seed: u64,
}

impl PerturbationSpec {
    /// Builds a spec whose intensity must lie on the sweep grid.
    pub fn from_grid(kind: PerturbationKind, param: u32, seed: u64) -> Result<Self, PerturbError> {
        if kind.grid().contains(&param) {
            Ok(Self { kind, param, seed })
        } else {
            Err(PerturbError::OffGrid { kind, param })
        }
    }

    /// Builds a spec with any intensity, including the identity settings
    /// (blur 1, noise 0, resize 1) that the grids exclude.
    pub fn new_unchecked(kind: PerturbationKind, param: u32, seed: u64) -> Self {
        Self { kind, param, seed }
    }

    /// Directory-name-friendly label, e.g. `jpeg_40`.
    pub fn label(&self) -> String {
        format!("{}_{}", self.kind, self.param)
    }

    /// Applies this perturbation to one image.
    pub fn apply<T: Real>(&self, img: &Raster<T>) -> Result<Raster<T>, PerturbError> {
        match self.kind {
            PerturbationKind::Jpeg => jpeg_roundtrip(img, self.param),
            PerturbationKind::Blur => gaussian_blur(img, self.param),
            PerturbationKind::Noise => Ok(add_gaussian_noise(img, self.param as f64, self.seed)),
            PerturbationKind::Resize => resize_down_up(img, self.param),
        }
    }

    /// Same spec with a different noise seed.
    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }
}

/// All 28 sweep points in report order: jpeg, blur, noise, resize, each kind
/// ordered mildest to harshest.
pub fn sweep_grid(seed: u64) -> Vec<PerturbationSpec> {
    PerturbationKind::ALL
        .iter()
        .flat_map(|&kind| {
            kind.grid_by_severity()
                .into_iter()
                .map(move |param| PerturbationSpec { kind, param, seed })
        })
        .collect()
}

/// Blur standard deviation implied by an odd kernel size.
pub fn blur_sigma(kernel_size: u32) -> f64 {
    0.3 * ((kernel_size as f64 - 1.0) / 2.0 - 1.0) + 0.8
}

fn gaussian_kernel(kernel_size: u32) -> Vec<f64> {
    let k = kernel_size as usize;
    let sigma = blur_sigma(kernel_size);
    let r = (k / 2) as f64;
    let mut w: Vec<f64> =
        (0..k).map(|i| (-(i as f64 - r).powi(2) / (2.0 * sigma * sigma)).exp()).collect();
    let total: f64 = w.iter().sum();
    for v in &mut w {
        *v /= total;
    }
    w
}

/// Separable Gaussian blur with reflect padding, each channel independently.
/// The kernel is the truncated discrete Gaussian of the given odd size,
/// normalized to unit sum; size 1 is the identity.
pub fn gaussian_blur<T: Real>(img: &Raster<T>, kernel_size: u32) -> Result<Raster<T>, PerturbError> {
    if kernel_size % 2 == 0 {
        return Err(PerturbError::EvenKernel(kernel_size));
    }
    if kernel_size == 1 {
        return Ok(img.clone());
    }
    let kernel: Vec<T> = gaussian_kernel(kernel_size).iter().map(|&w| T::from_f64_c(w)).collect();
    let r = (kernel_size / 2) as isize;
    let (w, h) = (img.width(), img.height());

    let planes: Vec<Vec<T>> = (0..img.channels())
        .map(|c| {
            let plane = img.plane(c);
            // horizontal pass
            let mut tmp = vec![T::zero(); w * h];
            for y in 0..h {
                for x in 0..w as isize {
                    let mut acc = T::zero();
                    for (j, &kw) in kernel.iter().enumerate() {
                        let xx = raster::reflect_index(x + j as isize - r, w);
                        acc += kw * plane[y * w + xx];
                    }
                    tmp[y * w + x as usize] = acc;
                }
            }
            // vertical pass
            let mut out = vec![T::zero(); w * h];
            for y in 0..h as isize {
                for x in 0..w {
                    let mut acc = T::zero();
                    for (j, &kw) in kernel.iter().enumerate() {
                        let yy = raster::reflect_index(y + j as isize - r, h);
                        acc += kw * tmp[yy * w + x];
                    }
                    out[y as usize * w + x] = acc;
                }
            }
            out
        })
        .collect();
    Ok(Raster::from_planes(w, h, &planes))
}

/// Adds i.i.d. zero-mean Gaussian noise with the given standard deviation
/// (0-255 intensity scale) to every sample, then clamps to [0, 255].
///
/// The draw for a sample depends only on (seed, pixel index, channel), never
/// on iteration order.
pub fn add_gaussian_noise<T: Real>(img: &Raster<T>, std: f64, seed: u64) -> Raster<T> {
    let channels = img.channels();
    let sd = T::from_f64_c(std);
    let data = img
        .data()
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let (pixel, channel) = (i / channels, i % channels);
            let z = T::from_f64_c(rng::standard_normal(seed, pixel as u64, channel as u64));
            v + sd * z
        })
        .collect();
    let mut out = Raster::new(img.width(), img.height(), channels, data);
    out.clamp_intensities();
    out
}

/// Bicubic downscale by an integer factor (floor), then bicubic upscale back
/// to the original size.
pub fn resize_down_up<T: Real>(img: &Raster<T>, factor: u32) -> Result<Raster<T>, PerturbError> {
    let (w, h) = (img.width(), img.height());
    let (dw, dh) = (w / factor as usize, h / factor as usize);
    if dw == 0 || dh == 0 {
        return Err(PerturbError::DegenerateIntermediate { width: w, height: h, factor });
    }
    let small = raster::resize(img, dw, dh, ResizeMethod::Bicubic)
        .expect("non-zero intermediate dimensions");
    Ok(raster::resize(&small, w, h, ResizeMethod::Bicubic).expect("non-zero original dimensions"))
}
