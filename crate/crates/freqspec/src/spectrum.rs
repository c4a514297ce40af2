//! Frequency-analysis pipeline: median-residual high-pass, 2-D FFT,
//! log-magnitude spectra, mean spectra over image sets, and the spectral
//! feature descriptor consumed by the detector.
//!
//! The pipeline for one image is: grayscale -> high-pass residual (image
//! minus its median-filtered self) -> unnormalized forward FFT ->
//! ln(magnitude + epsilon) -> quadrant shift so DC sits at the grid center.

use std::path::Path;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::raster::{self, Raster, RasterError};
use crate::real::Real;

/// Default additive epsilon inside the log.
pub const DEFAULT_EPSILON: f64 = 1e-8;
/// Default median window for the high-pass residual.
pub const DEFAULT_MEDIAN_K: usize = 3;
/// Default number of radial bands in the feature descriptor.
pub const DEFAULT_BANDS: usize = 32;

#[derive(Debug, thiserror::Error)]
pub enum SpectrumError {
    #[error("median window must be odd and >= 3, got {0}")]
    EvenWindow(usize),
    #[error("input must be square, got {0}x{1}")]
    NonSquareInput(usize, usize),
    #[error("input must be single-channel, got {0} channels")]
    NotGrayscale(usize),
    #[error("epsilon must be positive, got {0}")]
    NonPositiveEpsilon(f64),
    #[error("empty image set")]
    EmptySet,
    #[error("mixed image sizes in set: {0} vs {1}")]
    MixedSizes(usize, usize),
    #[error(transparent)]
    Raster(#[from] RasterError),
}

/// Centered log-magnitude frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    size: usize,
    values: Vec<T>,
    dc_centered: bool,
}

impl<T: Real> Spectrum<T> {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn dc_centered(&self) -> bool {
        self.dc_centered
    }

    /// Value at centered grid coordinates (column x, row y).
    #[inline]
    pub fn at(&self, x: usize, y: usize) -> T {
        self.values[y * self.size + x]
    }

    /// Index of the DC bin along one axis after centering.
    pub fn center(&self) -> usize {
        self.size / 2
    }

    /// Largest magnitude difference between bins paired by frequency
    /// negation; zero for an exactly centro-symmetric grid.
    pub fn max_symmetry_error(&self) -> T {
        let n = self.size;
        let shift = n - n / 2;
        let mut worst = T::zero();
        for y in 0..n {
            for x in 0..n {
                // map centered -> raw -> negated -> centered
                let (ru, rv) = ((x + shift) % n, (y + shift) % n);
                let (nu, nv) = ((n - ru) % n, (n - rv) % n);
                let (mx, my) = ((nu + n / 2) % n, (nv + n / 2) % n);
                let d = (self.at(x, y) - self.at(mx, my)).abs();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }
}

/// Center-crops a raster to its largest square.
pub fn center_crop_square<T: Real>(img: &Raster<T>) -> Raster<T> {
    let side = img.width().min(img.height());
    if side == img.width() && side == img.height() {
        return img.clone();
    }
    let x0 = (img.width() - side) / 2;
    let y0 = (img.height() - side) / 2;
    Raster::from_fn(side, side, img.channels(), |x, y, c| img.get(x0 + x, y0 + y, c))
}

/// Image minus its median-filtered self (reflect padding); values signed.
///
/// The median filter suppresses content below the window scale, so the
/// difference isolates high-frequency content and sensor/generator noise.
pub fn highpass_residual<T: Real>(
    gray: &Raster<T>,
    median_k: usize,
) -> Result<Raster<T>, SpectrumError> {
    if gray.channels() != 1 {
        return Err(SpectrumError::NotGrayscale(gray.channels()));
    }
    if median_k % 2 == 0 || median_k < 3 {
        return Err(SpectrumError::EvenWindow(median_k));
    }
    let (w, h) = (gray.width(), gray.height());
    let r = (median_k / 2) as isize;
    let plane = gray.data();
    let mut out = Vec::with_capacity(w * h);
    let mut window: Vec<T> = Vec::with_capacity(median_k * median_k);
    for y in 0..h as isize {
        for x in 0..w as isize {
            window.clear();
            for dy in -r..=r {
                let yy = raster::reflect_index(y + dy, h);
                for dx in -r..=r {
                    let xx = raster::reflect_index(x + dx, w);
                    window.push(plane[yy * w + xx]);
                }
            }
            let mid = window.len() / 2;
            window.select_nth_unstable_by(mid, |a, b| a.partial_cmp(b).unwrap());
            out.push(plane[y as usize * w + x as usize] - window[mid]);
        }
    }
    Ok(Raster::new(w, h, 1, out))
}

/// In-place unnormalized 2-D FFT over a row-major square complex buffer.
/// The inverse direction is also unnormalized (scale by `n*n` to invert).
pub(crate) fn fft2d_buffer<T: Real>(buf: &mut [Complex<T>], n: usize, forward: bool) {
    debug_assert_eq!(buf.len(), n * n);
    let mut planner = FftPlanner::<T>::new();
    let fft =
        if forward { planner.plan_fft_forward(n) } else { planner.plan_fft_inverse(n) };

    // rows
    for row in buf.chunks_exact_mut(n) {
        fft.process(row);
    }
    // columns, via transpose
    let mut t = vec![Complex::new(T::zero(), T::zero()); n * n];
    for y in 0..n {
        for x in 0..n {
            t[x * n + y] = buf[y * n + x];
        }
    }
    for col in t.chunks_exact_mut(n) {
        fft.process(col);
    }
    for y in 0..n {
        for x in 0..n {
            buf[y * n + x] = t[x * n + y];
        }
    }
}

/// Unnormalized forward 2-D FFT of a square single-channel raster.
/// Returns the complex grid in row-major raw (uncentered) order.
pub fn fft2d<T: Real>(plane: &Raster<T>) -> Result<Vec<Complex<T>>, SpectrumError> {
    if plane.channels() != 1 {
        return Err(SpectrumError::NotGrayscale(plane.channels()));
    }
    let n = plane.width();
    if plane.height() != n {
        return Err(SpectrumError::NonSquareInput(plane.width(), plane.height()));
    }
    let mut buf: Vec<Complex<T>> =
        plane.data().iter().map(|&v| Complex::new(v, T::zero())).collect();
    fft2d_buffer(&mut buf, n, true);
    Ok(buf)
}

/// Log-magnitude spectrum of a residual image, DC-centered.
pub fn fft_log_spectrum<T: Real>(
    residual: &Raster<T>,
    epsilon: f64,
) -> Result<Spectrum<T>, SpectrumError> {
    if !(epsilon > 0.0) {
        return Err(SpectrumError::NonPositiveEpsilon(epsilon));
    }
    let n = residual.width();
    let raw = fft2d(residual)?;
    let eps = T::from_f64_c(epsilon);
    let shift = n - n / 2;
    let mut values = vec![T::zero(); n * n];
    for y in 0..n {
        for x in 0..n {
            let src = raw[((y + shift) % n) * n + ((x + shift) % n)];
            values[y * n + x] = (src.norm() + eps).ln();
        }
    }
    Ok(Spectrum { size: n, values, dc_centered: true })
}

/// Full single-image pipeline: grayscale, center-crop square, residual, FFT.
pub fn image_log_spectrum<T: Real>(
    img: &Raster<T>,
    median_k: usize,
    epsilon: f64,
) -> Result<Spectrum<T>, SpectrumError> {
    let gray = center_crop_square(&raster::to_grayscale(img));
    let residual = highpass_residual(&gray, median_k)?;
    fft_log_spectrum(&residual, epsilon)
}

/// Element-wise mean of per-image log spectra.
///
/// Spectra are computed in parallel but reduced in input order with a running
/// mean, so the result is independent of worker count and exactly reproduces
/// the single-image spectrum on duplicated inputs.
pub fn mean_spectrum<T: Real>(
    images: &[Raster<T>],
    median_k: usize,
    epsilon: f64,
) -> Result<Spectrum<T>, SpectrumError> {
    if images.is_empty() {
        return Err(SpectrumError::EmptySet);
    }
    let spectra: Vec<Spectrum<T>> = images
        .par_iter()
        .map(|img| image_log_spectrum(img, median_k, epsilon))
        .collect::<Result<_, _>>()?;
    let n = spectra[0].size;
    for s in &spectra[1..] {
        if s.size != n {
            return Err(SpectrumError::MixedSizes(n, s.size));
        }
    }
    let mut mean = vec![T::zero(); n * n];
    for (i, s) in spectra.iter().enumerate() {
        let count = T::from_usize_c(i + 1);
        for (m, &v) in mean.iter_mut().zip(&s.values) {
            *m += (v - *m) / count;
        }
    }
    Ok(Spectrum { size: n, values: mean, dc_centered: true })
}

/// Fixed-length spectral descriptor: radial band energies, four directional
/// sector energies, impulse-axis means, and the three Nyquist bins.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector<T> {
    pub radial_bands: Vec<T>,
    pub directional_bands: [T; 4],
    pub axis_profile: [T; 2],
    pub nyquist_peaks: [T; 3],
}

impl<T: Real> FeatureVector<T> {
    pub fn len(&self) -> usize {
        self.radial_bands.len() + 4 + 2 + 3
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Flat layout: radial bands, directional bands, axis profile, Nyquist.
    pub fn flatten(&self) -> Vec<T> {
        let mut v = Vec::with_capacity(self.len());
        v.extend_from_slice(&self.radial_bands);
        v.extend_from_slice(&self.directional_bands);
        v.extend_from_slice(&self.axis_profile);
        v.extend_from_slice(&self.nyquist_peaks);
        v
    }
}

/// Extracts the spectral descriptor from a centered spectrum.
///
/// Radial band `b` averages bins whose radius, normalized by the largest
/// lattice radius, falls in `[b/bands, (b+1)/bands)`; the four sectors
/// partition bins by angle folded to 0..180 degrees around centers at 0, 45,
/// 90, and 135; axis means exclude DC; the Nyquist entries read the bins at
/// raw (N/2, 0), (0, N/2), and (N/2, N/2).
pub fn extract_features<T: Real>(spec: &Spectrum<T>, bands: usize) -> FeatureVector<T> {
    assert!(spec.dc_centered(), "features require a DC-centered spectrum");
    assert!(bands >= 1);
    let n = spec.size();
    let c = spec.center() as isize;
    let extreme = |len: usize| -> f64 {
        let c = len / 2;
        (c.max(len - 1 - c)) as f64
    };
    let r_max = (extreme(n).powi(2) * 2.0).sqrt();

    let mut band_sum = vec![T::zero(); bands];
    let mut band_n = vec![0usize; bands];
    let mut dir_sum = [T::zero(); 4];
    let mut dir_n = [0usize; 4];
    let mut axis_sum = [T::zero(); 2];
    let mut axis_n = [0usize; 2];

    for y in 0..n {
        for x in 0..n {
            let (cu, cv) = (x as isize - c, y as isize - c);
            let v = spec.at(x, y);
            let r = ((cu * cu + cv * cv) as f64).sqrt();
            let b = ((r / r_max * bands as f64) as usize).min(bands - 1);
            band_sum[b] += v;
            band_n[b] += 1;
            if (cu, cv) != (0, 0) {
                let theta = (cv as f64).atan2(cu as f64).rem_euclid(std::f64::consts::PI);
                let s = (((theta + std::f64::consts::FRAC_PI_8)
                    .rem_euclid(std::f64::consts::PI))
                    / std::f64::consts::FRAC_PI_4) as usize;
                let s = s.min(3);
                dir_sum[s] += v;
                dir_n[s] += 1;
                if cv == 0 {
                    axis_sum[0] += v;
                    axis_n[0] += 1;
                }
                if cu == 0 {
                    axis_sum[1] += v;
                    axis_n[1] += 1;
                }
            }
        }
    }

    let mean = |sum: T, n: usize| if n == 0 { T::zero() } else { sum / T::from_usize_c(n) };
    let radial_bands: Vec<T> =
        band_sum.iter().zip(&band_n).map(|(&s, &k)| mean(s, k)).collect();
    let directional_bands =
        [0, 1, 2, 3].map(|i| mean(dir_sum[i], dir_n[i]));
    let axis_profile = [0, 1].map(|i| mean(axis_sum[i], axis_n[i]));

    // raw (u, v) -> centered indices
    let shift = n / 2;
    let centered = |u: usize, v: usize| spec.at((u + shift) % n, (v + shift) % n);
    let nyq = n / 2;
    let nyquist_peaks = [centered(nyq, 0), centered(0, nyq), centered(nyq, nyq)];

    FeatureVector { radial_bands, directional_bands, axis_profile, nyquist_peaks }
}

/// Renders a spectrum to an 8-bit grayscale image file (PNG or PGM by
/// extension) after min-max normalization; a flat spectrum maps to black.
pub fn export_spectrum_image<T: Real>(
    spec: &Spectrum<T>,
    path: &Path,
) -> Result<(), SpectrumError> {
    let img = spectrum_to_raster(spec);
    match path.extension().and_then(|e| e.to_str()) {
        Some("pgm") => raster::write_pgm(&img, path)?,
        _ => raster::write_png(&img, path)?,
    }
    Ok(())
}

/// Min-max normalization of spectrum values onto the 0..255 scale.
pub fn spectrum_to_raster<T: Real>(spec: &Spectrum<T>) -> Raster<T> {
    let lo = spec.values.iter().copied().fold(T::infinity(), T::min);
    let hi = spec.values.iter().copied().fold(T::neg_infinity(), T::max);
    let range = hi - lo;
    let full = T::from_f64_c(255.0);
    let data = spec
        .values
        .iter()
        .map(|&v| if range > T::zero() { (v - lo) / range * full } else { T::zero() })
        .collect();
    Raster::new(spec.size, spec.size, 1, data)
}
