//! Built-in corpus generator: "real-like" power-law random fields and four
//! "fake-like" variants, each carrying one spectral artifact class observed
//! in generated imagery — broadband high-frequency noise, periodic lattice
//! combs, energy pinned to the spectral axes, and upsampling replicas.
//!
//! Every image is a pure function of its [`SynthSpec`]; channels draw from
//! independent keyed streams, so generation parallelizes freely.

use rustfft::num_complex::Complex;

use crate::raster::Raster;
use crate::real::Real;
use crate::rng;
use crate::spectrum::fft2d_buffer;

use std::fmt;
use std::str::FromStr;

/// Spectral power-law exponent used when a caller does not pick one.
pub const DEFAULT_ALPHA: f64 = 2.0;
/// Artifact amplitude (0-255 intensity units) used when a caller does not
/// pick one.
pub const DEFAULT_STRENGTH: f64 = 20.0;
/// Per-image base-field standard deviation range, in intensity units around
/// mid-gray. Drawn per seed so that pixel-domain statistics (variance,
/// gradient energy) overlap between classes and only spectral structure
/// separates them.
const FIELD_STD_RANGE: (f64, f64) = (24.0, 40.0);
/// Lattice period of the `grid` artifact.
const GRID_PERIOD: usize = 8;

#[derive(Debug, thiserror::Error)]
pub enum SynthError {
    #[error("size must be a power of two and at least 8, got {0}")]
    InvalidSize(usize),
    #[error("alpha must be positive, got {0}")]
    InvalidAlpha(f64),
    #[error("artifact strength must be non-negative, got {0}")]
    InvalidStrength(f64),
}

/// Image families the generator can produce. `Natural` is the real-like
/// class; the others add one artifact each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SynthKind {
    /// Isotropic power-law random field; stands in for camera imagery.
    Natural,
    /// Natural plus white noise confined to the top radial frequency quartile.
    HfNoise,
    /// Natural plus a period-8 dot lattice whose spectrum is a harmonic comb.
    Grid,
    /// Natural plus band-limited stripe noise living on the spectral axes.
    LowfreqAxis,
    /// Natural generated at half size, then nearest-neighbor upscaled 2x,
    /// which replicates the low-frequency spectrum into the high bands.
    Upsampled,
}

impl SynthKind {
    pub const ALL: [SynthKind; 5] =
        [Self::Natural, Self::HfNoise, Self::Grid, Self::LowfreqAxis, Self::Upsampled];

    /// The fake-like kinds, i.e. everything but `Natural`.
    pub const FAKES: [SynthKind; 4] =
        [Self::HfNoise, Self::Grid, Self::LowfreqAxis, Self::Upsampled];
}

impl fmt::Display for SynthKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Natural => "natural",
            Self::HfNoise => "hf_noise",
            Self::Grid => "grid",
            Self::LowfreqAxis => "lowfreq_axis",
            Self::Upsampled => "upsampled",
        })
    }
}

impl FromStr for SynthKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "natural" => Ok(Self::Natural),
            "hf_noise" => Ok(Self::HfNoise),
            "grid" => Ok(Self::Grid),
            "lowfreq_axis" => Ok(Self::LowfreqAxis),
            "upsampled" => Ok(Self::Upsampled),
            other => Err(format!("unknown synth kind `{other}`")),
        }
    }
}

/// Complete recipe for one synthetic image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthSpec {
    pub kind: SynthKind,
    pub size: usize,
    pub alpha: f64,
    pub artifact_strength: f64,
    pub seed: u64,
}

impl SynthSpec {
    /// Spec with the default power-law exponent and artifact strength.
    pub fn new(kind: SynthKind, size: usize, seed: u64) -> Self {
        Self { kind, size, alpha: DEFAULT_ALPHA, artifact_strength: DEFAULT_STRENGTH, seed }
    }

    fn validate(&self) -> Result<(), SynthError> {
        if self.size < 8 || !self.size.is_power_of_two() {
            return Err(SynthError::InvalidSize(self.size));
        }
        if !(self.alpha > 0.0) {
            return Err(SynthError::InvalidAlpha(self.alpha));
        }
        if !(self.artifact_strength >= 0.0) {
            return Err(SynthError::InvalidStrength(self.artifact_strength));
        }
        Ok(())
    }
}

/// Renders the image described by a spec: always 3-channel, values in
/// [0, 255], bit-identical for equal specs.
pub fn generate<T: Real>(spec: &SynthSpec) -> Result<Raster<T>, SynthError> {
    spec.validate()?;
    let n = spec.size;

    if spec.kind == SynthKind::Upsampled {
        let half = SynthSpec { kind: SynthKind::Natural, size: n / 2, ..*spec };
        let base = generate::<T>(&half)?;
        return Ok(Raster::from_fn(n, n, 3, |x, y, c| base.get(x / 2, y / 2, c)));
    }

    let field_seed = rng::derive_seed(spec.seed, "base-field");
    let amp_seed = rng::derive_seed(spec.seed, "amplitude");
    let (lo, hi) = FIELD_STD_RANGE;
    let field_std = lo + (hi - lo) * rng::uniform_open(rng::key3(amp_seed, 0, 0));
    let strength = spec.artifact_strength;
    let mut planes: Vec<Vec<f64>> = (0..3)
        .map(|c| {
            let mut z = power_law_field(n, spec.alpha, rng::fold(field_seed, c as u64));
            for v in &mut z {
                *v = 128.0 + field_std * *v;
            }
            z
        })
        .collect();

    if strength > 0.0 {
        match spec.kind {
            SynthKind::Natural | SynthKind::Upsampled => {}
            SynthKind::HfNoise => {
                let seed = rng::derive_seed(spec.seed, "hf-noise");
                for (c, plane) in planes.iter_mut().enumerate() {
                    let art = highband_field(n, rng::fold(seed, c as u64));
                    for (p, a) in plane.iter_mut().zip(art) {
                        *p += strength * a;
                    }
                }
            }
            SynthKind::Grid => {
                let seed = rng::derive_seed(spec.seed, "grid-offset");
                let dx = (rng::key3(seed, 0, 0) % GRID_PERIOD as u64) as usize;
                let dy = (rng::key3(seed, 1, 0) % GRID_PERIOD as u64) as usize;
                let art = dot_lattice(n, dx, dy);
                for plane in &mut planes {
                    for (p, &a) in plane.iter_mut().zip(&art) {
                        *p += strength * a;
                    }
                }
            }
            SynthKind::LowfreqAxis => {
                // one stripe field across all channels, as with the lattice:
                // a channel-shared artifact survives grayscale averaging at
                // full strength
                let art = axis_stripes(n, rng::derive_seed(spec.seed, "axis-stripes"));
                for plane in &mut planes {
                    for (p, &a) in plane.iter_mut().zip(&art) {
                        *p += strength * a;
                    }
                }
            }
        }
    }

    let planes: Vec<Vec<T>> = planes
        .into_iter()
        .map(|p| p.into_iter().map(T::from_f64_c).collect())
        .collect();
    let mut img = Raster::from_planes(n, n, &planes);
    img.clamp_intensities();
    Ok(img)
}

/// Zero-mean, unit-std field whose power spectrum falls off as 1/f^alpha:
/// white noise shaped in the frequency domain, DC removed.
fn power_law_field(n: usize, alpha: f64, seed: u64) -> Vec<f64> {
    let mut buf: Vec<Complex<f64>> = (0..n * n)
        .map(|i| Complex::new(rng::standard_normal(seed, i as u64, 0), 0.0))
        .collect();
    fft2d_buffer(&mut buf, n, true);
    for v in 0..n {
        for u in 0..n {
            let fu = u.min(n - u) as f64;
            let fv = v.min(n - v) as f64;
            let f = (fu * fu + fv * fv).sqrt();
            let env = if f == 0.0 { 0.0 } else { f.powf(-alpha / 2.0) };
            buf[v * n + u] *= env;
        }
    }
    fft2d_buffer(&mut buf, n, false);
    let scale = (n * n) as f64;
    let mut field: Vec<f64> = buf.iter().map(|z| z.re / scale).collect();
    standardize(&mut field);
    field
}

/// Unit-std white noise restricted to radial frequencies above three
/// quarters of the axis Nyquist.
fn highband_field(n: usize, seed: u64) -> Vec<f64> {
    let mut buf: Vec<Complex<f64>> = (0..n * n)
        .map(|i| Complex::new(rng::standard_normal(seed, i as u64, 0), 0.0))
        .collect();
    fft2d_buffer(&mut buf, n, true);
    let cutoff = 0.75 * (n as f64 / 2.0);
    for v in 0..n {
        for u in 0..n {
            let fu = u.min(n - u) as f64;
            let fv = v.min(n - v) as f64;
            if (fu * fu + fv * fv).sqrt() <= cutoff {
                buf[v * n + u] = Complex::new(0.0, 0.0);
            }
        }
    }
    fft2d_buffer(&mut buf, n, false);
    let scale = (n * n) as f64;
    let mut field: Vec<f64> = buf.iter().map(|z| z.re / scale).collect();
    standardize(&mut field);
    field
}

/// Zero-mean, unit-std dot lattice: one bright sample every `GRID_PERIOD`
/// pixels in both directions, phase-shifted by (dx, dy). Its spectrum is a
/// comb over all harmonics of n/8, Nyquist bins included.
fn dot_lattice(n: usize, dx: usize, dy: usize) -> Vec<f64> {
    let p = 1.0 / (GRID_PERIOD * GRID_PERIOD) as f64;
    let norm = (p * (1.0 - p)).sqrt();
    let mut art = vec![0.0; n * n];
    for y in 0..n {
        for x in 0..n {
            let hit = (x + dx) % GRID_PERIOD == 0 && (y + dy) % GRID_PERIOD == 0;
            art[y * n + x] = ((hit as u8) as f64 - p) / norm;
        }
    }
    art
}

/// Unit-std sum of horizontal and vertical stripe noise band-limited to the
/// lowest quarter of the frequency axis; all its energy sits on the u=0 and
/// v=0 spectral lines.
fn axis_stripes(n: usize, seed: u64) -> Vec<f64> {
    let top = (n / 4).max(2);
    let profile = |axis_seed: u64| -> Vec<f64> {
        (0..n)
            .map(|x| {
                (1..=top)
                    .map(|f| {
                        let phase = 2.0 * std::f64::consts::PI
                            * rng::uniform_open(rng::key3(axis_seed, f as u64, 0));
                        (2.0 * std::f64::consts::PI * (f * x) as f64 / n as f64 + phase).cos()
                    })
                    .sum()
            })
            .collect()
    };
    let a = profile(rng::fold(seed, 0));
    let b = profile(rng::fold(seed, 1));
    let mut field: Vec<f64> = (0..n * n).map(|i| a[i % n] + b[i / n]).collect();
    standardize(&mut field);
    field
}

/// Shifts to zero mean and scales to unit population std (no-op on a
/// constant input).
fn standardize(v: &mut [f64]) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let std = var.sqrt();
    if std == 0.0 {
        for x in v {
            *x -= mean;
        }
    } else {
        for x in v {
            *x = (*x - mean) / std;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{self, DEFAULT_BANDS, DEFAULT_EPSILON, DEFAULT_MEDIAN_K};

    fn spec(kind: SynthKind, size: usize, seed: u64) -> SynthSpec {
        SynthSpec::new(kind, size, seed)
    }

    /// Mean feature vector over the full pipeline for several seeds.
    fn mean_features(kind: SynthKind, size: usize, seeds: std::ops::Range<u64>) -> Vec<f64> {
        let count = (seeds.end - seeds.start) as usize;
        let mut acc: Option<Vec<f64>> = None;
        for seed in seeds {
            let img = generate::<f64>(&spec(kind, size, seed)).unwrap();
            let s = spectrum::image_log_spectrum(&img, DEFAULT_MEDIAN_K, DEFAULT_EPSILON).unwrap();
            let fv = spectrum::extract_features(&s, DEFAULT_BANDS).flatten();
            match &mut acc {
                None => acc = Some(fv),
                Some(a) => {
                    for (x, v) in a.iter_mut().zip(fv) {
                        *x += v;
                    }
                }
            }
        }
        let mut a = acc.unwrap();
        for x in &mut a {
            *x /= count as f64;
        }
        a
    }

    #[test]
    fn spec_validation_rejects_bad_fields() {
        let base = spec(SynthKind::Natural, 64, 0);
        assert!(matches!(
            generate::<f64>(&SynthSpec { size: 100, ..base }),
            Err(SynthError::InvalidSize(100))
        ));
        assert!(matches!(
            generate::<f64>(&SynthSpec { size: 4, ..base }),
            Err(SynthError::InvalidSize(4))
        ));
        assert!(matches!(
            generate::<f64>(&SynthSpec { alpha: 0.0, ..base }),
            Err(SynthError::InvalidAlpha(_))
        ));
        assert!(matches!(
            generate::<f64>(&SynthSpec { artifact_strength: -1.0, ..base }),
            Err(SynthError::InvalidStrength(_))
        ));
    }

    #[test]
    fn generation_is_deterministic_per_seed() {
        for kind in SynthKind::ALL {
            let a = generate::<f64>(&spec(kind, 32, 5)).unwrap();
            let b = generate::<f64>(&spec(kind, 32, 5)).unwrap();
            assert_eq!(a.data(), b.data(), "{kind}");
            let c = generate::<f64>(&spec(kind, 32, 6)).unwrap();
            assert_ne!(a.data(), c.data(), "{kind}");
        }
    }

    #[test]
    fn output_shape_and_range() {
        for kind in SynthKind::ALL {
            let img = generate::<f64>(&spec(kind, 32, 1)).unwrap();
            assert_eq!((img.width(), img.height(), img.channels()), (32, 32, 3));
            assert!(img.data().iter().all(|&v| (0.0..=255.0).contains(&v)), "{kind}");
        }
    }

    #[test]
    fn zero_strength_collapses_to_natural() {
        let natural = generate::<f64>(&SynthSpec {
            artifact_strength: 0.0,
            ..spec(SynthKind::Natural, 32, 9)
        })
        .unwrap();
        for kind in [SynthKind::HfNoise, SynthKind::Grid, SynthKind::LowfreqAxis] {
            let fake = generate::<f64>(&SynthSpec {
                artifact_strength: 0.0,
                ..spec(kind, 32, 9)
            })
            .unwrap();
            assert_eq!(fake.data(), natural.data(), "{kind}");
        }
        let up = generate::<f64>(&SynthSpec {
            artifact_strength: 0.0,
            ..spec(SynthKind::Upsampled, 32, 9)
        })
        .unwrap();
        assert_ne!(up.data(), natural.data());
    }

    #[test]
    fn channels_are_independent() {
        let img = generate::<f64>(&spec(SynthKind::Natural, 32, 2)).unwrap();
        assert_ne!(img.plane(0), img.plane(1));
        assert_ne!(img.plane(1), img.plane(2));
    }

    #[test]
    fn kind_names_round_trip() {
        for kind in SynthKind::ALL {
            assert_eq!(kind.to_string().parse::<SynthKind>().unwrap(), kind);
        }
        assert!("gan".parse::<SynthKind>().is_err());
    }

    #[test]
    fn natural_radial_profile_decays() {
        // mean raw (no high-pass) log spectrum over 100 seeds: the power-law
        // envelope must dominate band-to-band noise away from DC and corners
        let images: Vec<Raster<f64>> = (0..100)
            .map(|seed| generate::<f64>(&spec(SynthKind::Natural, 256, seed)).unwrap())
            .collect();
        let mut mean: Option<Vec<f64>> = None;
        for img in &images {
            let gray = crate::raster::to_grayscale(img);
            let s = spectrum::fft_log_spectrum(&gray, DEFAULT_EPSILON).unwrap();
            let fv = spectrum::extract_features(&s, DEFAULT_BANDS);
            match &mut mean {
                None => mean = Some(fv.radial_bands),
                Some(m) => {
                    for (x, v) in m.iter_mut().zip(fv.radial_bands) {
                        *x += v;
                    }
                }
            }
        }
        let bands: Vec<f64> = mean.unwrap().iter().map(|v| v / 100.0).collect();
        for b in 2..DEFAULT_BANDS - 2 {
            assert!(
                bands[b + 1] <= bands[b],
                "band {b}: {} then {}",
                bands[b],
                bands[b + 1]
            );
        }
    }

    #[test]
    fn grid_lights_up_nyquist_and_harmonics() {
        // comb peak magnitude grows with n^2 while the natural background
        // grows with n, so the margin is checked at working resolution
        let nat = mean_features(SynthKind::Natural, 128, 0..8);
        let grid = mean_features(SynthKind::Grid, 128, 0..8);
        let dim = nat.len();
        // nyquist entries are the last three coordinates
        for i in dim - 3..dim {
            assert!(
                grid[i] >= nat[i] + 3.0,
                "feature {i}: grid {} vs natural {}",
                grid[i],
                nat[i]
            );
        }
    }

    #[test]
    fn hf_noise_raises_high_radial_bands() {
        let nat = mean_features(SynthKind::HfNoise, 64, 0..8);
        let base = mean_features(SynthKind::Natural, 64, 0..8);
        // the band mask starts at three quarters of axis Nyquist, which is
        // band 0.75/sqrt(2)*B ~ 17 of 32 in corner-normalized radius
        for b in 18..28 {
            assert!(
                nat[b] > base[b] + 0.5,
                "band {b}: hf {} vs natural {}",
                nat[b],
                base[b]
            );
        }
    }

    #[test]
    fn lowfreq_axis_raises_axis_profile() {
        let ax = mean_features(SynthKind::LowfreqAxis, 64, 0..8);
        let base = mean_features(SynthKind::Natural, 64, 0..8);
        let dim = base.len();
        // axis profile entries sit just before the nyquist triple
        for i in dim - 5..dim - 3 {
            assert!(
                ax[i] > base[i] + 0.5,
                "feature {i}: axis {} vs natural {}",
                ax[i],
                base[i]
            );
        }
    }

    #[test]
    fn upsampled_duplicates_pixels_from_half_size_base() {
        let up = generate::<f64>(&spec(SynthKind::Upsampled, 32, 3)).unwrap();
        let base =
            generate::<f64>(&SynthSpec { kind: SynthKind::Natural, size: 16, ..spec(SynthKind::Upsampled, 32, 3) })
                .unwrap();
        for y in 0..32 {
            for x in 0..32 {
                for c in 0..3 {
                    assert_eq!(up.get(x, y, c), base.get(x / 2, y / 2, c));
                }
            }
        }
    }

    #[test]
    fn upsampled_rows_carry_exact_spectral_replicas() {
        // a nearest-neighbor x2 row is a hold of the half-size row, so its
        // DFT satisfies |Y(k+N/2)| / |Y(k)| = tan(pi k / N) exactly
        let n = 32usize;
        let img = generate::<f64>(&spec(SynthKind::Upsampled, n, 11)).unwrap();
        let row: Vec<f64> = (0..n).map(|x| img.get(x, 8, 0)).collect();
        let dft = |k: usize| -> (f64, f64) {
            let mut re = 0.0;
            let mut im = 0.0;
            for (x, &v) in row.iter().enumerate() {
                let ang = -2.0 * std::f64::consts::PI * (k * x) as f64 / n as f64;
                re += v * ang.cos();
                im += v * ang.sin();
            }
            (re, im)
        };
        let mag = |k: usize| {
            let (re, im) = dft(k);
            (re * re + im * im).sqrt()
        };
        let mut checked = 0;
        for k in 4..=12usize {
            let low = mag(k);
            if low < 1e-6 {
                continue; // replica ratio is 0/0 where the base band is empty
            }
            let expect = (std::f64::consts::PI * k as f64 / n as f64).tan();
            let got = mag(k + n / 2) / low;
            assert!(
                (got.ln() - expect.ln()).abs() < 1e-6,
                "k={k}: ratio {got} expected {expect}"
            );
            checked += 1;
        }
        assert!(checked >= 5, "too few informative bins ({checked})");
    }
}
