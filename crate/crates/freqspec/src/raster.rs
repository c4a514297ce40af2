//! Image representation, decoding/encoding, color conversion, and resampling.
//!
//! A [`Raster`] carries real-valued intensities on the 0..255 scale so that
//! chained operations do not accumulate 8-bit rounding; quantization happens
//! only when a file is written (and inside the JPEG round trip, which models
//! a real codec boundary).

use std::io::Write;
use std::path::Path;

use crate::real::Real;

#[derive(Debug, thiserror::Error)]
pub enum RasterError {
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),
    #[error("corrupt or truncated image stream: {0}")]
    CorruptStream(String),
    #[error("output dimensions must be at least 1x1")]
    ZeroDimension,
    #[error("operation requires a single-channel raster, got {0} channels")]
    NotGrayscale(usize),
    #[error("io failure: {0}")]
    Io(#[from] std::io::Error),
}

/// Row-major image with interleaved channels and real-valued intensities.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster<T> {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<T>,
}

impl<T: Real> Raster<T> {
    /// Wraps raw data. Panics if the buffer length does not match the
    /// dimensions or the channel count is not 1 or 3.
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<T>) -> Self {
        assert!(channels == 1 || channels == 3, "channels must be 1 or 3");
        assert_eq!(data.len(), width * height * channels, "buffer size mismatch");
        Self { width, height, channels, data }
    }

    pub fn constant(width: usize, height: usize, channels: usize, value: T) -> Self {
        Self::new(width, height, channels, vec![value; width * height * channels])
    }

    /// Builds a raster by evaluating `f(x, y, c)` at every sample.
    pub fn from_fn(
        width: usize,
        height: usize,
        channels: usize,
        mut f: impl FnMut(usize, usize, usize) -> T,
    ) -> Self {
        let mut data = Vec::with_capacity(width * height * channels);
        for y in 0..height {
            for x in 0..width {
                for c in 0..channels {
                    data.push(f(x, y, c));
                }
            }
        }
        Self::new(width, height, channels, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, c: usize) -> T {
        self.data[(y * self.width + x) * self.channels + c]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, c: usize, v: T) {
        self.data[(y * self.width + x) * self.channels + c] = v;
    }

    /// Extracts channel `c` as a contiguous plane.
    pub fn plane(&self, c: usize) -> Vec<T> {
        assert!(c < self.channels);
        self.data.iter().skip(c).step_by(self.channels).copied().collect()
    }

    /// Rebuilds an interleaved raster from per-channel planes.
    pub fn from_planes(width: usize, height: usize, planes: &[Vec<T>]) -> Self {
        let channels = planes.len();
        Self::from_fn(width, height, channels, |x, y, c| planes[c][y * width + x])
    }

    /// Quantizes to 8-bit: round half away from zero, clamp to 0..=255.
    pub fn to_u8(&self) -> Vec<u8> {
        self.data
            .iter()
            .map(|&v| {
                let r = v.round().to_f64().unwrap_or(0.0);
                r.clamp(0.0, 255.0) as u8
            })
            .collect()
    }

    pub fn clamp_intensities(&mut self) {
        let lo = T::zero();
        let hi = T::from_f64_c(255.0);
        for v in &mut self.data {
            if *v < lo {
                *v = lo;
            } else if *v > hi {
                *v = hi;
            }
        }
    }
}

/// Decodes a PNG or baseline JPEG byte stream.
///
/// Color sources yield 3 channels, grayscale sources 1; alpha is dropped.
pub fn decode_image<T: Real>(bytes: &[u8]) -> Result<Raster<T>, RasterError> {
    let dynimg = image::load_from_memory(bytes).map_err(|e| match e {
        image::ImageError::Unsupported(u) => RasterError::UnsupportedFormat(u.to_string()),
        other => RasterError::CorruptStream(other.to_string()),
    })?;
    let (w, h) = (dynimg.width() as usize, dynimg.height() as usize);
    use image::DynamicImage::*;
    let (channels, raw): (usize, Vec<u8>) = match dynimg {
        ImageLuma8(img) => (1, img.into_raw()),
        ImageLumaA8(img) => (1, img.pixels().map(|p| p.0[0]).collect()),
        ImageRgb8(img) => (3, img.into_raw()),
        ImageRgba8(img) => (3, img.pixels().flat_map(|p| [p.0[0], p.0[1], p.0[2]]).collect()),
        other => {
            return Err(RasterError::UnsupportedFormat(format!(
                "{:?} sample depth not supported",
                other.color()
            )))
        }
    };
    let data = raw.into_iter().map(|b| T::from_u8(b).unwrap()).collect();
    Ok(Raster::new(w, h, channels, data))
}

/// Reads and decodes an image file.
pub fn load_image<T: Real>(path: &Path) -> Result<Raster<T>, RasterError> {
    let bytes = std::fs::read(path)?;
    decode_image(&bytes)
}

/// Writes an 8-bit PNG, quantizing the intensities.
pub fn write_png<T: Real>(img: &Raster<T>, path: &Path) -> Result<(), RasterError> {
    let bytes = img.to_u8();
    let color = match img.channels() {
        1 => image::ExtendedColorType::L8,
        _ => image::ExtendedColorType::Rgb8,
    };
    image::save_buffer_with_format(
        path,
        &bytes,
        img.width() as u32,
        img.height() as u32,
        color,
        image::ImageFormat::Png,
    )
    .map_err(|e| RasterError::CorruptStream(e.to_string()))
}

/// Writes a binary PGM (P5), single-channel only.
pub fn write_pgm<T: Real>(img: &Raster<T>, path: &Path) -> Result<(), RasterError> {
    if img.channels() != 1 {
        return Err(RasterError::NotGrayscale(img.channels()));
    }
    let mut f = std::fs::File::create(path)?;
    write!(f, "P5\n{} {}\n255\n", img.width(), img.height())?;
    f.write_all(&img.to_u8())?;
    Ok(())
}

/// Unweighted per-pixel mean over color channels; identity on grayscale input.
pub fn to_grayscale<T: Real>(img: &Raster<T>) -> Raster<T> {
    if img.channels() == 1 {
        return img.clone();
    }
    let third = T::one() / T::from_usize_c(img.channels());
    let data = img
        .data()
        .chunks_exact(img.channels())
        .map(|px| px.iter().copied().sum::<T>() * third)
        .collect();
    Raster::new(img.width(), img.height(), 1, data)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResizeMethod {
    Bilinear,
    /// Catmull-Rom cubic (a = -0.5).
    Bicubic,
}

/// Reflects an out-of-range index back into `0..n` (symmetric, edge repeated).
#[inline]
pub(crate) fn reflect_index(i: isize, n: usize) -> usize {
    debug_assert!(n > 0);
    let n = n as isize;
    let mut i = i;
    loop {
        if i < 0 {
            i = -i - 1;
        } else if i >= n {
            i = 2 * n - 1 - i;
        } else {
            return i as usize;
        }
    }
}

fn catmull_rom(x: f64) -> f64 {
    const A: f64 = -0.5;
    let x = x.abs();
    if x <= 1.0 {
        (A + 2.0) * x.powi(3) - (A + 3.0) * x.powi(2) + 1.0
    } else if x < 2.0 {
        A * (x.powi(3) - 5.0 * x.powi(2) + 8.0 * x - 4.0)
    } else {
        0.0
    }
}

/// Precomputed taps for one output coordinate of a separable pass.
struct TapSet {
    indices: Vec<usize>,
    weights: Vec<f64>,
}

fn build_taps(in_n: usize, out_n: usize, method: ResizeMethod) -> Vec<TapSet> {
    let scale = in_n as f64 / out_n as f64;
    (0..out_n)
        .map(|o| {
            let src = (o as f64 + 0.5) * scale - 0.5;
            let base = src.floor();
            let frac = src - base;
            let base = base as isize;
            let (offsets, mut weights): (Vec<isize>, Vec<f64>) = match method {
                ResizeMethod::Bilinear => {
                    (vec![base, base + 1], vec![1.0 - frac, frac])
                }
                ResizeMethod::Bicubic => (
                    (-1..=2).map(|d| base + d).collect(),
                    (-1..=2).map(|d| catmull_rom(frac - d as f64)).collect(),
                ),
            };
            let total: f64 = weights.iter().sum();
            for w in &mut weights {
                *w /= total;
            }
            let indices = offsets.into_iter().map(|i| reflect_index(i, in_n)).collect();
            TapSet { indices, weights }
        })
        .collect()
}

fn resample_axis<T: Real>(
    plane: &[T],
    in_w: usize,
    in_h: usize,
    taps: &[TapSet],
    horizontal: bool,
) -> Vec<T> {
    let (out_w, out_h) = if horizontal { (taps.len(), in_h) } else { (in_w, taps.len()) };
    let mut out = vec![T::zero(); out_w * out_h];
    for y in 0..out_h {
        for x in 0..out_w {
            let t = if horizontal { &taps[x] } else { &taps[y] };
            let mut acc = T::zero();
            for (&i, &w) in t.indices.iter().zip(&t.weights) {
                let v = if horizontal { plane[y * in_w + i] } else { plane[i * in_w + x] };
                acc += v * T::from_f64_c(w);
            }
            out[y * out_w + x] = acc;
        }
    }
    out
}

/// Separable resampling with half-pixel-center alignment and reflect borders.
///
/// Output intensities are clamped to 0..255 (cubic taps can overshoot).
pub fn resize<T: Real>(
    img: &Raster<T>,
    out_w: usize,
    out_h: usize,
    method: ResizeMethod,
) -> Result<Raster<T>, RasterError> {
    if out_w == 0 || out_h == 0 {
        return Err(RasterError::ZeroDimension);
    }
    let h_taps = build_taps(img.width(), out_w, method);
    let v_taps = build_taps(img.height(), out_h, method);
    let planes: Vec<Vec<T>> = (0..img.channels())
        .map(|c| {
            let plane = img.plane(c);
            let mid = resample_axis(&plane, img.width(), img.height(), &h_taps, true);
            resample_axis(&mid, out_w, img.height(), &v_taps, false)
        })
        .collect();
    let mut out = Raster::from_planes(out_w, out_h, &planes);
    out.clamp_intensities();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles;

    fn png_bytes(img: &Raster<f64>) -> Vec<u8> {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.png");
        write_png(img, &p).unwrap();
        std::fs::read(&p).unwrap()
    }

    #[test]
    fn decode_constant_red_png() {
        let img = Raster::<f64>::from_fn(2, 2, 3, |_, _, c| if c == 0 { 255.0 } else { 0.0 });
        let decoded: Raster<f64> = decode_image(&png_bytes(&img)).unwrap();
        assert_eq!(decoded.width(), 2);
        assert_eq!(decoded.height(), 2);
        assert_eq!(decoded.channels(), 3);
        assert_eq!(decoded.data()[..3], [255.0, 0.0, 0.0]);
    }

    #[test]
    fn decode_grayscale_ramp() {
        let img = Raster::<f64>::new(4, 1, 1, vec![0.0, 1.0, 2.0, 3.0]);
        let decoded: Raster<f64> = decode_image(&png_bytes(&img)).unwrap();
        assert_eq!(decoded.channels(), 1);
        assert_eq!(decoded.data(), &[0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn decode_rejects_garbage() {
        assert!(matches!(
            decode_image::<f64>(&[0u8; 16]),
            Err(RasterError::UnsupportedFormat(_) | RasterError::CorruptStream(_))
        ));
        let img = Raster::<f64>::constant(4, 4, 3, 7.0);
        let mut bytes = png_bytes(&img);
        bytes.truncate(bytes.len() / 2);
        assert!(decode_image::<f64>(&bytes).is_err());
    }

    #[test]
    fn png_round_trip_is_pixel_exact() {
        for seed in 0..4u64 {
            let img = Raster::<f64>::from_fn(9, 7, 3, |x, y, c| {
                (crate::rng::key3(seed, (y * 9 + x) as u64, c as u64) % 256) as f64
            });
            let once: Raster<f64> = decode_image(&png_bytes(&img)).unwrap();
            let twice: Raster<f64> = decode_image(&png_bytes(&once)).unwrap();
            assert_eq!(once, twice);
            assert_eq!(once.data(), img.data());
        }
    }

    #[test]
    fn grayscale_is_channel_mean() {
        let img = Raster::<f64>::new(1, 1, 3, vec![30.0, 60.0, 90.0]);
        assert_eq!(to_grayscale(&img).data(), &[60.0]);

        let gray = Raster::<f64>::new(2, 1, 1, vec![5.0, 6.0]);
        assert_eq!(to_grayscale(&gray), gray);

        let img = Raster::<f64>::from_fn(4, 4, 3, |x, y, c| {
            (crate::rng::key3(3, (y * 4 + x) as u64, c as u64) % 256) as f64
        });
        let got = to_grayscale(&img);
        for y in 0..4 {
            for x in 0..4 {
                let mut m = 0.0;
                for c in 0..3 {
                    m += img.get(x, y, c);
                }
                m /= 3.0;
                assert!((got.get(x, y, 0) - m).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn resize_preserves_constants() {
        let img = Raster::<f64>::constant(5, 7, 3, 123.0);
        for method in [ResizeMethod::Bilinear, ResizeMethod::Bicubic] {
            for (w, h) in [(2, 3), (10, 14), (5, 7), (1, 1)] {
                let out = resize(&img, w, h, method).unwrap();
                assert!(out.data().iter().all(|&v| (v - 123.0).abs() < 1e-9));
            }
        }
    }

    #[test]
    fn resize_identity_geometry_is_exact() {
        let img = Raster::<f64>::from_fn(6, 5, 1, |x, y, _| ((x * 31 + y * 17) % 256) as f64);
        for method in [ResizeMethod::Bilinear, ResizeMethod::Bicubic] {
            let out = resize(&img, 6, 5, method).unwrap();
            assert_eq!(out.data(), img.data());
        }
    }

    #[test]
    fn bilinear_half_downscale_is_block_mean() {
        let img = Raster::<f64>::from_fn(4, 4, 1, |x, y, _| (y * 4 + x) as f64);
        let out = resize(&img, 2, 2, ResizeMethod::Bilinear).unwrap();
        for by in 0..2 {
            for bx in 0..2 {
                let mean = (img.get(2 * bx, 2 * by, 0)
                    + img.get(2 * bx + 1, 2 * by, 0)
                    + img.get(2 * bx, 2 * by + 1, 0)
                    + img.get(2 * bx + 1, 2 * by + 1, 0))
                    / 4.0;
                assert!((out.get(bx, by, 0) - mean).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn resize_rejects_zero_dimension() {
        let img = Raster::<f64>::constant(4, 4, 1, 0.0);
        assert!(matches!(
            resize(&img, 0, 4, ResizeMethod::Bilinear),
            Err(RasterError::ZeroDimension)
        ));
    }

    #[test]
    fn reflect_index_walks_back_in() {
        assert_eq!(reflect_index(-1, 4), 0);
        assert_eq!(reflect_index(-2, 4), 1);
        assert_eq!(reflect_index(4, 4), 3);
        assert_eq!(reflect_index(5, 4), 2);
        assert_eq!(reflect_index(0, 1), 0);
        assert_eq!(reflect_index(-3, 1), 0);
    }

    #[test]
    fn bicubic_matches_direct_convolution_oracle() {
        // Upscale only feeds interior taps through reflect, same as the oracle.
        let img = Raster::<f64>::from_fn(8, 8, 1, |x, y, _| {
            (crate::rng::key3(11, (y * 8 + x) as u64, 0) % 256) as f64
        });
        let out = resize(&img, 16, 16, ResizeMethod::Bicubic).unwrap();
        let oracle = oracles::resample_bicubic_reference(img.data(), 8, 8, 16, 16).unwrap();
        for (a, b) in out.data().iter().zip(&oracle) {
            assert!((a - b.clamp(0.0, 255.0)).abs() < 1e-9);
        }
    }
}
