//! Internal baseline-JPEG round trip: 4:4:4 YCbCr, 8x8 DCT, quality-scaled
//! quantization tables, and the inverse path. Entropy coding is lossless and
//! therefore skipped; all loss comes from quantization and the integer
//! rounding steps a real codec performs at plane boundaries.
//!
//! The codec always computes in `f64` so results do not depend on the scalar
//! type carrying the samples.

use crate::raster::Raster;
use crate::real::Real;

use super::PerturbError;

/// Base luminance quantization table (quality 50), zig-zag-free row-major.
const LUMA_BASE: [i64; 64] = [
    16, 11, 10, 16, 24, 40, 51, 61, //
    12, 12, 14, 19, 26, 58, 60, 55, //
    14, 13, 16, 24, 40, 57, 69, 56, //
    14, 17, 22, 29, 51, 87, 80, 62, //
    18, 22, 37, 56, 68, 109, 103, 77, //
    24, 35, 55, 64, 81, 104, 113, 92, //
    49, 64, 78, 87, 103, 121, 120, 101, //
    72, 92, 95, 98, 112, 100, 103, 99,
];

/// Base chrominance quantization table (quality 50), row-major.
const CHROMA_BASE: [i64; 64] = [
    17, 18, 24, 47, 99, 99, 99, 99, //
    18, 21, 26, 66, 99, 99, 99, 99, //
    24, 26, 56, 99, 99, 99, 99, 99, //
    47, 66, 99, 99, 99, 99, 99, 99, //
    99, 99, 99, 99, 99, 99, 99, 99, //
    99, 99, 99, 99, 99, 99, 99, 99, //
    99, 99, 99, 99, 99, 99, 99, 99, //
    99, 99, 99, 99, 99, 99, 99, 99,
];

/// Scales a base table to the requested quality: scale = 5000/q below 50,
/// 200 - 2q at or above, each entry floor((base*scale + 50)/100) clamped to
/// 1..=255.
pub(super) fn scaled_table(base: &[i64; 64], quality: u32) -> [f64; 64] {
    debug_assert!((1..=100).contains(&quality));
    let q = quality as i64;
    let scale = if q < 50 { 5000 / q } else { 200 - 2 * q };
    let mut out = [0.0; 64];
    for (o, &b) in out.iter_mut().zip(base) {
        *o = ((b * scale + 50) / 100).clamp(1, 255) as f64;
    }
    out
}

/// cos((2x+1) u pi / 16) for the 8-point DCT-II basis.
fn cos_table() -> [[f64; 8]; 8] {
    let mut t = [[0.0; 8]; 8];
    for (x, row) in t.iter_mut().enumerate() {
        for (u, v) in row.iter_mut().enumerate() {
            *v = ((2 * x + 1) as f64 * u as f64 * std::f64::consts::PI / 16.0).cos();
        }
    }
    t
}

fn basis_norm(u: usize) -> f64 {
    if u == 0 { std::f64::consts::FRAC_1_SQRT_2 } else { 1.0 }
}

/// Forward 8x8 DCT-II, orthonormal JPEG scaling (C(u)C(v)/4 prefactor).
fn fdct(block: &[f64; 64], cos: &[[f64; 8]; 8]) -> [f64; 64] {
    let mut out = [0.0; 64];
    for v in 0..8 {
        for u in 0..8 {
            let mut acc = 0.0;
            for y in 0..8 {
                for x in 0..8 {
                    acc += block[y * 8 + x] * cos[x][u] * cos[y][v];
                }
            }
            out[v * 8 + u] = basis_norm(u) * basis_norm(v) / 4.0 * acc;
        }
    }
    out
}

/// Inverse 8x8 DCT (DCT-III), matching [`fdct`].
fn idct(coef: &[f64; 64], cos: &[[f64; 8]; 8]) -> [f64; 64] {
    let mut out = [0.0; 64];
    for y in 0..8 {
        for x in 0..8 {
            let mut acc = 0.0;
            for v in 0..8 {
                for u in 0..8 {
                    acc += basis_norm(u) * basis_norm(v) / 4.0
                        * coef[v * 8 + u]
                        * cos[x][u]
                        * cos[y][v];
                }
            }
            out[y * 8 + x] = acc;
        }
    }
    out
}

/// One plane through the lossy core: level shift, block DCT, quantize,
/// dequantize, inverse DCT, round back to the 0..=255 sample lattice.
/// Edge blocks replicate the last row/column, as encoders do.
fn roundtrip_plane(plane: &[f64], w: usize, h: usize, table: &[f64; 64]) -> Vec<f64> {
    let cos = cos_table();
    let mut out = vec![0.0; w * h];
    let (bw, bh) = (w.div_ceil(8), h.div_ceil(8));
    let mut block = [0.0; 64];
    for by in 0..bh {
        for bx in 0..bw {
            for y in 0..8 {
                let sy = (by * 8 + y).min(h - 1);
                for x in 0..8 {
                    let sx = (bx * 8 + x).min(w - 1);
                    block[y * 8 + x] = plane[sy * w + sx] - 128.0;
                }
            }
            let mut coef = fdct(&block, &cos);
            for (c, &q) in coef.iter_mut().zip(table) {
                *c = (*c / q).round() * q;
            }
            let spatial = idct(&coef, &cos);
            for y in 0..8 {
                let sy = by * 8 + y;
                if sy >= h {
                    break;
                }
                for x in 0..8 {
                    let sx = bx * 8 + x;
                    if sx >= w {
                        break;
                    }
                    out[sy * w + sx] = (spatial[y * 8 + x] + 128.0).round().clamp(0.0, 255.0);
                }
            }
        }
    }
    out
}

const KR: f64 = 0.299;
const KG: f64 = 0.587;
const KB: f64 = 0.114;

fn rgb_to_ycbcr(r: f64, g: f64, b: f64) -> (f64, f64, f64) {
    let y = KR * r + KG * g + KB * b;
    let cb = 128.0 + 0.5 / (1.0 - KB) * (b - y);
    let cr = 128.0 + 0.5 / (1.0 - KR) * (r - y);
    (y, cb, cr)
}

fn ycbcr_to_rgb(y: f64, cb: f64, cr: f64) -> (f64, f64, f64) {
    let r = y + 2.0 * (1.0 - KR) * (cr - 128.0);
    let b = y + 2.0 * (1.0 - KB) * (cb - 128.0);
    let g = (y - KR * r - KB * b) / KG;
    (r, g, b)
}

/// Encode-decode round trip at the given quality with no chroma subsampling.
pub fn jpeg_roundtrip<T: Real>(img: &Raster<T>, quality: u32) -> Result<Raster<T>, PerturbError> {
    if img.channels() != 3 {
        return Err(PerturbError::NotRgb(img.channels()));
    }
    if !(1..=100).contains(&quality) {
        return Err(PerturbError::InvalidQuality(quality));
    }
    let (w, h) = (img.width(), img.height());
    let luma_q = scaled_table(&LUMA_BASE, quality);
    let chroma_q = scaled_table(&CHROMA_BASE, quality);

    // color transform plus the codec's integer sample storage
    let mut planes = [vec![0.0f64; w * h], vec![0.0f64; w * h], vec![0.0f64; w * h]];
    for i in 0..w * h {
        let (r, g, b) = (
            img.data()[3 * i].to_f64_c(),
            img.data()[3 * i + 1].to_f64_c(),
            img.data()[3 * i + 2].to_f64_c(),
        );
        let (y, cb, cr) = rgb_to_ycbcr(r, g, b);
        planes[0][i] = y.round().clamp(0.0, 255.0);
        planes[1][i] = cb.round().clamp(0.0, 255.0);
        planes[2][i] = cr.round().clamp(0.0, 255.0);
    }

    let y = roundtrip_plane(&planes[0], w, h, &luma_q);
    let cb = roundtrip_plane(&planes[1], w, h, &chroma_q);
    let cr = roundtrip_plane(&planes[2], w, h, &chroma_q);

    let mut data = Vec::with_capacity(w * h * 3);
    for i in 0..w * h {
        let (r, g, b) = ycbcr_to_rgb(y[i], cb[i], cr[i]);
        data.push(T::from_f64_c(r.round().clamp(0.0, 255.0)));
        data.push(T::from_f64_c(g.round().clamp(0.0, 255.0)));
        data.push(T::from_f64_c(b.round().clamp(0.0, 255.0)));
    }
    Ok(Raster::new(w, h, 3, data))
}
