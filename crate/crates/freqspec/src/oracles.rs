//! Brute-force reference implementations for the test suite.
//!
//! Every function here recomputes a quantity from its textbook definition at
//! O(n^2)-or-worse cost, with a hard input-size cap, and shares no code with
//! the fast path it validates. All oracles work in `f64`.

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("input of size {got} exceeds the oracle cap of {cap}")]
    InputTooLarge { got: usize, cap: usize },
}

fn cap(got: usize, limit: usize) -> Result<(), OracleError> {
    if got > limit {
        Err(OracleError::InputTooLarge { got, cap: limit })
    } else {
        Ok(())
    }
}

/// Direct O(N^4) 2-D DFT of a square single-channel plane, row-major.
/// Returns (re, im) per bin, same layout, unnormalized forward transform.
pub fn naive_dft(plane: &[f64], n: usize) -> Result<Vec<(f64, f64)>, OracleError> {
    cap(n, 32)?;
    assert_eq!(plane.len(), n * n);
    let mut out = vec![(0.0, 0.0); n * n];
    for v in 0..n {
        for u in 0..n {
            let mut re = 0.0;
            let mut im = 0.0;
            for y in 0..n {
                for x in 0..n {
                    let theta = -2.0 * std::f64::consts::PI
                        * ((u * x) as f64 + (v * y) as f64)
                        / n as f64;
                    let s = plane[y * n + x];
                    re += s * theta.cos();
                    im += s * theta.sin();
                }
            }
            out[v * n + u] = (re, im);
        }
    }
    Ok(out)
}

fn reflect(i: isize, n: usize) -> usize {
    let n = n as isize;
    let mut i = i;
    while i < 0 || i >= n {
        if i < 0 {
            i = -i - 1;
        } else {
            i = 2 * n - 1 - i;
        }
    }
    i as usize
}

/// Per-pixel sorted-window median filter with reflect padding.
pub fn sorted_median(plane: &[f64], w: usize, h: usize, k: usize) -> Result<Vec<f64>, OracleError> {
    cap(w.max(h), 64)?;
    assert!(k % 2 == 1 && k >= 1);
    assert_eq!(plane.len(), w * h);
    let r = (k / 2) as isize;
    let mut out = vec![0.0; w * h];
    for y in 0..h as isize {
        for x in 0..w as isize {
            let mut window = Vec::with_capacity(k * k);
            for dy in -r..=r {
                for dx in -r..=r {
                    window.push(plane[reflect(y + dy, h) * w + reflect(x + dx, w)]);
                }
            }
            window.sort_by(|a, b| a.partial_cmp(b).unwrap());
            out[y as usize * w + x as usize] = window[window.len() / 2];
        }
    }
    Ok(out)
}

/// Direct 2-D correlation with a full (non-separable) kernel, reflect padding.
/// The kernel is kw x kh, row-major, odd dimensions, anchored at its center.
pub fn direct_conv2(
    plane: &[f64],
    w: usize,
    h: usize,
    kernel: &[f64],
    kw: usize,
    kh: usize,
) -> Result<Vec<f64>, OracleError> {
    cap(w.max(h), 64)?;
    cap(kw.max(kh), 31)?;
    assert!(kw % 2 == 1 && kh % 2 == 1);
    assert_eq!(kernel.len(), kw * kh);
    let (rx, ry) = ((kw / 2) as isize, (kh / 2) as isize);
    let mut out = vec![0.0; w * h];
    for y in 0..h as isize {
        for x in 0..w as isize {
            let mut acc = 0.0;
            for dy in -ry..=ry {
                for dx in -rx..=rx {
                    let kv = kernel[(dy + ry) as usize * kw + (dx + rx) as usize];
                    acc += kv * plane[reflect(y + dy, h) * w + reflect(x + dx, w)];
                }
            }
            out[y as usize * w + x as usize] = acc;
        }
    }
    Ok(out)
}

/// AUC by exhaustive pairwise comparison: P(fake > real) + 0.5 P(tie).
pub fn pairwise_auc(real_scores: &[f64], fake_scores: &[f64]) -> Result<f64, OracleError> {
    cap(real_scores.len().max(fake_scores.len()), 4096)?;
    let mut wins = 0.0;
    for &f in fake_scores {
        for &r in real_scores {
            if f > r {
                wins += 1.0;
            } else if f == r {
                wins += 0.5;
            }
        }
    }
    Ok(wins / (real_scores.len() * fake_scores.len()) as f64)
}

/// Average precision by exhaustive sweep over distinct score thresholds,
/// rescanning the whole sample set at each threshold.
pub fn sweep_ap(labels: &[bool], scores: &[f64]) -> Result<f64, OracleError> {
    cap(labels.len(), 4096)?;
    assert_eq!(labels.len(), scores.len());
    let total_pos = labels.iter().filter(|&&l| l).count();
    assert!(total_pos > 0, "sweep_ap needs at least one positive");
    let mut thresholds: Vec<f64> = scores.to_vec();
    thresholds.sort_by(|a, b| b.partial_cmp(a).unwrap());
    thresholds.dedup();
    let mut ap = 0.0;
    let mut prev_recall = 0.0;
    for &t in &thresholds {
        let mut tp = 0usize;
        let mut fp = 0usize;
        for (&l, &s) in labels.iter().zip(scores) {
            if s >= t {
                if l {
                    tp += 1;
                } else {
                    fp += 1;
                }
            }
        }
        let precision = tp as f64 / (tp + fp) as f64;
        let recall = tp as f64 / total_pos as f64;
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
    }
    Ok(ap)
}

/// Textbook two-pass sample mean and unbiased covariance.
/// Returns (mean, covariance) with the covariance row-major d x d.
pub fn twopass_cov(rows: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<f64>), OracleError> {
    cap(rows.len(), 4096)?;
    let n = rows.len();
    assert!(n >= 2);
    let d = rows[0].len();
    cap(d, 128)?;
    let mut mean = vec![0.0; d];
    for row in rows {
        for (m, &v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    let mut cov = vec![0.0; d * d];
    for row in rows {
        for i in 0..d {
            for j in 0..d {
                cov[i * d + j] += (row[i] - mean[i]) * (row[j] - mean[j]);
            }
        }
    }
    for c in &mut cov {
        *c /= (n - 1) as f64;
    }
    Ok((mean, cov))
}

fn cubic(x: f64) -> f64 {
    const A: f64 = -0.5;
    let x = x.abs();
    if x <= 1.0 {
        ((A + 2.0) * x - (A + 3.0)) * x * x + 1.0
    } else if x < 2.0 {
        A * (((x - 5.0) * x + 8.0) * x - 4.0)
    } else {
        0.0
    }
}

/// Direct (non-separable) Catmull-Rom resampling at half-pixel-centered
/// coordinates, unclamped. One 4x4 weighted sum per output sample.
pub fn resample_bicubic_reference(
    plane: &[f64],
    in_w: usize,
    in_h: usize,
    out_w: usize,
    out_h: usize,
) -> Result<Vec<f64>, OracleError> {
    cap(out_w.max(out_h), 64)?;
    assert_eq!(plane.len(), in_w * in_h);
    let sx = in_w as f64 / out_w as f64;
    let sy = in_h as f64 / out_h as f64;
    let mut out = vec![0.0; out_w * out_h];
    for oy in 0..out_h {
        for ox in 0..out_w {
            let cx = (ox as f64 + 0.5) * sx - 0.5;
            let cy = (oy as f64 + 0.5) * sy - 0.5;
            let (bx, by) = (cx.floor(), cy.floor());
            let (fx, fy) = (cx - bx, cy - by);
            let mut acc = 0.0;
            let mut wsum = 0.0;
            for dy in -1..=2isize {
                for dx in -1..=2isize {
                    let w = cubic(fx - dx as f64) * cubic(fy - dy as f64);
                    let px = reflect(bx as isize + dx, in_w);
                    let py = reflect(by as isize + dy, in_h);
                    acc += w * plane[py * in_w + px];
                    wsum += w;
                }
            }
            out[oy * out_w + ox] = acc / wsum;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dft_of_constant_is_all_dc() {
        let got = naive_dft(&[3.0; 16], 4).unwrap();
        assert!((got[0].0 - 48.0).abs() < 1e-9);
        assert!(got[0].1.abs() < 1e-9);
        for &(re, im) in &got[1..] {
            assert!(re.abs() < 1e-9 && im.abs() < 1e-9);
        }
    }

    #[test]
    fn dft_of_impulse_is_flat() {
        let mut plane = vec![0.0; 16];
        plane[0] = 1.0;
        for (re, im) in naive_dft(&plane, 4).unwrap() {
            assert!(((re * re + im * im).sqrt() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn dft_enforces_cap() {
        assert!(matches!(
            naive_dft(&vec![0.0; 64 * 64], 64),
            Err(OracleError::InputTooLarge { .. })
        ));
    }

    #[test]
    fn median_of_distinct_window_is_middle_element() {
        let plane: Vec<f64> = (0..9).map(f64::from).collect();
        let got = sorted_median(&plane, 3, 3, 3).unwrap();
        assert_eq!(got[4], 4.0);
    }

    #[test]
    fn pairwise_auc_perfect_separation() {
        assert_eq!(pairwise_auc(&[0.1, 0.2], &[0.3, 0.4]).unwrap(), 1.0);
        assert_eq!(pairwise_auc(&[0.5, 0.5], &[0.5]).unwrap(), 0.5);
    }

    #[test]
    fn sweep_ap_single_positive_first() {
        assert_eq!(sweep_ap(&[true, false, false], &[0.9, 0.5, 0.1]).unwrap(), 1.0);
    }

    #[test]
    fn sweep_ap_known_case() {
        // fake 0.8, real 0.4, fake 0.35, real 0.1 -> (1 + 2/3) / 2
        let got = sweep_ap(&[true, false, true, false], &[0.8, 0.4, 0.35, 0.1]).unwrap();
        assert!((got - (1.0 + 2.0 / 3.0) / 2.0).abs() < 1e-12);
    }
}
