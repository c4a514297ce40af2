//! Counter-based random number generation.
//!
//! Every random quantity in the crate is a pure function of a 64-bit key, so
//! results never depend on iteration order or thread count. Keys are built by
//! folding integers (seed, pixel index, channel, draw counter) into a SplitMix64
//! finalizer chain.

/// SplitMix64 finalizer. Bijective on `u64` with full avalanche.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const GOLDEN: u64 = 0x9E37_7969_7F4A_7C15;

/// Folds one more word into a key.
#[inline]
pub fn fold(key: u64, word: u64) -> u64 {
    mix64(key.wrapping_add(GOLDEN).wrapping_add(word))
}

/// Hash of a (seed, a, b) triple, used as a per-element stream key.
#[inline]
pub fn key3(seed: u64, a: u64, b: u64) -> u64 {
    fold(fold(mix64(seed ^ GOLDEN), a), b)
}

/// Uniform draw in (0, 1], exactly representable in f64.
#[inline]
pub fn uniform_open(bits: u64) -> f64 {
    ((bits >> 11) + 1) as f64 * (1.0 / 9_007_199_254_740_992.0)
}

/// Standard normal deviate for stream element `(seed, index, draw)`.
///
/// Box-Muller over two independent keyed uniforms; deterministic per key.
#[inline]
pub fn standard_normal(seed: u64, index: u64, draw: u64) -> f64 {
    let u1 = uniform_open(key3(seed, index, 2 * draw));
    let u2 = uniform_open(key3(seed, index, 2 * draw + 1));
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Stable FNV-1a hash of a string, for path-keyed streams.
pub fn hash_str(s: &str) -> u64 {
    let mut h: u64 = 0xCBF2_9CE4_8422_2325;
    for b in s.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// Seed for a named sub-stream of `base`, e.g. one perturbed image.
pub fn derive_seed(base: u64, tag: &str) -> u64 {
    fold(mix64(base), hash_str(tag))
}
