//! Frequency-domain forensics for detecting synthesized images.
//!
//! The crate implements a spectral analysis pipeline — median-filter
//! high-pass residual, 2-D FFT log-magnitude spectra, and a compact
//! band/sector descriptor — together with a synthetic image corpus,
//! perturbation models (compression, blur, noise, rescaling), ranking and
//! distribution metrics, a small deterministic classifier, and a benchmark
//! harness that ties them into generalization and robustness studies.
//!
//! All numeric code is generic over the scalar type via [`real::Real`];
//! the [`crate root aliases`](crate) fix `f64` for the common case.

pub mod bench;
pub mod metrics;
pub mod model;
pub mod oracles;
pub mod perturb;
pub mod raster;
pub mod real;
pub mod rng;
pub mod spectrum;
pub mod synth;

pub use real::Real;

/// Default-precision raster.
pub type Raster = raster::Raster<f64>;
/// Default-precision spectrum.
pub type Spectrum = spectrum::Spectrum<f64>;
/// Default-precision feature vector.
pub type FeatureVector = spectrum::FeatureVector<f64>;

