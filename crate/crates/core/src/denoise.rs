//! Wavelet-domain noise removal.
//!
//! Detail subbands of a decomposed plane are soft-thresholded at every
//! level; the approximation band is never touched. The default rule is the
//! universal threshold `T = sigma * sqrt(2 ln n)` with sigma robustly
//! estimated from the finest HH subband (median absolute coefficient over
//! 0.6745). Channels of a color image are processed independently.

use crate::chebyshev::WaveletKind;
use crate::error::Result;
use crate::filter::make_filter_bank;
use crate::plane::{ColorImage, ImagePlane};
use crate::transform::{decompose, reconstruct, SubbandPyramid};

/// How the threshold is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdRule {
    /// `T = sigma * sqrt(2 ln n)` with MAD sigma from the finest HH band.
    Universal,
    /// Fixed threshold.
    Manual(f64),
}

/// Shrinkage applied to detail coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Shrinkage {
    #[default]
    Soft,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenoiseConfig {
    pub kind: WaveletKind,
    pub levels: usize,
    pub threshold_rule: ThresholdRule,
    pub shrinkage: Shrinkage,
}

impl DenoiseConfig {
    pub fn universal(kind: WaveletKind, levels: usize) -> Self {
        Self {
            kind,
            levels,
            threshold_rule: ThresholdRule::Universal,
            shrinkage: Shrinkage::Soft,
        }
    }

    pub fn manual(kind: WaveletKind, levels: usize, threshold: f64) -> Self {
        assert!(threshold >= 0.0, "manual threshold must be non-negative");
        Self {
            kind,
            levels,
            threshold_rule: ThresholdRule::Manual(threshold),
            shrinkage: Shrinkage::Soft,
        }
    }
}

/// Robust noise estimate from an HH subband: median(|coefficients|)/0.6745.
pub fn estimate_sigma(hh: &ImagePlane) -> f64 {
    let mut mags: Vec<f64> = hh.samples().iter().map(|v| v.abs()).collect();
    mags.sort_by(|a, b| a.partial_cmp(b).expect("finite coefficients"));
    let n = mags.len();
    let median = if n % 2 == 1 {
        mags[n / 2]
    } else {
        0.5 * (mags[n / 2 - 1] + mags[n / 2])
    };
    median / 0.6745
}

/// Soft shrinkage: `sign(x) * max(|x| - t, 0)`.
#[inline]
pub fn soft_threshold(x: f64, t: f64) -> f64 {
    debug_assert!(t >= 0.0);
    let shrunk = x.abs() - t;
    if shrunk <= 0.0 {
        0.0
    } else {
        shrunk * x.signum()
    }
}

/// Soft-thresholds every detail band of a pyramid; LL passes through
/// untouched.
pub fn threshold_pyramid(pyramid: &SubbandPyramid, t: f64) -> SubbandPyramid {
    let mut out = pyramid.clone();
    for bands in &mut out.details {
        bands.lh = bands.lh.map(|v| soft_threshold(v, t));
        bands.hl = bands.hl.map(|v| soft_threshold(v, t));
        bands.hh = bands.hh.map(|v| soft_threshold(v, t));
    }
    out
}

/// Resolves the configured rule into a concrete threshold for one plane.
pub fn resolve_threshold(plane: &ImagePlane, pyramid: &SubbandPyramid, cfg: &DenoiseConfig) -> f64 {
    match cfg.threshold_rule {
        ThresholdRule::Manual(t) => t,
        ThresholdRule::Universal => {
            let sigma = estimate_sigma(&pyramid.details[0].hh);
            sigma * (2.0 * (plane.pixel_count() as f64).ln()).sqrt()
        }
    }
}

/// Denoises one plane: decompose, threshold details, reconstruct, clamp to
/// `[0,255]`.
pub fn denoise_plane(plane: &ImagePlane, cfg: &DenoiseConfig) -> Result<ImagePlane> {
    let bank = make_filter_bank(cfg.kind);
    let pyramid = decompose(plane, &bank, cfg.levels)?;
    let t = resolve_threshold(plane, &pyramid, cfg);
    let thresholded = threshold_pyramid(&pyramid, t);
    let restored = reconstruct(&thresholded, &bank)?;
    Ok(restored.clamped(0.0, 255.0))
}

/// Denoises each RGB channel independently.
pub fn denoise_image(image: &ColorImage, cfg: &DenoiseConfig) -> Result<ColorImage> {
    image.try_map_planes(|p| denoise_plane(p, cfg))
}
