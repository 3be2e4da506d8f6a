//! The four image-quality criteria: MSE, PSNR, bits per pixel and
//! compression ratio.
//!
//! PSNR uses the 8-bit peak of 255. CR is reported as a percentage of the
//! raw 24-bit RGB size, `cr = 100 * bpp / 24`, the convention the bundled
//! reference tables follow.

use crate::error::{Error, Result};
use crate::plane::ColorImage;

/// 8-bit peak signal value.
pub const PEAK: f64 = 255.0;

/// A validated (reference, test) pair of equal-dimension images.
#[derive(Debug, Clone, Copy)]
pub struct MetricPair<'a> {
    reference: &'a ColorImage,
    test: &'a ColorImage,
}

impl<'a> MetricPair<'a> {
    pub fn new(reference: &'a ColorImage, test: &'a ColorImage) -> Result<Self> {
        if reference.width() != test.width() || reference.height() != test.height() {
            return Err(Error::DimensionMismatch(
                reference.width(),
                reference.height(),
                test.width(),
                test.height(),
            ));
        }
        Ok(Self { reference, test })
    }

    /// Mean squared error over all pixels and channels.
    pub fn mse(&self) -> f64 {
        let mut sum = 0.0;
        let mut count = 0usize;
        for (rp, tp) in self.reference.planes().iter().zip(self.test.planes()) {
            for (a, b) in rp.samples().iter().zip(tp.samples()) {
                let d = a - b;
                sum += d * d;
            }
            count += rp.samples().len();
        }
        sum / count as f64
    }

    pub fn psnr(&self) -> f64 {
        psnr(self.mse()).expect("mse is non-negative")
    }
}

/// Mean squared error between two images of identical dimensions.
pub fn mse(reference: &ColorImage, test: &ColorImage) -> Result<f64> {
    Ok(MetricPair::new(reference, test)?.mse())
}

/// Peak signal-to-noise ratio in dB from an MSE value; infinite for a
/// perfect match.
pub fn psnr(mse_value: f64) -> Result<f64> {
    if mse_value < 0.0 || mse_value.is_nan() {
        return Err(Error::NegativeMse(mse_value));
    }
    if mse_value == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (PEAK * PEAK / mse_value).log10())
}

/// Payload bits per pixel.
pub fn bpp(total_payload_bits: u64, pixel_count: u64) -> Result<f64> {
    if pixel_count == 0 {
        return Err(Error::ZeroPixels);
    }
    Ok(total_payload_bits as f64 / pixel_count as f64)
}

/// Compression ratio as a percentage of the raw 24-bit RGB size.
pub fn cr(bpp_value: f64) -> f64 {
    100.0 * bpp_value / 24.0
}
