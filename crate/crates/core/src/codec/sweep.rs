//! Per-iteration rate-distortion reporting over a compressed image.

use crate::chebyshev::WaveletKind;
use crate::codec::{compress_image, decompress_image_counted, CompressedImage};
use crate::error::Result;
use crate::metrics;
use crate::plane::ColorImage;

/// One sweep row: quality after decoding `iteration` passes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityReport {
    pub iteration: u32,
    pub mse: f64,
    pub psnr: f64,
    /// Payload bits consumed so far, over the pixel count (all channels).
    pub bpp: f64,
    /// Percent of the raw 24-bit RGB size.
    pub cr: f64,
}

/// Compresses `image` and reports quality at every iteration 1..=max_passes.
pub fn rate_distortion_sweep(
    image: &ColorImage,
    kind: WaveletKind,
    levels: usize,
    q_bits: u8,
    max_passes: u32,
) -> Result<Vec<QualityReport>> {
    let compressed = compress_image(image, kind, levels, q_bits, max_passes)?;
    sweep_reports(image, &compressed)
}

/// Reports quality rows for an already compressed image, measured against
/// the image that was fed to the coder. Iterations beyond a channel's
/// encoded depth repeat its final state, so the rows saturate. Consumed
/// bits come from the decoder itself, so streams read back from files
/// (which carry no pass-boundary metadata) sweep identically.
pub fn sweep_reports(
    reference: &ColorImage,
    compressed: &CompressedImage,
) -> Result<Vec<QualityReport>> {
    let pixels = (reference.width() * reference.height()) as u64;
    let mut rows = Vec::with_capacity(compressed.passes as usize);
    for iteration in 1..=u32::from(compressed.passes) {
        let (restored, bits) = decompress_image_counted(compressed, iteration)?;
        let mse = metrics::mse(reference, &restored)?;
        let bpp = metrics::bpp(bits, pixels)?;
        rows.push(QualityReport {
            iteration,
            mse,
            psnr: metrics::psnr(mse)?,
            bpp,
            cr: metrics::cr(bpp),
        });
    }
    Ok(rows)
}

impl QualityReport {
    /// CSV header matching the table column order.
    pub const CSV_HEADER: &'static str = "Iteration,MSE,PSNR,BPP,CR";

    /// Fixed-precision CSV row; deterministic byte-for-byte.
    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{:.6},{:.4},{:.6},{:.4}",
            self.iteration, self.mse, self.psnr, self.bpp, self.cr
        )
    }
}
