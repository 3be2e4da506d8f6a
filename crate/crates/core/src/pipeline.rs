//! The end-to-end batch pipeline: enhancement, optional seeded noise
//! injection, compression sweeps before and after denoising, full-depth
//! decompression, a second denoising pass and wavelet feature-map export.
//!
//! Every artifact lands in the output directory; bitstreams and CSV tables
//! are byte-identical across runs with the same inputs and seed.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};

use crate::chebyshev::WaveletKind;
use crate::codec::{
    compress_image, decompress_image, sweep_reports, CompressedImage, QualityReport,
};
use crate::denoise::{denoise_image, DenoiseConfig};
use crate::error::{Error, Result};
use crate::filter::make_filter_bank;
use crate::io::save_image;
use crate::plane::{ColorImage, ImagePlane};
use crate::transform::dwt2d;

/// Pipeline knobs; defaults follow the reference setup (3 levels, 17
/// passes, 4 fractional bits, enhancement on).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    pub kind: WaveletKind,
    pub levels: usize,
    pub passes: u32,
    pub q_bits: u8,
    pub noise_sigma: Option<f64>,
    pub seed: u64,
    pub enhance: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            kind: WaveletKind::SecondChebyshev,
            levels: 3,
            passes: 17,
            q_bits: 4,
            noise_sigma: None,
            seed: 0,
            enhance: true,
        }
    }
}

impl PipelineConfig {
    fn validate(&self) -> Result<()> {
        if self.levels == 0 {
            return Err(Error::Config("levels must be at least 1".into()));
        }
        if self.passes == 0 {
            return Err(Error::Config("passes must be at least 1".into()));
        }
        if let Some(sigma) = self.noise_sigma {
            if sigma.is_nan() || sigma < 0.0 {
                return Err(Error::Config(format!("noise sigma {sigma} must be >= 0")));
            }
        }
        Ok(())
    }
}

/// What a pipeline run produced.
#[derive(Debug, Clone)]
pub struct PipelineReport {
    /// Rate-distortion table of the compression before denoising.
    pub before_table: Vec<QualityReport>,
    /// Same, after denoising.
    pub after_table: Vec<QualityReport>,
    /// (stage name, seconds) in execution order.
    pub timings: Vec<(String, f64)>,
    /// Files written, in creation order.
    pub outputs: Vec<PathBuf>,
}

/// Per-channel cumulative-histogram remap to `[0,255]`. Constant channels
/// pass through unchanged.
pub fn histogram_equalize(image: &ColorImage) -> ColorImage {
    let planes = image.planes();
    let equalized: [ImagePlane; 3] = std::array::from_fn(|i| equalize_plane(&planes[i]));
    ColorImage::new(equalized).expect("dimensions preserved")
}

fn equalize_plane(plane: &ImagePlane) -> ImagePlane {
    let mut hist = [0u64; 256];
    for &v in plane.samples() {
        hist[bin(v)] += 1;
    }
    let lowest = hist.iter().position(|&c| c > 0).unwrap_or(0);
    let highest = 255 - hist.iter().rev().position(|&c| c > 0).unwrap_or(0);
    if lowest == highest {
        return plane.clone();
    }
    let total = plane.pixel_count() as f64;
    let mut cdf = [0.0f64; 256];
    let mut running = 0u64;
    for (i, &count) in hist.iter().enumerate() {
        running += count;
        cdf[i] = running as f64 / total;
    }
    plane.map(|v| (cdf[bin(v)] * 255.0).floor())
}

#[inline]
fn bin(v: f64) -> usize {
    v.round().clamp(0.0, 255.0) as usize
}

/// Adds i.i.d. Gaussian noise per pixel per channel from a seeded
/// generator, clamped to `[0,255]`. Identical (image, sigma, seed) give
/// identical outputs.
pub fn add_noise(image: &ColorImage, sigma: f64, seed: u64) -> ColorImage {
    if sigma == 0.0 {
        return image.clone();
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma).expect("finite sigma");
    let n = image.pixel_count();
    let mut planes: [Vec<f64>; 3] = std::array::from_fn(|_| Vec::with_capacity(n));
    // Pixel-major, channels in R,G,B order within each pixel.
    for i in 0..n {
        for (ch, plane) in planes.iter_mut().enumerate() {
            let v = image.planes()[ch].samples()[i] + normal.sample(&mut rng);
            plane.push(v.clamp(0.0, 255.0));
        }
    }
    let (w, h) = (image.width(), image.height());
    let [r, g, b] = planes;
    ColorImage::new([
        ImagePlane::new(w, h, r).expect("valid plane"),
        ImagePlane::new(w, h, g).expect("valid plane"),
        ImagePlane::new(w, h, b).expect("valid plane"),
    ])
    .expect("dimensions preserved")
}

/// Runs the whole pipeline on one image, writing artifacts into `out_dir`.
pub fn run_pipeline(
    image: &ColorImage,
    cfg: &PipelineConfig,
    out_dir: &Path,
) -> Result<PipelineReport> {
    cfg.validate().map_err(|e| e.in_stage("config"))?;
    fs::create_dir_all(out_dir).map_err(|e| Error::from(e).in_stage("setup"))?;

    let mut timings: Vec<(String, f64)> = Vec::new();
    let mut outputs: Vec<PathBuf> = Vec::new();
    let denoise_cfg = DenoiseConfig::universal(cfg.kind, cfg.levels);

    // Stage 1: enhancement.
    let start = Instant::now();
    let enhanced = if cfg.enhance {
        histogram_equalize(image)
    } else {
        image.clone()
    };
    timings.push(("enhance".into(), start.elapsed().as_secs_f64()));
    write_artifact(
        &enhanced,
        out_dir,
        "01_enhanced.png",
        &mut outputs,
        "enhance",
    )?;

    // Stage 2: optional noise injection.
    let start = Instant::now();
    let working = match cfg.noise_sigma {
        Some(sigma) => {
            let noisy = add_noise(&enhanced, sigma, cfg.seed);
            write_artifact(&noisy, out_dir, "02_noisy.png", &mut outputs, "noise")?;
            noisy
        }
        None => enhanced,
    };
    timings.push(("noise".into(), start.elapsed().as_secs_f64()));

    // Stage 3: compression sweep before denoising.
    let start = Instant::now();
    let before_stream = compress_image(&working, cfg.kind, cfg.levels, cfg.q_bits, cfg.passes)
        .map_err(|e| e.in_stage("compress-before"))?;
    let before_table =
        sweep_reports(&working, &before_stream).map_err(|e| e.in_stage("compress-before"))?;
    timings.push(("compress-before".into(), start.elapsed().as_secs_f64()));
    write_stream(
        &before_stream,
        out_dir,
        "before.chbw",
        &mut outputs,
        "compress-before",
    )?;
    write_table(
        &before_table,
        out_dir,
        "before.csv",
        &mut outputs,
        "compress-before",
    )?;

    // Stage 4: first denoising.
    let start = Instant::now();
    let denoised = denoise_image(&working, &denoise_cfg).map_err(|e| e.in_stage("denoise"))?;
    timings.push(("denoise".into(), start.elapsed().as_secs_f64()));
    write_artifact(
        &denoised,
        out_dir,
        "03_denoised.png",
        &mut outputs,
        "denoise",
    )?;

    // Stage 5: compression sweep after denoising.
    let start = Instant::now();
    let after_stream = compress_image(&denoised, cfg.kind, cfg.levels, cfg.q_bits, cfg.passes)
        .map_err(|e| e.in_stage("compress-after"))?;
    let after_table =
        sweep_reports(&denoised, &after_stream).map_err(|e| e.in_stage("compress-after"))?;
    timings.push(("compress-after".into(), start.elapsed().as_secs_f64()));
    write_stream(
        &after_stream,
        out_dir,
        "after.chbw",
        &mut outputs,
        "compress-after",
    )?;
    write_table(
        &after_table,
        out_dir,
        "after.csv",
        &mut outputs,
        "compress-after",
    )?;

    // Stage 6: full-depth decompression.
    let start = Instant::now();
    let decompressed =
        decompress_image(&after_stream, cfg.passes).map_err(|e| e.in_stage("decompress"))?;
    timings.push(("decompress".into(), start.elapsed().as_secs_f64()));
    write_artifact(
        &decompressed,
        out_dir,
        "04_decompressed.png",
        &mut outputs,
        "decompress",
    )?;

    // Stage 7: second denoising, in the pixel domain of the decompressed image.
    let start = Instant::now();
    let final_image =
        denoise_image(&decompressed, &denoise_cfg).map_err(|e| e.in_stage("denoise-second"))?;
    timings.push(("denoise-second".into(), start.elapsed().as_secs_f64()));
    write_artifact(
        &final_image,
        out_dir,
        "05_final.png",
        &mut outputs,
        "denoise-second",
    )?;

    // Stage 8: level-1 wavelet feature maps of the twice-denoised image.
    let start = Instant::now();
    let features =
        extract_feature_maps(&final_image, cfg.kind).map_err(|e| e.in_stage("features"))?;
    timings.push(("features".into(), start.elapsed().as_secs_f64()));
    for (name, fmap) in &features {
        write_artifact(
            fmap,
            out_dir,
            &format!("features_{name}.png"),
            &mut outputs,
            "features",
        )?;
    }

    // Report file (contains timings; not part of the deterministic set).
    let report_path = out_dir.join("report.txt");
    let mut report =
        fs::File::create(&report_path).map_err(|e| Error::from(e).in_stage("report"))?;
    write_report(
        &mut report,
        cfg,
        &timings,
        &before_table,
        &after_table,
        &outputs,
    )
    .map_err(|e| Error::from(e).in_stage("report"))?;
    outputs.push(report_path);

    Ok(PipelineReport {
        before_table,
        after_table,
        timings,
        outputs,
    })
}

/// Level-1 subband feature maps: gain-normalized LL plus magnitude maps of
/// LH/HL/HH, per channel.
pub fn extract_feature_maps(
    image: &ColorImage,
    kind: WaveletKind,
) -> Result<Vec<(&'static str, ColorImage)>> {
    let bank = make_filter_bank(kind);
    let norm = 1.0 / (4.0 * bank.c * bank.c);
    let mut subbands: Vec<Vec<ImagePlane>> = vec![Vec::new(); 4];
    for plane in image.planes() {
        let (ll, lh, hl, hh) = dwt2d(plane, &bank)?;
        subbands[0].push(ll.map(|v| (v * norm).clamp(0.0, 255.0)));
        subbands[1].push(lh.map(|v| (v * norm).abs().min(255.0)));
        subbands[2].push(hl.map(|v| (v * norm).abs().min(255.0)));
        subbands[3].push(hh.map(|v| (v * norm).abs().min(255.0)));
    }
    let names = ["ll", "lh", "hl", "hh"];
    let mut out = Vec::with_capacity(4);
    for (name, planes) in names.into_iter().zip(subbands) {
        let [r, g, b]: [ImagePlane; 3] = planes.try_into().expect("three channels");
        out.push((name, ColorImage::new([r, g, b])?));
    }
    Ok(out)
}

fn write_artifact(
    image: &ColorImage,
    dir: &Path,
    name: &str,
    outputs: &mut Vec<PathBuf>,
    stage: &'static str,
) -> Result<()> {
    let path = dir.join(name);
    save_image(image, &path).map_err(|e| e.in_stage(stage))?;
    outputs.push(path);
    Ok(())
}

fn write_stream(
    stream: &CompressedImage,
    dir: &Path,
    name: &str,
    outputs: &mut Vec<PathBuf>,
    stage: &'static str,
) -> Result<()> {
    let path = dir.join(name);
    let mut f = fs::File::create(&path).map_err(|e| Error::from(e).in_stage(stage))?;
    stream.write_to(&mut f).map_err(|e| e.in_stage(stage))?;
    outputs.push(path);
    Ok(())
}

/// Writes one CSV table with the fixed Iteration,MSE,PSNR,BPP,CR layout.
pub fn write_table(
    table: &[QualityReport],
    dir: &Path,
    name: &str,
    outputs: &mut Vec<PathBuf>,
    stage: &'static str,
) -> Result<()> {
    let path = dir.join(name);
    let mut f = fs::File::create(&path).map_err(|e| Error::from(e).in_stage(stage))?;
    let write = |f: &mut fs::File| -> std::io::Result<()> {
        writeln!(f, "{}", QualityReport::CSV_HEADER)?;
        for row in table {
            writeln!(f, "{}", row.to_csv_row())?;
        }
        Ok(())
    };
    write(&mut f).map_err(|e| Error::from(e).in_stage(stage))?;
    outputs.push(path);
    Ok(())
}

fn write_report(
    f: &mut fs::File,
    cfg: &PipelineConfig,
    timings: &[(String, f64)],
    before: &[QualityReport],
    after: &[QualityReport],
    outputs: &[PathBuf],
) -> std::io::Result<()> {
    writeln!(f, "chebwave pipeline report")?;
    writeln!(
        f,
        "wavelet={} levels={} passes={} qbits={} seed={} enhance={} noise_sigma={:?}",
        cfg.kind, cfg.levels, cfg.passes, cfg.q_bits, cfg.seed, cfg.enhance, cfg.noise_sigma
    )?;
    writeln!(f)?;
    writeln!(f, "stage timings (s):")?;
    for (name, secs) in timings {
        writeln!(f, "  {name:<18} {secs:.4}")?;
    }
    for (title, table) in [("before denoising", before), ("after denoising", after)] {
        writeln!(f)?;
        writeln!(f, "compression {title}: {} iterations", table.len())?;
        if let (Some(first), Some(last)) = (table.first(), table.last()) {
            writeln!(
                f,
                "  iteration 1: mse={:.3} psnr={:.3} bpp={:.4} cr={:.3}",
                first.mse, first.psnr, first.bpp, first.cr
            )?;
            writeln!(
                f,
                "  iteration {}: mse={:.3} psnr={:.3} bpp={:.4} cr={:.3}",
                last.iteration, last.mse, last.psnr, last.bpp, last.cr
            )?;
        }
    }
    writeln!(f)?;
    writeln!(f, "outputs:")?;
    for path in outputs {
        writeln!(f, "  {}", path.display())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equalize_passes_uniform_and_constant_channels_through() {
        // Uniformly distributed channel: the remap is the identity.
        let values: Vec<f64> = (0..256).map(f64::from).collect();
        let plane = ImagePlane::new(16, 16, values).unwrap();
        let out = equalize_plane(&plane);
        for (a, b) in plane.samples().iter().zip(out.samples()) {
            assert!((a - b).abs() <= 1.0, "{a} -> {b}");
        }

        let constant = ImagePlane::constant(8, 8, 42.0);
        assert_eq!(equalize_plane(&constant), constant);
    }

    #[test]
    fn equalize_two_level_channel() {
        // 50% at 0 and 50% at 64: CDF remap sends them to ~127 and 255.
        let mut values = vec![0.0; 32];
        values.extend(vec![64.0; 32]);
        let plane = ImagePlane::new(8, 8, values).unwrap();
        let out = equalize_plane(&plane);
        assert!((out.samples()[0] - 127.0).abs() <= 1.0);
        assert!((out.samples()[63] - 255.0).abs() <= 1.0);
    }

    #[test]
    fn noise_is_seeded_and_scaled() {
        let image = ColorImage::splat(ImagePlane::constant(100, 100, 128.0));
        assert_eq!(add_noise(&image, 0.0, 1), image);

        let a = add_noise(&image, 25.0, 7);
        let b = add_noise(&image, 25.0, 7);
        assert_eq!(a, b);
        let c = add_noise(&image, 25.0, 8);
        assert_ne!(a, c);

        // Monte-Carlo scale check over 10^4 pixels.
        let samples = a.planes()[0].samples();
        let mean: f64 = samples.iter().sum::<f64>() / samples.len() as f64;
        let var: f64 =
            samples.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / samples.len() as f64;
        let sd = var.sqrt();
        assert!((sd - 25.0).abs() < 1.0, "sd = {sd}");
    }

    #[test]
    fn zero_image_produces_zero_features() {
        let image = ColorImage::zeros(16, 16);
        let features = extract_feature_maps(&image, WaveletKind::SecondChebyshev).unwrap();
        assert_eq!(features.len(), 4);
        for (name, fmap) in features {
            for plane in fmap.planes() {
                assert!(
                    plane.samples().iter().all(|&v| v == 0.0),
                    "feature {name} not zero"
                );
            }
        }
    }
}
