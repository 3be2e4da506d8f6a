//! Cross-module pipeline properties: stage isolation, report arithmetic and
//! the near-lossless full-depth guarantee.

use chebwave::codec::rate_distortion_sweep;
use chebwave::denoise::{denoise_image, DenoiseConfig};
use chebwave::pipeline::{run_pipeline, PipelineConfig};
use chebwave::{metrics, ColorImage, ImagePlane};

fn smooth_image(side: usize) -> ColorImage {
    ColorImage::new(std::array::from_fn(|ch| {
        ImagePlane::from_fn(side, side, |r, c| {
            let (r, c) = (r as f64, c as f64);
            let v = 110.0
                + 70.0 * (r / (19.0 + 3.0 * ch as f64)).sin()
                + 55.0 * (c / 23.0).cos()
                + 20.0 * ((r + c) / 31.0).sin();
            v.clamp(0.0, 255.0)
        })
    }))
    .unwrap()
}

#[test]
fn full_depth_pipeline_is_near_lossless_on_256px_image() {
    // Noise off: the only loss between the denoised image and its
    // decompressed twin is coefficient quantization.
    let image = smooth_image(256);
    let cfg = PipelineConfig {
        noise_sigma: None,
        ..PipelineConfig::default()
    };
    let dir = tempfile::tempdir().unwrap();
    let report = run_pipeline(&image, &cfg, dir.path()).unwrap();

    let denoised = chebwave::io::load_image(&dir.path().join("03_denoised.png")).unwrap();
    let decompressed = chebwave::io::load_image(&dir.path().join("04_decompressed.png")).unwrap();
    let psnr = metrics::psnr(metrics::mse(&denoised, &decompressed).unwrap()).unwrap();
    assert!(psnr > 40.0, "full-depth decode only reached {psnr:.2} dB");

    // The sweep's own final row tells the same story.
    let last = report.after_table.last().unwrap();
    assert!(last.psnr > 40.0, "table reports {:.2} dB", last.psnr);
}

#[test]
fn after_table_matches_standalone_denoise_then_sweep() {
    let image = smooth_image(64);
    let cfg = PipelineConfig {
        noise_sigma: Some(15.0),
        seed: 5,
        ..PipelineConfig::default()
    };
    let dir = tempfile::tempdir().unwrap();
    let report = run_pipeline(&image, &cfg, dir.path()).unwrap();

    // Reproduce the pipeline's input to the denoise stage by hand.
    let enhanced = chebwave::histogram_equalize(&image);
    let noisy = chebwave::add_noise(&enhanced, 15.0, 5);
    let denoise_cfg = DenoiseConfig::universal(cfg.kind, cfg.levels);
    let denoised = denoise_image(&noisy, &denoise_cfg).unwrap();
    let manual =
        rate_distortion_sweep(&denoised, cfg.kind, cfg.levels, cfg.q_bits, cfg.passes).unwrap();
    assert_eq!(report.after_table, manual);
}

#[test]
fn report_rows_satisfy_the_metric_identities() {
    let image = smooth_image(64);
    let cfg = PipelineConfig {
        noise_sigma: Some(10.0),
        seed: 11,
        ..PipelineConfig::default()
    };
    let dir = tempfile::tempdir().unwrap();
    let report = run_pipeline(&image, &cfg, dir.path()).unwrap();
    assert_eq!(report.before_table.len(), cfg.passes as usize);
    assert_eq!(report.after_table.len(), cfg.passes as usize);
    for row in report.before_table.iter().chain(&report.after_table) {
        if row.mse > 0.0 {
            let expected = 10.0 * (255.0_f64 * 255.0 / row.mse).log10();
            assert!((row.psnr - expected).abs() < 1e-9);
        }
        assert!((row.cr - 100.0 * row.bpp / 24.0).abs() < 1e-9);
    }
}

#[test]
fn zero_image_yields_zero_features_and_near_empty_streams() {
    let image = ColorImage::zeros(32, 32);
    let cfg = PipelineConfig::default();
    let dir = tempfile::tempdir().unwrap();
    run_pipeline(&image, &cfg, dir.path()).unwrap();

    for name in ["features_ll", "features_lh", "features_hl", "features_hh"] {
        let fmap = chebwave::io::load_image(&dir.path().join(format!("{name}.png"))).unwrap();
        for plane in fmap.planes() {
            assert!(plane.samples().iter().all(|&v| v == 0.0), "{name} not zero");
        }
    }
    // All-zero channels carry sentinel headers and no payload.
    let stream = std::fs::read(dir.path().join("after.chbw")).unwrap();
    assert!(stream.len() < 64, "stream is {} bytes", stream.len());
}

#[test]
fn stage_errors_carry_the_stage_name() {
    let image = ColorImage::zeros(4, 4);
    // 4x4 cannot sustain 3 decomposition levels once the codec pads it is
    // fine, but levels=0 must abort in the config stage.
    let cfg = PipelineConfig {
        levels: 0,
        ..PipelineConfig::default()
    };
    let dir = tempfile::tempdir().unwrap();
    let err = run_pipeline(&image, &cfg, dir.path()).unwrap_err();
    let text = err.to_string();
    assert!(text.contains("config"), "unexpected error text: {text}");
}
