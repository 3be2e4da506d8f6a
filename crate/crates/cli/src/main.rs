//! chebwave: wavelet image toolkit command line.
//!
//! Subcommands cover each stage (decompose, denoise, compress, decompress,
//! metrics, sweep, shapes) plus the whole pipeline and the reference-table
//! consistency harness. Options come from flags or an optional key=value
//! config file; flags win.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use chebwave::codec::{compress_image, decompress_image, sweep_reports, CompressedImage};
use chebwave::convshape::{alexnet_head, chain_activations, same_padding, LayerSpec};
use chebwave::denoise::{denoise_image, DenoiseConfig};
use chebwave::pipeline::{run_pipeline, write_table, PipelineConfig};
use chebwave::tables::validate_reference_tables;
use chebwave::transform::{decompose as decompose_plane, pad_mirror};
use chebwave::{io, make_filter_bank, metrics, ColorImage, QualityReport, WaveletKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WaveletArg {
    Second,
    Third,
}

impl From<WaveletArg> for WaveletKind {
    fn from(w: WaveletArg) -> Self {
        match w {
            WaveletArg::Second => WaveletKind::SecondChebyshev,
            WaveletArg::Third => WaveletKind::ThirdChebyshev,
        }
    }
}

#[derive(Parser)]
#[command(name = "chebwave", version, about = "Chebyshev-wavelet image toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Wavelet kind: second or third Chebyshev.
    #[arg(long, global = true, value_enum)]
    wavelet: Option<WaveletArg>,

    /// Decomposition levels.
    #[arg(long, global = true)]
    levels: Option<usize>,

    /// Coder passes (table iterations).
    #[arg(long, global = true)]
    passes: Option<u32>,

    /// Fractional bits carried by quantized coefficients.
    #[arg(long, global = true)]
    qbits: Option<u8>,

    /// Gaussian noise sigma injected before compression (pipeline only).
    #[arg(long, global = true)]
    noise_sigma: Option<f64>,

    /// Seed for the noise generator.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Skip the histogram-equalization enhancement stage.
    #[arg(long, global = true)]
    no_enhance: bool,

    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Optional key=value config file (wavelet, levels, passes, qbits,
    /// noise-sigma, seed, enhance, out).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose an image and write its subband planes.
    Decompose { image: PathBuf },
    /// Remove noise with the universal wavelet threshold.
    Denoise { image: PathBuf },
    /// Compress an image to a .chbw bitstream.
    Compress { image: PathBuf },
    /// Decompress a .chbw bitstream back to an image.
    Decompress { stream: PathBuf },
    /// Compare two images (MSE / PSNR).
    Metrics { reference: PathBuf, test: PathBuf },
    /// Per-iteration rate-distortion table for one image.
    Sweep { image: PathBuf },
    /// Print the convolution shape chain and same-padding table.
    Shapes,
    /// Run the full pipeline: enhance, noise, compress, denoise, compress,
    /// decompress, denoise again, extract feature maps.
    Pipeline { image: PathBuf },
    /// Check the bundled reference tables for internal consistency.
    ValidateTables,
}

/// Resolved options after merging defaults, config file and flags.
#[derive(Debug, Clone)]
struct Settings {
    kind: WaveletKind,
    levels: usize,
    passes: u32,
    q_bits: u8,
    noise_sigma: Option<f64>,
    seed: u64,
    enhance: bool,
    out: PathBuf,
}

impl Settings {
    fn resolve(cli: &Cli) -> Result<Self> {
        let mut s = Self {
            kind: WaveletKind::SecondChebyshev,
            levels: 3,
            passes: 17,
            q_bits: 4,
            noise_sigma: None,
            seed: 0,
            enhance: true,
            out: PathBuf::from("out"),
        };
        if let Some(path) = &cli.config {
            s.apply_config(path)
                .with_context(|| format!("reading config {}", path.display()))?;
        }
        if let Some(w) = cli.wavelet {
            s.kind = w.into();
        }
        if let Some(l) = cli.levels {
            s.levels = l;
        }
        if let Some(p) = cli.passes {
            s.passes = p;
        }
        if let Some(q) = cli.qbits {
            s.q_bits = q;
        }
        if let Some(n) = cli.noise_sigma {
            s.noise_sigma = Some(n);
        }
        if let Some(seed) = cli.seed {
            s.seed = seed;
        }
        if cli.no_enhance {
            s.enhance = false;
        }
        if let Some(out) = &cli.out {
            s.out = out.clone();
        }
        Ok(s)
    }

    fn apply_config(&mut self, path: &Path) -> Result<()> {
        let text = fs::read_to_string(path)?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("line {}: expected key=value, got {line:?}", lineno + 1);
            };
            let (key, value) = (key.trim(), value.trim());
            match key {
                "wavelet" => {
                    self.kind = match value {
                        "second" => WaveletKind::SecondChebyshev,
                        "third" => WaveletKind::ThirdChebyshev,
                        other => bail!("line {}: unknown wavelet {other:?}", lineno + 1),
                    }
                }
                "levels" => self.levels = value.parse()?,
                "passes" => self.passes = value.parse()?,
                "qbits" => self.q_bits = value.parse()?,
                "noise-sigma" => self.noise_sigma = Some(value.parse()?),
                "seed" => self.seed = value.parse()?,
                "enhance" => self.enhance = value.parse()?,
                "out" => self.out = PathBuf::from(value),
                other => bail!("line {}: unknown key {other:?}", lineno + 1),
            }
        }
        Ok(())
    }

    fn pipeline_config(&self) -> PipelineConfig {
        PipelineConfig {
            kind: self.kind,
            levels: self.levels,
            passes: self.passes,
            q_bits: self.q_bits,
            noise_sigma: self.noise_sigma,
            seed: self.seed,
            enhance: self.enhance,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let s = Settings::resolve(cli)?;
    match &cli.command {
        Command::Decompose { image } => cmd_decompose(image, &s),
        Command::Denoise { image } => cmd_denoise(image, &s),
        Command::Compress { image } => cmd_compress(image, &s),
        Command::Decompress { stream } => cmd_decompress(stream, &s),
        Command::Metrics { reference, test } => cmd_metrics(reference, test),
        Command::Sweep { image } => cmd_sweep(image, &s),
        Command::Shapes => cmd_shapes(),
        Command::Pipeline { image } => cmd_pipeline(image, &s),
        Command::ValidateTables => cmd_validate_tables(),
    }
}

fn load(path: &Path) -> Result<ColorImage> {
    io::load_image(path).with_context(|| format!("loading {}", path.display()))
}

fn ensure_out(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn cmd_decompose(image: &Path, s: &Settings) -> Result<()> {
    let img = load(image)?;
    ensure_out(&s.out)?;
    let bank = make_filter_bank(s.kind);
    let gain = 1.0 / (4.0 * bank.c * bank.c);

    // Per channel: pad so every level divides exactly, then decompose.
    let (pw, ph) = chebwave::codec::padded_dims(img.width(), img.height(), s.levels)?;
    for (ch_name, plane) in ["r", "g", "b"].iter().zip(img.planes()) {
        let padded = pad_mirror(plane, pw, ph)?;
        let pyr = decompose_plane(&padded, &bank, s.levels)?;
        let ll_gain = gain.powi(s.levels as i32);
        let ll = pyr.ll.map(|v| (v * ll_gain).clamp(0.0, 255.0));
        let path = s.out.join(format!("{ch_name}_ll.png"));
        io::save_image(&ColorImage::splat(ll), &path)?;
        println!("wrote {}", path.display());
        for (i, bands) in pyr.details.iter().enumerate() {
            for (band_name, band) in [("lh", &bands.lh), ("hl", &bands.hl), ("hh", &bands.hh)] {
                let level_gain = gain.powi(i as i32 + 1);
                let vis = band.map(|v| (v * level_gain).abs().min(255.0));
                let path = s.out.join(format!("{ch_name}_{band_name}{}.png", i + 1));
                io::save_image(&ColorImage::splat(vis), &path)?;
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}

fn cmd_denoise(image: &Path, s: &Settings) -> Result<()> {
    let img = load(image)?;
    ensure_out(&s.out)?;
    let cfg = DenoiseConfig::universal(s.kind, s.levels);
    let out = denoise_image(&img, &cfg)?;
    let path = s.out.join("denoised.png");
    io::save_image(&out, &path)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_compress(image: &Path, s: &Settings) -> Result<()> {
    let img = load(image)?;
    ensure_out(&s.out)?;
    let compressed = compress_image(&img, s.kind, s.levels, s.q_bits, s.passes)?;
    let stem = image
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "image".into());
    let path = s.out.join(format!("{stem}.chbw"));
    let mut f = fs::File::create(&path)?;
    compressed.write_to(&mut f)?;
    let bits: usize = compressed.channels.iter().map(|c| c.payload_bits).sum();
    let bpp = metrics::bpp(bits as u64, img.pixel_count() as u64)?;
    println!(
        "wrote {} ({} passes, {:.4} bpp, cr {:.2})",
        path.display(),
        compressed.passes,
        bpp,
        metrics::cr(bpp)
    );
    Ok(())
}

fn cmd_decompress(stream: &Path, s: &Settings) -> Result<()> {
    let f = fs::File::open(stream).with_context(|| format!("opening {}", stream.display()))?;
    let compressed = CompressedImage::read_from(f)?;
    ensure_out(&s.out)?;
    let img = decompress_image(&compressed, s.passes)?;
    let path = s.out.join("decompressed.png");
    io::save_image(&img, &path)?;
    println!(
        "wrote {} ({}x{}, {} kind)",
        path.display(),
        img.width(),
        img.height(),
        compressed.kind
    );
    Ok(())
}

fn cmd_metrics(reference: &Path, test: &Path) -> Result<()> {
    let a = load(reference)?;
    let b = load(test)?;
    let mse = metrics::mse(&a, &b)?;
    let psnr = metrics::psnr(mse)?;
    println!("mse: {mse:.6}");
    if psnr.is_infinite() {
        println!("psnr: inf (identical images)");
    } else {
        println!("psnr: {psnr:.4} dB");
    }
    Ok(())
}

fn cmd_sweep(image: &Path, s: &Settings) -> Result<()> {
    let img = load(image)?;
    ensure_out(&s.out)?;
    let compressed = compress_image(&img, s.kind, s.levels, s.q_bits, s.passes)?;
    let rows = sweep_reports(&img, &compressed)?;
    println!("{}", QualityReport::CSV_HEADER);
    for row in &rows {
        println!("{}", row.to_csv_row());
    }
    let mut outputs = Vec::new();
    write_table(&rows, &s.out, "sweep.csv", &mut outputs, "sweep")?;
    eprintln!("wrote {}", outputs[0].display());
    Ok(())
}

fn cmd_shapes() -> Result<()> {
    let (input, layers) = alexnet_head();
    let shapes = chain_activations(input, &layers)?;
    println!(
        "{:<20} {:>6} {:>6} {:>7} {:>12}",
        "layer", "kernel", "stride", "padding", "activations"
    );
    println!(
        "{:<20} {:>6} {:>6} {:>7} {:>12}",
        "input",
        "-",
        "-",
        "-",
        shapes[0].to_string()
    );
    for (layer, shape) in layers.iter().zip(&shapes[1..]) {
        match layer {
            LayerSpec::Conv(c) => println!(
                "{:<20} {:>6} {:>6} {:>7} {:>12}",
                format!("conv ({} filters)", c.filters),
                c.kernel,
                c.stride,
                c.padding,
                shape.to_string()
            ),
            LayerSpec::Pool { window, stride } => println!(
                "{:<20} {:>6} {:>6} {:>7} {:>12}",
                "max pool",
                window,
                stride,
                0,
                shape.to_string()
            ),
        }
    }
    println!();
    println!("same padding (stride 1): p = (l-1)/2");
    for l in [1usize, 3, 5, 7, 9, 11] {
        println!("  kernel {l:>2} -> padding {}", same_padding(l)?);
    }
    Ok(())
}

fn cmd_pipeline(image: &Path, s: &Settings) -> Result<()> {
    let img = load(image)?;
    let report = run_pipeline(&img, &s.pipeline_config(), &s.out)?;
    for (stage, secs) in &report.timings {
        println!("{stage:<18} {secs:>8.4}s");
    }
    println!();
    for (name, table) in [
        ("before", &report.before_table),
        ("after", &report.after_table),
    ] {
        let last = table.last().expect("tables are non-empty");
        println!(
            "{name:<7} final iteration: mse={:.4} psnr={:.3} bpp={:.4} cr={:.3}",
            last.mse, last.psnr, last.bpp, last.cr
        );
    }
    println!();
    println!(
        "wrote {} artifacts to {}",
        report.outputs.len(),
        s.out.display()
    );
    Ok(())
}

fn cmd_validate_tables() -> Result<()> {
    let validation = validate_reference_tables();
    let total = validation.checks.len();
    let consistent = validation.checks.iter().filter(|c| c.consistent()).count();
    println!("reference tables: {consistent}/{total} rows internally consistent");
    println!(
        "tables 1-3 consistency: {:.1}% (gate: {:.0}%)",
        100.0 * validation.consistent_fraction_tables_1_3(),
        100.0 * chebwave::tables::REQUIRED_CONSISTENT_FRACTION,
    );
    let mismatches: Vec<_> = validation.mismatches().collect();
    if mismatches.is_empty() {
        println!("no mismatches");
    } else {
        println!("mismatched rows:");
        for check in &mismatches {
            let row = check.row;
            let mut reasons = Vec::new();
            if !check.psnr_consistent {
                reasons.push(format!(
                    "psnr printed {} recomputed {:.4}",
                    row.psnr, check.psnr_recomputed
                ));
            }
            if !check.cr_consistent {
                reasons.push(format!(
                    "cr printed {} recomputed {:.4}",
                    row.cr, check.cr_recomputed
                ));
            }
            println!(
                "  table {} ({}) iteration {:>2}: {}",
                row.table,
                chebwave::tables::TableRow::label(row.table),
                row.iteration,
                reasons.join("; ")
            );
        }
    }
    if validation.passes() {
        Ok(())
    } else {
        bail!("tables 1-3 consistency below the required fraction")
    }
}
