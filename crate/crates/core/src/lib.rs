//! Chebyshev-wavelet image toolkit.
//!
//! Wavelet bases built from Chebyshev polynomials of the second and third
//! kind drive a 2-tap filter bank with perfect reconstruction; on top of it
//! sit multi-level 2D decomposition, universal-threshold denoising, SPIHT
//! progressive compression with MSE/PSNR/BPP/CR reporting, convolution
//! shape arithmetic and an end-to-end batch pipeline.

pub mod chebyshev;
pub mod codec;
pub mod convshape;
pub mod denoise;
pub mod error;
pub mod filter;
pub mod io;
pub mod metrics;
pub mod pipeline;
pub mod plane;
pub mod tables;
pub mod transform;

pub use chebyshev::{cheb_poly, eval_wavelet, ChebyshevWaveletParams, WaveletKind};
pub use codec::{
    compress_image, decompress_image, dequantize, quantize, rate_distortion_sweep, spiht_decode,
    spiht_encode, CoefficientGrid, CompressedImage, QualityReport, SpihtBitstream,
};
pub use convshape::{
    chain_activations, conv2d_map, conv_output_dims, filter_dims, pool_output_dims, same_padding,
    wavelet_downsample, ConvSpec, LayerSpec, Tensor3, TensorDims,
};
pub use denoise::{
    denoise_image, denoise_plane, estimate_sigma, soft_threshold, DenoiseConfig, ThresholdRule,
};
pub use error::{Error, Result};
pub use filter::{make_filter_bank, FilterBank};
pub use metrics::{bpp, cr, mse, psnr, MetricPair};
pub use pipeline::{add_noise, histogram_equalize, run_pipeline, PipelineConfig, PipelineReport};
pub use plane::{ColorImage, ImagePlane};
pub use transform::{
    decompose, dwt1d, dwt1d_inverse, dwt2d, dwt2d_inverse, reconstruct, DetailBands, SubbandPyramid,
};
