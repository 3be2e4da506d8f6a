//! Convolution shape arithmetic and the reference feature-map operations:
//! filter dimensioning, output-shape formulas with stride and padding, the
//! same-padding rule, an explicit cross-correlation map and a wavelet-based
//! downsampling primitive.

use crate::chebyshev::WaveletKind;
use crate::error::{Error, Result};
use crate::filter::make_filter_bank;
use crate::plane::ImagePlane;
use crate::transform::dwt2d;

/// Height x width x channels of a tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TensorDims {
    pub height: usize,
    pub width: usize,
    pub channels: usize,
}

impl TensorDims {
    pub fn new(height: usize, width: usize, channels: usize) -> Self {
        assert!(height > 0 && width > 0 && channels > 0);
        Self {
            height,
            width,
            channels,
        }
    }
}

impl std::fmt::Display for TensorDims {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}x{}", self.height, self.width, self.channels)
    }
}

/// A square-kernel convolution layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvSpec {
    /// Kernel side length.
    pub kernel: usize,
    /// Input channels the kernel spans.
    pub in_channels: usize,
    /// Number of filters, i.e. output channels.
    pub filters: usize,
    pub stride: usize,
    pub padding: usize,
}

impl ConvSpec {
    pub fn new(
        kernel: usize,
        in_channels: usize,
        filters: usize,
        stride: usize,
        padding: usize,
    ) -> Self {
        assert!(kernel >= 1 && in_channels >= 1 && filters >= 1 && stride >= 1);
        Self {
            kernel,
            in_channels,
            filters,
            stride,
            padding,
        }
    }
}

/// Kernel dimensions (side, side, channels).
pub fn filter_dims(spec: &ConvSpec) -> (usize, usize, usize) {
    (spec.kernel, spec.kernel, spec.in_channels)
}

fn spatial_out(input: usize, kernel: usize, stride: usize, padding: usize) -> Result<usize> {
    let extended = input + 2 * padding;
    if extended < kernel {
        return Err(Error::WindowTooLarge {
            kernel,
            input,
            padding,
        });
    }
    Ok((extended - kernel) / stride + 1)
}

/// Output dimensions of a convolution: floor((n + 2p - l)/s) + 1 spatially,
/// `filters` channels.
pub fn conv_output_dims(input: TensorDims, spec: &ConvSpec) -> Result<TensorDims> {
    Ok(TensorDims {
        height: spatial_out(input.height, spec.kernel, spec.stride, spec.padding)?,
        width: spatial_out(input.width, spec.kernel, spec.stride, spec.padding)?,
        channels: spec.filters,
    })
}

/// Output dimensions of a pooling window: same spatial formula, channel
/// count preserved.
pub fn pool_output_dims(input: TensorDims, window: usize, stride: usize) -> Result<TensorDims> {
    Ok(TensorDims {
        height: spatial_out(input.height, window, stride, 0)?,
        width: spatial_out(input.width, window, stride, 0)?,
        channels: input.channels,
    })
}

/// Padding (l-1)/2 that preserves spatial dimensions at stride 1; defined
/// for odd kernels only.
pub fn same_padding(kernel: usize) -> Result<usize> {
    if kernel.is_multiple_of(2) {
        return Err(Error::EvenKernel(kernel));
    }
    Ok((kernel - 1) / 2)
}

/// Dense real tensor, row-major in (row, col, channel).
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    pub dims: TensorDims,
    pub data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(dims: TensorDims) -> Self {
        Self {
            data: vec![0.0; dims.height * dims.width * dims.channels],
            dims,
        }
    }

    pub fn from_fn(dims: TensorDims, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(dims.height * dims.width * dims.channels);
        for r in 0..dims.height {
            for c in 0..dims.width {
                for ch in 0..dims.channels {
                    data.push(f(r, c, ch));
                }
            }
        }
        Self { dims, data }
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize, channel: usize) -> f64 {
        self.data[(row * self.dims.width + col) * self.dims.channels + channel]
    }
}

/// Single-filter cross-correlation of `input` with `kernel` under the
/// spec's stride and zero padding. Output spatial dims follow
/// `conv_output_dims`.
pub fn conv2d_map(input: &Tensor3, kernel: &Tensor3, spec: &ConvSpec) -> Result<ImagePlane> {
    let (kh, kw, kc) = filter_dims(spec);
    if kernel.dims != TensorDims::new(kh, kw, kc) {
        return Err(Error::ShapeMismatch(format!(
            "kernel is {}, spec requires {}x{}x{}",
            kernel.dims, kh, kw, kc
        )));
    }
    if input.dims.channels != spec.in_channels {
        return Err(Error::ShapeMismatch(format!(
            "input has {} channels, spec requires {}",
            input.dims.channels, spec.in_channels
        )));
    }
    let out = conv_output_dims(input.dims, spec)?;
    let mut plane = ImagePlane::zeros(out.width, out.height);
    for or in 0..out.height {
        for oc in 0..out.width {
            let mut acc = 0.0;
            for kr in 0..spec.kernel {
                for kcol in 0..spec.kernel {
                    // Window anchored at stride*out - padding; zero outside.
                    let ir = (or * spec.stride + kr) as isize - spec.padding as isize;
                    let ic = (oc * spec.stride + kcol) as isize - spec.padding as isize;
                    if ir < 0
                        || ic < 0
                        || ir >= input.dims.height as isize
                        || ic >= input.dims.width as isize
                    {
                        continue;
                    }
                    for ch in 0..spec.in_channels {
                        acc += kernel.get(kr, kcol, ch) * input.get(ir as usize, ic as usize, ch);
                    }
                }
            }
            plane.set(or, oc, acc);
        }
    }
    Ok(plane)
}

/// One analysis level's approximation band, gain-normalized so constants
/// are preserved: a pooling-like halving. The LL of a constant plane v is
/// 4c^2*v, so the normalizer is 1/(4c^2), which makes this exact 2x2 block
/// averaging on even dimensions.
pub fn wavelet_downsample(input: &ImagePlane, kind: WaveletKind) -> Result<ImagePlane> {
    let bank = make_filter_bank(kind);
    let (ll, _, _, _) = dwt2d(input, &bank)?;
    let norm = 1.0 / (4.0 * bank.c * bank.c);
    Ok(ll.map(|v| v * norm))
}

/// One step of a shape chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerSpec {
    Conv(ConvSpec),
    Pool { window: usize, stride: usize },
}

impl LayerSpec {
    pub fn output_dims(&self, input: TensorDims) -> Result<TensorDims> {
        match self {
            LayerSpec::Conv(spec) => conv_output_dims(input, spec),
            LayerSpec::Pool { window, stride } => pool_output_dims(input, *window, *stride),
        }
    }
}

/// Activation shapes along a chain, starting with the input itself.
pub fn chain_activations(input: TensorDims, layers: &[LayerSpec]) -> Result<Vec<TensorDims>> {
    let mut shapes = vec![input];
    for layer in layers {
        let next = layer.output_dims(*shapes.last().expect("nonempty"))?;
        shapes.push(next);
    }
    Ok(shapes)
}

/// The AlexNet-style front end used as the reference shape chain:
/// 227x227x3 input through three convolutions and two poolings.
pub fn alexnet_head() -> (TensorDims, Vec<LayerSpec>) {
    (
        TensorDims::new(227, 227, 3),
        vec![
            LayerSpec::Conv(ConvSpec::new(11, 3, 96, 4, 0)),
            LayerSpec::Pool {
                window: 3,
                stride: 2,
            },
            LayerSpec::Conv(ConvSpec::new(5, 96, 256, 1, 2)),
            LayerSpec::Pool {
                window: 3,
                stride: 2,
            },
            LayerSpec::Conv(ConvSpec::new(3, 256, 384, 1, 1)),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn filter_dims_examples() {
        assert_eq!(filter_dims(&ConvSpec::new(11, 3, 96, 4, 0)), (11, 11, 3));
        assert_eq!(filter_dims(&ConvSpec::new(1, 1, 1, 1, 0)), (1, 1, 1));
        assert_eq!(filter_dims(&ConvSpec::new(3, 256, 384, 1, 1)), (3, 3, 256));
    }

    #[test]
    fn output_dims_reference_values() {
        let spec = ConvSpec::new(11, 3, 96, 4, 0);
        let out = conv_output_dims(TensorDims::new(227, 227, 3), &spec).unwrap();
        assert_eq!(out, TensorDims::new(55, 55, 96));

        let pooled = pool_output_dims(TensorDims::new(55, 55, 96), 3, 2).unwrap();
        assert_eq!(pooled, TensorDims::new(27, 27, 96));

        let spec = ConvSpec::new(3, 384, 384, 1, 1);
        let out = conv_output_dims(TensorDims::new(13, 13, 384), &spec).unwrap();
        assert_eq!(out, TensorDims::new(13, 13, 384));
    }

    #[test]
    fn window_must_fit() {
        let spec = ConvSpec::new(9, 1, 1, 1, 0);
        assert!(matches!(
            conv_output_dims(TensorDims::new(4, 4, 1), &spec),
            Err(Error::WindowTooLarge { .. })
        ));
    }

    #[test]
    fn same_padding_rule() {
        assert_eq!(same_padding(3).unwrap(), 1);
        assert_eq!(same_padding(1).unwrap(), 0);
        assert_eq!(same_padding(11).unwrap(), 5);
        assert!(matches!(same_padding(4), Err(Error::EvenKernel(4))));
    }

    #[test]
    fn same_padding_preserves_dims_for_odd_kernels() {
        for kernel in [1usize, 3, 5, 7, 9, 11] {
            let p = same_padding(kernel).unwrap();
            for side in [1usize, 2, 13, 64, 227, 256] {
                if side + 2 * p < kernel {
                    continue;
                }
                let spec = ConvSpec::new(kernel, 1, 1, 1, p);
                let out = conv_output_dims(TensorDims::new(side, side, 1), &spec).unwrap();
                assert_eq!((out.height, out.width), (side, side), "l={kernel} n={side}");
            }
        }
    }

    #[test]
    fn identity_kernel_passes_input_through() {
        let input = Tensor3::from_fn(TensorDims::new(3, 4, 1), |r, c, _| (r * 4 + c) as f64);
        let kernel = Tensor3::from_fn(TensorDims::new(1, 1, 1), |_, _, _| 1.0);
        let spec = ConvSpec::new(1, 1, 1, 1, 0);
        let out = conv2d_map(&input, &kernel, &spec).unwrap();
        for r in 0..3 {
            for c in 0..4 {
                assert_eq!(out.get(r, c), input.get(r, c, 0));
            }
        }
    }

    #[test]
    fn all_ones_kernel_hand_example() {
        // Brute-force sum: [[1,2],[3,4]] under a 2x2 ones kernel -> [[10]].
        let input = Tensor3 {
            dims: TensorDims::new(2, 2, 1),
            data: vec![1.0, 2.0, 3.0, 4.0],
        };
        let kernel = Tensor3::from_fn(TensorDims::new(2, 2, 1), |_, _, _| 1.0);
        let spec = ConvSpec::new(2, 1, 1, 1, 0);
        let out = conv2d_map(&input, &kernel, &spec).unwrap();
        assert_eq!((out.width(), out.height()), (1, 1));
        assert_eq!(out.get(0, 0), 10.0);
    }

    #[test]
    fn delta_kernel_shifts_the_input() {
        let input = Tensor3::from_fn(TensorDims::new(4, 5, 1), |r, c, _| (r * 10 + c) as f64);
        let mut kernel = Tensor3::zeros(TensorDims::new(3, 3, 1));
        kernel.data[0] = 1.0; // delta at the top-left tap
        let spec = ConvSpec::new(3, 1, 1, 1, 0);
        let out = conv2d_map(&input, &kernel, &spec).unwrap();
        for r in 0..out.height() {
            for c in 0..out.width() {
                assert_eq!(out.get(r, c), input.get(r, c, 0));
            }
        }
    }

    /// Independent brute-force oracle: explicitly materializes the padded
    /// tensor, then runs the naive triple sum.
    fn conv_oracle(input: &Tensor3, kernel: &Tensor3, spec: &ConvSpec) -> Vec<Vec<f64>> {
        let d = input.dims;
        let ph = d.height + 2 * spec.padding;
        let pw = d.width + 2 * spec.padding;
        let mut padded = vec![0.0; ph * pw * d.channels];
        for r in 0..d.height {
            for c in 0..d.width {
                for ch in 0..d.channels {
                    padded[((r + spec.padding) * pw + c + spec.padding) * d.channels + ch] =
                        input.get(r, c, ch);
                }
            }
        }
        let oh = (ph - spec.kernel) / spec.stride + 1;
        let ow = (pw - spec.kernel) / spec.stride + 1;
        let mut out = vec![vec![0.0; ow]; oh];
        for i in 0..oh {
            for j in 0..ow {
                let mut sum = 0.0;
                for x in 0..spec.kernel {
                    for y in 0..spec.kernel {
                        for ch in 0..d.channels {
                            sum += kernel.get(x, y, ch)
                                * padded[((i * spec.stride + x) * pw + j * spec.stride + y)
                                    * d.channels
                                    + ch];
                        }
                    }
                }
                out[i][j] = sum;
            }
        }
        out
    }

    #[test]
    fn conv2d_map_matches_brute_force_oracle() {
        let mut rng = ChaCha12Rng::seed_from_u64(66);
        for trial in 0..50 {
            let channels = rng.random_range(1..=3);
            let kernel_side = rng.random_range(1..=4);
            let h = rng.random_range(kernel_side..=kernel_side + 6);
            let w = rng.random_range(kernel_side..=kernel_side + 6);
            let stride = rng.random_range(1..=2);
            let padding = rng.random_range(0..=2);
            let spec = ConvSpec::new(kernel_side, channels, 1, stride, padding);
            let input = Tensor3::from_fn(TensorDims::new(h, w, channels), |_, _, _| {
                rng.random_range(-2.0..2.0)
            });
            let kernel = Tensor3::from_fn(
                TensorDims::new(kernel_side, kernel_side, channels),
                |_, _, _| rng.random_range(-1.0..1.0),
            );
            let got = conv2d_map(&input, &kernel, &spec).unwrap();
            let want = conv_oracle(&input, &kernel, &spec);
            assert_eq!(got.height(), want.len(), "trial {trial}");
            assert_eq!(got.width(), want[0].len(), "trial {trial}");
            let expected = conv_output_dims(input.dims, &spec).unwrap();
            assert_eq!(
                (got.height(), got.width()),
                (expected.height, expected.width)
            );
            for r in 0..got.height() {
                for c in 0..got.width() {
                    assert!((got.get(r, c) - want[r][c]).abs() < 1e-9, "trial {trial}");
                }
            }
        }
    }

    #[test]
    fn conv2d_map_rejects_shape_mismatches() {
        let input = Tensor3::zeros(TensorDims::new(4, 4, 2));
        let kernel = Tensor3::zeros(TensorDims::new(3, 3, 3));
        let spec = ConvSpec::new(3, 2, 1, 1, 0);
        assert!(conv2d_map(&input, &kernel, &spec).is_err());
        let spec_bad_input = ConvSpec::new(3, 3, 1, 1, 0);
        let kernel_ok = Tensor3::zeros(TensorDims::new(3, 3, 3));
        assert!(conv2d_map(&input, &kernel_ok, &spec_bad_input).is_err());
    }

    #[test]
    fn map_is_linear_and_zero_kernel_maps_to_zero() {
        let mut rng = ChaCha12Rng::seed_from_u64(67);
        let dims = TensorDims::new(5, 5, 2);
        let spec = ConvSpec::new(3, 2, 1, 1, 1);
        let a = Tensor3::from_fn(dims, |_, _, _| rng.random_range(-1.0..1.0));
        let k1 = Tensor3::from_fn(TensorDims::new(3, 3, 2), |_, _, _| {
            rng.random_range(-1.0..1.0)
        });
        let k2 = Tensor3::from_fn(TensorDims::new(3, 3, 2), |_, _, _| {
            rng.random_range(-1.0..1.0)
        });
        let combined = Tensor3 {
            dims: k1.dims,
            data: k1
                .data
                .iter()
                .zip(&k2.data)
                .map(|(x, y)| 2.0 * x - 3.0 * y)
                .collect(),
        };
        let m1 = conv2d_map(&a, &k1, &spec).unwrap();
        let m2 = conv2d_map(&a, &k2, &spec).unwrap();
        let mc = conv2d_map(&a, &combined, &spec).unwrap();
        for i in 0..mc.samples().len() {
            let want = 2.0 * m1.samples()[i] - 3.0 * m2.samples()[i];
            assert!((mc.samples()[i] - want).abs() < 1e-9);
        }

        let zero_kernel = Tensor3::zeros(TensorDims::new(3, 3, 2));
        let out = conv2d_map(&a, &zero_kernel, &spec).unwrap();
        assert!(out.samples().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn wavelet_downsample_preserves_constants_and_halves_dims() {
        for kind in [WaveletKind::SecondChebyshev, WaveletKind::ThirdChebyshev] {
            let plane = ImagePlane::constant(8, 8, 42.0);
            let down = wavelet_downsample(&plane, kind).unwrap();
            assert_eq!((down.width(), down.height()), (4, 4));
            for &v in down.samples() {
                assert!((v - 42.0).abs() < 1e-9, "{kind:?}");
            }
        }
    }

    #[test]
    fn wavelet_downsample_is_block_averaging() {
        let mut rng = ChaCha12Rng::seed_from_u64(68);
        let plane = ImagePlane::from_fn(10, 6, |_, _| rng.random_range(0.0..255.0));
        let down = wavelet_downsample(&plane, WaveletKind::SecondChebyshev).unwrap();
        for r in 0..3 {
            for c in 0..5 {
                let avg = (plane.get(2 * r, 2 * c)
                    + plane.get(2 * r, 2 * c + 1)
                    + plane.get(2 * r + 1, 2 * c)
                    + plane.get(2 * r + 1, 2 * c + 1))
                    / 4.0;
                assert!((down.get(r, c) - avg).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn reference_chain_reproduces_published_activations() {
        let (input, layers) = alexnet_head();
        let shapes = chain_activations(input, &layers).unwrap();
        assert_eq!(shapes[0], TensorDims::new(227, 227, 3));
        assert_eq!(shapes[1], TensorDims::new(55, 55, 96));
        assert_eq!(shapes[3], TensorDims::new(27, 27, 256));
        assert_eq!(shapes[5], TensorDims::new(13, 13, 384));
    }
}
