//! Row-major real-valued image planes and three-channel color images.
//!
//! Pixel-domain planes hold values in `[0,255]`; coefficient-domain planes are
//! unbounded. Samples are `f64` throughout; integerization happens only in
//! the codec.

use crate::error::{Error, Result};

/// A single real-valued plane with row-major samples.
#[derive(Debug, Clone, PartialEq)]
pub struct ImagePlane {
    width: usize,
    height: usize,
    samples: Vec<f64>,
}

impl ImagePlane {
    /// Builds a plane, checking dimensions and finiteness.
    pub fn new(width: usize, height: usize, samples: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 || samples.len() != width * height {
            return Err(Error::InvalidDimensions {
                width,
                height,
                samples: samples.len(),
            });
        }
        if let Some(index) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample { index });
        }
        Ok(Self {
            width,
            height,
            samples,
        })
    }

    /// All-zero plane.
    pub fn zeros(width: usize, height: usize) -> Self {
        Self::constant(width, height, 0.0)
    }

    /// Constant-valued plane.
    pub fn constant(width: usize, height: usize, value: f64) -> Self {
        assert!(width > 0 && height > 0, "plane dimensions must be positive");
        Self {
            width,
            height,
            samples: vec![value; width * height],
        }
    }

    /// Builds a plane from a per-pixel function of (row, col).
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut samples = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                samples.push(f(row, col));
            }
        }
        Self {
            width,
            height,
            samples,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.samples[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.samples[row * self.width + col] = value;
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [f64] {
        &mut self.samples
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.samples[row * self.width..(row + 1) * self.width]
    }

    /// Column copied out as a contiguous vector.
    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.height).map(|r| self.get(r, col)).collect()
    }

    /// Applies `f` to every sample, producing a new plane.
    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Self {
        Self {
            width: self.width,
            height: self.height,
            samples: self.samples.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Clamps every sample into [lo, hi].
    pub fn clamped(&self, lo: f64, hi: f64) -> Self {
        self.map(|v| v.clamp(lo, hi))
    }

    /// Top-left crop to `width`x`height`.
    pub fn crop(&self, width: usize, height: usize) -> Result<Self> {
        if width > self.width || height > self.height || width == 0 || height == 0 {
            return Err(Error::InvalidDimensions {
                width,
                height,
                samples: self.samples.len(),
            });
        }
        Ok(Self::from_fn(width, height, |r, c| self.get(r, c)))
    }

    /// Sum of squared samples.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|v| v * v).sum()
    }
}

/// Three-channel RGB image; channels share dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct ColorImage {
    planes: [ImagePlane; 3],
}

impl ColorImage {
    pub fn new(planes: [ImagePlane; 3]) -> Result<Self> {
        let (w, h) = (planes[0].width(), planes[0].height());
        for p in &planes[1..] {
            if p.width() != w || p.height() != h {
                return Err(Error::DimensionMismatch(w, h, p.width(), p.height()));
            }
        }
        Ok(Self { planes })
    }

    /// Replicates one plane into all three channels.
    pub fn splat(plane: ImagePlane) -> Self {
        Self {
            planes: [plane.clone(), plane.clone(), plane],
        }
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self::splat(ImagePlane::zeros(width, height))
    }

    pub fn width(&self) -> usize {
        self.planes[0].width()
    }

    pub fn height(&self) -> usize {
        self.planes[0].height()
    }

    pub fn pixel_count(&self) -> usize {
        self.planes[0].pixel_count()
    }

    pub fn planes(&self) -> &[ImagePlane; 3] {
        &self.planes
    }

    pub fn planes_mut(&mut self) -> &mut [ImagePlane; 3] {
        &mut self.planes
    }

    pub fn into_planes(self) -> [ImagePlane; 3] {
        self.planes
    }

    /// Applies a fallible per-plane transform to all three channels.
    pub fn try_map_planes(
        &self,
        mut f: impl FnMut(&ImagePlane) -> Result<ImagePlane>,
    ) -> Result<Self> {
        Self::new([
            f(&self.planes[0])?,
            f(&self.planes[1])?,
            f(&self.planes[2])?,
        ])
    }
}
