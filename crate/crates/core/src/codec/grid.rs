//! Quantized coefficient grids: the flat dyadic layout the coder works on.
//!
//! A pyramid is packed into a single signed-integer grid in the usual
//! layout: LL in the top-left corner at the deepest level, each level's
//! HL top-right, LH bottom-left, HH bottom-right. Coefficients are scaled
//! by `2^q_bits` and rounded to nearest-even; dequantization is exact
//! division, so integer-valued pyramids survive the round trip untouched.

use crate::error::{Error, Result};
use crate::plane::ImagePlane;
use crate::transform::{DetailBands, SubbandPyramid};

/// Signed integer coefficients in dyadic layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientGrid {
    pub width: usize,
    pub height: usize,
    pub levels: usize,
    /// Fractional bits carried by each value: value = round(coef * 2^q_bits).
    pub q_bits: u8,
    pub values: Vec<i32>,
}

impl CoefficientGrid {
    pub fn zeros(width: usize, height: usize, levels: usize, q_bits: u8) -> Self {
        Self {
            width,
            height,
            levels,
            q_bits,
            values: vec![0; width * height],
        }
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> i32 {
        self.values[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: i32) {
        self.values[row * self.width + col] = value;
    }

    /// Checks the dyadic layout constraints the coder relies on: both
    /// dimensions divisible by 2^levels, and an even LL band so the
    /// 2x2 root grouping exists.
    pub fn check_dyadic(&self) -> Result<()> {
        if self.levels == 0 {
            return Err(Error::ZeroLevels);
        }
        let step = 1usize << self.levels;
        let (ll_w, ll_h) = (self.width / step, self.height / step);
        if !self.width.is_multiple_of(step)
            || !self.height.is_multiple_of(step)
            || ll_w < 2
            || ll_h < 2
            || !ll_w.is_multiple_of(2)
            || !ll_h.is_multiple_of(2)
        {
            return Err(Error::NotDyadic {
                width: self.width,
                height: self.height,
                levels: self.levels,
            });
        }
        Ok(())
    }
}

/// Quantizes a pyramid into a flat integer grid.
pub fn quantize(pyramid: &SubbandPyramid, q_bits: u8) -> Result<CoefficientGrid> {
    if q_bits > 8 {
        return Err(Error::QBitsTooLarge(q_bits));
    }
    pyramid.validate()?;
    let (w, h) = pyramid.original_dims;
    if w % (1usize << pyramid.levels) != 0 || h % (1usize << pyramid.levels) != 0 {
        return Err(Error::NotDyadic {
            width: w,
            height: h,
            levels: pyramid.levels,
        });
    }

    let scale = f64::from(1u32 << q_bits);
    let mut grid = CoefficientGrid::zeros(w, h, pyramid.levels, q_bits);
    let mut place = |plane: &ImagePlane, row0: usize, col0: usize| -> Result<()> {
        for r in 0..plane.height() {
            for c in 0..plane.width() {
                let scaled = (plane.get(r, c) * scale).round_ties_even();
                if scaled.abs() > i32::MAX as f64 {
                    return Err(Error::QuantizerOverflow(plane.get(r, c)));
                }
                grid.values[(row0 + r) * w + col0 + c] = scaled as i32;
            }
        }
        Ok(())
    };

    for (i, bands) in pyramid.details.iter().enumerate() {
        let (band_w, band_h) = (w >> (i + 1), h >> (i + 1));
        place(&bands.hl, 0, band_w)?;
        place(&bands.lh, band_h, 0)?;
        place(&bands.hh, band_h, band_w)?;
    }
    place(&pyramid.ll, 0, 0)?;
    Ok(grid)
}

/// Exact inverse of `quantize` up to the rounding it performed.
pub fn dequantize(grid: &CoefficientGrid) -> Result<SubbandPyramid> {
    if grid.levels == 0 {
        return Err(Error::ZeroLevels);
    }
    let (w, h) = (grid.width, grid.height);
    if w % (1usize << grid.levels) != 0 || h % (1usize << grid.levels) != 0 {
        return Err(Error::NotDyadic {
            width: w,
            height: h,
            levels: grid.levels,
        });
    }
    let scale = f64::from(1u32 << grid.q_bits);
    let extract = |row0: usize, col0: usize, band_w: usize, band_h: usize| -> ImagePlane {
        ImagePlane::from_fn(band_w, band_h, |r, c| {
            f64::from(grid.get(row0 + r, col0 + c)) / scale
        })
    };

    let mut details = Vec::with_capacity(grid.levels);
    for i in 0..grid.levels {
        let (band_w, band_h) = (w >> (i + 1), h >> (i + 1));
        details.push(DetailBands {
            hl: extract(0, band_w, band_w, band_h),
            lh: extract(band_h, 0, band_w, band_h),
            hh: extract(band_h, band_w, band_w, band_h),
        });
    }
    let (ll_w, ll_h) = (w >> grid.levels, h >> grid.levels);
    Ok(SubbandPyramid {
        levels: grid.levels,
        ll: extract(0, 0, ll_w, ll_h),
        details,
        original_dims: (w, h),
    })
}
