//! 1D and 2D forward/inverse transforms and the multi-level subband pyramid.
//!
//! The 2D transform is separable: rows first, then columns of both halves.
//! Quadrant naming fixes HL = (row-high, col-low). Odd lengths are extended
//! to even by a half-sample mirror (the edge sample is repeated); the
//! original dimensions are recorded in the pyramid and restored on inverse.

use crate::error::{Error, Result};
use crate::filter::FilterBank;
use crate::plane::ImagePlane;

/// One level's detail subbands.
#[derive(Debug, Clone, PartialEq)]
pub struct DetailBands {
    pub lh: ImagePlane,
    pub hl: ImagePlane,
    pub hh: ImagePlane,
}

/// Multi-level decomposition: the coarsest approximation plus per-level
/// detail triples, finest level first.
#[derive(Debug, Clone, PartialEq)]
pub struct SubbandPyramid {
    pub levels: usize,
    pub ll: ImagePlane,
    /// `details[0]` is level 1 (finest); `details[levels-1]` is the deepest.
    pub details: Vec<DetailBands>,
    /// Dimensions of the plane that was decomposed, before any padding.
    pub original_dims: (usize, usize),
}

/// Single-level 1D analysis. Returns ceil(n/2) approximation and detail
/// coefficients; an odd tail is mirrored before pairing.
pub fn dwt1d(signal: &[f64], bank: &FilterBank) -> Result<(Vec<f64>, Vec<f64>)> {
    if signal.is_empty() {
        return Err(Error::EmptySignal);
    }
    let n = signal.len();
    let half = n.div_ceil(2);
    let mut approx = Vec::with_capacity(half);
    let mut detail = Vec::with_capacity(half);
    for i in 0..half {
        let x0 = signal[2 * i];
        let x1 = if 2 * i + 1 < n { signal[2 * i + 1] } else { x0 };
        let (a, d) = bank.analyze(x0, x1);
        approx.push(a);
        detail.push(d);
    }
    Ok((approx, detail))
}

/// Single-level 1D synthesis; truncates the mirrored tail back to
/// `original_length`.
pub fn dwt1d_inverse(
    approx: &[f64],
    detail: &[f64],
    bank: &FilterBank,
    original_length: usize,
) -> Result<Vec<f64>> {
    if approx.len() != detail.len() {
        return Err(Error::LengthMismatch {
            expected: approx.len(),
            actual: detail.len(),
        });
    }
    if original_length.div_ceil(2) != approx.len() || original_length == 0 {
        return Err(Error::LengthMismatch {
            expected: approx.len() * 2,
            actual: original_length,
        });
    }
    let mut signal = Vec::with_capacity(approx.len() * 2);
    for (&a, &d) in approx.iter().zip(detail) {
        let (x0, x1) = bank.synthesize(a, d);
        signal.push(x0);
        signal.push(x1);
    }
    signal.truncate(original_length);
    Ok(signal)
}

/// Single-level 2D analysis: returns (LL, LH, HL, HH) quadrants of
/// ceil-halved dimensions.
pub fn dwt2d(
    plane: &ImagePlane,
    bank: &FilterBank,
) -> Result<(ImagePlane, ImagePlane, ImagePlane, ImagePlane)> {
    let (w, h) = (plane.width(), plane.height());
    let cw = w.div_ceil(2);
    let ch = h.div_ceil(2);

    // Row pass: split every row into a low and a high half.
    let mut row_low = ImagePlane::zeros(cw, h);
    let mut row_high = ImagePlane::zeros(cw, h);
    for r in 0..h {
        let (a, d) = dwt1d(plane.row(r), bank)?;
        for c in 0..cw {
            row_low.set(r, c, a[c]);
            row_high.set(r, c, d[c]);
        }
    }

    // Column pass on both halves.
    let mut ll = ImagePlane::zeros(cw, ch);
    let mut lh = ImagePlane::zeros(cw, ch);
    let mut hl = ImagePlane::zeros(cw, ch);
    let mut hh = ImagePlane::zeros(cw, ch);
    for c in 0..cw {
        let (a, d) = dwt1d(&row_low.column(c), bank)?;
        for r in 0..ch {
            ll.set(r, c, a[r]);
            lh.set(r, c, d[r]);
        }
        let (a, d) = dwt1d(&row_high.column(c), bank)?;
        for r in 0..ch {
            hl.set(r, c, a[r]);
            hh.set(r, c, d[r]);
        }
    }
    Ok((ll, lh, hl, hh))
}

/// Single-level 2D synthesis back to `dims = (width, height)`.
pub fn dwt2d_inverse(
    ll: &ImagePlane,
    lh: &ImagePlane,
    hl: &ImagePlane,
    hh: &ImagePlane,
    bank: &FilterBank,
    dims: (usize, usize),
) -> Result<ImagePlane> {
    let (w, h) = dims;
    let (cw, ch) = (w.div_ceil(2), h.div_ceil(2));
    for q in [ll, lh, hl, hh] {
        if q.width() != cw || q.height() != ch {
            return Err(Error::MalformedPyramid(format!(
                "quadrant is {}x{}, expected {cw}x{ch} for a {w}x{h} plane",
                q.width(),
                q.height()
            )));
        }
    }

    // Undo the column pass.
    let mut row_low = ImagePlane::zeros(cw, h);
    let mut row_high = ImagePlane::zeros(cw, h);
    for c in 0..cw {
        let low = dwt1d_inverse(&ll.column(c), &lh.column(c), bank, h)?;
        let high = dwt1d_inverse(&hl.column(c), &hh.column(c), bank, h)?;
        for r in 0..h {
            row_low.set(r, c, low[r]);
            row_high.set(r, c, high[r]);
        }
    }

    // Undo the row pass.
    let mut out = ImagePlane::zeros(w, h);
    for r in 0..h {
        let row = dwt1d_inverse(row_low.row(r), row_high.row(r), bank, w)?;
        for (c, &v) in row.iter().enumerate() {
            out.set(r, c, v);
        }
    }
    Ok(out)
}

/// Recursively applies `dwt2d` to the LL quadrant, `levels` times.
pub fn decompose(plane: &ImagePlane, bank: &FilterBank, levels: usize) -> Result<SubbandPyramid> {
    let (w, h) = (plane.width(), plane.height());
    if levels == 0 {
        return Err(Error::ZeroLevels);
    }
    if levels > 30 || (1usize << levels) > w.min(h) {
        return Err(Error::LevelsTooDeep {
            levels,
            width: w,
            height: h,
        });
    }
    let mut details = Vec::with_capacity(levels);
    let mut current = plane.clone();
    for _ in 0..levels {
        let (ll, lh, hl, hh) = dwt2d(&current, bank)?;
        details.push(DetailBands { lh, hl, hh });
        current = ll;
    }
    Ok(SubbandPyramid {
        levels,
        ll: current,
        details,
        original_dims: (w, h),
    })
}

/// Inverts `decompose` level by level; output has `original_dims`.
pub fn reconstruct(pyramid: &SubbandPyramid, bank: &FilterBank) -> Result<ImagePlane> {
    pyramid.validate()?;
    let mut current = pyramid.ll.clone();
    for level in (0..pyramid.levels).rev() {
        let dims = pyramid.dims_at_level(level);
        let bands = &pyramid.details[level];
        current = dwt2d_inverse(&current, &bands.lh, &bands.hl, &bands.hh, bank, dims)?;
    }
    Ok(current)
}

impl SubbandPyramid {
    /// Plane dimensions after `level` ceil-halvings of the original.
    pub fn dims_at_level(&self, level: usize) -> (usize, usize) {
        let (mut w, mut h) = self.original_dims;
        for _ in 0..level {
            w = w.div_ceil(2);
            h = h.div_ceil(2);
        }
        (w, h)
    }

    /// Checks the dimension bookkeeping of every stored plane.
    pub fn validate(&self) -> Result<()> {
        if self.levels == 0 || self.details.len() != self.levels {
            return Err(Error::MalformedPyramid(format!(
                "{} detail levels stored for a {}-level pyramid",
                self.details.len(),
                self.levels
            )));
        }
        for (i, bands) in self.details.iter().enumerate() {
            let (w, h) = self.dims_at_level(i + 1);
            for (name, q) in [("lh", &bands.lh), ("hl", &bands.hl), ("hh", &bands.hh)] {
                if q.width() != w || q.height() != h {
                    return Err(Error::MalformedPyramid(format!(
                        "level {} {name} is {}x{}, expected {w}x{h}",
                        i + 1,
                        q.width(),
                        q.height()
                    )));
                }
            }
        }
        let (w, h) = self.dims_at_level(self.levels);
        if self.ll.width() != w || self.ll.height() != h {
            return Err(Error::MalformedPyramid(format!(
                "ll is {}x{}, expected {w}x{h}",
                self.ll.width(),
                self.ll.height()
            )));
        }
        Ok(())
    }
}

/// Half-sample mirror (ping-pong) index into [0, size).
fn mirror_index(idx: usize, size: usize) -> usize {
    if size == 1 {
        return 0;
    }
    let period = 2 * size;
    let m = idx % period;
    if m < size {
        m
    } else {
        period - 1 - m
    }
}

/// Extends a plane to `target_w` x `target_h` by mirroring edge samples.
pub fn pad_mirror(plane: &ImagePlane, target_w: usize, target_h: usize) -> Result<ImagePlane> {
    if target_w < plane.width() || target_h < plane.height() {
        return Err(Error::InvalidDimensions {
            width: target_w,
            height: target_h,
            samples: plane.pixel_count(),
        });
    }
    if target_w == plane.width() && target_h == plane.height() {
        return Ok(plane.clone());
    }
    Ok(ImagePlane::from_fn(target_w, target_h, |r, c| {
        plane.get(
            mirror_index(r, plane.height()),
            mirror_index(c, plane.width()),
        )
    }))
}
