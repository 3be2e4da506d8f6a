//! SPIHT: set partitioning in hierarchical trees over a dyadic grid.
//!
//! Encoder and decoder share one pass engine; they differ only in where
//! significance answers come from (computed from the grid vs read from the
//! stream), which keeps the two state machines mirror-exact by
//! construction. Trees follow the classic parent-child structure: in each
//! 2x2 group of the deepest LL band the top-left coefficient has no
//! descendants and the other three root the HL/LH/HH orientation trees;
//! below the roots, (r,c) parents the 2x2 block at (2r,2c).
//!
//! A coding pass at bitplane n is a sorting pass (LIP, then LIS with set
//! partitioning) followed by a refinement pass over coefficients that were
//! already significant before this pass. Magnitudes of newly significant
//! coefficients decode to the midpoint of [2^n, 2^(n+1)); each refinement
//! halves that uncertainty, so a full-depth decode is exact on integers.

use crate::codec::bitio::{BitReader, BitWriter};
use crate::codec::grid::CoefficientGrid;
use crate::error::{Error, Result};

/// Grid coordinate, (row, col).
pub type Coord = (usize, usize);

/// LIS entry flavor: type A tests all descendants, type B only
/// grandchildren and deeper.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SetType {
    A,
    B,
}

/// The three coder lists. LIP and LSP partition the individually addressed
/// coefficients; LIS holds descendant-set roots.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SpihtState {
    pub lip: Vec<Coord>,
    pub lis: Vec<(Coord, SetType)>,
    pub lsp: Vec<Coord>,
}

/// Encoded single-channel stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpihtBitstream {
    pub width: usize,
    pub height: usize,
    pub levels: usize,
    pub q_bits: u8,
    /// Initial bitplane, `floor(log2 max|value|)`; `None` for an all-zero
    /// grid (a sentinel on the wire).
    pub n_max: Option<u32>,
    /// Passes actually encoded: min(requested, n_max + 1).
    pub passes: u16,
    /// MSB-first packed payload, zero-padded to a byte boundary.
    pub payload: Vec<u8>,
    /// Exact payload length in bits.
    pub payload_bits: usize,
    /// Bit offset after each pass; a prefix cut here decodes cleanly.
    pub pass_boundaries: Vec<usize>,
}

/// Spatial-orientation tree geometry for a grid.
#[derive(Debug, Clone, Copy)]
struct TreeShape {
    width: usize,
    height: usize,
    ll_w: usize,
    ll_h: usize,
}

impl TreeShape {
    fn new(grid: &CoefficientGrid) -> Result<Self> {
        grid.check_dyadic()?;
        Ok(Self {
            width: grid.width,
            height: grid.height,
            ll_w: grid.width >> grid.levels,
            ll_h: grid.height >> grid.levels,
        })
    }

    #[inline]
    fn in_ll(&self, r: usize, c: usize) -> bool {
        r < self.ll_h && c < self.ll_w
    }

    /// The four offspring of (r,c), or None for childless coefficients.
    fn offspring(&self, r: usize, c: usize) -> Option<[Coord; 4]> {
        let (br, bc) = if self.in_ll(r, c) {
            match (r % 2, c % 2) {
                (0, 0) => return None,
                (0, 1) => (r, self.ll_w + c - 1),
                (1, 0) => (self.ll_h + r - 1, c),
                _ => (self.ll_h + r - 1, self.ll_w + c - 1),
            }
        } else {
            if 2 * r >= self.height || 2 * c >= self.width {
                return None;
            }
            (2 * r, 2 * c)
        };
        Some([(br, bc), (br, bc + 1), (br + 1, bc), (br + 1, bc + 1)])
    }

    /// Whether any offspring of (r,c) has offspring of its own.
    fn has_grandchildren(&self, r: usize, c: usize) -> bool {
        self.offspring(r, c)
            .map(|os| os.iter().any(|&(or, oc)| self.offspring(or, oc).is_some()))
            .unwrap_or(false)
    }

    #[inline]
    fn index(&self, r: usize, c: usize) -> usize {
        r * self.width + c
    }
}

/// Where significance answers and magnitude bits flow. The encoder computes
/// and writes them; the decoder reads and applies them.
trait Medium {
    fn pixel_significant(&mut self, shape: &TreeShape, coord: Coord, n: u32) -> Result<bool>;
    fn descendants_significant(&mut self, shape: &TreeShape, coord: Coord, n: u32) -> Result<bool>;
    fn grandchildren_significant(
        &mut self,
        shape: &TreeShape,
        coord: Coord,
        n: u32,
    ) -> Result<bool>;
    /// Called once right after `pixel_significant` returned true.
    fn sign(&mut self, shape: &TreeShape, coord: Coord, n: u32) -> Result<()>;
    fn refine(&mut self, shape: &TreeShape, coord: Coord, n: u32) -> Result<()>;
    /// Bits produced/consumed so far.
    fn bit_position(&self) -> usize;
}

struct Encoder<'a> {
    values: &'a [i32],
    /// Max |value| over all strict descendants of each coordinate.
    max_desc: Vec<u32>,
    /// Max |value| over grandchildren and deeper.
    max_grand: Vec<u32>,
    writer: BitWriter,
}

impl<'a> Encoder<'a> {
    fn new(grid: &'a CoefficientGrid, shape: &TreeShape) -> Self {
        let n = grid.values.len();
        let mut max_desc = vec![0u32; n];
        let mut max_grand = vec![0u32; n];
        // Reverse raster order visits offspring before their parent.
        for idx in (0..n).rev() {
            let (r, c) = (idx / shape.width, idx % shape.width);
            if let Some(os) = shape.offspring(r, c) {
                let mut md = 0;
                let mut mg = 0;
                for &(or, oc) in &os {
                    let oi = shape.index(or, oc);
                    md = md.max(grid.values[oi].unsigned_abs()).max(max_desc[oi]);
                    mg = mg.max(max_desc[oi]);
                }
                max_desc[idx] = md;
                max_grand[idx] = mg;
            }
        }
        Self {
            values: &grid.values,
            max_desc,
            max_grand,
            writer: BitWriter::new(),
        }
    }
}

impl Medium for Encoder<'_> {
    fn pixel_significant(&mut self, shape: &TreeShape, (r, c): Coord, n: u32) -> Result<bool> {
        let sig = self.values[shape.index(r, c)].unsigned_abs() >= (1 << n);
        self.writer.push(sig);
        Ok(sig)
    }

    fn descendants_significant(
        &mut self,
        shape: &TreeShape,
        (r, c): Coord,
        n: u32,
    ) -> Result<bool> {
        let sig = self.max_desc[shape.index(r, c)] >= (1 << n);
        self.writer.push(sig);
        Ok(sig)
    }

    fn grandchildren_significant(
        &mut self,
        shape: &TreeShape,
        (r, c): Coord,
        n: u32,
    ) -> Result<bool> {
        let sig = self.max_grand[shape.index(r, c)] >= (1 << n);
        self.writer.push(sig);
        Ok(sig)
    }

    fn sign(&mut self, shape: &TreeShape, (r, c): Coord, _n: u32) -> Result<()> {
        self.writer.push(self.values[shape.index(r, c)] < 0);
        Ok(())
    }

    fn refine(&mut self, shape: &TreeShape, (r, c): Coord, n: u32) -> Result<()> {
        let mag = self.values[shape.index(r, c)].unsigned_abs();
        self.writer.push((mag >> n) & 1 == 1);
        Ok(())
    }

    fn bit_position(&self) -> usize {
        self.writer.bit_len()
    }
}

struct Decoder<'a> {
    reader: BitReader<'a>,
    /// Known magnitude bits per coefficient.
    magnitude: Vec<u32>,
    negative: Vec<bool>,
}

impl<'a> Decoder<'a> {
    fn new(payload: &'a [u8], payload_bits: usize, cells: usize) -> Self {
        Self {
            reader: BitReader::new(payload, payload_bits),
            magnitude: vec![0; cells],
            negative: vec![false; cells],
        }
    }
}

impl Medium for Decoder<'_> {
    fn pixel_significant(&mut self, _shape: &TreeShape, _coord: Coord, _n: u32) -> Result<bool> {
        self.reader.read()
    }

    fn descendants_significant(&mut self, _shape: &TreeShape, _c: Coord, _n: u32) -> Result<bool> {
        self.reader.read()
    }

    fn grandchildren_significant(
        &mut self,
        _shape: &TreeShape,
        _c: Coord,
        _n: u32,
    ) -> Result<bool> {
        self.reader.read()
    }

    fn sign(&mut self, shape: &TreeShape, (r, c): Coord, n: u32) -> Result<()> {
        let idx = shape.index(r, c);
        self.negative[idx] = self.reader.read()?;
        self.magnitude[idx] = 1 << n;
        Ok(())
    }

    fn refine(&mut self, shape: &TreeShape, (r, c): Coord, n: u32) -> Result<()> {
        if self.reader.read()? {
            self.magnitude[shape.index(r, c)] |= 1 << n;
        }
        Ok(())
    }

    fn bit_position(&self) -> usize {
        self.reader.position()
    }
}

fn initial_state(shape: &TreeShape) -> SpihtState {
    let mut state = SpihtState::default();
    for r in 0..shape.ll_h {
        for c in 0..shape.ll_w {
            state.lip.push((r, c));
            if shape.offspring(r, c).is_some() {
                state.lis.push(((r, c), SetType::A));
            }
        }
    }
    state
}

/// Runs `passes` coding passes starting at bitplane `n_max`, reporting each
/// pass boundary. `lsp_plane[i]` records the plane at which `lsp[i]` became
/// significant so the refinement pass can skip the current pass's arrivals.
fn run_passes<M: Medium>(
    shape: &TreeShape,
    medium: &mut M,
    n_max: u32,
    passes: u32,
    mut observer: impl FnMut(u32, &SpihtState),
) -> Result<Vec<usize>> {
    let mut state = initial_state(shape);
    let mut lsp_plane: Vec<u32> = Vec::new();
    let mut boundaries = Vec::with_capacity(passes as usize);

    for pass in 0..passes {
        let n = n_max - pass;

        // Sorting pass: LIP first.
        let mut kept = Vec::with_capacity(state.lip.len());
        for &coord in &state.lip {
            if medium.pixel_significant(shape, coord, n)? {
                medium.sign(shape, coord, n)?;
                state.lsp.push(coord);
                lsp_plane.push(n);
            } else {
                kept.push(coord);
            }
        }
        state.lip = kept;

        // LIS with set partitioning; appended entries are processed within
        // the same pass.
        let mut removed = vec![false; state.lis.len()];
        let mut i = 0;
        while i < state.lis.len() {
            let (coord, set_type) = state.lis[i];
            match set_type {
                SetType::A => {
                    if medium.descendants_significant(shape, coord, n)? {
                        let offspring = shape
                            .offspring(coord.0, coord.1)
                            .expect("type-A entries have offspring");
                        for &child in &offspring {
                            if medium.pixel_significant(shape, child, n)? {
                                medium.sign(shape, child, n)?;
                                state.lsp.push(child);
                                lsp_plane.push(n);
                            } else {
                                state.lip.push(child);
                            }
                        }
                        if shape.has_grandchildren(coord.0, coord.1) {
                            state.lis.push((coord, SetType::B));
                            removed.push(false);
                        }
                        removed[i] = true;
                    }
                }
                SetType::B => {
                    if medium.grandchildren_significant(shape, coord, n)? {
                        for &child in &shape
                            .offspring(coord.0, coord.1)
                            .expect("type-B entries have offspring")
                        {
                            state.lis.push((child, SetType::A));
                            removed.push(false);
                        }
                        removed[i] = true;
                    }
                }
            }
            i += 1;
        }
        let mut keep = removed.iter().map(|r| !r);
        state.lis.retain(|_| keep.next().unwrap());

        // Refinement pass over earlier arrivals.
        for (idx, &coord) in state.lsp.iter().enumerate() {
            if lsp_plane[idx] != n {
                medium.refine(shape, coord, n)?;
            }
        }

        boundaries.push(medium.bit_position());
        observer(n, &state);
        if n == 0 {
            break;
        }
    }
    Ok(boundaries)
}

/// Encodes a grid progressively, up to `max_passes` bitplane passes.
pub fn spiht_encode(grid: &CoefficientGrid, max_passes: u32) -> Result<SpihtBitstream> {
    spiht_encode_observed(grid, max_passes, |_, _| {})
}

/// Like `spiht_encode`, with a per-pass observer over the coder lists
/// (used by tests to check list discipline).
pub fn spiht_encode_observed(
    grid: &CoefficientGrid,
    max_passes: u32,
    observer: impl FnMut(u32, &SpihtState),
) -> Result<SpihtBitstream> {
    if max_passes == 0 {
        return Err(Error::ZeroPasses);
    }
    let shape = TreeShape::new(grid)?;
    let max_abs = grid
        .values
        .iter()
        .map(|v| v.unsigned_abs())
        .max()
        .unwrap_or(0);
    if max_abs == 0 {
        return Ok(SpihtBitstream {
            width: grid.width,
            height: grid.height,
            levels: grid.levels,
            q_bits: grid.q_bits,
            n_max: None,
            passes: 0,
            payload: Vec::new(),
            payload_bits: 0,
            pass_boundaries: Vec::new(),
        });
    }
    let n_max = 31 - max_abs.leading_zeros();
    let passes = max_passes.min(n_max + 1);
    let mut encoder = Encoder::new(grid, &shape);
    let boundaries = run_passes(&shape, &mut encoder, n_max, passes, observer)?;
    let payload_bits = encoder.writer.bit_len();
    Ok(SpihtBitstream {
        width: grid.width,
        height: grid.height,
        levels: grid.levels,
        q_bits: grid.q_bits,
        n_max: Some(n_max),
        passes: passes as u16,
        payload: encoder.writer.into_bytes(),
        payload_bits,
        pass_boundaries: boundaries,
    })
}

/// Decodes the first `passes` passes of a stream. Unrefined significant
/// coefficients come back at the midpoint of their uncertainty interval.
pub fn spiht_decode(stream: &SpihtBitstream, passes: u32) -> Result<CoefficientGrid> {
    Ok(spiht_decode_counted(stream, passes)?.0)
}

/// Like `spiht_decode`, also reporting the payload bits consumed (the
/// decoder's own count, available even when a stream was read from a file
/// without its pass-boundary metadata).
pub fn spiht_decode_counted(
    stream: &SpihtBitstream,
    passes: u32,
) -> Result<(CoefficientGrid, usize)> {
    spiht_decode_observed(stream, passes, |_, _| {})
}

/// Like `spiht_decode_counted`, with the same per-pass observer as the
/// encoder.
pub fn spiht_decode_observed(
    stream: &SpihtBitstream,
    passes: u32,
    observer: impl FnMut(u32, &SpihtState),
) -> Result<(CoefficientGrid, usize)> {
    if passes > u32::from(stream.passes) {
        return Err(Error::PassesExceeded {
            requested: passes,
            available: u32::from(stream.passes),
        });
    }
    let mut grid =
        CoefficientGrid::zeros(stream.width, stream.height, stream.levels, stream.q_bits);
    let Some(n_max) = stream.n_max else {
        return Ok((grid, 0)); // all-zero sentinel
    };
    if passes == 0 {
        return Ok((grid, 0));
    }
    let shape = TreeShape::new(&grid)?;
    let mut decoder = Decoder::new(&stream.payload, stream.payload_bits, grid.values.len());
    run_passes(&shape, &mut decoder, n_max, passes, observer)?;
    let consumed = decoder.reader.position();

    // Midpoint of the remaining uncertainty below the last decoded plane.
    let n_lo = n_max + 1 - passes;
    let half = if n_lo > 0 { 1u32 << (n_lo - 1) } else { 0 };
    for (idx, value) in grid.values.iter_mut().enumerate() {
        let mag = decoder.magnitude[idx];
        if mag > 0 {
            let rec = (mag + half) as i32;
            *value = if decoder.negative[idx] { -rec } else { rec };
        }
    }
    Ok((grid, consumed))
}
