//! The CHBW container: header plus per-channel SPIHT payloads.
//!
//! Layout (little-endian multi-byte fields):
//!
//! ```text
//! magic   4 bytes  "CHBW"
//! version u8       1
//! kind    u8       0 = second kind, 1 = third kind
//! width   u32      original image width (before codec padding)
//! height  u32      original image height
//! channels u8
//! levels  u8
//! q_bits  u8
//! n_max   u8 x channels   255 = all-zero channel sentinel
//! passes  u16      requested passes; channel i holds min(passes, n_max_i+1)
//! len     u32 x channels  payload length in bytes
//! payload bytes x channels, bits MSB-first, zero-padded to byte boundary
//! ```

use std::io::{Read, Write};

use crate::chebyshev::WaveletKind;
use crate::codec::spiht::SpihtBitstream;
use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"CHBW";
pub const VERSION: u8 = 1;
const ZERO_CHANNEL_SENTINEL: u8 = 255;

/// A compressed image: shared header plus one SPIHT stream per channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressedImage {
    pub kind: WaveletKind,
    /// Original dimensions; the coder pads internally and crops on decode.
    pub width: usize,
    pub height: usize,
    pub levels: usize,
    pub q_bits: u8,
    /// Requested pass count; each channel holds `min(passes, n_max+1)`.
    pub passes: u16,
    pub channels: Vec<SpihtBitstream>,
}

/// Deepest decomposition the coder supports; also the header limit.
pub const MAX_LEVELS: usize = 16;

/// Grid dimensions after padding to the next multiple of 2^(levels+1),
/// which keeps every subband split exact and the deepest LL band even.
pub fn padded_dims(width: usize, height: usize, levels: usize) -> Result<(usize, usize)> {
    if levels == 0 {
        return Err(Error::ZeroLevels);
    }
    if levels > MAX_LEVELS {
        return Err(Error::LevelsTooDeep {
            levels,
            width,
            height,
        });
    }
    let step = 1usize << (levels + 1);
    Ok((width.next_multiple_of(step), height.next_multiple_of(step)))
}

impl CompressedImage {
    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        w.write_all(&MAGIC)?;
        w.write_all(&[VERSION])?;
        let kind = match self.kind {
            WaveletKind::SecondChebyshev => 0u8,
            WaveletKind::ThirdChebyshev => 1u8,
        };
        w.write_all(&[kind])?;
        w.write_all(&(self.width as u32).to_le_bytes())?;
        w.write_all(&(self.height as u32).to_le_bytes())?;
        w.write_all(&[self.channels.len() as u8])?;
        w.write_all(&[self.levels as u8])?;
        w.write_all(&[self.q_bits])?;
        for ch in &self.channels {
            let n_max = match ch.n_max {
                Some(n) => n as u8,
                None => ZERO_CHANNEL_SENTINEL,
            };
            w.write_all(&[n_max])?;
        }
        w.write_all(&self.passes.to_le_bytes())?;
        for ch in &self.channels {
            w.write_all(&(ch.payload.len() as u32).to_le_bytes())?;
        }
        for ch in &self.channels {
            w.write_all(&ch.payload)?;
        }
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if magic != MAGIC {
            return Err(Error::CorruptHeader(format!("bad magic {magic:02x?}")));
        }
        let version = read_u8(&mut r)?;
        if version != VERSION {
            return Err(Error::CorruptHeader(format!(
                "unsupported version {version}"
            )));
        }
        let kind = match read_u8(&mut r)? {
            0 => WaveletKind::SecondChebyshev,
            1 => WaveletKind::ThirdChebyshev,
            k => return Err(Error::CorruptHeader(format!("unknown wavelet kind {k}"))),
        };
        let width = read_u32(&mut r)? as usize;
        let height = read_u32(&mut r)? as usize;
        let channel_count = read_u8(&mut r)? as usize;
        let levels = read_u8(&mut r)? as usize;
        let q_bits = read_u8(&mut r)?;
        if width == 0 || height == 0 {
            return Err(Error::CorruptHeader("zero image dimension".into()));
        }
        if channel_count == 0 || channel_count > 8 {
            return Err(Error::CorruptHeader(format!(
                "implausible channel count {channel_count}"
            )));
        }
        if levels == 0 || levels > MAX_LEVELS {
            return Err(Error::CorruptHeader(format!(
                "implausible level count {levels}"
            )));
        }
        if q_bits > 8 {
            return Err(Error::CorruptHeader(format!(
                "fractional bits {q_bits} out of range"
            )));
        }

        let mut n_maxes = Vec::with_capacity(channel_count);
        for _ in 0..channel_count {
            let raw = read_u8(&mut r)?;
            n_maxes.push(match raw {
                ZERO_CHANNEL_SENTINEL => None,
                n if n <= 31 => Some(u32::from(n)),
                n => return Err(Error::CorruptHeader(format!("bitplane {n} out of range"))),
            });
        }
        let passes = read_u16(&mut r)?;
        let mut lengths = Vec::with_capacity(channel_count);
        for _ in 0..channel_count {
            lengths.push(read_u32(&mut r)? as usize);
        }

        let (grid_w, grid_h) = padded_dims(width, height, levels)?;
        let mut channels = Vec::with_capacity(channel_count);
        for (n_max, len) in n_maxes.into_iter().zip(lengths) {
            let mut payload = vec![0u8; len];
            r.read_exact(&mut payload)?;
            let channel_passes = match n_max {
                Some(n) => u32::from(passes).min(n + 1) as u16,
                None => 0,
            };
            channels.push(SpihtBitstream {
                width: grid_w,
                height: grid_h,
                levels,
                q_bits,
                n_max,
                passes: channel_passes,
                payload,
                payload_bits: len * 8,
                pass_boundaries: Vec::new(),
            });
        }
        Ok(CompressedImage {
            kind,
            width,
            height,
            levels,
            q_bits,
            passes,
            channels,
        })
    }
}

fn read_u8(r: &mut impl Read) -> Result<u8> {
    let mut b = [0u8; 1];
    r.read_exact(&mut b)?;
    Ok(b[0])
}

fn read_u16(r: &mut impl Read) -> Result<u16> {
    let mut b = [0u8; 2];
    r.read_exact(&mut b)?;
    Ok(u16::from_le_bytes(b))
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}
