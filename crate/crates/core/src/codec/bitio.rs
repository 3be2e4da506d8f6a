//! MSB-first bit packing over byte buffers.

use crate::error::{Error, Result};

/// Accumulates single bits into bytes, most significant bit first.
#[derive(Debug, Default, Clone)]
pub struct BitWriter {
    buf: Vec<u8>,
    cur: u8,
    used: u8,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn push(&mut self, bit: bool) {
        if bit {
            self.cur |= 1 << (7 - self.used);
        }
        self.used += 1;
        if self.used == 8 {
            self.buf.push(self.cur);
            self.cur = 0;
            self.used = 0;
        }
    }

    /// Number of bits written so far.
    pub fn bit_len(&self) -> usize {
        self.buf.len() * 8 + self.used as usize
    }

    /// Finishes the stream, zero-padding the last byte.
    pub fn into_bytes(mut self) -> Vec<u8> {
        if self.used > 0 {
            self.buf.push(self.cur);
        }
        self.buf
    }
}

/// Reads single bits from a byte slice, most significant bit first.
#[derive(Debug)]
pub struct BitReader<'a> {
    data: &'a [u8],
    /// Total readable bits; trailing pad bits past this are unreachable.
    bit_len: usize,
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(data: &'a [u8], bit_len: usize) -> Self {
        debug_assert!(bit_len <= data.len() * 8);
        Self {
            data,
            bit_len,
            pos: 0,
        }
    }

    #[inline]
    pub fn read(&mut self) -> Result<bool> {
        if self.pos >= self.bit_len {
            return Err(Error::UnexpectedEndOfStream);
        }
        let byte = self.data[self.pos / 8];
        let bit = (byte >> (7 - (self.pos % 8))) & 1;
        self.pos += 1;
        Ok(bit == 1)
    }

    /// Bits consumed so far.
    pub fn position(&self) -> usize {
        self.pos
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_msb_first() {
        let bits = [
            true, false, true, true, false, false, false, true, true, false,
        ];
        let mut w = BitWriter::new();
        for &b in &bits {
            w.push(b);
        }
        assert_eq!(w.bit_len(), 10);
        let bytes = w.into_bytes();
        // 1011_0001 10(000000)
        assert_eq!(bytes, vec![0xB1, 0x80]);

        let mut r = BitReader::new(&bytes, 10);
        for &b in &bits {
            assert_eq!(r.read().unwrap(), b);
        }
        assert!(matches!(r.read(), Err(Error::UnexpectedEndOfStream)));
    }
}
