//! Versioned, length-prefixed binary encoding shared by every wire structure.
//!
//! Each field is written as a 4-byte big-endian length followed by its bytes.
//! Structures begin with a one-byte version.

use ark_bn254::{G1Affine, G2Affine};
use thiserror::Error;

use crate::primitives::curve::{self, EncodingError, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WireError {
    #[error("unexpected end of input")]
    Truncated,
    #[error("trailing bytes after structure")]
    Trailing,
    #[error("unsupported version {0}")]
    Version(u8),
    #[error("bad field count: expected {expected}, got {actual}")]
    Count { expected: usize, actual: usize },
    #[error("invalid field: {0}")]
    Field(#[from] EncodingError),
    #[error("invalid value: {0}")]
    Invalid(&'static str),
}

#[derive(Default)]
pub struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn new(version: u8) -> Self {
        Writer { buf: vec![version] }
    }

    pub fn raw() -> Self {
        Writer::default()
    }

    pub fn u8(&mut self, v: u8) -> &mut Self {
        self.buf.push(v);
        self
    }

    pub fn u32(&mut self, v: u32) -> &mut Self {
        self.buf.extend_from_slice(&v.to_be_bytes());
        self
    }

    pub fn u64(&mut self, v: u64) -> &mut Self {
        self.buf.extend_from_slice(&v.to_be_bytes());
        self
    }

    pub fn bytes(&mut self, v: &[u8]) -> &mut Self {
        self.u32(v.len() as u32);
        self.buf.extend_from_slice(v);
        self
    }

    pub fn g1(&mut self, p: &G1Affine) -> &mut Self {
        self.bytes(&curve::encode_g1(p))
    }

    pub fn g2(&mut self, p: &G2Affine) -> &mut Self {
        self.bytes(&curve::encode_g2(p))
    }

    pub fn scalar(&mut self, s: &Scalar) -> &mut Self {
        self.bytes(&curve::encode_scalar(s))
    }

    pub fn finish(&mut self) -> Vec<u8> {
        std::mem::take(&mut self.buf)
    }
}

pub struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Reader { buf }
    }

    /// Reads the version byte and checks it against `expected`.
    pub fn versioned(buf: &'a [u8], expected: u8) -> Result<Self, WireError> {
        let mut r = Reader::new(buf);
        let v = r.u8()?;
        if v != expected {
            return Err(WireError::Version(v));
        }
        Ok(r)
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], WireError> {
        if self.buf.len() < n {
            return Err(WireError::Truncated);
        }
        let (head, tail) = self.buf.split_at(n);
        self.buf = tail;
        Ok(head)
    }

    pub fn u8(&mut self) -> Result<u8, WireError> {
        Ok(self.take(1)?[0])
    }

    pub fn u32(&mut self) -> Result<u32, WireError> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    pub fn u64(&mut self) -> Result<u64, WireError> {
        Ok(u64::from_be_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    pub fn bytes(&mut self) -> Result<&'a [u8], WireError> {
        let len = self.u32()? as usize;
        self.take(len)
    }

    pub fn array<const N: usize>(&mut self) -> Result<[u8; N], WireError> {
        let b = self.bytes()?;
        b.try_into().map_err(|_| {
            WireError::Field(EncodingError::Length {
                expected: N,
                actual: b.len(),
            })
        })
    }

    pub fn g1(&mut self) -> Result<G1Affine, WireError> {
        Ok(curve::decode_g1(self.bytes()?)?)
    }

    pub fn g1_nonzero(&mut self) -> Result<G1Affine, WireError> {
        Ok(curve::decode_g1_nonzero(self.bytes()?)?)
    }

    pub fn g2(&mut self) -> Result<G2Affine, WireError> {
        Ok(curve::decode_g2(self.bytes()?)?)
    }

    pub fn scalar(&mut self) -> Result<Scalar, WireError> {
        Ok(curve::decode_scalar(self.bytes()?)?)
    }

    pub fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }

    pub fn finish(self) -> Result<(), WireError> {
        if self.buf.is_empty() {
            Ok(())
        } else {
            Err(WireError::Trailing)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reader_detects_truncation_and_trailing() {
        let bytes = Writer::new(1).bytes(b"abc").u64(9).finish();
        let mut r = Reader::versioned(&bytes, 1).unwrap();
        assert_eq!(r.bytes().unwrap(), b"abc");
        assert_eq!(r.u64().unwrap(), 9);
        r.finish().unwrap();

        assert_eq!(Reader::versioned(&bytes, 2).err(), Some(WireError::Version(1)));
        let mut r = Reader::versioned(&bytes[..5], 1).unwrap();
        assert_eq!(r.bytes().err(), Some(WireError::Truncated));
        let mut longer = bytes.clone();
        longer.push(0);
        let mut r = Reader::versioned(&longer, 1).unwrap();
        r.bytes().unwrap();
        r.u64().unwrap();
        assert_eq!(r.finish(), Err(WireError::Trailing));
    }
}
