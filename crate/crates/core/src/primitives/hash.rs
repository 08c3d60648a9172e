//! Multi-part BLAKE2b hashing.
//!
//! Every part is prefixed with its length as an 8-byte big-endian integer
//! before it is fed to the hash, so `["a", "b"]` and `["ab"]` never collide
//! structurally.

use std::fmt;

use ark_ff::PrimeField;
use blake2::digest::consts::U32;
use blake2::{Blake2b, Blake2b512, Digest as _};
use serde::{Deserialize, Serialize};

use super::curve::Scalar;

type Blake2b256 = Blake2b<U32>;

pub const DIGEST_LEN: usize = 32;

/// A 32-byte BLAKE2b-256 output.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Digest(#[serde(with = "crate::serde_b64::array")] pub [u8; DIGEST_LEN]);

impl Digest {
    pub fn as_bytes(&self) -> &[u8; DIGEST_LEN] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn from_hex(s: &str) -> Option<Self> {
        let bytes = hex::decode(s).ok()?;
        Some(Digest(bytes.try_into().ok()?))
    }

    pub fn from_slice(bytes: &[u8]) -> Option<Self> {
        Some(Digest(bytes.try_into().ok()?))
    }

    /// Compares the first `bits` bits (most significant bit of byte 0 first).
    pub fn prefix_eq(&self, other: &Digest, bits: u32) -> bool {
        let bits = bits.min(8 * DIGEST_LEN as u32) as usize;
        let full = bits / 8;
        if self.0[..full] != other.0[..full] {
            return false;
        }
        let rem = bits % 8;
        if rem == 0 {
            return true;
        }
        let mask = 0xffu8 << (8 - rem);
        (self.0[full] & mask) == (other.0[full] & mask)
    }
}

impl AsRef<[u8]> for Digest {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest({})", self.to_hex())
    }
}

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

fn absorb<D: blake2::Digest, I, P>(hasher: &mut D, parts: I)
where
    I: IntoIterator<Item = P>,
    P: AsRef<[u8]>,
{
    for part in parts {
        let part = part.as_ref();
        hasher.update((part.len() as u64).to_be_bytes());
        hasher.update(part);
    }
}

/// Hashes a sequence of byte strings into a [`Digest`].
pub fn hash<I, P>(parts: I) -> Digest
where
    I: IntoIterator<Item = P>,
    P: AsRef<[u8]>,
{
    let mut hasher = Blake2b256::new();
    absorb(&mut hasher, parts);
    Digest(hasher.finalize().into())
}

/// Hashes a sequence of byte strings to a scalar.
///
/// Uses the 64-byte BLAKE2b output reduced modulo the group order, so the
/// reduction bias is negligible.
pub fn hash_to_scalar<I, P>(parts: I) -> Scalar
where
    I: IntoIterator<Item = P>,
    P: AsRef<[u8]>,
{
    let mut hasher = Blake2b512::new();
    absorb(&mut hasher, parts);
    Scalar::from_be_bytes_mod_order(&hasher.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        assert_eq!(hash([""]), hash([""]));
        assert_eq!(hash(["a", "b"]), hash(["a", "b"]));
    }

    #[test]
    fn length_prefix_separates_parts() {
        assert_ne!(hash(["a", "b"]), hash(["ab"]));
        assert_ne!(hash(["", "a"]), hash(["a", ""]));
        assert_ne!(hash(Vec::<&[u8]>::new()), hash([""]));
    }

    #[test]
    fn abc_vector() {
        // BLAKE2b-256 of 0x0000000000000003 || "abc", computed with Python's hashlib.
        assert_eq!(
            hash(["abc"]).to_hex(),
            "7481e9dc42d8247a21e3207b4865a791d7ab7f7119c932efd03508b1148efc29"
        );
    }

    #[test]
    fn prefix_comparison() {
        let a = Digest([0b1010_0000; 32]);
        let mut b = a;
        b.0[0] = 0b1011_0000;
        assert!(a.prefix_eq(&b, 0));
        assert!(a.prefix_eq(&b, 3));
        assert!(!a.prefix_eq(&b, 4));
        assert!(a.prefix_eq(&a, 256));
        b = a;
        b.0[31] ^= 1;
        assert!(a.prefix_eq(&b, 255));
        assert!(!a.prefix_eq(&b, 256));
    }
}
