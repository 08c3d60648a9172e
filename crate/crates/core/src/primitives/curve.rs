//! BN254 group types and their canonical byte encodings.
//!
//! Scalars are 32-byte big-endian integers below the group order. Points use
//! the compressed big-endian layout common to BN254 tooling: the x coordinate
//! in big-endian with the two top bits of the first byte as flags
//! (`0b01` identity, `0b10` lexicographically smallest y, `0b11` largest y).
//! G2 coordinates are written imaginary part first.

use std::cmp::Ordering;
use std::fmt;

use ark_bn254::{Fq, Fq2, Fr, G1Affine, G1Projective, G2Affine, G2Projective};
use ark_ec::{AffineRepr, CurveGroup};
use ark_ff::{BigInteger, BigInteger256, Field, PrimeField, UniformRand, Zero};
use rand::{CryptoRng, RngCore};
use thiserror::Error;

pub type Scalar = Fr;
pub type G1 = G1Projective;
pub type G2 = G2Projective;

pub const SCALAR_LEN: usize = 32;
pub const G1_LEN: usize = 32;
pub const G2_LEN: usize = 64;

const FLAG_MASK: u8 = 0b1100_0000;
const FLAG_INFINITY: u8 = 0b0100_0000;
const FLAG_SMALLEST: u8 = 0b1000_0000;
const FLAG_LARGEST: u8 = 0b1100_0000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodingError {
    #[error("expected {expected} bytes, got {actual}")]
    Length { expected: usize, actual: usize },
    #[error("integer is not reduced modulo the field order")]
    NonCanonical,
    #[error("point is not on the curve")]
    NotOnCurve,
    #[error("point is not in the prime-order subgroup")]
    NotInSubgroup,
    #[error("invalid flag bits")]
    Flags,
    #[error("identity element not allowed here")]
    Identity,
    #[error("zero scalar not allowed here")]
    ZeroScalar,
}

fn limbs_from_be(bytes: &[u8; 32]) -> BigInteger256 {
    let mut limbs = [0u64; 4];
    for (i, chunk) in bytes.chunks_exact(8).enumerate() {
        limbs[3 - i] = u64::from_be_bytes(chunk.try_into().expect("8-byte chunk"));
    }
    BigInteger256::new(limbs)
}

fn to_be_32(big: impl BigInteger) -> [u8; 32] {
    let bytes = big.to_bytes_be();
    let mut out = [0u8; 32];
    out[32 - bytes.len()..].copy_from_slice(&bytes);
    out
}

fn check_len(bytes: &[u8], expected: usize) -> Result<(), EncodingError> {
    if bytes.len() != expected {
        return Err(EncodingError::Length {
            expected,
            actual: bytes.len(),
        });
    }
    Ok(())
}

pub fn encode_scalar(s: &Scalar) -> [u8; SCALAR_LEN] {
    to_be_32(s.into_bigint())
}

pub fn decode_scalar(bytes: &[u8]) -> Result<Scalar, EncodingError> {
    check_len(bytes, SCALAR_LEN)?;
    let arr: &[u8; 32] = bytes.try_into().expect("length checked");
    Scalar::from_bigint(limbs_from_be(arr)).ok_or(EncodingError::NonCanonical)
}

fn encode_fq(x: &Fq) -> [u8; 32] {
    to_be_32(x.into_bigint())
}

fn decode_fq(bytes: &[u8; 32]) -> Result<Fq, EncodingError> {
    Fq::from_bigint(limbs_from_be(bytes)).ok_or(EncodingError::NonCanonical)
}

fn fq_is_largest(y: &Fq) -> bool {
    *y > -*y
}

fn fq2_is_largest(y: &Fq2) -> bool {
    if y.c1.is_zero() {
        fq_is_largest(&y.c0)
    } else {
        fq_is_largest(&y.c1)
    }
}

pub fn encode_g1(p: &G1Affine) -> [u8; G1_LEN] {
    let mut out = [0u8; G1_LEN];
    if p.is_zero() {
        out[0] = FLAG_INFINITY;
        return out;
    }
    out = encode_fq(&p.x);
    out[0] |= if fq_is_largest(&p.y) {
        FLAG_LARGEST
    } else {
        FLAG_SMALLEST
    };
    out
}

pub fn decode_g1(bytes: &[u8]) -> Result<G1Affine, EncodingError> {
    check_len(bytes, G1_LEN)?;
    let mut x_bytes: [u8; 32] = bytes.try_into().expect("length checked");
    let flags = x_bytes[0] & FLAG_MASK;
    x_bytes[0] &= !FLAG_MASK;
    match flags {
        FLAG_INFINITY => {
            if x_bytes.iter().any(|b| *b != 0) {
                return Err(EncodingError::Flags);
            }
            Ok(G1Affine::zero())
        }
        FLAG_SMALLEST | FLAG_LARGEST => {
            let x = decode_fq(&x_bytes)?;
            let rhs = x.square() * x + Fq::from(3u64);
            let mut y = rhs.sqrt().ok_or(EncodingError::NotOnCurve)?;
            if fq_is_largest(&y) != (flags == FLAG_LARGEST) {
                y = -y;
            }
            let p = G1Affine::new_unchecked(x, y);
            // BN254 G1 has cofactor 1, so on-curve implies in-subgroup.
            debug_assert!(p.is_on_curve() && p.is_in_correct_subgroup_assuming_on_curve());
            Ok(p)
        }
        _ => Err(EncodingError::Flags),
    }
}

/// Decodes a G1 point that will be used as a base or pseudonym.
pub fn decode_g1_nonzero(bytes: &[u8]) -> Result<G1Affine, EncodingError> {
    let p = decode_g1(bytes)?;
    if p.is_zero() {
        return Err(EncodingError::Identity);
    }
    Ok(p)
}

pub fn encode_g2(p: &G2Affine) -> [u8; G2_LEN] {
    let mut out = [0u8; G2_LEN];
    if p.is_zero() {
        out[0] = FLAG_INFINITY;
        return out;
    }
    out[..32].copy_from_slice(&encode_fq(&p.x.c1));
    out[32..].copy_from_slice(&encode_fq(&p.x.c0));
    out[0] |= if fq2_is_largest(&p.y) {
        FLAG_LARGEST
    } else {
        FLAG_SMALLEST
    };
    out
}

pub fn decode_g2(bytes: &[u8]) -> Result<G2Affine, EncodingError> {
    check_len(bytes, G2_LEN)?;
    let mut hi: [u8; 32] = bytes[..32].try_into().expect("length checked");
    let lo: [u8; 32] = bytes[32..].try_into().expect("length checked");
    let flags = hi[0] & FLAG_MASK;
    hi[0] &= !FLAG_MASK;
    match flags {
        FLAG_INFINITY => {
            if hi.iter().chain(lo.iter()).any(|b| *b != 0) {
                return Err(EncodingError::Flags);
            }
            Ok(G2Affine::zero())
        }
        FLAG_SMALLEST | FLAG_LARGEST => {
            let x = Fq2::new(decode_fq(&lo)?, decode_fq(&hi)?);
            let b = <ark_bn254::g2::Config as ark_ec::short_weierstrass::SWCurveConfig>::COEFF_B;
            let rhs = x.square() * x + b;
            let mut y = rhs.sqrt().ok_or(EncodingError::NotOnCurve)?;
            if fq2_is_largest(&y) != (flags == FLAG_LARGEST) {
                y = -y;
            }
            let p = G2Affine::new_unchecked(x, y);
            if !p.is_in_correct_subgroup_assuming_on_curve() {
                return Err(EncodingError::NotInSubgroup);
            }
            Ok(p)
        }
        _ => Err(EncodingError::Flags),
    }
}

/// A nonzero scalar used as secret key material.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct SecretScalar(Scalar);

impl SecretScalar {
    pub fn new(s: Scalar) -> Result<Self, EncodingError> {
        if s.is_zero() {
            return Err(EncodingError::ZeroScalar);
        }
        Ok(SecretScalar(s))
    }

    pub fn random<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        loop {
            let s = Scalar::rand(rng);
            if !s.is_zero() {
                return SecretScalar(s);
            }
        }
    }

    pub fn expose(&self) -> &Scalar {
        &self.0
    }

    pub fn to_bytes(&self) -> [u8; SCALAR_LEN] {
        encode_scalar(&self.0)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, EncodingError> {
        Self::new(decode_scalar(bytes)?)
    }
}

impl fmt::Debug for SecretScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SecretScalar(..)")
    }
}

/// Random scalar, possibly zero.
pub fn random_scalar<R: RngCore + CryptoRng>(rng: &mut R) -> Scalar {
    Scalar::rand(rng)
}

pub fn g1_generator() -> G1Affine {
    G1Affine::generator()
}

pub fn g2_generator() -> G2Affine {
    G2Affine::generator()
}

/// Normalizes and encodes a projective G1 point.
pub fn g1_bytes(p: &G1) -> [u8; G1_LEN] {
    encode_g1(&p.into_affine())
}

/// Canonical total order on G1 points, by encoding.
pub fn cmp_g1(a: &G1Affine, b: &G1Affine) -> Ordering {
    encode_g1(a).cmp(&encode_g1(b))
}
