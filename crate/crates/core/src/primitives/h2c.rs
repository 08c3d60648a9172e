//! Hash-to-curve for BN254 G1.
//!
//! `expand_message_xmd` with SHA-256 followed by the Shallue–van de Woestijne
//! map (Z = 1), in the random-oracle variant: two field elements are mapped
//! and the images added. G1 has cofactor 1, so no clearing step is needed.

use std::sync::OnceLock;

use ark_bn254::{Fq, G1Affine, G1Projective};
use ark_ec::CurveGroup;
use ark_ff::{BigInteger, Field, One, PrimeField, Zero};
use sha2::{Digest as _, Sha256};

pub const H2G1_DST: &[u8] = b"TT-H2G1-v1";

const FIELD_ELEMENT_BYTES: usize = 48;

/// `expand_message_xmd` instantiated with SHA-256.
pub fn expand_message_xmd(msg: &[u8], dst: &[u8], len: usize) -> Vec<u8> {
    const B_IN_BYTES: usize = 32;
    const R_IN_BYTES: usize = 64;
    assert!(dst.len() <= 255, "dst too long");
    let ell = len.div_ceil(B_IN_BYTES);
    assert!(ell <= 255 && len <= 0xffff, "requested output too long");

    let dst_len = [dst.len() as u8];
    let b0 = Sha256::new()
        .chain_update([0u8; R_IN_BYTES])
        .chain_update(msg)
        .chain_update((len as u16).to_be_bytes())
        .chain_update([0u8])
        .chain_update(dst)
        .chain_update(dst_len)
        .finalize();
    let mut bi = Sha256::new()
        .chain_update(b0)
        .chain_update([1u8])
        .chain_update(dst)
        .chain_update(dst_len)
        .finalize();
    let mut out = Vec::with_capacity(ell * B_IN_BYTES);
    out.extend_from_slice(&bi);
    for i in 2..=ell {
        let mixed: Vec<u8> = b0.iter().zip(bi.iter()).map(|(a, b)| a ^ b).collect();
        bi = Sha256::new()
            .chain_update(mixed)
            .chain_update([i as u8])
            .chain_update(dst)
            .chain_update(dst_len)
            .finalize();
        out.extend_from_slice(&bi);
    }
    out.truncate(len);
    out
}

fn sgn0(x: &Fq) -> bool {
    x.into_bigint().is_odd()
}

fn is_square(x: &Fq) -> bool {
    x.legendre().is_qr() || x.is_zero()
}

struct SvdwConstants {
    c1: Fq,
    c2: Fq,
    c3: Fq,
    c4: Fq,
}

const Z: u64 = 1;

fn curve_rhs(x: &Fq) -> Fq {
    x.square() * x + Fq::from(3u64)
}

fn constants() -> &'static SvdwConstants {
    static CONSTANTS: OnceLock<SvdwConstants> = OnceLock::new();
    CONSTANTS.get_or_init(|| {
        let z = Fq::from(Z);
        let gz = curve_rhs(&z);
        let three_z2 = Fq::from(3u64) * z.square();
        let c1 = gz;
        let c2 = -z * Fq::from(2u64).inverse().expect("2 is invertible");
        let mut c3 = (-gz * three_z2).sqrt().expect("-g(Z)(3Z^2) is square for BN254");
        if sgn0(&c3) {
            c3 = -c3;
        }
        let c4 = -Fq::from(4u64) * gz * three_z2.inverse().expect("nonzero");
        SvdwConstants { c1, c2, c3, c4 }
    })
}

/// Shallue–van de Woestijne map for y^2 = x^3 + 3.
pub fn map_to_curve_svdw(u: &Fq) -> G1Affine {
    let k = constants();
    let one = Fq::one();
    let mut tv1 = u.square() * k.c1;
    let tv2 = one + tv1;
    tv1 = one - tv1;
    let tv3 = (tv1 * tv2).inverse().unwrap_or(Fq::zero());
    let tv4 = *u * tv1 * tv3 * k.c3;
    let x1 = k.c2 - tv4;
    let e1 = is_square(&curve_rhs(&x1));
    let x2 = k.c2 + tv4;
    let e2 = is_square(&curve_rhs(&x2)) && !e1;
    let x3 = (tv2.square() * tv3).square() * k.c4 + Fq::from(Z);
    let x = if e1 {
        x1
    } else if e2 {
        x2
    } else {
        x3
    };
    let mut y = curve_rhs(&x).sqrt().expect("one of x1, x2, x3 is a valid abscissa");
    if sgn0(u) != sgn0(&y) {
        y = -y;
    }
    G1Affine::new_unchecked(x, y)
}

fn hash_to_field(msg: &[u8], dst: &[u8]) -> [Fq; 2] {
    let uniform = expand_message_xmd(msg, dst, 2 * FIELD_ELEMENT_BYTES);
    let u0 = Fq::from_be_bytes_mod_order(&uniform[..FIELD_ELEMENT_BYTES]);
    let u1 = Fq::from_be_bytes_mod_order(&uniform[FIELD_ELEMENT_BYTES..]);
    [u0, u1]
}

/// Hashes a label to a G1 point under the given domain-separation tag.
pub fn hash_to_g1_with_dst(msg: &[u8], dst: &[u8]) -> G1Affine {
    let [u0, u1] = hash_to_field(msg, dst);
    let q: G1Projective = map_to_curve_svdw(&u0) + map_to_curve_svdw(&u1);
    q.into_affine()
}

/// Hashes a label to a G1 point.
pub fn hash_to_g1(label: &[u8]) -> G1Affine {
    hash_to_g1_with_dst(label, H2G1_DST)
}
