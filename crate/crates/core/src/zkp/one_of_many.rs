//! Binary one-of-many proof: among `n` Pedersen commitments, one opens to zero.
//!
//! Groth–Kohlweiss with the Bootle et al. compression: the bit vector, its
//! masks and the two cross terms are each committed in a single vector
//! commitment, so a proof is `4 + m` group elements and `m + 3` scalars for
//! `m = ceil(log2 n)`.
//!
//! Lists whose length is not a power of two are padded with fixed points
//! `h("TT-GK-v1:pad:<i>")`. Nobody knows their discrete logarithm to the
//! blinding base, so they act as commitments to unknown nonzero values.

use std::sync::RwLock;

use ark_bn254::G1Affine;
use ark_ec::{CurveGroup, VariableBaseMSM};
use ark_ff::{Field, One, Zero};
use rand::{CryptoRng, RngCore};

use super::{Crs, ZkError, GK_TAG};
use crate::primitives::curve::encode_g1;
use crate::primitives::{hash_to_g1, hash_to_scalar, random_scalar, Scalar, G1};
use crate::wire::{Reader, WireError, Writer};

/// Largest supported `log2` of the list size.
pub const MAX_LOG_N: usize = 20;

const VERSION: u8 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneOfManyProof {
    /// Unpadded list length.
    pub n: u32,
    pub a: G1Affine,
    pub b: G1Affine,
    pub c: G1Affine,
    pub d: G1Affine,
    pub g_k: Vec<G1Affine>,
    pub f: Vec<Scalar>,
    pub z_a: Scalar,
    pub z_c: Scalar,
    pub z_d: Scalar,
}

impl OneOfManyProof {
    pub fn log_n(&self) -> usize {
        self.f.len()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new(VERSION);
        w.u32(self.n).u32(self.f.len() as u32);
        w.g1(&self.a).g1(&self.b).g1(&self.c).g1(&self.d);
        for p in &self.g_k {
            w.g1(p);
        }
        for s in &self.f {
            w.scalar(s);
        }
        w.scalar(&self.z_a).scalar(&self.z_c).scalar(&self.z_d);
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ZkError> {
        let mut r = Reader::versioned(bytes, VERSION)?;
        let n = r.u32()?;
        let m = r.u32()? as usize;
        if m == 0 || m > MAX_LOG_N {
            return Err(WireError::Invalid("proof depth out of range").into());
        }
        let (a, b, c, d) = (r.g1()?, r.g1()?, r.g1()?, r.g1()?);
        let g_k = (0..m).map(|_| r.g1()).collect::<Result<Vec<_>, _>>()?;
        let f = (0..m).map(|_| r.scalar()).collect::<Result<Vec<_>, _>>()?;
        let proof = OneOfManyProof {
            n,
            a,
            b,
            c,
            d,
            g_k,
            f,
            z_a: r.scalar()?,
            z_c: r.scalar()?,
            z_d: r.scalar()?,
        };
        r.finish()?;
        Ok(proof)
    }
}

fn log_n(n: usize) -> Result<usize, ZkError> {
    if n == 0 {
        return Err(ZkError::EmptyList);
    }
    let m = (usize::BITS - (n - 1).leading_zeros()).max(1) as usize;
    if m > MAX_LOG_N {
        return Err(ZkError::ListTooLarge(n));
    }
    Ok(m)
}

fn pad_points(count: usize) -> Vec<G1Affine> {
    static PADS: RwLock<Vec<G1Affine>> = RwLock::new(Vec::new());
    {
        let pads = PADS.read().unwrap_or_else(|e| e.into_inner());
        if pads.len() >= count {
            return pads[..count].to_vec();
        }
    }
    let mut pads = PADS.write().unwrap_or_else(|e| e.into_inner());
    while pads.len() < count {
        let i = pads.len();
        pads.push(hash_to_g1(format!("TT-GK-v1:pad:{i}").as_bytes()));
    }
    pads[..count].to_vec()
}

fn padded(commitments: &[G1Affine], m: usize) -> Vec<G1Affine> {
    let mut out = commitments.to_vec();
    out.extend(pad_points((1 << m) - commitments.len()));
    out
}

#[allow(clippy::too_many_arguments)]
fn challenge(
    context: &[u8],
    n: u32,
    padded: &[G1Affine],
    a: &G1Affine,
    b: &G1Affine,
    c: &G1Affine,
    d: &G1Affine,
    g_k: &[G1Affine],
) -> Scalar {
    let mut parts: Vec<Vec<u8>> = Vec::with_capacity(padded.len() + g_k.len() + 7);
    parts.push(GK_TAG.to_vec());
    parts.push(context.to_vec());
    parts.push(n.to_be_bytes().to_vec());
    parts.extend(padded.iter().map(|p| encode_g1(p).to_vec()));
    for p in [a, b, c, d] {
        parts.push(encode_g1(p).to_vec());
    }
    parts.extend(g_k.iter().map(|p| encode_g1(p).to_vec()));
    hash_to_scalar(parts)
}

fn poly_mul_linear(p: &[Scalar], c0: Scalar, c1: Scalar) -> Vec<Scalar> {
    let mut out = vec![Scalar::zero(); p.len() + 1];
    for (k, coeff) in p.iter().enumerate() {
        out[k] += *coeff * c0;
        out[k + 1] += *coeff * c1;
    }
    out
}

fn msm(bases: &[G1Affine], scalars: &[Scalar]) -> G1 {
    G1::msm(bases, scalars).expect("equal lengths")
}

/// Proves that `commitments[index] = g_hat^r`, binding `context` into the challenge.
pub fn prove_one_of_many<R: RngCore + CryptoRng>(
    crs: &Crs,
    commitments: &[G1Affine],
    index: usize,
    r: &Scalar,
    context: &[u8],
    rng: &mut R,
) -> Result<OneOfManyProof, ZkError> {
    let m = log_n(commitments.len())?;
    if index >= commitments.len() {
        return Err(ZkError::IndexOutOfRange {
            index,
            len: commitments.len(),
        });
    }
    if commitments[index] != (crs.g_hat * r).into_affine() {
        return Err(ZkError::NotAnOpening);
    }
    let cs = padded(commitments, m);
    let one = Scalar::one();
    let bits: Vec<Scalar> = (0..m)
        .map(|j| if (index >> j) & 1 == 1 { one } else { Scalar::zero() })
        .collect();
    let masks: Vec<Scalar> = (0..m).map(|_| random_scalar(rng)).collect();
    let [r_a, r_b, r_c, r_d] = [(); 4].map(|_| random_scalar(rng));

    let cross: Vec<Scalar> = bits
        .iter()
        .zip(&masks)
        .map(|(l, a)| *a * (one - *l - *l))
        .collect();
    let neg_sq: Vec<Scalar> = masks.iter().map(|a| -a.square()).collect();
    let b = crs.vector_commit(&bits, &r_b).into_affine();
    let a = crs.vector_commit(&masks, &r_a).into_affine();
    let c = crs.vector_commit(&cross, &r_c).into_affine();
    let d = crs.vector_commit(&neg_sq, &r_d).into_affine();

    // p_i(X) = prod_j f_{j, i_j}(X) with f_{j,1} = l_j X + a_j and f_{j,0} = (1 - l_j) X - a_j.
    let mut polys: Vec<Vec<Scalar>> = vec![vec![one]];
    for j in 0..m {
        let half = polys.len();
        let mut next = vec![Vec::new(); 2 * half];
        for (i, p) in polys.iter().enumerate() {
            next[i] = poly_mul_linear(p, -masks[j], one - bits[j]);
            next[i + half] = poly_mul_linear(p, masks[j], bits[j]);
        }
        polys = next;
    }

    let rhos: Vec<Scalar> = (0..m).map(|_| random_scalar(rng)).collect();
    let g_k: Vec<G1Affine> = (0..m)
        .map(|k| {
            let coeffs: Vec<Scalar> = polys.iter().map(|p| p[k]).collect();
            (msm(&cs, &coeffs) + crs.g_hat * rhos[k]).into_affine()
        })
        .collect();

    let n = commitments.len() as u32;
    let x = challenge(context, n, &cs, &a, &b, &c, &d, &g_k);
    let f = bits.iter().zip(&masks).map(|(l, a)| *l * x + a).collect();
    let mut z_d = *r * x.pow([m as u64]);
    let mut x_pow = one;
    for rho in &rhos {
        z_d -= *rho * x_pow;
        x_pow *= x;
    }
    Ok(OneOfManyProof {
        n,
        a,
        b,
        c,
        d,
        g_k,
        f,
        z_a: r_b * x + r_a,
        z_c: r_c * x + r_d,
        z_d,
    })
}

fn shape_ok(commitments: &[G1Affine], proof: &OneOfManyProof) -> Option<usize> {
    let m = log_n(commitments.len()).ok()?;
    (proof.n as usize == commitments.len() && proof.f.len() == m && proof.g_k.len() == m)
        .then_some(m)
}

fn check(crs: &Crs, cs: &[G1Affine], proof: &OneOfManyProof, x: Scalar) -> bool {
    let m = proof.f.len();
    let lhs_ab = proof.b * x + proof.a - crs.vector_commit(&proof.f, &proof.z_a);
    if !lhs_ab.is_zero() {
        return false;
    }
    let quad: Vec<Scalar> = proof.f.iter().map(|f| *f * (x - f)).collect();
    let lhs_cd = proof.c * x + proof.d - crs.vector_commit(&quad, &proof.z_c);
    if !lhs_cd.is_zero() {
        return false;
    }

    let mut coeffs = vec![Scalar::one()];
    for f in &proof.f {
        let half = coeffs.len();
        let mut next = vec![Scalar::zero(); 2 * half];
        for (i, e) in coeffs.iter().enumerate() {
            next[i] = *e * (x - f);
            next[i + half] = *e * f;
        }
        coeffs = next;
    }
    let mut bases = cs.to_vec();
    bases.extend_from_slice(&proof.g_k);
    bases.push(crs.g_hat);
    let mut x_pow = Scalar::one();
    for _ in 0..m {
        coeffs.push(-x_pow);
        x_pow *= x;
    }
    coeffs.push(-proof.z_d);
    msm(&bases, &coeffs).is_zero()
}

pub fn verify_one_of_many(
    crs: &Crs,
    commitments: &[G1Affine],
    proof: &OneOfManyProof,
    context: &[u8],
) -> bool {
    let Some(m) = shape_ok(commitments, proof) else {
        return false;
    };
    let cs = padded(commitments, m);
    let x = challenge(
        context, proof.n, &cs, &proof.a, &proof.b, &proof.c, &proof.d, &proof.g_k,
    );
    check(crs, &cs, proof, x)
}

/// Interactive verifier for an externally chosen challenge `x`.
pub fn verify_one_of_many_with_challenge(
    crs: &Crs,
    commitments: &[G1Affine],
    proof: &OneOfManyProof,
    x: &Scalar,
) -> bool {
    let Some(m) = shape_ok(commitments, proof) else {
        return false;
    };
    check(crs, &padded(commitments, m), proof, *x)
}

/// Honest-verifier simulator: an accepting transcript for challenge `x`
/// produced without any opening.
pub fn simulate_one_of_many<R: RngCore + CryptoRng>(
    crs: &Crs,
    commitments: &[G1Affine],
    x: &Scalar,
    rng: &mut R,
) -> Result<OneOfManyProof, ZkError> {
    let m = log_n(commitments.len())?;
    let cs = padded(commitments, m);
    let x = *x;
    let f: Vec<Scalar> = (0..m).map(|_| random_scalar(rng)).collect();
    let [z_a, z_c, z_d] = [(); 3].map(|_| random_scalar(rng));

    let b = (crs.g * random_scalar(rng) + crs.g_hat * random_scalar(rng)).into_affine();
    let a = (crs.vector_commit(&f, &z_a) - b * x).into_affine();
    let c = (crs.g * random_scalar(rng) + crs.g_hat * random_scalar(rng)).into_affine();
    let quad: Vec<Scalar> = f.iter().map(|fj| *fj * (x - fj)).collect();
    let d = (crs.vector_commit(&quad, &z_c) - c * x).into_affine();

    let mut g_k: Vec<G1Affine> = (0..m)
        .map(|_| (crs.g_hat * random_scalar(rng)).into_affine())
        .collect();
    let mut coeffs = vec![Scalar::one()];
    for fj in &f {
        let half = coeffs.len();
        let mut next = vec![Scalar::zero(); 2 * half];
        for (i, e) in coeffs.iter().enumerate() {
            next[i] = *e * (x - fj);
            next[i + half] = *e * fj;
        }
        coeffs = next;
    }
    let mut g0 = msm(&cs, &coeffs) - crs.g_hat * z_d;
    let mut x_pow = x;
    for gk in &g_k[1..] {
        g0 -= *gk * x_pow;
        x_pow *= x;
    }
    g_k[0] = g0.into_affine();
    Ok(OneOfManyProof {
        n: commitments.len() as u32,
        a,
        b,
        c,
        d,
        g_k,
        f,
        z_a,
        z_c,
        z_d,
    })
}
