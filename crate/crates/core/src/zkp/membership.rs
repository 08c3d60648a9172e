//! Proof that a pseudonym stems from the key behind one of a list of genesis
//! pseudonyms `nym_1 = h("1")^sk`.
//!
//! The prover commits `c = g^sk * g_hat^r`. Since `g = h("1")`, the shifted
//! commitment `c / nym_1` of the prover's own genesis entry is `g_hat^r`, a
//! commitment to zero, which the one-of-many proof shows. A Schnorr equality
//! component ties the committed `sk` to `nym = h(dom)^sk`, and both parts share
//! a transcript that includes `nym` and `dom`.

use ark_bn254::G1Affine;
use ark_ec::CurveGroup;
use rand::{CryptoRng, RngCore};

use super::one_of_many::{prove_one_of_many, verify_one_of_many, OneOfManyProof};
use super::{pedersen_commit, Crs, PedersenCommitment, ZkError};
use crate::daa::MemberSecretKey;
use crate::primitives::curve::encode_g1;
use crate::primitives::{hash, hash_to_g1, hash_to_scalar, random_scalar, Scalar};
use crate::wire::{Reader, Writer};

/// Basename of the genesis pseudonym.
pub const GENESIS_BASENAME: &[u8] = b"1";

const CONTEXT_TAG: &[u8] = b"TT-GB-v1";
const EQ_TAG: &[u8] = b"TT-GB-EQ-v1";
const VERSION: u8 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipProof {
    pub commitment: PedersenCommitment,
    pub pi: OneOfManyProof,
    pub e: Scalar,
    pub s_sk: Scalar,
    pub s_r: Scalar,
}

impl MembershipProof {
    pub fn to_bytes(&self) -> Vec<u8> {
        Writer::new(VERSION)
            .g1(&self.commitment.point)
            .bytes(&self.pi.to_bytes())
            .scalar(&self.e)
            .scalar(&self.s_sk)
            .scalar(&self.s_r)
            .finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ZkError> {
        let mut r = Reader::versioned(bytes, VERSION)?;
        let proof = MembershipProof {
            commitment: PedersenCommitment { point: r.g1()? },
            pi: OneOfManyProof::from_bytes(r.bytes()?)?,
            e: r.scalar()?,
            s_sk: r.scalar()?,
            s_r: r.scalar()?,
        };
        r.finish()?;
        Ok(proof)
    }
}

fn context(nym: &G1Affine, dom: &[u8], c: &G1Affine) -> [u8; 32] {
    hash([CONTEXT_TAG, &encode_g1(nym), dom, &encode_g1(c)]).0
}

fn shifted(c: &G1Affine, genesis: &[G1Affine]) -> Vec<G1Affine> {
    let shifted: Vec<_> = genesis.iter().map(|n1| *c - n1).collect();
    crate::primitives::G1::normalize_batch(&shifted)
}

fn eq_challenge(ctx: &[u8], pi: &OneOfManyProof, t1: &G1Affine, t2: &G1Affine) -> Scalar {
    hash_to_scalar([EQ_TAG, ctx, &pi.to_bytes(), &encode_g1(t1), &encode_g1(t2)])
}

pub fn prove_membership<R: RngCore + CryptoRng>(
    crs: &Crs,
    nym: &G1Affine,
    dom: &[u8],
    genesis: &[G1Affine],
    sk: &MemberSecretKey,
    rng: &mut R,
) -> Result<MembershipProof, ZkError> {
    let sk = *sk.expose();
    let own = (crs.g * sk).into_affine();
    let index = genesis
        .iter()
        .position(|n1| *n1 == own)
        .ok_or(ZkError::ProverNotInList)?;
    let r = random_scalar(rng);
    let commitment = pedersen_commit(crs, &sk, &r);
    let ctx = context(nym, dom, &commitment.point);
    let pi = prove_one_of_many(
        crs,
        &shifted(&commitment.point, genesis),
        index,
        &r,
        &ctx,
        rng,
    )?;

    let base = hash_to_g1(dom);
    let (k_sk, k_r) = (random_scalar(rng), random_scalar(rng));
    let t1 = pedersen_commit(crs, &k_sk, &k_r).point;
    let t2 = (base * k_sk).into_affine();
    let e = eq_challenge(&ctx, &pi, &t1, &t2);
    Ok(MembershipProof {
        commitment,
        pi,
        e,
        s_sk: k_sk + e * sk,
        s_r: k_r + e * r,
    })
}

pub fn verify_membership(
    crs: &Crs,
    nym: &G1Affine,
    dom: &[u8],
    genesis: &[G1Affine],
    proof: &MembershipProof,
) -> bool {
    let c = proof.commitment.point;
    let ctx = context(nym, dom, &c);
    let base = hash_to_g1(dom);
    let t1 = (pedersen_commit(crs, &proof.s_sk, &proof.s_r).point - c * proof.e).into_affine();
    let t2 = (base * proof.s_sk - *nym * proof.e).into_affine();
    if eq_challenge(&ctx, &proof.pi, &t1, &t2) != proof.e {
        return false;
    }
    verify_one_of_many(crs, &shifted(&c, genesis), &proof.pi, &ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::daa::nym_gen;
    use crate::zkp::zk_setup;
    use rand::thread_rng;

    #[test]
    fn genesis_nym_is_commitment_without_blinding() {
        let crs = zk_setup(128).unwrap();
        let sk = MemberSecretKey::random(&mut thread_rng());
        assert_eq!(
            nym_gen(&sk, GENESIS_BASENAME),
            pedersen_commit(&crs, sk.expose(), &Scalar::from(0u64)).point
        );
    }

    #[test]
    fn honest_member_of_four() {
        let crs = zk_setup(128).unwrap();
        let mut rng = thread_rng();
        let keys: Vec<_> = (0..4).map(|_| MemberSecretKey::random(&mut rng)).collect();
        let genesis: Vec<_> = keys.iter().map(|k| nym_gen(k, GENESIS_BASENAME)).collect();
        let nym = nym_gen(&keys[2], b"d:2024-01-01:1");
        let proof =
            prove_membership(&crs, &nym, b"d:2024-01-01:1", &genesis, &keys[2], &mut rng).unwrap();
        assert!(verify_membership(&crs, &nym, b"d:2024-01-01:1", &genesis, &proof));
        let other = nym_gen(&keys[1], b"d:2024-01-01:1");
        assert!(!verify_membership(&crs, &other, b"d:2024-01-01:1", &genesis, &proof));
        assert!(!verify_membership(&crs, &nym, b"d:2024-01-01:2", &genesis, &proof));
        assert!(!verify_membership(&crs, &nym, b"d:2024-01-01:1", &genesis[..3], &proof));
        let decoded = MembershipProof::from_bytes(&proof.to_bytes()).unwrap();
        assert_eq!(decoded, proof);
    }

    #[test]
    fn outsider_cannot_prove() {
        let crs = zk_setup(128).unwrap();
        let mut rng = thread_rng();
        let genesis: Vec<_> = (0..3)
            .map(|_| nym_gen(&MemberSecretKey::random(&mut rng), GENESIS_BASENAME))
            .collect();
        let outsider = MemberSecretKey::random(&mut rng);
        let nym = nym_gen(&outsider, b"d");
        assert_eq!(
            prove_membership(&crs, &nym, b"d", &genesis, &outsider, &mut rng),
            Err(ZkError::ProverNotInList)
        );
    }

    #[test]
    fn committed_key_must_match_nym_key() {
        // Brute force over a three-user universe: a proof made with key i for the
        // nym of key j verifies only when i == j.
        let crs = zk_setup(128).unwrap();
        let mut rng = thread_rng();
        let keys: Vec<_> = (0..3).map(|_| MemberSecretKey::random(&mut rng)).collect();
        let genesis: Vec<_> = keys.iter().map(|k| nym_gen(k, GENESIS_BASENAME)).collect();
        for (i, prover) in keys.iter().enumerate() {
            for (j, owner) in keys.iter().enumerate() {
                let nym = nym_gen(owner, b"dom");
                let proof = prove_membership(&crs, &nym, b"dom", &genesis, prover, &mut rng).unwrap();
                assert_eq!(verify_membership(&crs, &nym, b"dom", &genesis, &proof), i == j);
            }
        }
    }
}
