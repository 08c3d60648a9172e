//! Schnorr proof of knowledge of `f` behind a join commitment `F = h1^f`.

use ark_ec::{AffineRepr, CurveGroup};
use rand::{CryptoRng, RngCore};

use super::{Crs, ZkError, JOIN_TAG};
use crate::daa::{IssuerPublicKey, JoinCommitment, MemberSecretKey};
use crate::primitives::curve::encode_g1;
use crate::primitives::{hash_to_scalar, Scalar, SecretScalar};
use crate::wire::{Reader, Writer};

const VERSION: u8 = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JoinProof {
    pub c: Scalar,
    pub s: Scalar,
}

impl JoinProof {
    pub fn to_bytes(&self) -> Vec<u8> {
        Writer::new(VERSION).scalar(&self.c).scalar(&self.s).finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ZkError> {
        let mut r = Reader::versioned(bytes, VERSION)?;
        let proof = JoinProof {
            c: r.scalar()?,
            s: r.scalar()?,
        };
        r.finish()?;
        Ok(proof)
    }
}

fn challenge(
    crs: &Crs,
    com: &JoinCommitment,
    pk: &IssuerPublicKey,
    t: &ark_bn254::G1Affine,
) -> Scalar {
    hash_to_scalar([
        JOIN_TAG,
        &encode_g1(&crs.g),
        pk.digest().as_bytes(),
        &com.to_bytes(),
        &encode_g1(t),
    ])
}

pub fn prove_join<R: RngCore + CryptoRng>(
    crs: &Crs,
    com: &JoinCommitment,
    pk: &IssuerPublicKey,
    sk: &MemberSecretKey,
    rng: &mut R,
) -> JoinProof {
    let k = *SecretScalar::random(rng).expose();
    let t = (pk.gpk1.h1 * k).into_affine();
    let c = challenge(crs, com, pk, &t);
    JoinProof {
        c,
        s: k + c * sk.expose(),
    }
}

pub fn verify_join(
    crs: &Crs,
    com: &JoinCommitment,
    pk: &IssuerPublicKey,
    proof: &JoinProof,
) -> bool {
    if com.f_point.is_zero() {
        return false;
    }
    let t = (pk.gpk1.h1 * proof.s - com.f_point * proof.c).into_affine();
    challenge(crs, com, pk, &t) == proof.c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::daa::{join, setup1, setup2};
    use crate::zkp::zk_setup;
    use rand::thread_rng;

    #[test]
    fn round_trip_and_binding() {
        let mut rng = thread_rng();
        let crs = zk_setup(128).unwrap();
        let gpk1 = setup1(128).unwrap();
        let (pk, _) = setup2(&gpk1, 1, &mut rng);
        let (other_pk, _) = setup2(&gpk1, 1, &mut rng);
        let sk = MemberSecretKey::random(&mut rng);
        let com = join(&gpk1, &sk, b"n", &mut rng).unwrap();
        let proof = prove_join(&crs, &com, &pk, &sk, &mut rng);
        assert!(verify_join(&crs, &com, &pk, &proof));
        assert!(!verify_join(&crs, &com, &other_pk, &proof));

        let mut mutated = com.clone();
        mutated.f_point = (mutated.f_point + gpk1.g1).into_affine();
        assert!(!verify_join(&crs, &mutated, &pk, &proof));

        let wrong_key = prove_join(&crs, &com, &pk, &MemberSecretKey::random(&mut rng), &mut rng);
        assert!(!verify_join(&crs, &com, &pk, &wrong_key));
        assert_eq!(JoinProof::from_bytes(&proof.to_bytes()).unwrap(), proof);
    }
}
