use ark_bn254::G1Affine;
use ark_ec::AffineRepr;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::daa::{nym_gen, MemberSecretKey};
use crate::primitives::curve::encode_g1;
use crate::primitives::{sig_sign, sig_verify, SigningKey, VerifyKey};
use crate::wire::{Reader, WireError, Writer};
use crate::zkp::GENESIS_BASENAME;

const VERSION: u8 = 1;
const ATTESTATION_PREFIX: &[u8] = b"tt-genesis:";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenesisError {
    #[error("genesis tuple is malformed or its attestation does not verify")]
    Malformed,
    #[error(transparent)]
    Wire(#[from] WireError),
}

/// `(pk_V, nym_1, sig(sk_V, nym_1))`: one verified identity, anchored by its
/// pseudonym under the genesis basename.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenesisTuple {
    pub pk_v: VerifyKey,
    #[serde(with = "crate::serde_b64::g1")]
    pub nym1: G1Affine,
    #[serde(with = "crate::serde_b64::array")]
    pub attestation: [u8; 64],
}

fn attestation_message(nym1: &G1Affine) -> Vec<u8> {
    [ATTESTATION_PREFIX, &encode_g1(nym1)].concat()
}

pub fn genesis_nym(sk: &MemberSecretKey) -> G1Affine {
    nym_gen(sk, GENESIS_BASENAME)
}

/// Verifier side: signs the user's genesis pseudonym.
pub fn attest_genesis(sk_v: &SigningKey, nym1: &G1Affine) -> GenesisTuple {
    GenesisTuple {
        pk_v: sk_v.verify_key(),
        nym1: *nym1,
        attestation: sig_sign(sk_v, &attestation_message(nym1)),
    }
}

impl GenesisTuple {
    pub fn verify(&self) -> bool {
        !self.nym1.is_zero()
            && sig_verify(&self.pk_v, &attestation_message(&self.nym1), &self.attestation)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        Writer::new(VERSION)
            .bytes(&self.pk_v.0)
            .g1(&self.nym1)
            .bytes(&self.attestation)
            .finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, GenesisError> {
        let mut r = Reader::versioned(bytes, VERSION)?;
        let gb = GenesisTuple {
            pk_v: VerifyKey(r.array()?),
            nym1: r.g1_nonzero()?,
            attestation: r.array()?,
        };
        r.finish()?;
        Ok(gb)
    }
}

/// The verifier that vouched for the identity behind `gb`.
pub fn attribute(gb: &GenesisTuple) -> Result<VerifyKey, GenesisError> {
    if gb.verify() {
        Ok(gb.pk_v)
    } else {
        Err(GenesisError::Malformed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::sig_keygen;
    use rand::thread_rng;

    #[test]
    fn attribution_counts_and_tamper() {
        let mut rng = thread_rng();
        let v1 = sig_keygen(&mut rng);
        let v2 = sig_keygen(&mut rng);
        let tuples: Vec<_> = (0..5)
            .map(|i| {
                let nym1 = genesis_nym(&MemberSecretKey::random(&mut rng));
                let v = if i < 3 { &v1 } else { &v2 };
                attest_genesis(&v.signing_key, &nym1)
            })
            .collect();
        let from_v1 = tuples
            .iter()
            .filter(|gb| attribute(gb).unwrap() == v1.verify_key)
            .count();
        assert_eq!(from_v1, 3);

        let mut bad = tuples[0].clone();
        bad.attestation[0] ^= 1;
        assert_eq!(attribute(&bad), Err(GenesisError::Malformed));
        let mut moved = tuples[0].clone();
        moved.nym1 = tuples[1].nym1;
        assert_eq!(attribute(&moved), Err(GenesisError::Malformed));

        let gb = &tuples[4];
        assert_eq!(&GenesisTuple::from_bytes(&gb.to_bytes()).unwrap(), gb);
        let json = serde_json::to_string(gb).unwrap();
        assert_eq!(&serde_json::from_str::<GenesisTuple>(&json).unwrap(), gb);
    }
}
