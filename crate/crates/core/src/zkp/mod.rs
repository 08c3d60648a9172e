//! Non-interactive proofs: the join proof of knowledge, Pedersen commitments,
//! and the one-of-many membership proof over genesis pseudonyms.

mod join;
mod membership;
mod one_of_many;

use ark_bn254::G1Affine;
use ark_ec::{AffineRepr, CurveGroup};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::primitives::{hash_to_g1, Scalar};
use crate::wire::{Reader, WireError, Writer};

pub use join::{prove_join, verify_join, JoinProof};
pub use membership::{
    prove_membership, verify_membership, MembershipProof, GENESIS_BASENAME,
};
pub use one_of_many::{
    prove_one_of_many, simulate_one_of_many, verify_one_of_many, verify_one_of_many_with_challenge,
    OneOfManyProof, MAX_LOG_N,
};

pub const ZK_SECURITY_LEVEL: u32 = 128;
pub const GK_TAG: &[u8] = b"TT-GK-v1";
pub const JOIN_TAG: &[u8] = b"TT-JOIN-v1";

const CRS_VERSION: u8 = 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ZkError {
    #[error("unsupported security level {0}")]
    UnsupportedSecurityLevel(u32),
    #[error("commitment list is empty")]
    EmptyList,
    #[error("commitment list of {0} entries exceeds the supported size")]
    ListTooLarge(usize),
    #[error("index {index} out of range for {len} commitments")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("commitment at the given index does not open to zero")]
    NotAnOpening,
    #[error("prover key matches no genesis pseudonym")]
    ProverNotInList,
    #[error(transparent)]
    Wire(#[from] WireError),
}

/// Common reference string; every base is derived by hashing to the curve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crs {
    /// Value base, equal to the genesis basename point `h("1")`.
    pub g: G1Affine,
    /// Blinding base `h("2")`.
    pub g_hat: G1Affine,
    /// Vector-commitment generators for the bit commitments of the one-of-many proof.
    pub gens: Vec<G1Affine>,
}

impl Crs {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new(CRS_VERSION);
        w.u32(ZK_SECURITY_LEVEL).g1(&self.g).g1(&self.g_hat);
        w.u32(self.gens.len() as u32);
        for p in &self.gens {
            w.g1(p);
        }
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ZkError> {
        let mut r = Reader::versioned(bytes, CRS_VERSION)?;
        let level = r.u32()?;
        if level != ZK_SECURITY_LEVEL {
            return Err(ZkError::UnsupportedSecurityLevel(level));
        }
        let g = r.g1_nonzero()?;
        let g_hat = r.g1_nonzero()?;
        let count = r.u32()? as usize;
        if count != MAX_LOG_N {
            return Err(WireError::Count {
                expected: MAX_LOG_N,
                actual: count,
            }
            .into());
        }
        let gens = (0..count)
            .map(|_| r.g1_nonzero())
            .collect::<Result<Vec<_>, _>>()?;
        r.finish()?;
        Ok(Crs { g, g_hat, gens })
    }

    /// `com(v; r) = sum_j gens_j * v_j + g_hat * r`.
    pub(crate) fn vector_commit(&self, values: &[Scalar], blind: &Scalar) -> crate::primitives::G1 {
        use ark_ec::VariableBaseMSM;
        let mut bases = self.gens[..values.len()].to_vec();
        bases.push(self.g_hat);
        let mut scalars = values.to_vec();
        scalars.push(*blind);
        crate::primitives::G1::msm(&bases, &scalars).expect("equal lengths")
    }
}

pub fn zk_setup(security_level: u32) -> Result<Crs, ZkError> {
    if security_level != ZK_SECURITY_LEVEL {
        return Err(ZkError::UnsupportedSecurityLevel(security_level));
    }
    let gens = (0..MAX_LOG_N)
        .map(|j| hash_to_g1(format!("TT-GK-v1:gen:{j}").as_bytes()))
        .collect();
    Ok(Crs {
        g: hash_to_g1(b"1"),
        g_hat: hash_to_g1(b"2"),
        gens,
    })
}

/// A Pedersen commitment `g^x * g_hat^r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PedersenCommitment {
    #[serde(with = "crate::serde_b64::g1")]
    pub point: G1Affine,
}

impl PedersenCommitment {
    pub fn add(&self, other: &PedersenCommitment) -> PedersenCommitment {
        PedersenCommitment {
            point: (self.point + other.point).into_affine(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.point.is_zero()
    }
}

pub fn pedersen_commit(crs: &Crs, x: &Scalar, r: &Scalar) -> PedersenCommitment {
    PedersenCommitment {
        point: (crs.g * x + crs.g_hat * r).into_affine(),
    }
}
