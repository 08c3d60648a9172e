use std::collections::{HashMap, HashSet};

use rand::{CryptoRng, RngCore};
use thiserror::Error;

use super::genesis::{genesis_nym, GenesisTuple};
use super::params::SchemeParams;
use crate::daa::{
    self, Credential, DaaError, IssuerPublicKey, IssuerSecretKey, JoinCommitment, MemberSecretKey,
};
use crate::primitives::{Digest, VerifyKey};
use crate::wire::{Reader, WireError, Writer};
use crate::zkp::{prove_join, verify_join, JoinProof, ZkError};

const VERSION: u8 = 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JoinError {
    #[error("join proof is invalid")]
    ProofInvalid,
    #[error("user has not been verified by an identity verifier")]
    NotVerified,
    #[error("user already holds a credential")]
    AlreadyJoined,
    #[error("issued credential does not verify")]
    CredentialInvalid,
    #[error("genesis tuple does not match the member key")]
    GenesisMismatch,
    #[error(transparent)]
    Daa(#[from] DaaError),
    #[error(transparent)]
    Zk(#[from] ZkError),
    #[error(transparent)]
    Wire(#[from] WireError),
}

/// `(com, Pi_Join)` as sent from user to issuer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JoinRequest {
    pub com: JoinCommitment,
    pub proof: JoinProof,
}

impl JoinRequest {
    pub fn to_bytes(&self) -> Vec<u8> {
        Writer::new(VERSION)
            .bytes(&self.com.to_bytes())
            .bytes(&self.proof.to_bytes())
            .finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, JoinError> {
        let mut r = Reader::versioned(bytes, VERSION)?;
        let req = JoinRequest {
            com: JoinCommitment::from_bytes(r.bytes()?)?,
            proof: JoinProof::from_bytes(r.bytes()?)?,
        };
        r.finish()?;
        Ok(req)
    }
}

/// Issuer-side record of which users a verifier has vouched for, keyed by
/// login digest.
#[derive(Clone, Debug, Default)]
pub struct VerificationDb {
    verified: HashMap<Digest, VerifyKey>,
    joined: HashSet<Digest>,
}

impl VerificationDb {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn mark_verified(&mut self, user: Digest, verifier: VerifyKey) {
        self.verified.insert(user, verifier);
    }

    pub fn verifier_of(&self, user: &Digest) -> Option<VerifyKey> {
        self.verified.get(user).copied()
    }

    pub fn has_joined(&self, user: &Digest) -> bool {
        self.joined.contains(user)
    }

    pub fn joined_count(&self) -> usize {
        self.joined.len()
    }
}

/// A member's long-term state after a successful join.
#[derive(Clone, Debug)]
pub struct Member {
    pub sk: MemberSecretKey,
    pub cred: Credential,
    pub genesis: Option<GenesisTuple>,
}

pub fn join_request<R: RngCore + CryptoRng>(
    params: &SchemeParams,
    pk: &IssuerPublicKey,
    sk: &MemberSecretKey,
    nonce: &[u8],
    rng: &mut R,
) -> Result<JoinRequest, JoinError> {
    let com = daa::join(&params.gpk1, sk, nonce, rng)?;
    let proof = prove_join(&params.crs, &com, pk, sk, rng);
    Ok(JoinRequest { com, proof })
}

/// Issues a credential to `user` if a verifier vouched for them and the
/// request carries a valid proof for `nonce`.
#[allow(clippy::too_many_arguments)]
pub fn issue_user<R: RngCore + CryptoRng>(
    params: &SchemeParams,
    pk: &IssuerPublicKey,
    isk: &IssuerSecretKey,
    db: &mut VerificationDb,
    user: &Digest,
    nonce: &[u8],
    req: &JoinRequest,
    rng: &mut R,
) -> Result<Credential, JoinError> {
    if db.verifier_of(user).is_none() {
        return Err(JoinError::NotVerified);
    }
    if db.has_joined(user) {
        return Err(JoinError::AlreadyJoined);
    }
    if req.com.nonce != nonce || !verify_join(&params.crs, &req.com, pk, &req.proof) {
        return Err(JoinError::ProofInvalid);
    }
    let cred = daa::issue(pk, isk, &req.com, rng).map_err(|_| JoinError::ProofInvalid)?;
    db.joined.insert(*user);
    Ok(cred)
}

/// User side: checks the credential and, in extended mode, the genesis tuple.
pub fn join_user(
    pk: &IssuerPublicKey,
    sk: MemberSecretKey,
    cred: Credential,
    genesis: Option<GenesisTuple>,
) -> Result<Member, JoinError> {
    if !cred.verify(pk, &sk) {
        return Err(JoinError::CredentialInvalid);
    }
    if let Some(gb) = &genesis {
        if !gb.verify() || gb.nym1 != genesis_nym(&sk) {
            return Err(JoinError::GenesisMismatch);
        }
    }
    Ok(Member { sk, cred, genesis })
}
