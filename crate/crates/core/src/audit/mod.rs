//! Identity verification through an accredited verifier, blinded by issuer
//! commitments, with audits triggered by a hash coin neither side controls.
//!
//! The issuer commits to `c_I = h(r_I, sid, h(r_U, nbd, "1"))` and the verifier
//! signs `c_I` after checking the user's identity. An audit happens when the
//! first `L` bits of `h(r_I, sid, "2")` and `h(psi)` agree. The issuer fixed
//! `r_I` before `psi` existed and the verifier never sees `r_I`, so neither can
//! steer the outcome.

mod issuer;
mod verifier;

use rand::{CryptoRng, Rng, RngCore};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::daa::MemberSecretKey;
use crate::primitives::{hash, kdf, sig_sign, sig_verify, Digest, SigningKey, VerifyKey};

pub use issuer::{
    CredentialStore, Issuer, IssuerError, Registration, RolloverOutcome, SessionState, SkipReason,
};
pub use verifier::Verifier;

/// Default number of compared bits; audits happen with probability 2^-7.
pub const DEFAULT_AUDIT_BITS: u32 = 7;
pub const SESSION_TIMEOUT_SECS: u64 = 3600;

pub type SessionId = [u8; 32];
pub type Signature = [u8; 64];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AuditError {
    #[error("unknown session")]
    UnknownSession,
    #[error("session expired")]
    SessionExpired,
    #[error("session is not in the {expected} state")]
    WrongState { expected: &'static str },
    #[error("verifier signature is invalid")]
    SignatureInvalid,
    #[error("verifier is not accredited")]
    UnknownVerifier,
    #[error("commitment belongs to a different session")]
    SessionMismatch,
    #[error("issuer signature on the commitment is invalid")]
    BadIssuerSignature,
    #[error("identity check failed")]
    IdentityCheckFailed,
    #[error("audit parameter L = {0} is outside 0..=256")]
    InvalidAuditBits(u32),
    #[error("malformed claim: {0}")]
    MalformedClaim(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditParams {
    bits: u32,
}

impl AuditParams {
    pub fn new(bits: u32) -> Result<Self, AuditError> {
        if bits > 256 {
            return Err(AuditError::InvalidAuditBits(bits));
        }
        Ok(AuditParams { bits })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }
}

impl Default for AuditParams {
    fn default() -> Self {
        AuditParams {
            bits: DEFAULT_AUDIT_BITS,
        }
    }
}

/// State the user keeps from the start of identity verification.
#[derive(Clone, Debug)]
pub struct UserSession {
    pub sk: MemberSecretKey,
    pub r_u: [u8; 32],
    pub user_hash: Digest,
}

/// `h(r_U, nbd, "1")`.
pub fn user_hash(r_u: &[u8; 32], nbd: &[u8]) -> Digest {
    hash([r_u.as_slice(), nbd, b"1"])
}

/// `c_I = h(r_I, sid, user_hash)`.
pub fn commitment_digest(r_i: &[u8; 32], sid: &SessionId, user_hash: &Digest) -> Digest {
    hash([r_i.as_slice(), sid, user_hash.as_bytes()])
}

/// Derives the member key from `(login, pw)` and blinds the user's data.
pub fn user_begin<R: RngCore + CryptoRng>(
    login: &str,
    pw: &str,
    nbd: &[u8],
    rng: &mut R,
) -> UserSession {
    user_begin_with_key(kdf(login, pw), nbd, rng)
}

pub fn user_begin_with_key<R: RngCore + CryptoRng>(
    sk: MemberSecretKey,
    nbd: &[u8],
    rng: &mut R,
) -> UserSession {
    let r_u: [u8; 32] = rng.gen();
    UserSession {
        sk,
        user_hash: user_hash(&r_u, nbd),
        r_u,
    }
}

/// What the issuer sends back after committing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IssuerCommitment {
    pub c_i: Digest,
    #[serde(with = "crate::serde_b64::array")]
    pub sig_i: Signature,
}

/// Returns the secret nonce `r_I` alongside the signed commitment.
pub fn issuer_commit<R: RngCore + CryptoRng>(
    sk_i: &SigningKey,
    sid: &SessionId,
    user_hash: &Digest,
    rng: &mut R,
) -> ([u8; 32], IssuerCommitment) {
    let r_i: [u8; 32] = rng.gen();
    let c_i = commitment_digest(&r_i, sid, user_hash);
    let sig_i = sig_sign(sk_i, c_i.as_bytes());
    (r_i, IssuerCommitment { c_i, sig_i })
}

/// Verifier side of step 6: checks the issuer signature and the identity
/// predicate, then signs `c_I`.
#[allow(clippy::too_many_arguments)]
pub fn verifier_attest(
    sk_v: &SigningKey,
    pk_i: &VerifyKey,
    nbd: &[u8],
    commitment: &IssuerCommitment,
    evidence: &[u8],
    identity_check: &dyn Fn(&[u8], &[u8]) -> bool,
) -> Result<Signature, AuditError> {
    if !sig_verify(pk_i, commitment.c_i.as_bytes(), &commitment.sig_i) {
        return Err(AuditError::BadIssuerSignature);
    }
    if !identity_check(nbd, evidence) {
        return Err(AuditError::IdentityCheckFailed);
    }
    Ok(sig_sign(sk_v, commitment.c_i.as_bytes()))
}

/// Whether the session is audited: the first `L` bits of `h(r_I, sid, "2")`
/// and `h(psi)` coincide.
pub fn audit_check(r_i: &[u8; 32], sid: &SessionId, psi: &[u8], params: AuditParams) -> bool {
    let s = hash([r_i.as_slice(), sid, b"2"]);
    let s_prime = hash([psi]);
    s.prefix_eq(&s_prime, params.bits)
}

/// Published by the issuer when an audited verifier does not answer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IssuerClaim {
    #[serde(with = "crate::serde_b64::array")]
    pub r_i: [u8; 32],
    #[serde(with = "crate::serde_b64::array")]
    pub sid: SessionId,
    pub user_hash: Digest,
    #[serde(with = "crate::serde_b64::array")]
    pub psi: Signature,
}

impl IssuerClaim {
    pub fn from_json(s: &str) -> Result<Self, AuditError> {
        serde_json::from_str(s).map_err(|e| AuditError::MalformedClaim(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("claims always serialize")
    }
}

/// The verifier's answer to an audit: the identity evidence and the opening
/// of the user hash.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifierEvidence {
    #[serde(with = "crate::serde_b64::bytes")]
    pub evidence: Vec<u8>,
    #[serde(with = "crate::serde_b64::array")]
    pub r_u: [u8; 32],
    #[serde(with = "crate::serde_b64::bytes")]
    pub nbd: Vec<u8>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditVerdict {
    /// The claim is well-formed, signed by the verifier, and the session was audited.
    pub claim_accepted: bool,
    /// The verifier produced evidence matching the committed user hash.
    pub verifier_exonerated: bool,
}

/// Public judgement on an issuer claim and the verifier's response.
pub fn public_audit_verify(
    claim: &IssuerClaim,
    pk_v: &VerifyKey,
    response: Option<&VerifierEvidence>,
    params: AuditParams,
) -> AuditVerdict {
    let c_i = commitment_digest(&claim.r_i, &claim.sid, &claim.user_hash);
    let claim_accepted = sig_verify(pk_v, c_i.as_bytes(), &claim.psi)
        && audit_check(&claim.r_i, &claim.sid, &claim.psi, params);
    let verifier_exonerated = response.is_some_and(|resp| {
        !resp.evidence.is_empty() && user_hash(&resp.r_u, &resp.nbd) == claim.user_hash
    });
    AuditVerdict {
        claim_accepted,
        verifier_exonerated,
    }
}

/// Verifier-signed statement that the registration behind `c_i` is still valid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpdateReport {
    pub pk_v: VerifyKey,
    pub c_i: Digest,
    #[serde(with = "crate::serde_b64::array")]
    pub sig: Signature,
}

fn update_message(c_i: &Digest) -> Vec<u8> {
    [b"update".as_slice(), c_i.as_bytes()].concat()
}

impl UpdateReport {
    pub fn sign(sk_v: &SigningKey, c_i: &Digest) -> Self {
        UpdateReport {
            pk_v: sk_v.verify_key(),
            c_i: *c_i,
            sig: sig_sign(sk_v, &update_message(c_i)),
        }
    }

    pub fn verify(&self) -> bool {
        sig_verify(&self.pk_v, &update_message(&self.c_i), &self.sig)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::sig_keygen;
    use rand::thread_rng;

    #[test]
    fn audit_bits_bounds() {
        let mut rng = thread_rng();
        for _ in 0..50 {
            let (r_i, sid, psi): ([u8; 32], [u8; 32], [u8; 64]) = (rng.gen(), rng.gen(), [rng.gen::<u8>(); 64]);
            assert!(audit_check(&r_i, &sid, &psi, AuditParams::new(0).unwrap()));
            assert!(!audit_check(&r_i, &sid, &psi, AuditParams::new(256).unwrap()));
        }
        assert_eq!(AuditParams::new(257), Err(AuditError::InvalidAuditBits(257)));
        assert_eq!(AuditParams::default().bits(), 7);
    }

    #[test]
    fn attest_checks_issuer_signature_and_identity() {
        let mut rng = thread_rng();
        let issuer = sig_keygen(&mut rng);
        let verifier = sig_keygen(&mut rng);
        let us = user_begin_with_key(MemberSecretKey::random(&mut rng), b"alice|1990", &mut rng);
        let sid: SessionId = rng.gen();
        let (_, com) = issuer_commit(&issuer.signing_key, &sid, &us.user_hash, &mut rng);
        let ok = |_: &[u8], e: &[u8]| !e.is_empty();
        let psi = verifier_attest(&verifier.signing_key, &issuer.verify_key, b"alice|1990", &com, b"passport", &ok).unwrap();
        assert!(sig_verify(&verifier.verify_key, com.c_i.as_bytes(), &psi));

        let mut forged = com;
        forged.sig_i[3] ^= 1;
        assert_eq!(
            verifier_attest(&verifier.signing_key, &issuer.verify_key, b"x", &forged, b"e", &ok),
            Err(AuditError::BadIssuerSignature)
        );
        assert_eq!(
            verifier_attest(&verifier.signing_key, &issuer.verify_key, b"x", &com, b"", &ok),
            Err(AuditError::IdentityCheckFailed)
        );
    }

    #[test]
    fn kdf_derivation_is_stable_and_hash_is_fresh() {
        let mut rng = thread_rng();
        let a = user_begin("alice", "pw", b"nbd", &mut rng);
        let b = user_begin("alice", "pw", b"nbd", &mut rng);
        assert_eq!(a.sk, b.sk);
        assert_ne!(a.user_hash, b.user_hash);
        assert_eq!(user_hash(&a.r_u, b"nbd"), a.user_hash);
    }

    #[test]
    fn claim_json_round_trip() {
        let claim = IssuerClaim {
            r_i: [1; 32],
            sid: [2; 32],
            user_hash: Digest([3; 32]),
            psi: [4; 64],
        };
        assert_eq!(IssuerClaim::from_json(&claim.to_json()).unwrap(), claim);
        assert!(matches!(IssuerClaim::from_json("{\"r_i\":\"AA==\"}"), Err(AuditError::MalformedClaim(_))));
    }
}
