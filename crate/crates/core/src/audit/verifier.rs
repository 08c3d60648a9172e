use std::collections::HashMap;
use std::sync::Mutex;

use super::{verifier_attest, AuditError, IssuerCommitment, Signature, UpdateReport, VerifierEvidence};
use crate::primitives::{Digest, SigKeyPair, VerifyKey};

type IdentityCheck = Box<dyn Fn(&[u8], &[u8]) -> bool + Send + Sync>;

/// Identity verifier with an archive of evidence kept for audits.
pub struct Verifier {
    keys: SigKeyPair,
    issuer: VerifyKey,
    identity_check: IdentityCheck,
    archive: Mutex<HashMap<Digest, VerifierEvidence>>,
}

impl Verifier {
    /// The default identity check accepts any nonempty evidence.
    pub fn new(keys: SigKeyPair, issuer: VerifyKey) -> Self {
        Verifier {
            keys,
            issuer,
            identity_check: Box::new(|_, evidence| !evidence.is_empty()),
            archive: Mutex::new(HashMap::new()),
        }
    }

    pub fn with_identity_check(
        mut self,
        check: impl Fn(&[u8], &[u8]) -> bool + Send + Sync + 'static,
    ) -> Self {
        self.identity_check = Box::new(check);
        self
    }

    pub fn verify_key(&self) -> VerifyKey {
        self.keys.verify_key
    }

    pub fn signing_keys(&self) -> &SigKeyPair {
        &self.keys
    }

    /// Checks the user and signs the issuer commitment, archiving the
    /// evidence under `c_I`.
    pub fn attest(
        &self,
        nbd: &[u8],
        r_u: &[u8; 32],
        commitment: &IssuerCommitment,
        evidence: &[u8],
    ) -> Result<Signature, AuditError> {
        let psi = verifier_attest(
            &self.keys.signing_key,
            &self.issuer,
            nbd,
            commitment,
            evidence,
            &*self.identity_check,
        )?;
        self.archive.lock().unwrap_or_else(|e| e.into_inner()).insert(
            commitment.c_i,
            VerifierEvidence {
                evidence: evidence.to_vec(),
                r_u: *r_u,
                nbd: nbd.to_vec(),
            },
        );
        Ok(psi)
    }

    pub fn respond_audit(&self, c_i: &Digest) -> Option<VerifierEvidence> {
        self.archive
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .get(c_i)
            .cloned()
    }

    /// Signed update reports for every archived registration still considered valid.
    pub fn update_reports(&self, still_valid: impl Fn(&Digest) -> bool) -> Vec<UpdateReport> {
        let archive = self.archive.lock().unwrap_or_else(|e| e.into_inner());
        let mut ids: Vec<_> = archive.keys().filter(|c| still_valid(c)).copied().collect();
        ids.sort();
        ids.iter()
            .map(|c_i| UpdateReport::sign(&self.keys.signing_key, c_i))
            .collect()
    }
}
