use std::collections::{HashMap, HashSet};

use rand::{CryptoRng, Rng, RngCore};
use thiserror::Error;

use super::{
    audit_check, AuditError, AuditParams, IssuerClaim, IssuerCommitment, SessionId, Signature,
    UpdateReport, SESSION_TIMEOUT_SECS,
};
use crate::daa::{
    self, Credential, Epoch, IssuerPublicKey, IssuerSecretKey, UpdateMessage,
};
use crate::primitives::{sig_keygen, sig_verify, Digest, SigKeyPair, VerifyKey};
use crate::scheme::{issue_user, JoinError, JoinRequest, SchemeParams, VerificationDb};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IssuerError {
    #[error(transparent)]
    Audit(#[from] AuditError),
    #[error(transparent)]
    Join(#[from] JoinError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SessionState {
    Open,
    Committed {
        user_hash: Digest,
        r_i: [u8; 32],
        commitment: IssuerCommitment,
    },
    Verified {
        c_i: Digest,
    },
    Joined {
        c_i: Digest,
    },
}

impl SessionState {
    pub fn name(&self) -> &'static str {
        match self {
            SessionState::Open => "open",
            SessionState::Committed { .. } => "committed",
            SessionState::Verified { .. } => "verified",
            SessionState::Joined { .. } => "joined",
        }
    }
}

#[derive(Clone, Debug)]
struct Session {
    created: u64,
    state: SessionState,
}

/// Archived record of a completed identity verification, kept past session
/// expiry for audits and epoch rollover.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Registration {
    pub sid: SessionId,
    pub r_i: [u8; 32],
    pub user_hash: Digest,
    pub c_i: Digest,
    pub psi: Signature,
    pub pk_v: VerifyKey,
    pub login: Option<Digest>,
}

/// Ledger operations the issuer needs for epoch rollover.
pub trait CredentialStore {
    type Error: std::fmt::Display;

    fn announce_epoch(&self, epoch: Epoch, pk: &IssuerPublicKey) -> Result<(), Self::Error>;
    fn update_message(&self, login: &Digest) -> Result<Option<UpdateMessage>, Self::Error>;
    fn put_credential(&self, login: &Digest, epoch: Epoch, cred: &Credential) -> Result<(), Self::Error>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SkipReason {
    UnknownVerifier,
    BadSignature,
    UnknownRegistration,
    NotJoined,
    Duplicate,
    NoUpdateMessage,
    InvalidUpdateMessage,
}

#[derive(Clone, Debug)]
pub struct RolloverOutcome {
    pub epoch: Epoch,
    pub reissued: Vec<Digest>,
    pub skipped: Vec<(Digest, SkipReason)>,
}

/// Issuer service state: DAA keys, verification sessions and registrations.
pub struct Issuer {
    params: SchemeParams,
    pk: IssuerPublicKey,
    isk: IssuerSecretKey,
    signing: SigKeyPair,
    audit: AuditParams,
    accredited: HashSet<VerifyKey>,
    sessions: HashMap<SessionId, Session>,
    registrations: HashMap<Digest, Registration>,
    db: VerificationDb,
}

impl Issuer {
    pub fn new<R: RngCore + CryptoRng>(params: SchemeParams, epoch: Epoch, rng: &mut R) -> Self {
        let (pk, isk) = daa::setup2(&params.gpk1, epoch, rng);
        Self::from_parts(params, pk, isk, sig_keygen(rng))
    }

    pub fn from_parts(
        params: SchemeParams,
        pk: IssuerPublicKey,
        isk: IssuerSecretKey,
        signing: SigKeyPair,
    ) -> Self {
        Issuer {
            params,
            pk,
            isk,
            signing,
            audit: AuditParams::default(),
            accredited: HashSet::new(),
            sessions: HashMap::new(),
            registrations: HashMap::new(),
            db: VerificationDb::new(),
        }
    }

    pub fn with_audit_params(mut self, audit: AuditParams) -> Self {
        self.audit = audit;
        self
    }

    pub fn params(&self) -> &SchemeParams {
        &self.params
    }

    pub fn public_key(&self) -> &IssuerPublicKey {
        &self.pk
    }

    pub fn verify_key(&self) -> VerifyKey {
        self.signing.verify_key
    }

    pub fn audit_params(&self) -> AuditParams {
        self.audit
    }

    pub fn accredit(&mut self, pk_v: VerifyKey) {
        self.accredited.insert(pk_v);
    }

    pub fn is_accredited(&self, pk_v: &VerifyKey) -> bool {
        self.accredited.contains(pk_v)
    }

    pub fn session_state(&self, sid: &SessionId) -> Option<&SessionState> {
        self.sessions.get(sid).map(|s| &s.state)
    }

    pub fn registration(&self, c_i: &Digest) -> Option<&Registration> {
        self.registrations.get(c_i)
    }

    pub fn registrations(&self) -> impl Iterator<Item = &Registration> {
        self.registrations.values()
    }

    pub fn open_session<R: RngCore + CryptoRng>(&mut self, now: u64, rng: &mut R) -> SessionId {
        let sid: SessionId = rng.gen();
        self.sessions.insert(
            sid,
            Session {
                created: now,
                state: SessionState::Open,
            },
        );
        sid
    }

    fn live_session(&mut self, sid: &SessionId, now: u64) -> Result<&mut Session, AuditError> {
        let expired = match self.sessions.get(sid) {
            None => return Err(AuditError::UnknownSession),
            Some(s) => now.saturating_sub(s.created) > SESSION_TIMEOUT_SECS,
        };
        if expired {
            self.sessions.remove(sid);
            return Err(AuditError::SessionExpired);
        }
        Ok(self.sessions.get_mut(sid).expect("checked above"))
    }

    /// Step 3: commit to the user hash under a fresh secret nonce.
    pub fn commit<R: RngCore + CryptoRng>(
        &mut self,
        sid: &SessionId,
        user_hash: &Digest,
        now: u64,
        rng: &mut R,
    ) -> Result<IssuerCommitment, AuditError> {
        let signing = self.signing.signing_key.clone();
        let session = self.live_session(sid, now)?;
        if session.state != SessionState::Open {
            return Err(AuditError::WrongState { expected: "open" });
        }
        let (r_i, commitment) = super::issuer_commit(&signing, sid, user_hash, rng);
        session.state = SessionState::Committed {
            user_hash: *user_hash,
            r_i,
            commitment,
        };
        Ok(commitment)
    }

    /// Step 7: accepts the verifier-signed commitment. Returns whether the
    /// session is audited.
    pub fn accept(
        &mut self,
        sid: &SessionId,
        c_i: &Digest,
        psi: &Signature,
        pk_v: &VerifyKey,
        now: u64,
    ) -> Result<bool, AuditError> {
        if !self.accredited.contains(pk_v) {
            return Err(AuditError::UnknownVerifier);
        }
        let audit = self.audit;
        let session = self.live_session(sid, now)?;
        let SessionState::Committed {
            user_hash,
            r_i,
            commitment,
        } = session.state.clone()
        else {
            return Err(AuditError::WrongState {
                expected: "committed",
            });
        };
        if commitment.c_i != *c_i {
            return Err(AuditError::SessionMismatch);
        }
        if !sig_verify(pk_v, c_i.as_bytes(), psi) {
            return Err(AuditError::SignatureInvalid);
        }
        session.state = SessionState::Verified { c_i: *c_i };
        self.registrations.insert(
            *c_i,
            Registration {
                sid: *sid,
                r_i,
                user_hash,
                c_i: *c_i,
                psi: *psi,
                pk_v: *pk_v,
                login: None,
            },
        );
        Ok(audit_check(&r_i, sid, psi, audit))
    }

    /// Join-Issue for a verified session; the session id is the join nonce.
    pub fn join<R: RngCore + CryptoRng>(
        &mut self,
        sid: &SessionId,
        login: &Digest,
        req: &JoinRequest,
        now: u64,
        rng: &mut R,
    ) -> Result<Credential, IssuerError> {
        let session = self.live_session(sid, now)?;
        let SessionState::Verified { c_i } = session.state.clone() else {
            return Err(AuditError::WrongState {
                expected: "verified",
            }
            .into());
        };
        let reg = self.registrations.get(&c_i).expect("verified sessions are registered");
        if self.db.verifier_of(login).is_none() {
            self.db.mark_verified(*login, reg.pk_v);
        }
        let cred = issue_user(
            &self.params,
            &self.pk,
            &self.isk,
            &mut self.db,
            login,
            sid,
            req,
            rng,
        )?;
        self.registrations
            .get_mut(&c_i)
            .expect("verified sessions are registered")
            .login = Some(*login);
        self.sessions
            .get_mut(sid)
            .expect("live session")
            .state = SessionState::Joined { c_i };
        Ok(cred)
    }

    /// Claim against the verifier of an audited registration.
    pub fn claim(&self, c_i: &Digest) -> Result<IssuerClaim, AuditError> {
        let reg = self
            .registrations
            .get(c_i)
            .ok_or(AuditError::UnknownSession)?;
        Ok(IssuerClaim {
            r_i: reg.r_i,
            sid: reg.sid,
            user_hash: reg.user_hash,
            psi: reg.psi,
        })
    }

    /// Drops sessions older than the timeout; registrations are kept.
    pub fn expire(&mut self, now: u64) -> usize {
        let before = self.sessions.len();
        self.sessions
            .retain(|_, s| now.saturating_sub(s.created) <= SESSION_TIMEOUT_SECS);
        before - self.sessions.len()
    }

    /// Starts the next epoch and re-issues credentials for reported
    /// registrations; everyone else is implicitly revoked.
    pub fn epoch_rollover<S: CredentialStore, R: RngCore + CryptoRng>(
        &mut self,
        store: &S,
        reports: &[UpdateReport],
        rng: &mut R,
    ) -> Result<RolloverOutcome, S::Error> {
        let epoch = self.pk.epoch() + 1;
        let (pk, isk) = daa::setup2(&self.params.gpk1, epoch, rng);
        store.announce_epoch(epoch, &pk)?;
        let mut outcome = RolloverOutcome {
            epoch,
            reissued: Vec::new(),
            skipped: Vec::new(),
        };
        let mut done = HashSet::new();
        for report in reports {
            let skip = |outcome: &mut RolloverOutcome, reason| {
                tracing::warn!(c_i = %report.c_i, ?reason, "skipping update report");
                outcome.skipped.push((report.c_i, reason));
            };
            if !self.accredited.contains(&report.pk_v) {
                skip(&mut outcome, SkipReason::UnknownVerifier);
                continue;
            }
            if !report.verify() {
                skip(&mut outcome, SkipReason::BadSignature);
                continue;
            }
            let Some(reg) = self.registrations.get(&report.c_i) else {
                skip(&mut outcome, SkipReason::UnknownRegistration);
                continue;
            };
            if reg.pk_v != report.pk_v {
                skip(&mut outcome, SkipReason::UnknownRegistration);
                continue;
            }
            let Some(login) = reg.login else {
                skip(&mut outcome, SkipReason::NotJoined);
                continue;
            };
            if !done.insert(login) {
                skip(&mut outcome, SkipReason::Duplicate);
                continue;
            }
            let Some(u) = store.update_message(&login)? else {
                skip(&mut outcome, SkipReason::NoUpdateMessage);
                continue;
            };
            match daa::issuer_update(&pk, &u, &isk, rng) {
                Ok(cred) => {
                    store.put_credential(&login, epoch, &cred)?;
                    outcome.reissued.push(login);
                }
                Err(_) => skip(&mut outcome, SkipReason::InvalidUpdateMessage),
            }
        }
        self.pk = pk;
        self.isk = isk;
        Ok(outcome)
    }
}
