//! Blocking HTTP clients for the three services.
//!
//! `reqwest`'s blocking client owns a runtime, so create and drop these
//! outside async contexts.

use std::collections::BTreeMap;

use ark_bn254::G1Affine;
use chrono::NaiveDate;
use reqwest::blocking::{Client, Response};
use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;
use tt_core::audit::{
    CredentialStore, IssuerClaim, IssuerCommitment, SessionId, Signature, UpdateReport,
    VerifierEvidence,
};
use tt_core::daa::{Credential, Epoch, IssuerPublicKey, UpdateMessage};
use tt_core::primitives::{encode_g1, Digest, VerifyKey};
use tt_core::scheme::{
    CommentEntry, GenesisTuple, GenesisView, GenesisWindow, JoinRequest, NymLookup, NymRegistry,
};
use tt_ledger::{CredentialRecord, EntryKind, UpdateRecord};

use crate::api::*;

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("{status} {code}: {message}")]
    Api {
        status: u16,
        code: String,
        message: String,
    },
    #[error("transport: {0}")]
    Transport(#[from] reqwest::Error),
    #[error("undecodable response: {0}")]
    Decode(String),
}

impl ClientError {
    pub fn code(&self) -> Option<&str> {
        match self {
            ClientError::Api { code, .. } => Some(code),
            _ => None,
        }
    }
}

#[derive(Clone)]
struct Http {
    base: String,
    client: Client,
}

impl Http {
    fn new(base: &str) -> Self {
        Http {
            base: base.trim_end_matches('/').to_string(),
            client: Client::new(),
        }
    }

    fn finish<T: DeserializeOwned>(resp: Response) -> Result<T, ClientError> {
        let status = resp.status();
        if status.is_success() {
            return resp.json().map_err(|e| ClientError::Decode(e.to_string()));
        }
        let body: ErrorBody = resp.json().unwrap_or_else(|e| ErrorBody {
            code: "unknown".into(),
            message: e.to_string(),
        });
        Err(ClientError::Api {
            status: status.as_u16(),
            code: body.code,
            message: body.message,
        })
    }

    fn get<T: DeserializeOwned>(&self, path: &str, query: &[(&str, String)]) -> Result<T, ClientError> {
        let resp = self.client.get(format!("{}{path}", self.base)).query(query).send()?;
        Self::finish(resp)
    }

    fn post<B: Serialize, T: DeserializeOwned>(
        &self,
        path: &str,
        query: &[(&str, String)],
        body: &B,
    ) -> Result<T, ClientError> {
        let resp = self
            .client
            .post(format!("{}{path}", self.base))
            .query(query)
            .json(body)
            .send()?;
        Self::finish(resp)
    }

    fn post_empty(&self, path: &str, body: &impl Serialize) -> Result<(), ClientError> {
        let resp = self.client.post(format!("{}{path}", self.base)).json(body).send()?;
        if resp.status().is_success() {
            return Ok(());
        }
        Self::finish::<()>(resp)
    }
}

fn decode<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, ClientError> {
    r.map_err(|e| ClientError::Decode(e.to_string()))
}

#[derive(Clone)]
pub struct LedgerClient {
    http: Http,
}

impl LedgerClient {
    pub fn new(base_url: &str) -> Self {
        LedgerClient {
            http: Http::new(base_url),
        }
    }

    pub fn append(&self, kind: EntryKind, payload: Vec<u8>) -> Result<u64, ClientError> {
        let r: IndexResponse = self.http.post("/entries", &[], &AppendRequest { kind, payload })?;
        Ok(r.index)
    }

    pub fn append_comment(&self, entry: &CommentEntry) -> Result<u64, ClientError> {
        self.append(EntryKind::Comment, entry.to_bytes())
    }

    pub fn append_genesis(&self, gb: &GenesisTuple) -> Result<u64, ClientError> {
        self.append(EntryKind::Genesis, gb.to_bytes())
    }

    pub fn put_credential(&self, login: &Digest, epoch: Epoch, cred: &Credential) -> Result<u64, ClientError> {
        let rec = CredentialRecord {
            login: *login,
            epoch,
            credential: cred.clone(),
        };
        self.append(EntryKind::Credential, rec.to_bytes())
    }

    pub fn put_update_message(&self, login: &Digest, u: &UpdateMessage) -> Result<u64, ClientError> {
        let rec = UpdateRecord {
            login: *login,
            message: u.clone(),
        };
        self.append(EntryKind::UpdateMsg, rec.to_bytes())
    }

    pub fn entry(&self, index: u64) -> Result<EntryResponse, ClientError> {
        self.http.get(&format!("/entries/{index}"), &[])
    }

    pub fn head(&self) -> Result<HeadResponse, ClientError> {
        self.http.get("/head", &[])
    }

    fn period_query(period: Option<NaiveDate>) -> Vec<(&'static str, String)> {
        period.map(|p| ("period", p.to_string())).into_iter().collect()
    }

    pub fn register_nym(&self, period: Option<NaiveDate>, nym: &G1Affine) -> Result<bool, ClientError> {
        let path = format!("/nyms/{}/register", hex::encode(encode_g1(nym)));
        let r: FreshResponse = self.http.post(&path, &Self::period_query(period), &())?;
        Ok(r.fresh)
    }

    pub fn nym_count(&self, period: Option<NaiveDate>, nym: &G1Affine) -> Result<u64, ClientError> {
        let path = format!("/nyms/{}", hex::encode(encode_g1(nym)));
        let r: CountResponse = self.http.get(&path, &Self::period_query(period))?;
        Ok(r.count)
    }

    pub fn get_credential(&self, login: &Digest, epoch: Option<Epoch>) -> Result<Credential, ClientError> {
        let query: Vec<_> = epoch.map(|e| ("epoch", e.to_string())).into_iter().collect();
        let r: CredentialResponse = self.http.get(&format!("/credentials/{}", login.to_hex()), &query)?;
        decode(Credential::from_bytes(&r.credential))
    }

    pub fn list_genesis(&self, offset: usize, limit: usize) -> Result<GenesisPage, ClientError> {
        self.http.get(
            "/genesis",
            &[("offset", offset.to_string()), ("limit", limit.to_string())],
        )
    }

    pub fn verifier_stats(&self) -> Result<BTreeMap<String, u64>, ClientError> {
        let r: StatsResponse = self.http.get("/genesis/stats", &[])?;
        Ok(r.stats)
    }

    pub fn announce_epoch(&self, epoch: Epoch, pk: &IssuerPublicKey) -> Result<u64, ClientError> {
        let body = EpochRequest {
            epoch,
            issuer_key: pk.to_bytes(),
        };
        let r: IndexResponse = self.http.post("/epoch", &[], &body)?;
        Ok(r.index)
    }

    /// Current epoch and its issuer key, if any epoch was announced.
    pub fn current_epoch(&self) -> Result<Option<(Epoch, IssuerPublicKey)>, ClientError> {
        let r: EpochResponse = self.http.get("/epoch", &[])?;
        match (r.epoch, r.issuer_key) {
            (Some(e), Some(pk)) => Ok(Some((e, decode(IssuerPublicKey::from_bytes(&pk))?))),
            _ => Ok(None),
        }
    }

    pub fn in_period(&self, period: NaiveDate) -> RemotePeriod<'_> {
        RemotePeriod { client: self, period }
    }
}

/// [`LedgerClient`] bound to one commenting period.
pub struct RemotePeriod<'a> {
    client: &'a LedgerClient,
    period: NaiveDate,
}

impl NymRegistry for RemotePeriod<'_> {
    type Error = ClientError;

    fn register_nym(&self, nym: &G1Affine) -> Result<bool, ClientError> {
        self.client.register_nym(Some(self.period), nym)
    }
}

impl NymLookup for RemotePeriod<'_> {
    type Error = ClientError;

    fn nym_count(&self, nym: &G1Affine) -> Result<u64, ClientError> {
        self.client.nym_count(Some(self.period), nym)
    }
}

impl CredentialStore for LedgerClient {
    type Error = ClientError;

    fn announce_epoch(&self, epoch: Epoch, pk: &IssuerPublicKey) -> Result<(), ClientError> {
        LedgerClient::announce_epoch(self, epoch, pk).map(drop)
    }

    fn update_message(&self, login: &Digest) -> Result<Option<UpdateMessage>, ClientError> {
        let path = format!("/updates/{}", login.to_hex());
        match self.http.get::<UpdateResponse>(&path, &[]) {
            Ok(r) => Ok(Some(decode(UpdateMessage::from_bytes(&r.message))?)),
            Err(e) if e.code() == Some("not_found") => Ok(None),
            Err(e) => Err(e),
        }
    }

    fn put_credential(&self, login: &Digest, epoch: Epoch, cred: &Credential) -> Result<(), ClientError> {
        LedgerClient::put_credential(self, login, epoch, cred).map(drop)
    }
}

impl GenesisView for LedgerClient {
    fn window(&self, w: &GenesisWindow) -> Option<Vec<G1Affine>> {
        let offset = usize::try_from(w.offset).ok()?;
        let mut nyms = Vec::with_capacity(w.len as usize);
        while nyms.len() < w.len as usize {
            let page = self
                .list_genesis(offset + nyms.len(), w.len as usize - nyms.len())
                .ok()?;
            if page.tuples.is_empty() {
                return None;
            }
            nyms.extend(page.tuples.iter().map(|gb| gb.nym1));
        }
        Some(nyms)
    }
}

#[derive(Clone)]
pub struct IssuerClient {
    http: Http,
}

impl IssuerClient {
    pub fn new(base_url: &str) -> Self {
        IssuerClient {
            http: Http::new(base_url),
        }
    }

    pub fn public_key(&self) -> Result<(IssuerPublicKey, VerifyKey, u32), ClientError> {
        let r: IssuerKeyResponse = self.http.get("/public-key", &[])?;
        Ok((decode(IssuerPublicKey::from_bytes(&r.issuer_key))?, r.verify_key, r.audit_bits))
    }

    pub fn accredit(&self, verify_key: VerifyKey) -> Result<(), ClientError> {
        self.http.post_empty("/verifiers", &AccreditRequest { verify_key })
    }

    pub fn open_session(&self) -> Result<SessionId, ClientError> {
        let r: SessionResponse = self.http.post("/sessions", &[], &())?;
        Ok(r.sid)
    }

    pub fn commit(&self, sid: &SessionId, user_hash: &Digest) -> Result<IssuerCommitment, ClientError> {
        let path = format!("/sessions/{}/commit", hex::encode(sid));
        self.http.post(&path, &[], &CommitRequest { user_hash: *user_hash })
    }

    pub fn accept(&self, sid: &SessionId, c_i: &Digest, psi: &Signature, pk_v: &VerifyKey) -> Result<bool, ClientError> {
        let path = format!("/sessions/{}/psi", hex::encode(sid));
        let body = PsiRequest {
            c_i: *c_i,
            psi: *psi,
            pk_v: *pk_v,
        };
        let r: PsiResponse = self.http.post(&path, &[], &body)?;
        Ok(r.audited)
    }

    pub fn join(&self, sid: &SessionId, login: &Digest, req: &JoinRequest) -> Result<Credential, ClientError> {
        let path = format!("/sessions/{}/join", hex::encode(sid));
        let body = JoinBody {
            login: *login,
            request: req.to_bytes(),
        };
        let r: JoinResponse = self.http.post(&path, &[], &body)?;
        decode(Credential::from_bytes(&r.credential))
    }

    pub fn claim(&self, c_i: &Digest) -> Result<IssuerClaim, ClientError> {
        self.http.get(&format!("/claims/{}", c_i.to_hex()), &[])
    }

    pub fn rollover(&self, reports: &[UpdateReport]) -> Result<RolloverResponse, ClientError> {
        let body = RolloverRequest {
            reports: reports.to_vec(),
        };
        self.http.post("/epoch/rollover", &[], &body)
    }
}

#[derive(Clone)]
pub struct VerifierClient {
    http: Http,
}

impl VerifierClient {
    pub fn new(base_url: &str) -> Self {
        VerifierClient {
            http: Http::new(base_url),
        }
    }

    pub fn attest(&self, req: &AttestRequest) -> Result<AttestResponse, ClientError> {
        self.http.post("/attest", &[], req)
    }

    pub fn audit(&self, c_i: &Digest) -> Result<VerifierEvidence, ClientError> {
        self.http.get(&format!("/audits/{}", c_i.to_hex()), &[])
    }

    pub fn update_reports(&self) -> Result<Vec<UpdateReport>, ClientError> {
        self.http.get("/update-reports", &[])
    }
}
