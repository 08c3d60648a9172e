//! JSON bodies shared by the services and the client. Binary fields are
//! standard base64; digests and keys in paths are hex.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use tt_core::audit::{IssuerCommitment, SessionId, Signature, UpdateReport};
use tt_core::daa::Epoch;
use tt_core::primitives::{Digest, VerifyKey};
use tt_core::scheme::GenesisTuple;
use tt_ledger::EntryKind;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AppendRequest {
    pub kind: EntryKind,
    #[serde(with = "tt_core::serde_b64::bytes")]
    pub payload: Vec<u8>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct IndexResponse {
    pub index: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EntryResponse {
    pub index: u64,
    pub kind: EntryKind,
    pub timestamp: i64,
    /// Absent once retention has dropped the payload.
    #[serde(default, with = "opt_b64")]
    pub payload: Option<Vec<u8>>,
    pub payload_hash: Digest,
    pub digest: Digest,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct HeadResponse {
    pub len: u64,
    pub head: Digest,
    pub bytes_appended: u64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CountResponse {
    pub count: u64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct FreshResponse {
    pub fresh: bool,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct PeriodQuery {
    /// `YYYY-MM-DD`; defaults to the ledger's current day.
    pub period: Option<String>,
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct EpochQuery {
    pub epoch: Option<Epoch>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CredentialResponse {
    pub login: Digest,
    pub epoch: Epoch,
    #[serde(with = "tt_core::serde_b64::bytes")]
    pub credential: Vec<u8>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UpdateResponse {
    pub login: Digest,
    #[serde(with = "tt_core::serde_b64::bytes")]
    pub message: Vec<u8>,
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct GenesisQuery {
    pub offset: Option<usize>,
    pub limit: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GenesisPage {
    pub total: usize,
    pub offset: usize,
    pub tuples: Vec<GenesisTuple>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StatsResponse {
    /// Hex verifier key to number of attested genesis tuples.
    pub stats: BTreeMap<String, u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EpochRequest {
    pub epoch: Epoch,
    #[serde(with = "tt_core::serde_b64::bytes")]
    pub issuer_key: Vec<u8>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EpochResponse {
    pub epoch: Option<Epoch>,
    #[serde(default, with = "opt_b64")]
    pub issuer_key: Option<Vec<u8>>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SessionResponse {
    #[serde(with = "tt_core::serde_b64::array")]
    pub sid: SessionId,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CommitRequest {
    pub user_hash: Digest,
}

pub type CommitResponse = IssuerCommitment;

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PsiRequest {
    pub c_i: Digest,
    #[serde(with = "tt_core::serde_b64::array")]
    pub psi: Signature,
    pub pk_v: VerifyKey,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PsiResponse {
    pub audited: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JoinBody {
    pub login: Digest,
    /// Encoded join request: commitment plus proof.
    #[serde(with = "tt_core::serde_b64::bytes")]
    pub request: Vec<u8>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JoinResponse {
    pub epoch: Epoch,
    #[serde(with = "tt_core::serde_b64::bytes")]
    pub credential: Vec<u8>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RolloverRequest {
    pub reports: Vec<UpdateReport>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SkippedReport {
    pub c_i: Digest,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RolloverResponse {
    pub epoch: Epoch,
    pub reissued: Vec<Digest>,
    pub skipped: Vec<SkippedReport>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IssuerKeyResponse {
    pub epoch: Epoch,
    #[serde(with = "tt_core::serde_b64::bytes")]
    pub issuer_key: Vec<u8>,
    pub verify_key: VerifyKey,
    pub audit_bits: u32,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct AccreditRequest {
    pub verify_key: VerifyKey,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AttestRequest {
    #[serde(with = "tt_core::serde_b64::bytes")]
    pub nbd: Vec<u8>,
    #[serde(with = "tt_core::serde_b64::array")]
    pub r_u: [u8; 32],
    pub commitment: IssuerCommitment,
    #[serde(with = "tt_core::serde_b64::bytes")]
    pub evidence: Vec<u8>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct AttestResponse {
    #[serde(with = "tt_core::serde_b64::array")]
    pub psi: Signature,
    pub pk_v: VerifyKey,
}

mod opt_b64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Vec<u8>>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(b) => s.serialize_some(&tt_core::serde_b64::encode(b)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<u8>>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| tt_core::serde_b64::decode(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}
