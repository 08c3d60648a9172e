use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use tt_core::daa::{Credential, Epoch, IssuerPublicKey, UpdateMessage};
use tt_core::primitives::{hash, Digest};
use tt_core::scheme::{CommentEntry, GenesisTuple};
use tt_core::wire::{Reader, WireError, Writer};

use crate::LedgerError;

const RECORD_VERSION: u8 = 1;
const CHAIN_TAG: &[u8] = b"tt-ledger-chain";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryKind {
    Comment,
    Genesis,
    Credential,
    UpdateMsg,
    Epoch,
}

impl EntryKind {
    pub const ALL: [EntryKind; 5] = [
        EntryKind::Comment,
        EntryKind::Genesis,
        EntryKind::Credential,
        EntryKind::UpdateMsg,
        EntryKind::Epoch,
    ];

    pub fn code(self) -> u8 {
        match self {
            EntryKind::Comment => 1,
            EntryKind::Genesis => 2,
            EntryKind::Credential => 3,
            EntryKind::UpdateMsg => 4,
            EntryKind::Epoch => 5,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        EntryKind::ALL.into_iter().find(|k| k.code() == code)
    }

    pub fn name(self) -> &'static str {
        match self {
            EntryKind::Comment => "comment",
            EntryKind::Genesis => "genesis",
            EntryKind::Credential => "credential",
            EntryKind::UpdateMsg => "update_msg",
            EntryKind::Epoch => "epoch",
        }
    }
}

impl fmt::Display for EntryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EntryKind {
    type Err = LedgerError;

    fn from_str(s: &str) -> Result<Self, LedgerError> {
        EntryKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| LedgerError::ValidationFailed(format!("unknown entry kind {s:?}")))
    }
}

/// A committed ledger record. Comment payloads may be dropped by retention;
/// the payload hash keeps the digest chain verifiable afterwards.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LedgerEntry {
    pub index: u64,
    pub kind: EntryKind,
    pub timestamp: i64,
    pub payload_hash: Digest,
    pub payload: Option<Vec<u8>>,
    pub digest: Digest,
}

impl LedgerEntry {
    pub(crate) fn new(prev: &Digest, index: u64, kind: EntryKind, timestamp: i64, payload: Vec<u8>) -> Self {
        let payload_hash = hash([payload.as_slice()]);
        LedgerEntry {
            index,
            kind,
            timestamp,
            digest: chain_digest(prev, index, kind, timestamp, &payload_hash),
            payload_hash,
            payload: Some(payload),
        }
    }

    /// Serialized size counted by the ledger's byte counter.
    pub fn encoded_len(&self) -> usize {
        self.to_bytes().len()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new(RECORD_VERSION);
        w.u64(self.index)
            .u8(self.kind.code())
            .u64(self.timestamp as u64)
            .bytes(self.payload_hash.as_bytes());
        match &self.payload {
            Some(p) => w.u8(1).bytes(p),
            None => w.u8(0),
        };
        w.bytes(self.digest.as_bytes()).finish()
    }
}

/// `h(tag, prev, index, kind, timestamp, h(payload))`.
pub fn chain_digest(prev: &Digest, index: u64, kind: EntryKind, timestamp: i64, payload_hash: &Digest) -> Digest {
    hash([
        CHAIN_TAG,
        prev.as_bytes(),
        &index.to_be_bytes(),
        &[kind.code()],
        &timestamp.to_be_bytes(),
        payload_hash.as_bytes(),
    ])
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CredentialRecord {
    pub login: Digest,
    pub epoch: Epoch,
    pub credential: Credential,
}

impl CredentialRecord {
    pub fn to_bytes(&self) -> Vec<u8> {
        Writer::new(RECORD_VERSION)
            .bytes(self.login.as_bytes())
            .u64(self.epoch)
            .bytes(&self.credential.to_bytes())
            .finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, LedgerError> {
        let mut r = Reader::versioned(bytes, RECORD_VERSION).map_err(invalid)?;
        let login = Digest(r.array().map_err(invalid)?);
        let epoch = r.u64().map_err(invalid)?;
        let credential = Credential::from_bytes(r.bytes().map_err(invalid)?).map_err(invalid)?;
        r.finish().map_err(invalid)?;
        if credential.epoch != epoch {
            return Err(LedgerError::ValidationFailed(format!(
                "credential epoch {} filed under epoch {epoch}",
                credential.epoch
            )));
        }
        Ok(CredentialRecord { login, epoch, credential })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpdateRecord {
    pub login: Digest,
    pub message: UpdateMessage,
}

impl UpdateRecord {
    pub fn to_bytes(&self) -> Vec<u8> {
        Writer::new(RECORD_VERSION)
            .bytes(self.login.as_bytes())
            .bytes(&self.message.to_bytes())
            .finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, LedgerError> {
        let mut r = Reader::versioned(bytes, RECORD_VERSION).map_err(invalid)?;
        let login = Digest(r.array().map_err(invalid)?);
        let message = UpdateMessage::from_bytes(r.bytes().map_err(invalid)?).map_err(invalid)?;
        r.finish().map_err(invalid)?;
        Ok(UpdateRecord { login, message })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpochRecord {
    pub epoch: Epoch,
    pub issuer_key: IssuerPublicKey,
}

impl EpochRecord {
    pub fn to_bytes(&self) -> Vec<u8> {
        Writer::new(RECORD_VERSION)
            .u64(self.epoch)
            .bytes(&self.issuer_key.to_bytes())
            .finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, LedgerError> {
        let mut r = Reader::versioned(bytes, RECORD_VERSION).map_err(invalid)?;
        let epoch = r.u64().map_err(invalid)?;
        let issuer_key = IssuerPublicKey::from_bytes(r.bytes().map_err(invalid)?).map_err(invalid)?;
        r.finish().map_err(invalid)?;
        if issuer_key.epoch() != epoch {
            return Err(LedgerError::ValidationFailed(format!(
                "issuer key for epoch {} announced as epoch {epoch}",
                issuer_key.epoch()
            )));
        }
        Ok(EpochRecord { epoch, issuer_key })
    }
}

/// A payload decoded and checked for its kind.
#[derive(Clone, Debug)]
pub(crate) enum Validated {
    Comment,
    Genesis(GenesisTuple),
    Credential(CredentialRecord),
    UpdateMsg(UpdateRecord),
    Epoch(EpochRecord),
}

pub(crate) fn validate(kind: EntryKind, payload: &[u8]) -> Result<Validated, LedgerError> {
    Ok(match kind {
        EntryKind::Comment => {
            CommentEntry::from_bytes(payload).map_err(invalid)?;
            Validated::Comment
        }
        EntryKind::Genesis => {
            let gb = GenesisTuple::from_bytes(payload).map_err(|_| LedgerError::InvalidAttestation)?;
            if !gb.verify() {
                return Err(LedgerError::InvalidAttestation);
            }
            Validated::Genesis(gb)
        }
        EntryKind::Credential => Validated::Credential(CredentialRecord::from_bytes(payload)?),
        EntryKind::UpdateMsg => Validated::UpdateMsg(UpdateRecord::from_bytes(payload)?),
        EntryKind::Epoch => Validated::Epoch(EpochRecord::from_bytes(payload)?),
    })
}

fn invalid(e: impl fmt::Display) -> LedgerError {
    LedgerError::ValidationFailed(e.to_string())
}

impl From<WireError> for LedgerError {
    fn from(e: WireError) -> Self {
        invalid(e)
    }
}
