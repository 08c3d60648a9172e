//! Single-node append-only ledger.
//!
//! Stores encrypted comment entries, genesis tuples, credentials and update
//! messages keyed by hashed login, and epoch announcements. Every entry extends
//! a digest chain. Websites feed decrypted pseudonyms back through
//! [`Ledger::register_nym`], which maintains per-period freshness counts.
//! With a journal attached, each mutation is synced to disk before it is
//! acknowledged, and reopening the journal replays the exact state.

mod entry;
mod journal;
mod ledger;
mod nym_index;
mod shared;

use thiserror::Error;

pub use entry::{chain_digest, CredentialRecord, EntryKind, EpochRecord, LedgerEntry, UpdateRecord};
pub use ledger::{Clock, Ledger, RETENTION_PERIODS};
pub use nym_index::NymIndex;
pub use shared::{PeriodView, SharedLedger};

#[derive(Debug, Error)]
pub enum LedgerError {
    #[error("validation failed: {0}")]
    ValidationFailed(String),
    #[error("not found")]
    NotFound,
    #[error("a credential for this login already exists in epoch {epoch}")]
    DuplicateEpochCredential { epoch: u64 },
    #[error("genesis tuple attestation does not verify")]
    InvalidAttestation,
    #[error("epoch {requested} does not follow current epoch {current}")]
    NonMonotoneEpoch { current: u64, requested: u64 },
    #[error("journal corrupt at offset {offset}: {reason}")]
    Corrupt { offset: u64, reason: String },
    #[error("journal entry {index} does not replay: {reason}")]
    Replay { index: u64, reason: String },
    #[error("torn journal frame at offset {offset}")]
    Torn { offset: u64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
