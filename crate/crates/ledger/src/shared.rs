use std::collections::BTreeMap;
use std::convert::Infallible;
use std::sync::Arc;

use ark_bn254::G1Affine;
use chrono::NaiveDate;
use parking_lot::{RwLock, RwLockReadGuard, RwLockWriteGuard};
use tt_core::audit::CredentialStore;
use tt_core::daa::{Credential, Epoch, IssuerPublicKey, UpdateMessage};
use tt_core::primitives::{Digest, VerifyKey};
use tt_core::scheme::{CommentEntry, GenesisTuple, GenesisView, GenesisWindow, NymLookup, NymRegistry};

use crate::{EntryKind, Ledger, LedgerError};

/// Thread-safe handle: mutations serialize on a write lock, reads share it.
#[derive(Clone)]
pub struct SharedLedger {
    inner: Arc<RwLock<Ledger>>,
}

impl From<Ledger> for SharedLedger {
    fn from(ledger: Ledger) -> Self {
        SharedLedger {
            inner: Arc::new(RwLock::new(ledger)),
        }
    }
}

impl Default for SharedLedger {
    fn default() -> Self {
        Ledger::in_memory().into()
    }
}

impl SharedLedger {
    pub fn read(&self) -> RwLockReadGuard<'_, Ledger> {
        self.inner.read()
    }

    pub fn write(&self) -> RwLockWriteGuard<'_, Ledger> {
        self.inner.write()
    }

    pub fn append(&self, kind: EntryKind, payload: Vec<u8>) -> Result<u64, LedgerError> {
        self.write().append(kind, payload)
    }

    pub fn append_comment(&self, entry: &CommentEntry) -> Result<u64, LedgerError> {
        self.write().append_comment(entry)
    }

    pub fn append_genesis(&self, gb: &GenesisTuple) -> Result<u64, LedgerError> {
        self.write().append_genesis(gb)
    }

    pub fn put_credential(&self, login: &Digest, epoch: Epoch, cred: &Credential) -> Result<u64, LedgerError> {
        self.write().put_credential(login, epoch, cred)
    }

    pub fn put_update_message(&self, login: &Digest, u: &UpdateMessage) -> Result<u64, LedgerError> {
        self.write().put_update_message(login, u)
    }

    pub fn announce_epoch(&self, epoch: Epoch, pk: &IssuerPublicKey) -> Result<u64, LedgerError> {
        self.write().announce_epoch(epoch, pk)
    }

    pub fn register_nym(&self, period: NaiveDate, nym: &G1Affine) -> Result<bool, LedgerError> {
        self.write().register_nym(period, nym)
    }

    pub fn nym_count(&self, nym: &G1Affine) -> u64 {
        self.read().nym_count(nym)
    }

    pub fn get_credential(&self, login: &Digest, epoch: Epoch) -> Result<Credential, LedgerError> {
        self.read().get_credential(login, epoch)
    }

    pub fn update_message(&self, login: &Digest) -> Option<UpdateMessage> {
        self.read().update_message(login)
    }

    pub fn list_genesis(&self, offset: usize, limit: usize) -> Vec<GenesisTuple> {
        self.read().list_genesis(offset, limit)
    }

    pub fn verifier_stats(&self) -> BTreeMap<VerifyKey, u64> {
        self.read().verifier_stats().clone()
    }

    pub fn current_epoch(&self) -> Option<Epoch> {
        self.read().current_epoch()
    }

    pub fn bytes_appended(&self) -> u64 {
        self.read().bytes_appended()
    }

    /// Registry and lookup bound to one commenting period.
    pub fn in_period(&self, period: NaiveDate) -> PeriodView<'_> {
        PeriodView { ledger: self, period }
    }
}

/// [`SharedLedger`] seen from a single commenting period.
pub struct PeriodView<'a> {
    ledger: &'a SharedLedger,
    period: NaiveDate,
}

impl NymRegistry for PeriodView<'_> {
    type Error = LedgerError;

    fn register_nym(&self, nym: &G1Affine) -> Result<bool, LedgerError> {
        self.ledger.register_nym(self.period, nym)
    }
}

impl NymLookup for PeriodView<'_> {
    type Error = Infallible;

    fn nym_count(&self, nym: &G1Affine) -> Result<u64, Infallible> {
        Ok(self.ledger.read().nym_count_in(self.period, nym))
    }
}

/// Registers into the period of the ledger clock.
impl NymRegistry for SharedLedger {
    type Error = LedgerError;

    fn register_nym(&self, nym: &G1Affine) -> Result<bool, LedgerError> {
        let mut ledger = self.write();
        let today = ledger.today();
        ledger.register_nym(today, nym)
    }
}

impl NymLookup for SharedLedger {
    type Error = Infallible;

    fn nym_count(&self, nym: &G1Affine) -> Result<u64, Infallible> {
        Ok(SharedLedger::nym_count(self, nym))
    }
}

impl GenesisView for SharedLedger {
    fn window(&self, w: &GenesisWindow) -> Option<Vec<G1Affine>> {
        let offset = usize::try_from(w.offset).ok()?;
        let len = w.len as usize;
        let tuples = self.list_genesis(offset, len);
        (tuples.len() == len).then(|| tuples.iter().map(|gb| gb.nym1).collect())
    }
}

impl CredentialStore for SharedLedger {
    type Error = LedgerError;

    fn announce_epoch(&self, epoch: Epoch, pk: &IssuerPublicKey) -> Result<(), LedgerError> {
        SharedLedger::announce_epoch(self, epoch, pk).map(drop)
    }

    fn update_message(&self, login: &Digest) -> Result<Option<UpdateMessage>, LedgerError> {
        Ok(SharedLedger::update_message(self, login))
    }

    fn put_credential(&self, login: &Digest, epoch: Epoch, cred: &Credential) -> Result<(), LedgerError> {
        SharedLedger::put_credential(self, login, epoch, cred).map(drop)
    }
}
