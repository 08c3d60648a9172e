use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use chrono::{DateTime, Days, NaiveDate};
use tt_core::daa::{Credential, Epoch, IssuerPublicKey, UpdateMessage};
use tt_core::primitives::{encode_g1, hash, Digest, VerifyKey};
use tt_core::scheme::{CommentEntry, GenesisTuple};
use tt_core::wire::Writer;

use ark_bn254::G1Affine;

use crate::entry::{validate, CredentialRecord, EntryKind, EpochRecord, LedgerEntry, UpdateRecord, Validated};
use crate::journal::{Journal, Record};
use crate::nym_index::NymIndex;
use crate::LedgerError;

/// Comment entries older than this many commenting periods lose their payload on purge.
pub const RETENTION_PERIODS: u64 = 30;

/// Source of entry timestamps, in seconds since the Unix epoch.
pub type Clock = Arc<dyn Fn() -> i64 + Send + Sync>;

fn system_clock() -> Clock {
    Arc::new(|| chrono::Utc::now().timestamp())
}

pub struct Ledger {
    entries: Vec<LedgerEntry>,
    head: Digest,
    bytes_appended: u64,
    nyms: NymIndex,
    credentials: BTreeMap<(Digest, Epoch), u64>,
    updates: BTreeMap<Digest, u64>,
    genesis: Vec<u64>,
    stats: BTreeMap<VerifyKey, u64>,
    epochs: BTreeMap<Epoch, u64>,
    purged_before: Option<NaiveDate>,
    journal: Option<Journal>,
    clock: Clock,
}

impl Default for Ledger {
    fn default() -> Self {
        Self::in_memory()
    }
}

impl Ledger {
    pub fn in_memory() -> Self {
        Ledger {
            entries: Vec::new(),
            head: Digest([0; 32]),
            bytes_appended: 0,
            nyms: NymIndex::default(),
            credentials: BTreeMap::new(),
            updates: BTreeMap::new(),
            genesis: Vec::new(),
            stats: BTreeMap::new(),
            epochs: BTreeMap::new(),
            purged_before: None,
            journal: None,
            clock: system_clock(),
        }
    }

    /// Opens the journal at `path`, creating it if needed, and replays it.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, LedgerError> {
        let (journal, records) = Journal::open(path.as_ref())?;
        let mut ledger = Ledger::in_memory();
        for rec in records {
            ledger.replay(rec)?;
        }
        ledger.journal = Some(journal);
        Ok(ledger)
    }

    pub fn with_clock(mut self, clock: Clock) -> Self {
        self.clock = clock;
        self
    }

    pub fn journal_path(&self) -> Option<&Path> {
        self.journal.as_ref().map(Journal::path)
    }

    /// The commenting period of the ledger clock.
    pub fn today(&self) -> NaiveDate {
        DateTime::from_timestamp((self.clock)(), 0)
            .unwrap_or_default()
            .date_naive()
    }

    fn replay(&mut self, rec: Record) -> Result<(), LedgerError> {
        match rec {
            Record::Entry { index, kind, timestamp, payload, digest } => {
                let corrupt = |reason: String| LedgerError::Replay { index, reason };
                let v = validate(kind, &payload).map_err(|e| corrupt(e.to_string()))?;
                self.check(&v).map_err(|e| corrupt(e.to_string()))?;
                let entry = LedgerEntry::new(&self.head, self.entries.len() as u64, kind, timestamp, payload);
                if entry.index != index || entry.digest != digest {
                    return Err(corrupt("entry does not extend the digest chain".into()));
                }
                self.apply(entry, v);
            }
            Record::Nym { period, nym } => {
                self.nyms.register(period, nym);
            }
            Record::Purge { cutoff } => {
                self.apply_purge(cutoff);
            }
        }
        Ok(())
    }

    fn write(&mut self, rec: &Record) -> Result<(), LedgerError> {
        match &mut self.journal {
            Some(j) => j.write(rec),
            None => Ok(()),
        }
    }

    /// Validates `payload` for `kind` and appends it. The entry is durable
    /// before the index is returned.
    pub fn append(&mut self, kind: EntryKind, payload: Vec<u8>) -> Result<u64, LedgerError> {
        let v = validate(kind, &payload)?;
        self.check(&v)?;
        let entry = LedgerEntry::new(&self.head, self.entries.len() as u64, kind, (self.clock)(), payload);
        self.write(&Record::Entry {
            index: entry.index,
            kind,
            timestamp: entry.timestamp,
            payload: entry.payload.clone().expect("fresh entries carry their payload"),
            digest: entry.digest,
        })?;
        let index = entry.index;
        self.apply(entry, v);
        Ok(index)
    }

    fn check(&self, v: &Validated) -> Result<(), LedgerError> {
        match v {
            Validated::Credential(rec) if self.credentials.contains_key(&(rec.login, rec.epoch)) => {
                Err(LedgerError::DuplicateEpochCredential { epoch: rec.epoch })
            }
            Validated::Epoch(rec) => match self.current_epoch() {
                Some(current) if rec.epoch <= current => Err(LedgerError::NonMonotoneEpoch {
                    current,
                    requested: rec.epoch,
                }),
                _ => Ok(()),
            },
            _ => Ok(()),
        }
    }

    fn apply(&mut self, entry: LedgerEntry, v: Validated) {
        let index = entry.index;
        match v {
            Validated::Comment => {}
            Validated::Genesis(gb) => {
                self.genesis.push(index);
                *self.stats.entry(gb.pk_v).or_insert(0) += 1;
            }
            Validated::Credential(rec) => {
                self.credentials.insert((rec.login, rec.epoch), index);
            }
            Validated::UpdateMsg(rec) => {
                self.updates.insert(rec.login, index);
            }
            Validated::Epoch(rec) => {
                self.epochs.insert(rec.epoch, index);
            }
        }
        self.bytes_appended += entry.encoded_len() as u64;
        self.head = entry.digest;
        self.entries.push(entry);
    }

    pub fn append_comment(&mut self, entry: &CommentEntry) -> Result<u64, LedgerError> {
        self.append(EntryKind::Comment, entry.to_bytes())
    }

    pub fn append_genesis(&mut self, gb: &GenesisTuple) -> Result<u64, LedgerError> {
        self.append(EntryKind::Genesis, gb.to_bytes())
    }

    pub fn put_credential(&mut self, login: &Digest, epoch: Epoch, cred: &Credential) -> Result<u64, LedgerError> {
        let rec = CredentialRecord {
            login: *login,
            epoch,
            credential: cred.clone(),
        };
        self.append(EntryKind::Credential, rec.to_bytes())
    }

    pub fn put_update_message(&mut self, login: &Digest, u: &UpdateMessage) -> Result<u64, LedgerError> {
        let rec = UpdateRecord {
            login: *login,
            message: u.clone(),
        };
        self.append(EntryKind::UpdateMsg, rec.to_bytes())
    }

    pub fn announce_epoch(&mut self, epoch: Epoch, pk: &IssuerPublicKey) -> Result<u64, LedgerError> {
        let rec = EpochRecord {
            epoch,
            issuer_key: pk.clone(),
        };
        self.append(EntryKind::Epoch, rec.to_bytes())
    }

    /// Counts `nym` in `period` and reports whether this was its first use.
    pub fn register_nym(&mut self, period: NaiveDate, nym: &G1Affine) -> Result<bool, LedgerError> {
        let nym = encode_g1(nym);
        self.write(&Record::Nym { period, nym })?;
        Ok(self.nyms.register(period, nym))
    }

    /// Occurrences of `nym` in the current period.
    pub fn nym_count(&self, nym: &G1Affine) -> u64 {
        self.nyms.count(&encode_g1(nym))
    }

    pub fn nym_count_in(&self, period: NaiveDate, nym: &G1Affine) -> u64 {
        self.nyms.count_in(period, &encode_g1(nym))
    }

    pub fn nym_index(&self) -> &NymIndex {
        &self.nyms
    }

    fn payload(&self, index: u64) -> &[u8] {
        self.entries[index as usize]
            .payload
            .as_deref()
            .expect("only comment payloads are purged")
    }

    pub fn get_credential(&self, login: &Digest, epoch: Epoch) -> Result<Credential, LedgerError> {
        let index = self.credentials.get(&(*login, epoch)).ok_or(LedgerError::NotFound)?;
        Ok(CredentialRecord::from_bytes(self.payload(*index))?.credential)
    }

    /// The most recent update message filed for `login`.
    pub fn update_message(&self, login: &Digest) -> Option<UpdateMessage> {
        let index = self.updates.get(login)?;
        UpdateRecord::from_bytes(self.payload(*index)).ok().map(|r| r.message)
    }

    pub fn genesis_count(&self) -> usize {
        self.genesis.len()
    }

    /// Genesis tuples in ledger order.
    pub fn list_genesis(&self, offset: usize, limit: usize) -> Vec<GenesisTuple> {
        self.genesis
            .iter()
            .skip(offset)
            .take(limit)
            .map(|i| GenesisTuple::from_bytes(self.payload(*i)).expect("validated on append"))
            .collect()
    }

    /// Number of genesis tuples attested by each verifier.
    pub fn verifier_stats(&self) -> &BTreeMap<VerifyKey, u64> {
        &self.stats
    }

    pub fn current_epoch(&self) -> Option<Epoch> {
        self.epochs.keys().next_back().copied()
    }

    pub fn issuer_key(&self, epoch: Epoch) -> Option<IssuerPublicKey> {
        let index = self.epochs.get(&epoch)?;
        EpochRecord::from_bytes(self.payload(*index)).ok().map(|r| r.issuer_key)
    }

    /// Drops payloads of comment entries whose basename date is more than
    /// [`RETENTION_PERIODS`] days before `today`, along with archived nym
    /// counts of those periods. Returns the number of entries pruned.
    pub fn purge(&mut self, today: NaiveDate) -> Result<usize, LedgerError> {
        let Some(cutoff) = today.checked_sub_days(Days::new(RETENTION_PERIODS)) else {
            return Ok(0);
        };
        if self.purged_before.is_some_and(|p| p >= cutoff) {
            return Ok(0);
        }
        self.write(&Record::Purge { cutoff })?;
        Ok(self.apply_purge(cutoff))
    }

    fn apply_purge(&mut self, cutoff: NaiveDate) -> usize {
        let mut pruned = 0;
        for entry in &mut self.entries {
            if entry.kind != EntryKind::Comment {
                continue;
            }
            let Some(payload) = &entry.payload else { continue };
            let old = CommentEntry::from_bytes(payload).is_ok_and(|c| c.dom.date < cutoff);
            if old {
                entry.payload = None;
                pruned += 1;
            }
        }
        self.nyms.purge_before(cutoff);
        self.purged_before = Some(self.purged_before.map_or(cutoff, |p| p.max(cutoff)));
        pruned
    }

    pub fn len(&self) -> u64 {
        self.entries.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry(&self, index: u64) -> Option<&LedgerEntry> {
        self.entries.get(index as usize)
    }

    pub fn entries(&self) -> &[LedgerEntry] {
        &self.entries
    }

    /// Digest of the newest entry; all zeros for an empty ledger.
    pub fn head(&self) -> Digest {
        self.head
    }

    /// Total serialized size of every entry ever appended.
    pub fn bytes_appended(&self) -> u64 {
        self.bytes_appended
    }

    /// Recomputes the digest chain from the stored payload hashes.
    pub fn verify_chain(&self) -> bool {
        let mut prev = Digest([0; 32]);
        for (i, e) in self.entries.iter().enumerate() {
            let payload_ok = e
                .payload
                .as_ref()
                .is_none_or(|p| hash([p.as_slice()]) == e.payload_hash);
            let digest = crate::chain_digest(&prev, i as u64, e.kind, e.timestamp, &e.payload_hash);
            if !payload_ok || e.index != i as u64 || digest != e.digest {
                return false;
            }
            prev = digest;
        }
        prev == self.head
    }

    /// Canonical encoding of the complete ledger state.
    pub fn state_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new(1);
        w.u64(self.entries.len() as u64);
        for e in &self.entries {
            w.bytes(&e.to_bytes());
        }
        w.bytes(self.head.as_bytes()).u64(self.bytes_appended);
        self.nyms.encode(&mut w);
        w.u64(self.credentials.len() as u64);
        for ((login, epoch), i) in &self.credentials {
            w.bytes(login.as_bytes()).u64(*epoch).u64(*i);
        }
        w.u64(self.updates.len() as u64);
        for (login, i) in &self.updates {
            w.bytes(login.as_bytes()).u64(*i);
        }
        w.u64(self.genesis.len() as u64);
        for i in &self.genesis {
            w.u64(*i);
        }
        w.u64(self.stats.len() as u64);
        for (pk, n) in &self.stats {
            w.bytes(&pk.0).u64(*n);
        }
        w.u64(self.epochs.len() as u64);
        for (e, i) in &self.epochs {
            w.u64(*e).u64(*i);
        }
        match self.purged_before {
            Some(d) => w.u8(1).bytes(d.to_string().as_bytes()),
            None => w.u8(0),
        };
        w.finish()
    }

    pub fn state_digest(&self) -> Digest {
        hash([self.state_bytes().as_slice()])
    }
}
